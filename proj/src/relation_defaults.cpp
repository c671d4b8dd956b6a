#include "lmkb/prompt.hpp"

namespace lmkb {

// Per-relation winners for style and empty-answer representation, the five
// relations that run fact probing, the declarative fact phrasings, and the
// curated entity types admitted into each alias index.
RelationConfig default_config(Relation relation) {
    using R = Relation;
    using S = PromptStyle;
    using E = EmptyMode;
    switch (relation) {
        case R::kCountryBordersWithCountry:
            return {relation, S::kNaturalLanguage, E::kEmptyList, false,
                    "{subject} neighbours {object}",
                    {"Q6256", "Q3624078"},
                    {"Niger", "Libya"},
                    {"Fiji", "Germany"}};
        case R::kCountryOfficialLanguage:
            return {relation, S::kTriple, E::kEmptyList, true,
                    "{object} is an official language of {subject}",
                    {"Q34770", "Q1288568"},
                    {"Suriname", "Dutch"},
                    {"Canada", "Japanese"}};
        case R::kStateSharesBorderState:
            return {relation, S::kNaturalLanguage, E::kEmptyList, false,
                    "{subject} shares a border with {object}",
                    {"Q7275", "Q107390"},
                    {"Liguria", "Tuscany"},
                    {"Liguria", "Bavaria"}};
        case R::kRiverBasinsCountry:
            return {relation, S::kTriple, E::kEmptyList, false,
                    "the river {subject} flows through {object}",
                    {"Q6256", "Q3624078"},
                    {"Oise", "France"},
                    {"Oise", "China"}};
        case R::kChemicalCompoundElement:
            return {relation, S::kTriple, E::kEmptyList, false,
                    "{subject} contains the element {object}",
                    {"Q11344"},
                    {"Water", "Oxygen"},
                    {"Water", "Gold"}};
        case R::kPersonLanguage:
            return {relation, S::kTriple, E::kEmptyList, true,
                    "{subject} speaks {object}",
                    {"Q34770", "Q1288568"},
                    {"Shakira", "Spanish"},
                    {"Pharrell Williams", "Hungarian"}};
        case R::kPersonProfession:
            return {relation, S::kNaturalLanguage, E::kEmptyList, false,
                    "{subject} works as {object}",
                    {"Q28640"},
                    {"David Guetta", "DJ"},
                    {"David Guetta", "Astronaut"}};
        case R::kPersonInstrument:
            return {relation, S::kTriple, E::kNoneString, true,
                    "{subject} plays the instrument {object}",
                    {"Q34379"},
                    {"Liam Gallagher", "Guitar"},
                    {"Jay Park", "Violin"}};
        case R::kPersonEmployer:
            return {relation, S::kNaturalLanguage, E::kEmptyList, false,
                    "{subject} is or was employed by {object}",
                    {"Q4830453", "Q43229"},
                    {"Susan Wojcicki", "Google"},
                    {"Steve Wozniak", "Google"}};
        case R::kPersonPlaceOfDeath:
            return {relation, S::kNaturalLanguage, E::kEmptyList, false,
                    "{subject} died in {object}",
                    {"Q515", "Q486972"},
                    {"Ennio Morricone", "Rome"},
                    {"Prince", "Paris"}};
        case R::kPersonCauseOfDeath:
            return {relation, S::kTriple, E::kNoneString, true,
                    "{subject} died of {object}",
                    {"Q12136", "Q1931388"},
                    {"Jamal Khashoggi", "Murder"},
                    {"André Leon Talley", "Drowning"}};
        case R::kCompanyParentOrganization:
            return {relation, S::kTriple, E::kNoneString, true,
                    "{object} is the parent organization of {subject}",
                    {"Q4830453", "Q43229"},
                    {"Sony", "Sony Group"},
                    {"Microsoft", "Apple"}};
    }
    throw TemplateError("unknown relation");
}

}  // namespace lmkb
