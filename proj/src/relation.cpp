#include "lmkb/relation.hpp"

namespace lmkb {

namespace {

constexpr std::array<std::string_view, kRelationCount> kNames = {
    "CountryBordersWithCountry",
    "CountryOfficialLanguage",
    "StateSharesBorderState",
    "RiverBasinsCountry",
    "ChemicalCompoundElement",
    "PersonLanguage",
    "PersonProfession",
    "PersonInstrument",
    "PersonEmployer",
    "PersonPlaceOfDeath",
    "PersonCauseOfDeath",
    "CompanyParentOrganization",
};

constexpr std::array<Relation, kRelationCount> kAll = {
    Relation::kCountryBordersWithCountry, Relation::kCountryOfficialLanguage,
    Relation::kStateSharesBorderState,    Relation::kRiverBasinsCountry,
    Relation::kChemicalCompoundElement,   Relation::kPersonLanguage,
    Relation::kPersonProfession,          Relation::kPersonInstrument,
    Relation::kPersonEmployer,            Relation::kPersonPlaceOfDeath,
    Relation::kPersonCauseOfDeath,        Relation::kCompanyParentOrganization,
};

}  // namespace

std::string_view relation_name(Relation r) { return kNames[static_cast<size_t>(r)]; }

std::optional<Relation> relation_from_name(std::string_view name) {
    for (size_t i = 0; i < kNames.size(); ++i) {
        if (kNames[i] == name) return kAll[i];
    }
    return std::nullopt;
}

std::span<const Relation> all_relations() { return kAll; }

}  // namespace lmkb
