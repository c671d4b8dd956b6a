#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace lmkb {

// The closed set of relation types; unknown names are rejected at load time.
enum class Relation {
    kCountryBordersWithCountry,
    kCountryOfficialLanguage,
    kStateSharesBorderState,
    kRiverBasinsCountry,
    kChemicalCompoundElement,
    kPersonLanguage,
    kPersonProfession,
    kPersonInstrument,
    kPersonEmployer,
    kPersonPlaceOfDeath,
    kPersonCauseOfDeath,
    kCompanyParentOrganization,
};

inline constexpr size_t kRelationCount = 12;

std::string_view relation_name(Relation r);
std::optional<Relation> relation_from_name(std::string_view name);
std::span<const Relation> all_relations();

}  // namespace lmkb
