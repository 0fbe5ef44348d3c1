#include "certdag/core/types.hpp"

#include <utility>

namespace certdag {

namespace {

constexpr std::array<std::pair<CertificateCode, std::string_view>, 13> kCertNames{{
    {CertificateCode::ResolvedDecisive, "RESOLVED_DECISIVE"},
    {CertificateCode::ResolvedMediated, "RESOLVED_MEDIATED"},
    {CertificateCode::ImpossibleR1, "IMPOSSIBLE_R1"},
    {CertificateCode::ImpossibleLatentLikely, "IMPOSSIBLE_LATENT_LIKELY"},
    {CertificateCode::ImpossibleRegressorInconsistent, "IMPOSSIBLE_REGRESSOR_INCONSISTENT"},
    {CertificateCode::ImpossibleNonlinearWeak, "IMPOSSIBLE_NONLINEAR_WEAK"},
    {CertificateCode::ImpossibleHocAmbiguous, "IMPOSSIBLE_HOC_AMBIGUOUS"},
    {CertificateCode::ImpossibleAmbiguous, "IMPOSSIBLE_AMBIGUOUS"},
    {CertificateCode::ImpossibleL0DisagreesWithHighTier, "IMPOSSIBLE_L0_DISAGREES_WITH_HIGH_TIER"},
    {CertificateCode::ImpossibleCircular, "IMPOSSIBLE_CIRCULAR"},
    {CertificateCode::ImpossibleBinaryContinuous, "IMPOSSIBLE_BINARY_CONTINUOUS"},
    {CertificateCode::ImpossibleCount, "IMPOSSIBLE_COUNT"},
    {CertificateCode::ImpossibleHighCardinalityDiscrete, "IMPOSSIBLE_HIGH_CARDINALITY_DISCRETE"},
}};

constexpr std::array<std::string_view, 8> kTierNames{"L0",    "L1",    "L_LSNM", "L_IGCI",
                                                     "L_STEIN", "L_MDL", "L2",     "L_PEIT"};

constexpr std::array<std::string_view, 24> kMechanismNames{
    "M1",  "M2",  "M3",  "M4",  "M5",     "M6",     "M7",      "M8",
    "M9",  "M10", "M11", "M12", "M13",    "M14",    "M15",     "L0",
    "L1",  "L_LSNM", "L_IGCI", "L_STEIN", "L_MDL", "L2", "L_PEIT", "ORACLE"};

}  // namespace

std::string_view to_string(Direction d) { return d == Direction::Fwd ? "FWD" : "BWD"; }

std::string_view to_string(CertificateCode c) {
  for (const auto& [code, name] : kCertNames)
    if (code == c) return name;
  return "?";
}

std::optional<CertificateCode> certificate_from_string(std::string_view s) {
  for (const auto& [code, name] : kCertNames)
    if (name == s) return code;
  return std::nullopt;
}

std::string_view to_string(Tier t) { return kTierNames[static_cast<std::size_t>(t)]; }

std::optional<Tier> tier_from_string(std::string_view s) {
  for (std::size_t k = 0; k < kTierNames.size(); ++k)
    if (kTierNames[k] == s) return static_cast<Tier>(k);
  return std::nullopt;
}

Mechanism mechanism_of(Tier t) {
  return static_cast<Mechanism>(static_cast<int>(Mechanism::L0) + static_cast<int>(t));
}

std::string_view to_string(Mechanism m) { return kMechanismNames[static_cast<std::size_t>(m)]; }

std::optional<Mechanism> mechanism_from_string(std::string_view s) {
  for (std::size_t k = 0; k < kMechanismNames.size(); ++k)
    if (kMechanismNames[k] == s) return static_cast<Mechanism>(k);
  return std::nullopt;
}

}  // namespace certdag
