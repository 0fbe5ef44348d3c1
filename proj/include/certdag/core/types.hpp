#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace certdag {

/// Unordered candidate pair, stored with i < j by column index.
struct Pair {
  int i = 0;
  int j = 0;

  static Pair of(int a, int b) {
    if (a == b) throw std::invalid_argument("pair endpoints must differ");
    return a < b ? Pair{a, b} : Pair{b, a};
  }
  bool contains(int v) const { return v == i || v == j; }
  int other(int v) const { return v == i ? j : i; }

  auto operator<=>(const Pair&) const = default;
};

/// FWD means i -> j for the pair (i, j); BWD means j -> i.
enum class Direction : std::uint8_t { Fwd, Bwd };

inline Direction opposite(Direction d) { return d == Direction::Fwd ? Direction::Bwd : Direction::Fwd; }
std::string_view to_string(Direction d);

/// Orientation of `p` that makes `from` the parent.
inline Direction direction_from(Pair p, int from) { return from == p.i ? Direction::Fwd : Direction::Bwd; }
inline int parent_of(Pair p, Direction d) { return d == Direction::Fwd ? p.i : p.j; }
inline int child_of(Pair p, Direction d) { return d == Direction::Fwd ? p.j : p.i; }

enum class CertificateCode : std::uint8_t {
  ResolvedDecisive,
  ResolvedMediated,
  ImpossibleR1,
  ImpossibleLatentLikely,
  ImpossibleRegressorInconsistent,
  ImpossibleNonlinearWeak,
  ImpossibleHocAmbiguous,
  ImpossibleAmbiguous,
  ImpossibleL0DisagreesWithHighTier,
  ImpossibleCircular,
  ImpossibleBinaryContinuous,
  ImpossibleCount,
  ImpossibleHighCardinalityDiscrete,
};

inline constexpr std::array kAllCertificates = {
    CertificateCode::ResolvedDecisive,
    CertificateCode::ResolvedMediated,
    CertificateCode::ImpossibleR1,
    CertificateCode::ImpossibleLatentLikely,
    CertificateCode::ImpossibleRegressorInconsistent,
    CertificateCode::ImpossibleNonlinearWeak,
    CertificateCode::ImpossibleHocAmbiguous,
    CertificateCode::ImpossibleAmbiguous,
    CertificateCode::ImpossibleL0DisagreesWithHighTier,
    CertificateCode::ImpossibleCircular,
    CertificateCode::ImpossibleBinaryContinuous,
    CertificateCode::ImpossibleCount,
    CertificateCode::ImpossibleHighCardinalityDiscrete,
};

std::string_view to_string(CertificateCode c);
std::optional<CertificateCode> certificate_from_string(std::string_view s);
inline bool is_impossible(CertificateCode c) {
  return c != CertificateCode::ResolvedDecisive && c != CertificateCode::ResolvedMediated;
}

/// Cascade tiers in lattice order.
enum class Tier : std::uint8_t { L0, L1, LSNM, IGCI, Stein, MDL, L2, PEIT };

inline constexpr std::array kLatticeOrder = {Tier::L0,    Tier::L1,  Tier::LSNM, Tier::IGCI,
                                             Tier::Stein, Tier::MDL, Tier::L2,   Tier::PEIT};

std::string_view to_string(Tier t);
std::optional<Tier> tier_from_string(std::string_view s);

/// Who made a decision: one of the fifteen mechanisms, a cascade tier, or the oracle.
enum class Mechanism : std::uint8_t {
  M1, M2, M3, M4, M5, M6, M7, M8, M9, M10, M11, M12, M13, M14, M15,
  L0, L1, LSNM, IGCI, Stein, MDL, L2, PEIT,
  Oracle,
};

Mechanism mechanism_of(Tier t);
std::string_view to_string(Mechanism m);
std::optional<Mechanism> mechanism_from_string(std::string_view s);

/// Set of enabled tiers.
class TierMask {
 public:
  static TierMask all() { return TierMask(0xFF); }
  static TierMask none() { return TierMask(0); }
  static TierMask of(std::initializer_list<Tier> tiers) {
    TierMask m;
    for (Tier t : tiers) m.set(t);
    return m;
  }
  bool has(Tier t) const { return bits_ & bit(t); }
  void set(Tier t, bool on = true) { bits_ = on ? (bits_ | bit(t)) : (bits_ & ~bit(t)); }
  std::uint8_t bits() const { return bits_; }
  bool operator==(const TierMask&) const = default;

 private:
  explicit TierMask(std::uint8_t b = 0) : bits_(b) {}
  static std::uint8_t bit(Tier t) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(t)); }
  std::uint8_t bits_ = 0;
};

/// Error raised with a stable machine-readable code.
class CertdagError : public std::runtime_error {
 public:
  CertdagError(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

}  // namespace certdag
