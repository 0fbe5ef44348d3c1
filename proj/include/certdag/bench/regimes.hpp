#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "certdag/core/dataset.hpp"
#include "certdag/core/types.hpp"

namespace certdag::bench {

enum class Regime : std::uint8_t { LinGauss, Lsnm, Pnl, Discrete, NearDet };
inline constexpr Regime kAllRegimes[] = {Regime::LinGauss, Regime::Lsnm, Regime::Pnl, Regime::Discrete,
                                         Regime::NearDet};

std::string_view to_string(Regime r);
std::optional<Regime> regime_from_string(std::string_view s);

struct RegimeSpec {
  Regime regime = Regime::LinGauss;
  int n_pairs = 40;
  int n_samples = 2000;
  std::uint64_t seed = 0;
};

/// One synthetic cause-effect pair: a two-column dataset and the true orientation of
/// column 0 -> column 1 (Fwd) or column 1 -> column 0 (Bwd).
struct RegimePair {
  Dataset data;
  Direction truth = Direction::Fwd;
};

/// Structural families:
///   R_LIN_GAUSS  Y = aX + N, X and N Gaussian
///   R_LSNM       Y = f(X) + g(X) e, e Gaussian, g non-constant
///   R_PNL        Y = h(f(X) + e), h strictly monotone
///   R_DISCRETE   integer X with small support, Y = f(X) + N, N in {-1, 0, 1}
///   R_NEAR_DET   X uniform, Y = f(X) + vanishing noise, f monotone nonlinear
/// Column order is decided per pair by a seeded coin.
std::vector<RegimePair> generate_regime(const RegimeSpec& spec);

}  // namespace certdag::bench
