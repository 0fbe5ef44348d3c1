#include "certdag/bench/regimes.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "certdag/stats/transforms.hpp"

namespace certdag::bench {

namespace {

using Rng = std::mt19937_64;

double unif(Rng& r, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(r); }
double gauss(Rng& r) { return std::normal_distribution<double>(0.0, 1.0)(r); }
int pick(Rng& r, int n) { return std::uniform_int_distribution<int>(0, n - 1)(r); }
double sign(Rng& r) { return pick(r, 2) ? 1.0 : -1.0; }

void lin_gauss(Rng& r, Eigen::VectorXd& x, Eigen::VectorXd& y) {
  const double a = sign(r) * unif(r, 0.5, 1.5), s = unif(r, 0.5, 1.0);
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    x[k] = gauss(r);
    y[k] = a * x[k] + s * gauss(r);
  }
}

void lsnm(Rng& r, Eigen::VectorXd& x, Eigen::VectorXd& y) {
  const double c1 = sign(r) * unif(r, 1.0, 2.0), c2 = unif(r, -0.5, 0.5);
  const double d = sign(r) * unif(r, 1.5, 3.0), lo = unif(r, 0.2, 0.4);
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    x[k] = gauss(r);
    const double scale = lo + (1.0 - lo) / (1.0 + std::exp(-d * x[k]));
    y[k] = c1 * std::tanh(x[k]) + c2 * x[k] + scale * gauss(r);
  }
}

void pnl(Rng& r, Eigen::VectorXd& x, Eigen::VectorXd& y) {
  const double b = unif(r, 0.1, 0.3), s = unif(r, 0.3, 0.6);
  const int h = pick(r, 3);
  const double c = unif(r, 0.5, 1.0);
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    x[k] = gauss(r);
    const double z = x[k] + b * x[k] * x[k] * x[k] + s * gauss(r);
    y[k] = h == 0 ? std::exp(c * z) : h == 1 ? z * z * z : std::sinh(c * z);
  }
}

void discrete(Rng& r, Eigen::VectorXd& x, Eigen::VectorXd& y) {
  const int support = 4 + pick(r, 4);
  std::vector<double> w(static_cast<std::size_t>(support));
  for (auto& v : w) v = unif(r, 0.5, 2.0);
  std::discrete_distribution<int> dx(w.begin(), w.end());
  std::vector<int> f(static_cast<std::size_t>(support));
  for (auto& v : f) v = pick(r, 2 * support);
  const double p0 = unif(r, 0.4, 0.7);
  std::discrete_distribution<int> dn({(1.0 - p0) / 2.0, p0, (1.0 - p0) / 2.0});
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const int xv = dx(r);
    x[k] = xv;
    y[k] = f[static_cast<std::size_t>(xv)] + (dn(r) - 1);
  }
}

void near_det(Rng& r, Eigen::VectorXd& x, Eigen::VectorXd& y) {
  const int family = pick(r, 4);
  auto f = [family](double u) {
    switch (family) {
      case 0: return u * u * u;
      case 1: return std::exp(2.0 * u);
      case 2: return std::sqrt(u);
      default: return std::log(1.0 + 4.0 * u);
    }
  };
  for (Eigen::Index k = 0; k < x.size(); ++k) x[k] = unif(r, 0.0, 1.0);
  Eigen::VectorXd fx = x.unaryExpr(f);
  const double s = 0.01 * std::sqrt(stats::variance(fx));
  for (Eigen::Index k = 0; k < x.size(); ++k) y[k] = fx[k] + s * gauss(r);
}

}  // namespace

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::LinGauss: return "R_LIN_GAUSS";
    case Regime::Lsnm: return "R_LSNM";
    case Regime::Pnl: return "R_PNL";
    case Regime::Discrete: return "R_DISCRETE";
    case Regime::NearDet: return "R_NEAR_DET";
  }
  return "?";
}

std::optional<Regime> regime_from_string(std::string_view s) {
  for (Regime r : kAllRegimes)
    if (to_string(r) == s) return r;
  return std::nullopt;
}

std::vector<RegimePair> generate_regime(const RegimeSpec& spec) {
  std::vector<RegimePair> out;
  for (int k = 0; k < spec.n_pairs; ++k) {
    Rng r(stats::mix_seed(spec.seed, {static_cast<std::uint64_t>(spec.regime), static_cast<std::uint64_t>(k)}));
    Eigen::VectorXd x(spec.n_samples), y(spec.n_samples);
    switch (spec.regime) {
      case Regime::LinGauss: lin_gauss(r, x, y); break;
      case Regime::Lsnm: lsnm(r, x, y); break;
      case Regime::Pnl: pnl(r, x, y); break;
      case Regime::Discrete: discrete(r, x, y); break;
      case Regime::NearDet: near_det(r, x, y); break;
    }
    const bool swap = pick(r, 2) == 1;
    Eigen::MatrixXd m(spec.n_samples, 2);
    m.col(0) = swap ? y : x;
    m.col(1) = swap ? x : y;
    out.push_back({Dataset(std::move(m), {"a", "b"}), swap ? Direction::Bwd : Direction::Fwd});
  }
  return out;
}

}  // namespace certdag::bench
