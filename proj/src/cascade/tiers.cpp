#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "certdag/cascade/cascade.hpp"
#include "certdag/stats/entropy.hpp"
#include "certdag/stats/hsic.hpp"
#include "certdag/stats/regression.hpp"
#include "certdag/stats/transforms.hpp"

namespace certdag::cascade {

using stats::Engine;
using stats::StatsContext;

namespace {

constexpr int kSteinSamples = 400;
constexpr std::size_t kIgciSegments = 200;
constexpr double kSteinEta = 1e-3;

std::uint64_t tier_seed(StatsContext& ctx, Tier t, Pair p, std::uint64_t salt = 0) {
  return ctx.seed_for({0x7133u, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(p.i),
                       static_cast<std::uint64_t>(p.j), salt});
}

double log10_margin(double accepted, double rejected) {
  return std::log10(std::max(accepted, 1e-300) / std::max(rejected, 1e-300));
}

// Decisive iff exactly one direction accepts residual independence, with the accepted
// p-value at least 10^margin times the rejected one.
Outcome anm_rule(double p_fwd, double p_bwd, double alpha, double margin, std::map<std::string, double>& s) {
  s["p_fwd"] = p_fwd;
  s["p_bwd"] = p_bwd;
  const bool af = p_fwd > alpha, ab = p_bwd > alpha;
  if (af == ab) return Outcome::Abstain;
  const double m = af ? log10_margin(p_fwd, p_bwd) : log10_margin(p_bwd, p_fwd);
  s["margin"] = m;
  if (m < margin) return Outcome::Abstain;
  return af ? Outcome::Fwd : Outcome::Bwd;
}

// Location-scale fit of effect on cause; HSIC p of cause vs standardized residual.
double lsnm_p(const Eigen::VectorXd& cause, const Eigen::VectorXd& effect, const stats::HsicOptions& h,
              const stats::RegressionOptions& ro, std::uint64_t seed) {
  auto mean_fit = stats::fit_regression(cause, effect, Engine::Nonlinear, stats::mix_seed(seed, {1}), ro);
  const Eigen::VectorXd& r = mean_fit.residuals;
  const double floor = 1e-6 * std::max(1e-12, stats::variance(r));
  Eigen::VectorXd logsq = (r.array().square() + floor).log();
  auto scale_fit = stats::fit_regression(cause, logsq, Engine::Nonlinear, stats::mix_seed(seed, {2}), ro);
  Eigen::VectorXd e = r.array() / (0.5 * scale_fit.fitted.array()).exp();
  return stats::hsic_test(cause, e, h, stats::mix_seed(seed, {3})).p_value;
}

// Slope-based IGCI score C_{x->y} on [0,1]-scaled data (uniform reference measure).
// Slopes are taken across a stride of sorted samples so additive noise does not dominate
// the finite differences.
double igci_slope(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  std::vector<int> order(static_cast<std::size_t>(x.size()));
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return x[a] < x[b]; });
  const std::size_t stride = std::max<std::size_t>(1, order.size() / kIgciSegments);
  double sum = 0.0;
  int used = 0;
  for (std::size_t k = stride; k < order.size(); ++k) {
    const double dx = x[order[k]] - x[order[k - stride]];
    const double dy = y[order[k]] - y[order[k - stride]];
    if (dx == 0.0 || dy == 0.0) continue;
    sum += std::log(std::abs(dy / dx));
    ++used;
  }
  return used ? sum / used : 0.0;
}

Eigen::VectorXd winsorize(const Eigen::VectorXd& v, double q) {
  std::vector<double> s(v.data(), v.data() + v.size());
  std::sort(s.begin(), s.end());
  const auto n = s.size();
  const double lo = s[static_cast<std::size_t>(q * static_cast<double>(n - 1))];
  const double hi = s[static_cast<std::size_t>((1.0 - q) * static_cast<double>(n - 1))];
  return v.cwiseMax(lo).cwiseMin(hi);
}

// Diagonal of the Hessian of log p at the sample points, via the kernel Stein estimator
// (first-order score from a ridge-regularized Stein identity, second order likewise).
Eigen::MatrixXd stein_hessian_diag(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows(), d = x.cols();
  std::vector<double> dist;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = a + 1; b < n; ++b) dist.push_back((x.row(a) - x.row(b)).norm());
  auto mid = dist.begin() + static_cast<std::ptrdiff_t>(dist.size() / 2);
  std::nth_element(dist.begin(), mid, dist.end());
  const double s = *mid > 1e-9 ? *mid : 1.0;
  const double s2 = s * s, s4 = s2 * s2;

  Eigen::MatrixXd k(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) k(a, b) = std::exp(-(x.row(a) - x.row(b)).squaredNorm() / (2.0 * s2)) / s;

  Eigen::MatrixXd grad(n, d), lap(n, d);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index c = 0; c < d; ++c) {
      double g = 0.0, l = 0.0;
      for (Eigen::Index b = 0; b < n; ++b) {
        const double diff = x(a, c) - x(b, c);
        g += diff * k(b, a);
        l += (-1.0 / s2 + diff * diff / s4) * k(b, a);
      }
      grad(a, c) = -g / s2;
      lap(a, c) = l;
    }
  Eigen::MatrixXd reg = k + kSteinEta * Eigen::MatrixXd::Identity(n, n);
  Eigen::LDLT<Eigen::MatrixXd> solver(reg);
  Eigen::MatrixXd score = solver.solve(grad);
  return (-score.array().square()).matrix() + solver.solve(lap);
}

// Pairwise fourth-cumulant likelihood-ratio approximation: positive favours i -> j.
double hoc_statistic(StatsContext& ctx, Pair p) {
  const Eigen::VectorXd& x = ctx.column(p.i);
  const Eigen::VectorXd& y = ctx.column(p.j);
  const double rho = (x.array() * y.array()).mean();
  const double kx = x.array().pow(4).mean() - 3.0, ky = y.array().pow(4).mean() - 3.0;
  const double asym = (x.array().cube() * y.array() - x.array() * y.array().cube()).mean();
  const double sign = (kx + ky) >= 0.0 ? 1.0 : -1.0;
  return sign * rho * asym;
}

TierDecision decide(Tier tier, StatsContext& ctx, Pair p) {
  const Config& cfg = ctx.config();
  TierDecision d;
  d.tier = tier;
  d.gate_passed = true;
  auto& s = d.scores;
  const Eigen::VectorXd& x = ctx.column(p.i);
  const Eigen::VectorXd& y = ctx.column(p.j);
  const double n = static_cast<double>(x.size());

  switch (tier) {
    case Tier::L0:
      d.outcome = anm_rule(ctx.anm_p(p.i, p.j, Engine::Linear), ctx.anm_p(p.j, p.i, Engine::Linear),
                           cfg.alpha_residual, 0.0, s);
      break;
    case Tier::L1:
      d.outcome = anm_rule(ctx.anm_p(p.i, p.j, Engine::Nonlinear), ctx.anm_p(p.j, p.i, Engine::Nonlinear),
                           cfg.alpha_residual, cfg.l1_margin, s);
      break;
    case Tier::LSNM: {
      const auto seed = tier_seed(ctx, tier, p);
      const double pf = lsnm_p(x, y, ctx.hsic_options(), ctx.regression_options(), stats::mix_seed(seed, {0}));
      const double pb = lsnm_p(y, x, ctx.hsic_options(), ctx.regression_options(), stats::mix_seed(seed, {1}));
      d.outcome = anm_rule(pf, pb, cfg.alpha_residual, cfg.lsnm_margin, s);
      break;
    }
    case Tier::IGCI: {
      const Eigen::VectorXd ux = stats::min_max_scale(x), uy = stats::min_max_scale(y);
      const double cxy = igci_slope(ux, uy), cyx = igci_slope(uy, ux);
      s["c_fwd"] = cxy;
      s["c_bwd"] = cyx;
      s["delta"] = cxy - cyx;
      if (std::abs(cxy - cyx) > cfg.igci_threshold) d.outcome = cxy < cyx ? Outcome::Fwd : Outcome::Bwd;
      break;
    }
    case Tier::Stein: {
      const auto idx = stats::subsample_indices(static_cast<int>(x.size()), kSteinSamples, tier_seed(ctx, tier, p));
      Eigen::MatrixXd xy(static_cast<Eigen::Index>(idx.size()), 2);
      xy.col(0) = stats::take(x, idx);
      xy.col(1) = stats::take(y, idx);
      Eigen::MatrixXd h = stein_hessian_diag(xy);
      const Eigen::VectorXd hx = winsorize(h.col(0), 0.025), hy = winsorize(h.col(1), 0.025);
      stats::RegressionOptions ro = ctx.regression_options();
      // An effect's Hessian diagonal is a function of its cause alone under location-scale
      // Gaussian noise; measure how much of each diagonal the other variable leaves unexplained.
      const double ux = stats::variance(
          stats::fit_regression(Eigen::VectorXd(xy.col(1)), hx, Engine::Nonlinear, tier_seed(ctx, tier, p, 1), ro)
              .residuals);
      const double uy = stats::variance(
          stats::fit_regression(Eigen::VectorXd(xy.col(0)), hy, Engine::Nonlinear, tier_seed(ctx, tier, p, 2), ro)
              .residuals);
      const double ratio = (ux + 1e-12) / (uy + 1e-12);
      s["unexplained_i"] = ux;
      s["unexplained_j"] = uy;
      s["ratio"] = ratio;
      if (ratio >= cfg.stein_ratio) d.outcome = Outcome::Fwd;
      else if (1.0 / ratio >= cfg.stein_ratio) d.outcome = Outcome::Bwd;
      break;
    }
    case Tier::MDL: {
      const auto& mi = ctx.data().meta(p.i);
      const auto& mj = ctx.data().meta(p.j);
      double lf, lb;
      const double penalty = 0.5 * std::log(n) / n;
      if (mi.is_integer_valued && mj.is_integer_valued) {
        // Discrete two-part code: H(cause) + H(effect - median(effect | cause)) + one parameter per cause value.
        auto code = [&](const Eigen::VectorXd& c, const Eigen::VectorXd& e, int card) {
          std::map<double, std::vector<double>> groups;
          for (Eigen::Index k = 0; k < c.size(); ++k) groups[c[k]].push_back(e[k]);
          std::map<double, double> med;
          for (auto& [v, g] : groups) {
            auto m = g.begin() + static_cast<std::ptrdiff_t>(g.size() / 2);
            std::nth_element(g.begin(), m, g.end());
            med[v] = *m;
          }
          Eigen::VectorXd r(c.size());
          for (Eigen::Index k = 0; k < c.size(); ++k) r[k] = e[k] - med[c[k]];
          return stats::discrete_entropy(c) + stats::discrete_entropy(r) + card * penalty;
        };
        const Eigen::VectorXd ri = ctx.data().column(p.i), rj = ctx.data().column(p.j);
        lf = code(ri, rj, mi.cardinality);
        lb = code(rj, ri, mj.cardinality);
        s["discrete"] = 1.0;
      } else {
        const double hx = stats::differential_entropy(x), hy = stats::differential_entropy(y);
        const double rf = stats::differential_entropy(ctx.residual(p.j, {p.i}, Engine::Nonlinear));
        const double rb = stats::differential_entropy(ctx.residual(p.i, {p.j}, Engine::Nonlinear));
        lf = hx + rf + ctx.residual_dof(p.j, {p.i}, Engine::Nonlinear) * penalty;
        lb = hy + rb + ctx.residual_dof(p.i, {p.j}, Engine::Nonlinear) * penalty;
        s["discrete"] = 0.0;
      }
      s["len_fwd"] = lf;
      s["len_bwd"] = lb;
      if (std::isfinite(lf) && std::isfinite(lb) && std::abs(lf - lb) > cfg.mdl_margin)
        d.outcome = lf < lb ? Outcome::Fwd : Outcome::Bwd;
      break;
    }
    case Tier::L2: {
      const double r = hoc_statistic(ctx, p);
      s["hoc"] = r;
      if (std::abs(r) > cfg.l2_threshold) d.outcome = r > 0 ? Outcome::Fwd : Outcome::Bwd;
      break;
    }
    case Tier::PEIT: {
      // Each direction undoes a monotone post-transform of its candidate effect by
      // rank-Gaussianization, then fits a nonlinear ANM from the standardized cause.
      const Eigen::VectorXd gx = stats::rank_gaussianize(ctx.data().column(p.i));
      const Eigen::VectorXd gy = stats::rank_gaussianize(ctx.data().column(p.j));
      const auto seed = tier_seed(ctx, tier, p);
      auto rf = stats::fit_regression(x, gy, Engine::Nonlinear, stats::mix_seed(seed, {0}), ctx.regression_options());
      auto rb = stats::fit_regression(y, gx, Engine::Nonlinear, stats::mix_seed(seed, {1}), ctx.regression_options());
      const double hf = stats::differential_entropy(rf.residuals), hb = stats::differential_entropy(rb.residuals);
      s["h_fwd"] = hf;
      s["h_bwd"] = hb;
      s["gap"] = hb - hf;
      if (std::isfinite(hf) && std::isfinite(hb) && std::abs(hb - hf) > cfg.peit_margin)
        d.outcome = hf < hb ? Outcome::Fwd : Outcome::Bwd;
      break;
    }
  }
  return d;
}

}  // namespace

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Fwd: return "FWD";
    case Outcome::Bwd: return "BWD";
    case Outcome::Abstain: return "ABSTAIN";
  }
  return "?";
}

bool gate(Tier tier, StatsContext& ctx, Pair p) {
  const Config& cfg = ctx.config();
  auto non_gaussian = [&] { return std::min(ctx.shapiro_p(p.i), ctx.shapiro_p(p.j)) < cfg.gauss_gate_p; };
  switch (tier) {
    case Tier::L0:
    case Tier::L1:
    case Tier::L2: return true;
    case Tier::IGCI: return std::max(ctx.shapiro_p(p.i), ctx.shapiro_p(p.j)) < cfg.gauss_gate_p;
    case Tier::MDL:
    case Tier::PEIT: return non_gaussian();
    case Tier::Stein:
      return non_gaussian() && !ctx.data().meta(p.i).is_integer_valued && !ctx.data().meta(p.j).is_integer_valued;
    case Tier::LSNM: {
      auto h = stats::heteroscedasticity_test(ctx.column(p.i), ctx.column(p.j), ctx.hsic_options(),
                                              tier_seed(ctx, tier, p, 0x6A7E), ctx.regression_options());
      return std::min(h.p_forward, h.p_backward) < cfg.hetero_gate_p;
    }
  }
  return false;
}

TierDecision tier_decide(Tier tier, StatsContext& ctx, Pair p) {
  if (!gate(tier, ctx, p)) {
    TierDecision d;
    d.tier = tier;
    return d;
  }
  return decide(tier, ctx, p);
}

PairEvidence gather_evidence(StatsContext& ctx, Pair p) {
  PairEvidence ev;
  ev.lin_p_fwd = ctx.anm_p(p.i, p.j, Engine::Linear);
  ev.lin_p_bwd = ctx.anm_p(p.j, p.i, Engine::Linear);
  ev.nl_p_fwd = ctx.anm_p(p.i, p.j, Engine::Nonlinear);
  ev.nl_p_bwd = ctx.anm_p(p.j, p.i, Engine::Nonlinear);
  ev.sw_i = ctx.shapiro_p(p.i);
  ev.sw_j = ctx.shapiro_p(p.j);
  ev.hoc = hoc_statistic(ctx, p);
  auto dispersion = [&](int v) {
    const Eigen::VectorXd c = ctx.data().column(v);
    const double m = c.mean();
    return m > 0.0 ? stats::variance(c) / m : 0.0;
  };
  ev.dispersion_i = dispersion(p.i);
  ev.dispersion_j = dispersion(p.j);
  return ev;
}

}  // namespace certdag::cascade
