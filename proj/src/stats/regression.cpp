#include "certdag/stats/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "certdag/stats/transforms.hpp"

namespace certdag::stats {

namespace {

struct Scaling {
  std::vector<int> cols;  // non-constant predictor columns
  Eigen::VectorXd mean, sd;

  static Scaling of(const Eigen::MatrixXd& x) {
    Scaling s;
    std::vector<double> mu, sd;
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      Eigen::VectorXd col = x.col(c);
      if (is_constant(col)) continue;
      s.cols.push_back(static_cast<int>(c));
      mu.push_back(col.mean());
      sd.push_back(std::sqrt(variance(col)));
    }
    s.mean = Eigen::Map<Eigen::VectorXd>(mu.data(), static_cast<Eigen::Index>(mu.size()));
    s.sd = Eigen::Map<Eigen::VectorXd>(sd.data(), static_cast<Eigen::Index>(sd.size()));
    return s;
  }

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const {
    Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) {
      auto kk = static_cast<Eigen::Index>(k);
      out.col(kk) = (x.col(cols[k]).array() - mean[kk]) / sd[kk];
    }
    return out;
  }
};

class ConstantPredictor final : public Predictor {
 public:
  explicit ConstantPredictor(double c) : c_(c) {}
  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const override { return Eigen::VectorXd::Constant(x.rows(), c_); }

 private:
  double c_;
};

class LinearPredictor final : public Predictor {
 public:
  LinearPredictor(Scaling s, Eigen::VectorXd beta, double intercept)
      : s_(std::move(s)), beta_(std::move(beta)), intercept_(intercept) {}
  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const override {
    return (s_.apply(x) * beta_).array() + intercept_;
  }

 private:
  Scaling s_;
  Eigen::VectorXd beta_;
  double intercept_;
};

Eigen::MatrixXd gaussian_cross(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double sigma) {
  const double inv = -1.0 / (2.0 * sigma * sigma);
  Eigen::VectorXd an = a.rowwise().squaredNorm(), bn = b.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = (-2.0 * a * b.transpose()).colwise() + an;
  d2.rowwise() += bn.transpose();
  return (d2.array().max(0.0) * inv).exp().matrix();
}

class KernelPredictor final : public Predictor {
 public:
  Scaling scaling;
  Eigen::MatrixXd landmarks;
  double sigma = 1.0;
  Eigen::MatrixXd feature_map;  // m x r, maps kernel evaluations to whitened features
  Eigen::RowVectorXd feature_mean;
  Eigen::VectorXd beta;
  double intercept = 0.0;

  Eigen::MatrixXd features(const Eigen::MatrixXd& xs) const {
    Eigen::MatrixXd phi = gaussian_cross(xs, landmarks, sigma) * feature_map;
    phi.rowwise() -= feature_mean;
    return phi;
  }
  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const override {
    return (features(scaling.apply(x)) * beta).array() + intercept;
  }
};

Eigen::MatrixXd choose_landmarks(const Eigen::MatrixXd& xs, int m, std::uint64_t seed) {
  const auto n = static_cast<int>(xs.rows());
  if (xs.cols() == 1) {
    std::vector<double> v(xs.data(), xs.data() + n);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    std::vector<double> pick;
    if (static_cast<int>(v.size()) <= m) {
      pick = v;
    } else {
      for (int k = 0; k < m; ++k) {
        auto pos = static_cast<std::size_t>((k + 0.5) / m * static_cast<double>(v.size()));
        pick.push_back(v[std::min(pos, v.size() - 1)]);
      }
    }
    return Eigen::Map<Eigen::MatrixXd>(pick.data(), static_cast<Eigen::Index>(pick.size()), 1);
  }
  return take_rows(xs, subsample_indices(n, std::min(n, m), seed));
}

double median_distance(const Eigen::MatrixXd& z) {
  std::vector<double> d;
  for (Eigen::Index a = 0; a < z.rows(); ++a)
    for (Eigen::Index b = a + 1; b < z.rows(); ++b) d.push_back((z.row(a) - z.row(b)).norm());
  if (d.empty()) return 1.0;
  auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  return *mid > 1e-9 ? *mid : 1.0;
}

RegressionFit singular_fit(const Eigen::VectorXd& y, Engine engine) {
  RegressionFit f;
  f.engine = engine;
  f.singular = true;
  const double mu = y.mean();
  f.fitted = Eigen::VectorXd::Constant(y.size(), mu);
  f.residuals = y.array() - mu;
  f.effective_dof = 1.0;
  f.predictor = std::make_shared<ConstantPredictor>(mu);
  return f;
}

RegressionFit fit_linear(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Scaling s) {
  Eigen::MatrixXd xs = s.apply(x);
  const double ybar = y.mean();
  Eigen::VectorXd yc = y.array() - ybar;
  xs.rowwise() -= xs.colwise().mean();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xs);
  Eigen::VectorXd beta = qr.solve(yc);
  // Standardized columns are centered only up to rounding; absorb the remainder into the intercept.
  Eigen::MatrixXd raw = s.apply(x);
  double intercept = ybar - (raw.colwise().mean() * beta)(0);
  RegressionFit f;
  f.engine = Engine::Linear;
  f.fitted = (raw * beta).array() + intercept;
  f.residuals = y - f.fitted;
  f.effective_dof = 1.0 + static_cast<double>(qr.rank());
  f.predictor = std::make_shared<LinearPredictor>(std::move(s), std::move(beta), intercept);
  return f;
}

RegressionFit fit_kernel(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Scaling s, std::uint64_t seed,
                         const RegressionOptions& opts) {
  const Eigen::MatrixXd xs = s.apply(x);
  const Eigen::Index n = xs.rows();
  const double nd = static_cast<double>(n);
  const double ybar = y.mean();
  const Eigen::VectorXd yc = y.array() - ybar;
  const double yy = yc.squaredNorm();

  auto model = std::make_shared<KernelPredictor>();
  model->landmarks = choose_landmarks(xs, std::min<int>(static_cast<int>(n), opts.landmarks), seed);
  const double base = median_distance(model->landmarks);

  struct Best {
    double gcv = std::numeric_limits<double>::infinity();
    double sigma = 1.0, lambda = 1.0;
  } best;

  static constexpr double kMultipliers[] = {0.25, 0.5, 1.0, 2.0};
  for (double mult : kMultipliers) {
    const double sigma = base * mult;
    Eigen::MatrixXd kzz = gaussian_cross(model->landmarks, model->landmarks, sigma);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ez(kzz);
    const double top = ez.eigenvalues().maxCoeff();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < kzz.rows(); ++k)
      if (ez.eigenvalues()[k] > 1e-8 * top) keep.push_back(k);
    Eigen::MatrixXd tmap(kzz.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k)
      tmap.col(static_cast<Eigen::Index>(k)) = ez.eigenvectors().col(keep[k]) / std::sqrt(ez.eigenvalues()[keep[k]]);

    Eigen::MatrixXd phi = gaussian_cross(xs, model->landmarks, sigma) * tmap;
    Eigen::RowVectorXd pmean = phi.colwise().mean();
    phi.rowwise() -= pmean;
    Eigen::MatrixXd gram = phi.transpose() * phi;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eg(gram);
    Eigen::VectorXd d2 = eg.eigenvalues().cwiseMax(0.0);
    // a_k = projection of yc on the k-th left singular vector, scaled by its singular value.
    Eigen::VectorXd proj = eg.eigenvectors().transpose() * (phi.transpose() * yc);
    const double scale = d2.sum() / static_cast<double>(std::max<Eigen::Index>(1, d2.size()));

    double chosen_gcv = std::numeric_limits<double>::infinity(), chosen_lambda = scale;
    for (int g = -16; g <= 0; ++g) {
      const double lambda = scale * std::pow(10.0, 0.5 * g);
      double explained = 0.0, rss_in = 0.0, dof = 1.0;
      for (Eigen::Index k = 0; k < d2.size(); ++k) {
        if (d2[k] <= 1e-12 * scale) continue;
        const double a2 = proj[k] * proj[k] / d2[k];
        const double shrink = d2[k] / (d2[k] + lambda);
        explained += a2;
        rss_in += (1.0 - shrink) * (1.0 - shrink) * a2;
        dof += shrink;
      }
      const double rss = std::max(0.0, yy - explained) + rss_in;
      if (dof >= nd - 1.0) continue;
      const double gcv = nd * rss / ((nd - dof) * (nd - dof));
      if (gcv < chosen_gcv) chosen_gcv = gcv, chosen_lambda = lambda;
    }
    if (chosen_gcv < best.gcv) {
      best = {chosen_gcv, sigma, chosen_lambda};
      model->sigma = sigma;
      model->feature_map = tmap;
      model->feature_mean = pmean;
      Eigen::VectorXd coef = proj.array() / (d2.array() + chosen_lambda);
      model->beta = eg.eigenvectors() * coef;
    }
  }
  model->scaling = std::move(s);
  model->intercept = ybar;

  RegressionFit f;
  f.engine = Engine::Nonlinear;
  Eigen::MatrixXd phi = model->features(xs);
  f.fitted = (phi * model->beta).array() + ybar;
  f.residuals = y - f.fitted;
  Eigen::MatrixXd gram = phi.transpose() * phi;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eg(gram, Eigen::EigenvaluesOnly);
  f.effective_dof = 1.0 + (eg.eigenvalues().array().max(0.0) / (eg.eigenvalues().array().max(0.0) + best.lambda)).sum();
  f.predictor = std::move(model);
  return f;
}

}  // namespace

RegressionFit fit_regression(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Engine engine, std::uint64_t seed,
                             const RegressionOptions& opts) {
  if (x.rows() != y.size()) throw std::invalid_argument("fit_regression: row mismatch");
  if (y.size() < 20) throw std::invalid_argument("fit_regression: need at least 20 samples");
  Scaling s = Scaling::of(x);
  if (s.cols.empty()) return singular_fit(y, engine);
  return engine == Engine::Linear ? fit_linear(x, y, std::move(s)) : fit_kernel(x, y, std::move(s), seed, opts);
}

RegressionFit fit_regression(const Eigen::VectorXd& x, const Eigen::VectorXd& y, Engine engine, std::uint64_t seed,
                             const RegressionOptions& opts) {
  return fit_regression(Eigen::MatrixXd(x), y, engine, seed, opts);
}

HeteroscedasticityResult heteroscedasticity_test(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                                 const HsicOptions& hsic, std::uint64_t seed,
                                                 const RegressionOptions& opts) {
  HeteroscedasticityResult r;
  if (is_constant(x) || is_constant(y)) return r;
  auto one_way = [&](const Eigen::VectorXd& cause, const Eigen::VectorXd& effect, std::uint64_t s) {
    RegressionFit f = fit_regression(cause, effect, Engine::Nonlinear, s, opts);
    Eigen::VectorXd sq = f.residuals.array().square();
    return hsic_test(cause, sq, hsic, mix_seed(s, {1})).p_value;
  };
  r.p_forward = one_way(x, y, mix_seed(seed, {0x4E7Eu, 0}));
  r.p_backward = one_way(y, x, mix_seed(seed, {0x4E7Eu, 1}));
  return r;
}

}  // namespace certdag::stats
