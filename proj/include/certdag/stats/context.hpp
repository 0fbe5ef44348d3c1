#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "certdag/core/config.hpp"
#include "certdag/core/dataset.hpp"
#include "certdag/stats/hsic.hpp"
#include "certdag/stats/regression.hpp"

namespace certdag::stats {

/// Memoizing front end over the statistical primitives for one (dataset, config).
/// Every test derives its seed from config.seed and the identity of its inputs, so
/// results do not depend on evaluation order.
class StatsContext {
 public:
  StatsContext(const Dataset& data, const Config& config);

  const Dataset& data() const { return data_; }
  const Config& config() const { return config_; }
  int vars() const { return data_.vars(); }

  /// Standardized column.
  const Eigen::VectorXd& column(int v) const { return std_cols_[static_cast<std::size_t>(v)]; }

  /// Residual of column `target` regressed on the columns in `given` (order-insensitive).
  /// Empty `given` returns the standardized column itself.
  const Eigen::VectorXd& residual(int target, std::vector<int> given, Engine engine);
  /// Effective degrees of freedom of the fit behind residual() (0 for an empty `given`).
  double residual_dof(int target, std::vector<int> given, Engine engine);

  /// p-value of HSIC(column cause, residual of effect ~ cause): the ANM test for cause -> effect.
  double anm_p(int cause, int effect, Engine engine);

  /// HSIC between two residual streams, memoized by (a, given_a, b, given_b).
  HsicResult residual_hsic(int a, std::vector<int> given_a, int b, std::vector<int> given_b, Engine engine);

  double shapiro_p(int v);

  /// Generic memo for derived scalars (e.g. re-audit p-values keyed by conditioning sets).
  double memo(const std::string& key, const std::function<double()>& compute);

  std::uint64_t seed_for(std::initializer_list<std::uint64_t> keys) const;
  const HsicOptions& hsic_options() const { return hsic_; }
  const RegressionOptions& regression_options() const { return reg_; }

 private:
  const Dataset& data_;
  const Config& config_;
  std::vector<Eigen::VectorXd> std_cols_;
  HsicOptions hsic_;
  RegressionOptions reg_;

  std::mutex mu_;
  struct CachedFit {
    Eigen::VectorXd residuals;
    double dof = 0.0;
  };
  const CachedFit& fit(int target, std::vector<int> given, Engine engine);

  std::map<std::string, CachedFit> residuals_;
  std::map<std::string, HsicResult> hsic_cache_;
  std::map<std::string, double> anm_cache_;
  std::map<int, double> shapiro_cache_;
  std::map<std::string, double> memo_;
};

}  // namespace certdag::stats
