#include "certdag/stats/context.hpp"

#include <algorithm>

#include "certdag/stats/shapiro_wilk.hpp"
#include "certdag/stats/transforms.hpp"

namespace certdag::stats {

namespace {

std::string key_of(int target, const std::vector<int>& given, Engine engine) {
  std::string k = std::to_string(target) + (engine == Engine::Linear ? "|L|" : "|N|");
  for (int g : given) k += std::to_string(g) + ",";
  return k;
}

std::uint64_t set_hash(const std::vector<int>& s) {
  std::uint64_t h = 0x51ED;
  for (int v : s) h = mix_seed(h, {static_cast<std::uint64_t>(v)});
  return h;
}

void normalize(std::vector<int>& s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
}

}  // namespace

StatsContext::StatsContext(const Dataset& data, const Config& config)
    : data_(data), config_(config), hsic_(stats::hsic_options(config)) {
  reg_.landmarks = config.krr_landmarks;
  std_cols_.reserve(static_cast<std::size_t>(data.vars()));
  for (int v = 0; v < data.vars(); ++v) std_cols_.push_back(standardize(data.column(v)));
}

std::uint64_t StatsContext::seed_for(std::initializer_list<std::uint64_t> keys) const {
  return mix_seed(config_.seed, keys);
}

const StatsContext::CachedFit& StatsContext::fit(int target, std::vector<int> given, Engine engine) {
  const std::string key = key_of(target, given, engine);
  {
    std::lock_guard lock(mu_);
    if (auto it = residuals_.find(key); it != residuals_.end()) return it->second;
  }
  Eigen::MatrixXd x(data_.rows(), static_cast<Eigen::Index>(given.size()));
  for (std::size_t k = 0; k < given.size(); ++k) x.col(static_cast<Eigen::Index>(k)) = column(given[k]);
  auto seed = seed_for({0x2E51u, static_cast<std::uint64_t>(target), set_hash(given)});
  RegressionFit f = fit_regression(x, column(target), engine, seed, reg_);
  std::lock_guard lock(mu_);
  return residuals_.emplace(key, CachedFit{std::move(f.residuals), f.effective_dof}).first->second;
}

const Eigen::VectorXd& StatsContext::residual(int target, std::vector<int> given, Engine engine) {
  normalize(given);
  given.erase(std::remove(given.begin(), given.end(), target), given.end());
  if (given.empty()) return column(target);
  return fit(target, std::move(given), engine).residuals;
}

double StatsContext::residual_dof(int target, std::vector<int> given, Engine engine) {
  normalize(given);
  given.erase(std::remove(given.begin(), given.end(), target), given.end());
  if (given.empty()) return 0.0;
  return fit(target, std::move(given), engine).dof;
}

double StatsContext::anm_p(int cause, int effect, Engine engine) {
  const std::string key = std::to_string(cause) + ">" + std::to_string(effect) + (engine == Engine::Linear ? "L" : "N");
  {
    std::lock_guard lock(mu_);
    if (auto it = anm_cache_.find(key); it != anm_cache_.end()) return it->second;
  }
  const Eigen::VectorXd& r = residual(effect, {cause}, engine);
  auto seed = seed_for({0xA11Au, static_cast<std::uint64_t>(cause), static_cast<std::uint64_t>(effect),
                        static_cast<std::uint64_t>(engine)});
  double p = hsic_test(column(cause), r, hsic_, seed).p_value;
  std::lock_guard lock(mu_);
  anm_cache_[key] = p;
  return p;
}

HsicResult StatsContext::residual_hsic(int a, std::vector<int> given_a, int b, std::vector<int> given_b,
                                       Engine engine) {
  normalize(given_a);
  normalize(given_b);
  if (std::pair(a, given_a) > std::pair(b, given_b)) {
    std::swap(a, b);
    std::swap(given_a, given_b);
  }
  const std::string key = key_of(a, given_a, engine) + "~" + key_of(b, given_b, engine);
  {
    std::lock_guard lock(mu_);
    if (auto it = hsic_cache_.find(key); it != hsic_cache_.end()) return it->second;
  }
  const Eigen::VectorXd& ra = residual(a, given_a, engine);
  const Eigen::VectorXd& rb = residual(b, given_b, engine);
  auto seed = seed_for({0x4C1Cu, static_cast<std::uint64_t>(a), set_hash(given_a), static_cast<std::uint64_t>(b),
                        set_hash(given_b)});
  HsicResult r = hsic_test(ra, rb, hsic_, seed);
  std::lock_guard lock(mu_);
  return hsic_cache_.emplace(key, r).first->second;
}

double StatsContext::shapiro_p(int v) {
  {
    std::lock_guard lock(mu_);
    if (auto it = shapiro_cache_.find(v); it != shapiro_cache_.end()) return it->second;
  }
  double p = shapiro_wilk(data_.column(v), seed_for({0x5E11u, static_cast<std::uint64_t>(v)})).p_value;
  std::lock_guard lock(mu_);
  shapiro_cache_[v] = p;
  return p;
}

double StatsContext::memo(const std::string& key, const std::function<double()>& compute) {
  {
    std::lock_guard lock(mu_);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  }
  const double v = compute();
  std::lock_guard lock(mu_);
  memo_[key] = v;
  return v;
}

}  // namespace certdag::stats
