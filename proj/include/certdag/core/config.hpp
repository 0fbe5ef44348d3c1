#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "certdag/core/types.hpp"

namespace certdag {

enum class OracleMode : std::uint8_t { PerEdge, MetahubChildren, Hybrid };
enum class HsicMethod : std::uint8_t { Permutation, GammaApprox };
enum class InfoValueStrategy : std::uint8_t { WorstCase, Expected };

std::string_view to_string(OracleMode m);
std::string_view to_string(HsicMethod m);

/// Engine configuration. Defaults are the calibrated values used by the benches.
struct Config {
  // Significance levels and gates.
  double alpha_skeleton = 0.05;
  double alpha_residual = 0.05;
  double fdr_level = 0.05;
  double gauss_gate_p = 0.05;
  double hetero_gate_p = 0.01;
  double confirm_ratio = 2.0;  // <= 0 disables the bivariate confirm gate

  // HSIC.
  int permutations = 500;
  HsicMethod hsic_method = HsicMethod::GammaApprox;
  int hsic_max_samples = 2000;  // larger inputs are subsampled deterministically

  std::uint64_t seed = 0;
  int min_samples = 1000;

  // Cascade.
  TierMask tier_mask = TierMask::all();
  bool guard_enabled = true;
  double l1_margin = 1.0;        // log10(p_accept / p_reject) required by L1
  double lsnm_margin = 1.0;      // same, on standardized location-scale residuals
  double igci_threshold = 0.15;  // |C_xy - C_yx|
  double stein_ratio = 2.0;      // unexplained Hessian variance ratio
  double mdl_margin = 0.02;      // nats per sample
  double l2_threshold = 0.10;    // |cumulant statistic|
  double peit_margin = 0.05;     // residual entropy gap, nats
  int count_support_max = 30;
  double count_dispersion_min = 1.2;
  int high_cardinality_min = 31;

  // Skeleton.
  int mediator_max_tier = 3;
  int mediator_max_conditioning = 8;

  // Propagation and oracle.
  bool propagation_enabled = true;
  bool reaudit_enabled = true;
  bool reaudit_safe_tiers = false;
  bool transitive_dsep_enabled = true;
  OracleMode oracle_mode = OracleMode::PerEdge;
  InfoValueStrategy info_value_strategy = InfoValueStrategy::WorstCase;
  int metahub_k = 0;  // 0: ask the backend for the non-leaf count
  bool cascade_enabled = true;

  // Missing-edge recovery.
  bool recovery_enabled = false;
  bool recovery_filter_marginal = true;
  bool recovery_filter_degree = true;
  bool recovery_filter_reachability = true;
  double recovery_marginal_p = 0.2;

  // Nonlinear regression engine.
  int krr_landmarks = 100;

  std::vector<std::string> circular_variables;

  /// Throws CertdagError("CONFIG_INVALID") when a field is out of range.
  void validate() const;

  nlohmann::json to_json() const;
  /// Unknown keys are rejected so that typos surface as config errors.
  static Config from_json(const nlohmann::json& j);
  static Config from_file(const std::string& path);
};

}  // namespace certdag
