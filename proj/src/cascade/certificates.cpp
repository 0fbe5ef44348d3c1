#include <algorithm>
#include <cmath>

#include "certdag/cascade/cascade.hpp"

namespace certdag::cascade {

namespace {

bool binary(const VariableMeta& m) { return m.cardinality == 2; }
bool continuous(const VariableMeta& m) { return !m.is_integer_valued; }

}  // namespace

CertificateCode classify_impossible(const PairEvidence& ev, const VariableMeta& mi, const VariableMeta& mj,
                                    const Config& cfg) {
  // Regime detectors first.
  if (mi.flagged_circular || mj.flagged_circular) return CertificateCode::ImpossibleCircular;
  if ((binary(mi) && continuous(mj)) || (binary(mj) && continuous(mi)))
    return CertificateCode::ImpossibleBinaryContinuous;
  auto count_like = [&](const VariableMeta& m, double dispersion) {
    return m.is_integer_valued && m.cardinality > 2 && m.cardinality <= cfg.count_support_max &&
           dispersion > cfg.count_dispersion_min;
  };
  if (count_like(mi, ev.dispersion_i) || count_like(mj, ev.dispersion_j)) return CertificateCode::ImpossibleCount;
  if ((mi.is_integer_valued && mi.cardinality >= cfg.high_cardinality_min) ||
      (mj.is_integer_valued && mj.cardinality >= cfg.high_cardinality_min))
    return CertificateCode::ImpossibleHighCardinalityDiscrete;

  const double a = cfg.alpha_residual;
  const bool lin_f = ev.lin_p_fwd > a, lin_b = ev.lin_p_bwd > a;
  const bool nl_f = ev.nl_p_fwd > a, nl_b = ev.nl_p_bwd > a;

  if (lin_f && lin_b && ev.sw_i >= cfg.gauss_gate_p && ev.sw_j >= cfg.gauss_gate_p) return CertificateCode::ImpossibleR1;
  if (!lin_f && !lin_b && !nl_f && !nl_b) return CertificateCode::ImpossibleLatentLikely;

  // The two engines lean opposite ways while each accepts its preferred direction.
  const bool lin_pref_fwd = ev.lin_p_fwd >= ev.lin_p_bwd, nl_pref_fwd = ev.nl_p_fwd >= ev.nl_p_bwd;
  if ((lin_f || lin_b) && (nl_f || nl_b) && (lin_f != lin_b || nl_f != nl_b) && lin_pref_fwd != nl_pref_fwd)
    return CertificateCode::ImpossibleRegressorInconsistent;

  if (nl_f != nl_b) return CertificateCode::ImpossibleNonlinearWeak;
  if (std::abs(ev.hoc) > 0.5 * cfg.l2_threshold) return CertificateCode::ImpossibleHocAmbiguous;
  return CertificateCode::ImpossibleAmbiguous;
}

}  // namespace certdag::cascade
