#pragma once

#include <string>
#include <vector>

#include "bryant4/frame.hpp"
#include "bryant4/weierstrass.hpp"

namespace bryant4 {

// Finite-difference derivative fields of the immersion; every geometric
// check works from these so it stays independent of the construction path.
struct SurfaceDerivatives {
  GridField<CVec4> psi_z;
  GridField<CVec4> psi_zz;
  GridField<SpacetimeVec> psi_zzbar;
  GridField<SpacetimeVec> psi_x, psi_y;
  GridField<double> lambda_num;  // 2 <psi_z, conj psi_z>
  GridField<uint8_t> valid;

  static SurfaceDerivatives compute(const DomainGrid& grid, const GridField<HermPoint>& psi);
};

// Parallel orthonormal normal frame {eta, eta_tilde}, represented by the
// null pair N = eta + eta_tilde (from the frame) and M = eta - eta_tilde
// (from the orthogonal complement of the tangent plane, normalized by
// <N, M> = 2).
struct NormalFrame {
  GridField<SpacetimeVec> N, M;
  GridField<uint8_t> valid;
};

NormalFrame normal_frame(const WeierstrassData& data, const DerivedData& derived,
                         const FrameField& frame, const SurfaceDerivatives& sd,
                         const Tolerances& tol = {});

struct MetricCheck {
  double identity_rel_max = 0;     // |lambda_num - (1-eps|g|^2)^2 |w|^2| / lambda
  double conformality_ratio_max = 0;  // |<psi_z, psi_z>| / lambda
  double coefuno_rel_max = 0;      // |f q / g'|^2 (1-eps|g|^2)^2 cross-check
  int nodes_checked = 0;
};

MetricCheck induced_metric_check(const WeierstrassData& data, const DerivedData& derived,
                                 const SurfaceDerivatives& sd,
                                 const GridField<Complex>* q_independent = nullptr,
                                 const Tolerances& tol = {});

struct MeanCurvatureCheck {
  GridField<SpacetimeVec> H;
  GridField<double> isotropy_ratio;     // |<H,H>| / max(|H|_E^2, 1/lambda^2)
  double isotropy_ratio_max = 0;
  double eland_rel_max = 0;             // 2E/lambda against the constants formula
  double e_match_rel_max = 0;           // E = E~ (marginally trapped gauge)
  int nodes_checked = 0;
};

MeanCurvatureCheck mean_curvature_check(const WeierstrassData& data, const DerivedData& derived,
                                        const SurfaceDerivatives& sd, const NormalFrame& nf,
                                        const Tolerances& tol = {});

struct GaussCurvatureCheck {
  GridField<double> K;                  // intrinsic value
  double intrinsic_vs_formula_rel_max = 0;
  double fq_vs_formula_rel_max = 0;
  bool sign_consistent = true;
  int nodes_checked = 0;
};

GaussCurvatureCheck gauss_curvature_check(const WeierstrassData& data,
                                          const DerivedData& derived,
                                          const SurfaceDerivatives& sd,
                                          const GridField<Complex>* q_independent = nullptr,
                                          const Tolerances& tol = {});

struct GaussMapCheck {
  GridField<Complex> G;               // D / C from the first column of F
  GridField<uint8_t> at_infinity;
  double null_max = 0;                // |<N,N>| scaled
  double conformality_ratio_max = 0;  // |<N_z,N_z>| / |N_z|_E^2
  int infinity_count = 0;
  int nodes_checked = 0;
};

GaussMapCheck hyperbolic_gauss_check(const WeierstrassData& data, const DerivedData& derived,
                                     const FrameField& frame, const NormalFrame& nf,
                                     const Tolerances& tol = {});

struct HopfCheck {
  GridField<Complex> q_num;       // p~ - p from second derivatives and the frame
  double match_rel_max = 0;       // against w g' / f
  double dbar_max = 0;            // holomorphy proxy
  int nodes_checked = 0;
};

HopfCheck hopf_check(const WeierstrassData& data, const DerivedData& derived,
                     const SurfaceDerivatives& sd, const NormalFrame& nf,
                     const Tolerances& tol = {});

struct SchwarzianCheck {
  double residual_ratio_max = 0;  // |lhs - rhs| / (1 + |lhs|)
  bool symbolic = false;          // closed-form route used
  int nodes_checked = 0;
};

// Verifies {G, z} = L' - L^2/2 - 2 (a + eps conj(c) g) q with
// L = (g'/f)'/(g'/f). The closed-form route applies when a = c = 0 and f
// is constant (G is then a Mobius image of g).
SchwarzianCheck schwarzian_check(const WeierstrassData& data, const DerivedData& derived,
                                 const GaussMapCheck& gauss, const Tolerances& tol = {});

struct SmallFormulaCheck {
  double c_squared_rel_max = 0;  // C^2 = g' / (f G'), sign-free
  double d_identity_max = 0;     // D = G C
  int nodes_checked = 0;
};

SmallFormulaCheck small_formula_check(const WeierstrassData& data, const DerivedData& derived,
                                      const FrameField& frame, const GaussMapCheck& gauss,
                                      const Tolerances& tol = {});

struct ApenResult {
  double a = 0, b = 0;
  Complex c{};
  double residual = 0;  // max-norm fit residual
};

// Least-squares decomposition f2 = a f1 + c f3, f4 = conj(c) f1 + b f3
// with a, b real. Requires at least 8 samples, the reality condition
// Im(conj(f1) f2 + conj(f3) f4) ~ 0, and a well-conditioned system.
// Throws DependentInputs / RealityViolated.
ApenResult apen_decompose(const std::vector<Complex>& f1, const std::vector<Complex>& f2,
                          const std::vector<Complex>& f3, const std::vector<Complex>& f4,
                          double cond_limit = 1e8, double reality_eps = 1e-9);

// One row of the verification report: a named residual with the tolerance
// it is held to (tol <= 0 marks an informational row).
struct ReportRow {
  std::string key;
  double value = 0;
  double tol = 0;
  bool within() const { return tol <= 0 || value <= tol; }
};

struct SurfaceReport {
  std::vector<ReportRow> rows;
  std::vector<std::pair<std::string, std::string>> flags;

  void add(const std::string& key, double value, double tol) { rows.push_back({key, value, tol}); }
  void flag(const std::string& key, bool value) {
    flags.emplace_back(key, value ? "true" : "false");
  }
  bool all_within() const {
    for (const auto& r : rows)
      if (!r.within()) return false;
    return true;
  }
};

struct VerifiedSurface {
  SurfaceReport report;
  GridField<double> K;
  GridField<double> hh_ratio;
  GridField<Complex> G;
};

// Runs every geometric check and assembles the report.
VerifiedSurface verify_surface(const WeierstrassData& data, const DerivedData& derived,
                               const FrameField& frame, const Tolerances& tol = {});

}  // namespace bryant4
