#include "bryant4/classifier.hpp"

#include <cmath>

#include "bryant4/errors.hpp"

namespace bryant4 {

namespace {

// Checks W = A P2^2 for some nonzero constant A, to relative coefficient
// tolerance.
bool omega_has_normal_form(const PolyC& W, const PolyC& P2, double coeff_tol) {
  PolyC p2sq = P2 * P2;
  if (W.degree() != p2sq.degree() || W.is_zero()) return false;
  Complex A = W.lead() / p2sq.lead();
  if (std::abs(A) == 0.0) return false;
  PolyC diff = W - p2sq * A;
  return diff.max_abs_coeff() <= coeff_tol * std::max(1.0, W.max_abs_coeff());
}

}  // namespace

FtcVerdict ftc_classify(const RationalData& rd, double coeff_tol) {
  if (rd.P1.degree() > 0 && rd.P2.degree() > 0) {
    Complex res = PolyC::resultant_normalized(rd.P1, rd.P2);
    if (std::abs(res) <= coeff_tol)
      throw validation_error("CommonFactor", "P1 and P2 share a zero");
  }
  if (rd.Wpoly.is_zero())
    throw validation_error("CommonFactor", "w is identically zero");

  FtcVerdict v{FtcVerdictKind::Admissible, "", "", false, ""};

  if (rd.eps == 1) {
    // A complete example with non-negative curvature is flat and lies in a
    // degenerate hyperplane; rational data of the required unbounded form
    // cannot satisfy |g| < 1 anyway.
    v.kind = FtcVerdictKind::Reject;
    v.reason = "epsilon_positive";
    v.detail = "complete non-negative-curvature examples are flat and degenerate";
    return v;
  }
  if (rd.P1.degree() <= 0 && rd.P2.degree() <= 0) {
    v.kind = FtcVerdictKind::Reject;
    v.reason = "g_constant";
    v.detail = "constant g is the flat degenerate-hyperplane case";
    return v;
  }

  if (!omega_has_normal_form(rd.Wpoly, rd.P2, coeff_tol)) {
    v.kind = FtcVerdictKind::Reject;
    v.reason = "omega_not_p2_squared";
    v.detail = "w is not a constant multiple of P2^2";
    return v;
  }
  if (std::abs(rd.c) > coeff_tol) {
    v.kind = FtcVerdictKind::Reject;
    v.reason = "degree_obstruction_c";
    v.detail = "c != 0 forces degree(df) = degree(g^2 w); then degree(f) >= R1+R2+1 > "
               "R1+R2-1 >= degree(w dg), so w dg/f cannot stay holomorphic";
    return v;
  }
  double m = rd.a + double(rd.eps) * rd.b;
  if (std::abs(m) > coeff_tol) {
    v.kind = FtcVerdictKind::Reject;
    v.reason = "degree_obstruction_ab";
    v.detail = "a + eps b != 0 forces degree(df) = degree(g w); the same degree count "
               "contradicts holomorphy of w dg/f";
    return v;
  }

  // Normalize g(infinity) = infinity: R1 > R2. The admissible changes for
  // eps = -1 are the rotations of the sphere; one rotation sends the
  // current g(infinity) to infinity.
  PolyC P1 = rd.P1, P2 = rd.P2;
  int guard = 0;
  while (P1.degree() <= P2.degree()) {
    if (++guard > 3)
      throw numeric_error("RootFindingFailure", "normalization did not terminate");
    Complex tau, gamma;
    if (P1.degree() < P2.degree()) {
      // g(infinity) = 0: swap with g -> -1/g.
      tau = 0.0;
      gamma = 1.0;
    } else {
      Complex lam = P1.lead() / P2.lead();
      double gnorm = 1.0 / std::sqrt(1.0 + std::norm(lam));
      gamma = gnorm;
      tau = -gnorm * std::conj(lam);
    }
    PolyC newP1 = P1 * tau + P2 * (double(rd.eps) * std::conj(gamma));
    PolyC newP2 = P1 * gamma + P2 * std::conj(tau);
    P1 = newP1;
    P2 = newP2;
    v.mobius_applied = true;
    v.mobius_log += "applied (tau, gamma) = (" + std::to_string(tau.real()) + "+" +
                    std::to_string(tau.imag()) + "i, " + std::to_string(gamma.real()) + "+" +
                    std::to_string(gamma.imag()) + "i); ";
  }
  v.detail = "normal form with deg P1 = " + std::to_string(P1.degree()) +
             " > deg P2 = " + std::to_string(P2.degree());
  return v;
}

RationalData mobius_transform(const RationalData& rd, Complex tau, Complex gamma, double beta) {
  double e = double(rd.eps);
  RationalData out = rd;
  out.P1 = rd.P1 * tau + rd.P2 * (e * std::conj(gamma));
  out.P2 = rd.P1 * gamma + rd.P2 * std::conj(tau);

  // w -> e^{i beta} (gamma g + conj(tau))^2 w, as a polynomial identity
  // requires P2^2 to divide (gamma P1 + conj(tau) P2)^2 Wpoly.
  PolyC numerator = out.P2 * out.P2 * rd.Wpoly * std::polar(1.0, beta);
  PolyC p2sq = rd.P2 * rd.P2;
  auto [quo, rem] = numerator.divrem(p2sq);
  if (rem.max_abs_coeff() > 1e-9 * std::max(1.0, numerator.max_abs_coeff()))
    throw validation_error("CommonFactor",
                           "transformed w is not polynomial for these parameters");
  out.Wpoly = quo;

  // Constants transform by congruence of the Hermitian matrix
  // [[a, eps conj(c)], [eps c, b]] with the inverse action on (1, g).
  Complex c = rd.c;
  double a = rd.a, b = rd.b;
  double at = a * std::norm(tau) + b * std::norm(gamma) - 2.0 * (c * tau * gamma).real();
  double bt = a * std::norm(gamma) + b * std::norm(tau) - 2.0 * e * (c * tau * gamma).real();
  Complex ct = c * tau * tau - e * (a + e * b) * std::conj(gamma) * tau +
               e * std::conj(c) * std::conj(gamma) * std::conj(gamma);
  out.a = at;
  out.b = bt;
  out.c = ct;
  return out;
}

ScreenVerdict completeness_screen(const WeierstrassData& data, const Tolerances& tol) {
  double variation = 0;
  Complex g0{};
  bool first = true;
  for (int j = 0; j < data.grid.ny; ++j)
    for (int i = 0; i < data.grid.nx; ++i) {
      if (data.grid.masked(i, j)) continue;
      Complex g = data.g->eval(data.grid.node(i, j), tol.pole_eps);
      if (first) {
        g0 = g;
        first = false;
      }
      variation = std::max(variation, std::abs(g - g0));
    }
  if (variation < 1e-12)
    return {ScreenVerdictKind::DegenerateFlat,
            "g is constant: the Hopf differential vanishes, the surface is flat and lies in "
            "an affine degenerate hyperplane; construction refused"};
  if (data.eps == 1)
    return {ScreenVerdictKind::CompletenessWarning,
            "eps = +1 with non-constant g: constructible locally, but no complete example "
            "exists with non-negative curvature"};
  return {ScreenVerdictKind::NotApplicable, ""};
}

ParallelHVerdict parallel_H_classify(const WeierstrassData& data, const DerivedData& derived) {
  if (!derived.parallel_h) return {ParallelHKind::NonParallel, "f is non-constant"};
  double m = data.a + double(data.eps) * data.b;
  if (data.a == 0.0 && data.b == 0.0 && data.c == Complex{})
    return {ParallelHKind::ZeroMeanCurvature,
            "a = b = c = 0: zero mean curvature in an affine Euclidean or Lorentzian 3-space"};
  (void)m;
  std::string which = data.eps == -1 ? "hyperbolic" : "de Sitter";
  return {ParallelHKind::Hyperquadric,
          "constant f with nonzero constants: totally umbilical affine " + which +
              " hyperquadric carrier"};
}

}  // namespace bryant4
