#pragma once

#include <optional>
#include <string>

#include "bryant4/poly.hpp"
#include "bryant4/weierstrass.hpp"

namespace bryant4 {

// Rational data for the finite-total-curvature classification:
// g = P1/P2 with coprime polynomials, w = Wpoly dz, plus the structure
// constants.
struct RationalData {
  PolyC P1, P2, Wpoly;
  int eps = -1;
  double a = 0, b = 0;
  Complex c{};
};

enum class FtcVerdictKind { Admissible, Reject };

struct FtcVerdict {
  FtcVerdictKind kind;
  std::string reason;      // reject reason code, empty when admissible
  std::string detail;
  bool mobius_applied = false;  // g was renormalized so g(infinity) = infinity
  std::string mobius_log;
};

// Finite-total-curvature screening: admissible exactly when
// Wpoly = A P2^2 for a nonzero constant, c = 0, a + eps b = 0, and
// deg P1 > deg P2 after the normalization g(infinity) = infinity.
// Reject reasons: "omega_not_p2_squared", "degree_obstruction_c",
// "degree_obstruction_ab", "epsilon_positive", "g_constant".
FtcVerdict ftc_classify(const RationalData& rd, double coeff_tol = 1e-10);

// The allowed renormalization of the data: g -> (tau g + eps conj(gamma)) /
// (gamma g + conj(tau)) with |tau|^2 - eps |gamma|^2 = 1, omega picking up
// e^{i beta} (gamma g + conj(tau))^2 and the constants transforming by
// congruence. Produces data describing the same surface.
RationalData mobius_transform(const RationalData& rd, Complex tau, Complex gamma, double beta);

enum class ScreenVerdictKind { NotApplicable, DegenerateFlat, CompletenessWarning };

struct ScreenVerdict {
  ScreenVerdictKind kind;
  std::string detail;
};

// Non-negative-curvature screening: constant g means the flat
// degenerate-hyperplane case (construction refused); non-constant g with
// eps = +1 can never give a complete surface.
ScreenVerdict completeness_screen(const WeierstrassData& data, const Tolerances& tol = {});

enum class ParallelHKind { ZeroMeanCurvature, Hyperquadric, NonParallel };

struct ParallelHVerdict {
  ParallelHKind kind;
  std::string detail;
};

// Parallel mean curvature detection from the constancy of f, with the
// sub-kind read off the structure constants.
ParallelHVerdict parallel_H_classify(const WeierstrassData& data, const DerivedData& derived);

}  // namespace bryant4
