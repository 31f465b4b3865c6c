#pragma once

#include <array>

#include "csvol/dilog.hpp"
#include "csvol/flattening.hpp"

namespace csvol {

// Invariant of a single flattened tetrahedron, for the orientation induced
// by the branching.  This is the analytic function on the flattening
// surface whose differential is
//     (1/8 pi^2) (l2 dl1 - l1 dl2 - i pi dl1)
// and whose value on the real branch (l1, l2) = (-log u, log u - log(1-u)
// + i pi), 0 < u < 1, equals H(u).  Closed form, with z = exp(l1):
//     (1/8 pi^2) [ 2 R(z) + (2 pi i q - i pi) log z + 2 pi i p log(1-z) ]
//       + p/4 - p q/2 - 1/24        (mod Z).
CSValue cs_tet(const TetFlattening& f);

// Per-tetrahedron orientation signs: +1 where the branching order is an
// even permutation of the oriented labels.
std::vector<int> orientation_signs(const Branching& b);

// Sum of signed per-tetrahedron invariants, reduced mod Z.  Edge polyhedra
// contribute nothing.
CSValue cs_total(const Flattening& F, const std::vector<int>& signs);

// H(u) - H(v) + H(v/u) - H((1-1/u)/(1-1/v)) + H((1-u)/(1-v)), expected 0
// for 0 < v < u < 1.
double five_term_residual(double u, double v);

// A point of the projective line; at_infinity ignores `value`.
struct ConfigPoint {
    cplx value{0.0, 0.0};
    bool at_infinity = false;
};

// Alternating sum of cs_tet over the five sub-tetrahedra of a 5-point
// configuration, with flattenings built from log-differences
//     L(xyzt) = lam(t,y) + lam(z,x) - lam(z,y) - lam(t,x),
// lam(a,b) = log(tau_a - tau_b), repaired by 2 pi i shifts on individual
// lam values until every tetrahedron satisfies the i*pi sum conditions and
// the interior edge of the three-tetrahedron side closes.  Points are taken
// in the given order (index = global vertex order).  Expected 0 mod Z; the
// returned value has its real part reduced to [-1/2, 1/2).
// Throws ValidationError if the repair step fails.
cplx five_term_config_residual(const std::array<ConfigPoint, 5>& points);

// The five sub-tetrahedron flattenings of a configuration (omit index i at
// position i), after repair; exposed for the bipyramid comparisons.
std::array<TetFlattening, 5> five_term_flattenings(const std::array<ConfigPoint, 5>& points);

}  // namespace csvol
