#pragma once

#include <cstdint>
#include <vector>

#include "csvol/crossratio.hpp"
#include "csvol/dilog.hpp"
#include "csvol/intlinalg.hpp"
#include "csvol/triangulation.hpp"

namespace csvol {

// Log parameters of one tetrahedron in the branching frame:
//   l1 = log z + 2 pi i p          with exp(l1) = X(ranks 0123)
//   l2 = -log(1-z) + 2 pi i q + i pi sigma
//   l3 = i pi - l1 - l2            (derived)
// sigma is the branch-parity bit; it is 0 in every flattening that
// satisfies exp(l2) = X at the middle ordering, and is carried through the
// integer solve so an odd obstruction is reported rather than absorbed.
struct TetFlattening {
    cplx z{0.0, 0.0};
    long long p = 0, q = 0;
    int sigma = 0;
    cplx l1{0.0, 0.0}, l2{0.0, 0.0};

    cplx l3() const;

    static TetFlattening from_lifts(cplx z, long long p, long long q, int sigma = 0);

    // Recovers (z, p, q) from a log pair; throws ValidationError when the
    // pair does not sit on the flattening surface (non-integer lifts or an
    // odd parity), with tolerance `tol` on the lift integers.
    static TetFlattening from_logs(cplx l1, cplx l2, double tol = 1e-8);
};

struct Flattening {
    std::vector<TetFlattening> tets;

    int size() const { return static_cast<int>(tets.size()); }
};

// Value of the flattening at any of the 24 orderings (given as branching
// ranks): coset representative in {l1, l2, l3} with the pair-swapped l2
// offset by -2 pi i, then a sign flip per first-pair/last-pair swap.
cplx expand_flattening(const TetFlattening& f, const Ordering& ranks);

// Per closed edge class, the sum of expanded values over the star; zero
// for a valid flattening.
std::vector<cplx> edge_flattening_residuals(const std::vector<EdgeClass>& edges,
                                            const Branching& b, const Flattening& F);
std::vector<cplx> edge_flattening_residuals(const AbstractTriangulation& T, const Branching& b,
                                            const Flattening& F);

// Integer coefficient structure of the edge sums: for closed class e,
//   S_e = S_e(principal) + 2 pi i (A_e . p + B_e . q) + i pi (B_e . sigma).
struct FlatteningSystem {
    std::vector<int> edge_ids;    // closed classes, in order
    IntMatrix A, B;               // [relation][tet]
};

FlatteningSystem build_flattening_system(const std::vector<EdgeClass>& edges, const Branching& b,
                                         int ntets);

// Chooses principal logs, rounds each edge sum onto the i*pi lattice
// (guard band 1e-6), and solves the lift integers exactly over Z.  The
// returned flattening is the canonical one: minimal sum of p^2+q^2, ties
// broken lexicographically.  Throws NoIntegerSolution with the obstruction,
// or ValidationError on rounding ambiguity.
Flattening solve_flattening(const AbstractTriangulation& T, const std::vector<EdgeClass>& edges,
                            const Branching& b, const ShapeAssignment& shapes);

// Kernel moves of the lift lattice: integer (dp, dq) vectors preserving all
// edge sums.  Adding any combination to a flattening yields a flattening.
std::vector<std::vector<long long>> flattening_kernel(const std::vector<EdgeClass>& edges,
                                                      const Branching& b, int ntets);

Flattening shift_flattening(const Flattening& F, const std::vector<long long>& dpq);

// Tangent data: per tetrahedron (dl1, dl2) with dl3 = -dl1 - dl2, lying in
// the kernel of the linearised edge sums.
struct TangentFlattening {
    std::vector<cplx> dl1, dl2;
};

cplx expand_tangent(const TangentFlattening& t, int tet, const Ordering& ranks);

std::vector<cplx> tangent_edge_residuals(const std::vector<EdgeClass>& edges, const Branching& b,
                                         const TangentFlattening& t);

// Random element of the tangent space, from an exact integer kernel basis
// of the same exponent system; deterministic per seed.  Zero tangent when
// the space is trivial.
TangentFlattening random_tangent(const std::vector<EdgeClass>& edges, const Branching& b,
                                 const Flattening& F, uint64_t seed);

// `flat <tet-id> <p> <q> <sigma>` lines; shapes supply z per tet.
Flattening parse_flattening(const std::string& text, const ShapeAssignment& shapes);
std::string serialize_flattening(const Flattening& F);

}  // namespace csvol
