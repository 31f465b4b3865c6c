#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "csvol/triangulation.hpp"

namespace csvol {

using cplx = std::complex<double>;

// One cross-ratio per tetrahedron, taken at the branching-canonical
// ordering (ranks 0123).  Values must stay off {0, 1}.
struct ShapeAssignment {
    std::vector<cplx> z;

    int size() const { return static_cast<int>(z.size()); }
};

// Throws DegenerateShapeError if some z is within `eps` of 0 or 1, or is
// non-finite.
void check_shapes(const ShapeAssignment& s, double eps = 1e-12);

// Which of the six cross-ratio values an ordering evaluates to, split as
// value = (base value)^(±1) with base one of z, 1-z, (z-1)/z.
struct CrossRatioClass {
    int base = 0;       // 0: z,  1: 1-z,  2: (z-1)/z
    bool inverted = false;
    bool primed = false;  // pair-swapped coset (only matters for log lifts)
};

// Coset and sign of an ordering given as branching ranks.
CrossRatioClass classify_ordering(const Ordering& ranks);

// The cross-ratio at an arbitrary ordering, evaluated on the configuration
// (inf, 0, 1, z) placed at ranks (0,1,2,3).  `ranks` is the ordering
// expressed in branching ranks.
cplx expand_cross_ratio(cplx z, const Ordering& ranks);

// d/dz of expand_cross_ratio at fixed ordering.
cplx expand_cross_ratio_dz(cplx z, const Ordering& ranks);

// One multiplicative factor of an edge relation.
struct GluingFactor {
    int tet = 0;
    Ordering ranks{0, 1, 2, 3};
};

struct GluingRelation {
    int edge = 0;
    std::vector<GluingFactor> factors;
};

// One relation per closed edge class: the product of the factors equals 1.
struct GluingSystem {
    const AbstractTriangulation* T = nullptr;
    std::vector<GluingRelation> relations;
};

GluingSystem build_gluing_system(const AbstractTriangulation& T,
                                 const std::vector<EdgeClass>& edges, const Branching& b);

// Per relation, (product of factors) - 1.
std::vector<cplx> edge_residuals(const GluingSystem& S, const ShapeAssignment& shapes);

// Jacobian d(residual_e)/d(z_t), dense row-major [relation][tet].
std::vector<std::vector<cplx>> edge_residual_jacobian(const GluingSystem& S,
                                                      const ShapeAssignment& shapes);

struct SolverConfig {
    int max_iterations = 100;
    double tolerance = 1e-12;
    double damping = 0.5;       // step-scaling factor per halving
    int max_halvings = 30;
    int restarts = 8;
    uint64_t seed = 0;
};

struct SolveTrace {
    int iterations = 0;
    int restarts_used = 0;
    double final_residual = 0.0;
    bool geometric_candidate = false;  // all oriented-frame shapes in one half-plane
};

// Damped least-squares Newton on the residual vector.  Throws SolveError on
// non-convergence after all restarts, DegenerateShapeError if iterates are
// pinned at a degenerate shape.
ShapeAssignment solve_gluing(const GluingSystem& S, const ShapeAssignment& initial,
                             const SolverConfig& cfg, SolveTrace* trace = nullptr);

// Shapes file: `shape <tet-id> <re> <im>` lines.
ShapeAssignment parse_shapes(const std::string& text, int expected_tets);
std::string serialize_shapes(const ShapeAssignment& s);

}  // namespace csvol
