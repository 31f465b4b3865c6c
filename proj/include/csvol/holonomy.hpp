#pragma once

#include <map>
#include <tuple>
#include <vector>

#include "csvol/flattening.hpp"
#include "csvol/triangulation.hpp"

namespace csvol {

struct Mat2 {
    cplx a{1.0, 0.0}, b{0.0, 0.0}, c{0.0, 0.0}, d{1.0, 0.0};

    static Mat2 id() { return {}; }
    cplx det() const { return a * d - b * c; }
    cplx trace() const { return a + d; }

    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2 inverse() const {
        const cplx dt = det();
        return {d / dt, -b / dt, -c / dt, a / dt};
    }
    double dist(const Mat2& o) const {
        return std::max({std::abs(a - o.a), std::abs(b - o.b), std::abs(c - o.c),
                         std::abs(d - o.d)});
    }
};

// Generator matrices of the lift.
Mat2 lift_m1();                 // first-pair swap edges
Mat2 lift_m2();                 // middle-pair swap edges
Mat2 lift_m3(cplx L);           // last-pair swap edges, L at the lower ordering

enum class EdgeType { E1, E2, E3 };

// SL(2,C)-valued labels on the 1-skeleton of the glued polyhedral complex.
// In-tetrahedron edges carry M1/M2/M3 on their branching orientation; face
// identifications carry the identity.
struct LiftedCocycle {
    const AbstractTriangulation* T = nullptr;
    Branching branching;
    Flattening flat;
    // Explicit labels of the branching-oriented edges, keyed by
    // (tet, ordering code of the lower endpoint, edge type).
    std::map<std::tuple<int, int, int>, Mat2> labels;

    // The lower (branching-lexicographic) endpoint of the edge at `v`.
    Ordering lower_endpoint(int tet, const Ordering& v, EdgeType type, bool* v_is_lower) const;
    // Holonomy of traversing from `v` across the given edge type
    // (forward: v -> swapped v).
    Mat2 edge_holonomy(int tet, const Ordering& v, EdgeType type, bool forward) const;
    // Face-identified partner of a vertex, when its face is glued.
    std::optional<std::pair<int, Ordering>> partner(int tet, const Ordering& v) const;
    bool same_vertex(int tet1, const Ordering& v1, int tet2, const Ordering& v2) const;
};

LiftedCocycle build_lifted_cocycle(const AbstractTriangulation& T, const Branching& b,
                                   const Flattening& F);

struct CellCheck {
    std::string cell;
    double deviation = 0.0;
};

struct EdgeStarCheck {
    int edge = 0;
    bool tail_end = true;
    bool plus_id = false;   // product equals +Id (not merely -Id)
    double deviation = 0.0;  // distance to +/-Id, whichever is closer
};

struct CellReport {
    std::vector<CellCheck> face_cells, edge_squares, vertex_hexagons;
    std::vector<EdgeStarCheck> edge_stars;

    double max_cell_deviation() const;
    bool all_ok(double tol) const;
    std::string first_failure(double tol) const;
};

// Checks every 2-cell relation of the complex and the SL(2,C) closure of
// the edge-star products around each edge polyhedron.
CellReport verify_cells(const LiftedCocycle& C, const std::vector<EdgeClass>& edges);

// A step of a general edge path in the 1-skeleton (boundary or interior).
struct PathStep {
    int tet = 0;
    Ordering ordering{0, 1, 2, 3};
    EdgeType type = EdgeType::E2;
    bool forward = true;
};

// Ordered product of edge labels along the path, inverting labels
// traversed against their orientation.  Face identifications between
// consecutive steps are resolved implicitly (identity labels).  Throws
// ValidationError on a disconnected path.
Mat2 path_holonomy(const LiftedCocycle& C, const std::vector<PathStep>& path);

// Additive boundary holonomy of a closed boundary path: each last-pair
// step contributes -/+ L(lower)/2 and each middle-pair step -/+ i pi/2,
// by traversal direction against the branching orientation.  The
// exponential equals the upper-left entry of the matrix holonomy.
cplx peripheral_log_holonomy(const LiftedCocycle& C, const BoundaryPath& loop);

Mat2 boundary_matrix_holonomy(const LiftedCocycle& C, const BoundaryPath& loop);

struct FundamentalRep {
    std::vector<Mat2> generators;   // one per non-tree face pairing
    std::vector<std::pair<int, int>> dual_edges;  // (tet, face) per generator
};

// Spanning-tree gauge fixing over the dual 1-skeleton; generators are the
// holonomies of the loops through the remaining face pairings.
FundamentalRep fundamental_representation(const LiftedCocycle& C, int base_tet = 0);

}  // namespace csvol
