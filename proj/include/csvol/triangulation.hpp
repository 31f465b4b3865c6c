#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "csvol/perm4.hpp"

namespace csvol {

// One face gluing: face `face` of some tetrahedron maps onto tetrahedron
// `to` by the vertex permutation `perm` (label i of the source goes to
// label perm[i] of the target; in particular perm[face] is the target face).
struct FaceGluing {
    int to = -1;
    Perm4 perm;
};

struct Tetrahedron {
    int id = 0;
    // Gluing per face, indexed by the opposite vertex.  A face without a
    // gluing is a boundary face (allowed only in lenient mode).
    std::array<std::optional<FaceGluing>, 4> glued;
};

// Oriented tetrahedra plus orientation-reversing face pairings.  The
// positive numbering of every tetrahedron is 0<1<2<3; gluing permutations
// must be odd.
struct AbstractTriangulation {
    std::vector<Tetrahedron> tets;

    int size() const { return static_cast<int>(tets.size()); }
    bool fully_glued() const;

    // Checks the structural invariants: gluings stay in range, form an
    // involution, and every permutation is odd.  `strict` additionally
    // requires every face to be glued.  Throws ValidationError.
    void validate(bool strict = true) const;
};

AbstractTriangulation parse_triangulation(const std::string& text);
std::string serialize_triangulation(const AbstractTriangulation& T);

// One wedge of a tetrahedron around an edge: the oriented edge (a,b) of
// tetrahedron `tet`, entered across the face opposite c and left across
// the face opposite d.  (a,b,c,d) is always an even ordering.
struct StarEntry {
    int tet = 0;
    uint8_t a = 0, b = 0, c = 0, d = 0;

    Ordering ordering() const { return {a, b, c, d}; }
};

// An edge of the glued complex together with the cyclic sequence of wedges
// around it.  `closed` is false only for boundary edges of a partially
// glued triangulation, in which case the entries form a chain.
struct EdgeClass {
    int id = 0;
    bool closed = true;
    std::vector<StarEntry> star;

    int degree() const { return static_cast<int>(star.size()); }
};

// Partition of the tetrahedron edges into classes with consistent oriented
// stars.  Throws ValidationError if direction propagation returns with the
// edge reversed (non-orientable identification) or, in strict mode, if a
// star fails to close.
std::vector<EdgeClass> edge_classes(const AbstractTriangulation& T, bool lenient = false);

// Edge orientations of the glued complex inducing a total vertex order on
// every tetrahedron.
struct Branching {
    // Direction per edge class: true = the stored star's (a,b) pairs run
    // tail-to-head, false = reversed.
    std::vector<bool> as_stored;
    // order[t][r] = label of rank r in tetrahedron t (rank 0 is lowest).
    std::vector<std::array<uint8_t, 4>> order;
    // rank_of[t][label] = rank of that label.
    std::vector<std::array<uint8_t, 4>> rank_of;

    // Ordering expressed as branching ranks: ranks[i] = rank of o[i].
    Ordering ranks(int tet, const Ordering& o) const {
        return {rank_of[tet][o[0]], rank_of[tet][o[1]], rank_of[tet][o[2]], rank_of[tet][o[3]]};
    }
    // +1 if the branching order of `tet` is an even permutation of the
    // oriented labels, else -1.
    int orientation_sign(int tet) const { return ordering_even({order[tet][0], order[tet][1], order[tet][2], order[tet][3]}) ? +1 : -1; }
};

// Exhaustive backtracking over edge-class directions; deterministic order
// (classes by id, tail-to-head direction tried first).  Returns at most
// `limit` branchings; the empty list when none exists.
std::vector<Branching> find_branchings(const AbstractTriangulation& T,
                                       const std::vector<EdgeClass>& edges,
                                       std::size_t limit);

// Re-check used by tests: per tetrahedron the six induced directions admit
// a topological sort.
bool branching_is_acyclic(const AbstractTriangulation& T,
                          const std::vector<EdgeClass>& edges,
                          const std::vector<bool>& as_stored,
                          std::vector<std::array<uint8_t, 4>>* order_out = nullptr);

// `branch <edge-class> <tail-vertex-class> <head-vertex-class>` lines.
// Vertex classes are the ideal vertex classes reported by
// boundary_components (component ids).  Throws ParseError, and
// ValidationError when a line is ambiguous (tail and head on the same
// vertex class) or contradicts the stars.
Branching load_branching(const AbstractTriangulation& T,
                         const std::vector<EdgeClass>& edges,
                         const std::string& text);
std::string serialize_branching(const AbstractTriangulation& T,
                                const std::vector<EdgeClass>& edges,
                                const Branching& b);

struct BoundaryComponent {
    int id = 0;
    int euler_characteristic = 0;
    int triangles = 0;
    // Vertex class (= boundary component) of each (tet, vertex).
    // Filled in the aggregate result below, not per component.
};

struct BoundaryInfo {
    std::vector<BoundaryComponent> components;
    // component id per (tet, vertex), indexed [tet][vertex].
    std::vector<std::array<int, 4>> vertex_class;
};

// Components of the boundary surface of the vertex-truncated complex (one
// truncation triangle per (tet, vertex)) with Euler characteristics.
// Requires all faces glued.
BoundaryInfo boundary_components(const AbstractTriangulation& T);

// A path step on the boundary surface: the edge of the truncated
// polyhedron between `ordering` and its E2 (middle) or E3 (last) swap
// within tetrahedron `tet`.  forward=true traverses from `ordering` to the
// swapped ordering.
struct BoundaryStep {
    int tet = 0;
    Ordering ordering{0, 1, 2, 3};
    bool e3 = false;  // false = E2, true = E3
    bool forward = true;
};

struct BoundaryPath {
    std::string name;
    std::vector<BoundaryStep> steps;
};

std::vector<BoundaryPath> parse_paths(const std::string& text);

}  // namespace csvol
