#include "csvol/holonomy.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "csvol/errors.hpp"

namespace csvol {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
const cplx kI(0.0, 1.0);
const cplx kIPi(0.0, kPi);
}  // namespace

Mat2 lift_m1() { return {0.0, -kI, -kI, 0.0}; }
Mat2 lift_m2() { return {-kI, kI, 0.0, kI}; }
Mat2 lift_m3(cplx L) { return {std::exp(-L / 2.0), 0.0, 0.0, std::exp(L / 2.0)}; }

namespace {

Ordering swapped(const Ordering& v, EdgeType t) {
    switch (t) {
        case EdgeType::E1: return swap_first(v);
        case EdgeType::E2: return swap_middle(v);
        default: return swap_last(v);
    }
}

int swap_position(EdgeType t) {
    switch (t) {
        case EdgeType::E1: return 0;
        case EdgeType::E2: return 1;
        default: return 2;
    }
}

}  // namespace

Ordering LiftedCocycle::lower_endpoint(int tet, const Ordering& v, EdgeType type,
                                       bool* v_is_lower) const {
    const int pos = swap_position(type);
    const Ordering r = branching.ranks(tet, v);
    const bool lower = r[pos] < r[pos + 1];
    if (v_is_lower) *v_is_lower = lower;
    return lower ? v : swapped(v, type);
}

Mat2 LiftedCocycle::edge_holonomy(int tet, const Ordering& v, EdgeType type, bool forward) const {
    bool v_low = false;
    const Ordering low = lower_endpoint(tet, v, type, &v_low);
    Mat2 m;
    switch (type) {
        case EdgeType::E1: m = lift_m1(); break;
        case EdgeType::E2: m = lift_m2(); break;
        default:
            m = lift_m3(expand_flattening(flat.tets[tet], branching.ranks(tet, low)));
            break;
    }
    const bool along = (v_low == forward);  // traversal runs lower -> higher
    return along ? m : m.inverse();
}

std::optional<std::pair<int, Ordering>> LiftedCocycle::partner(int tet, const Ordering& v) const {
    const int face = v[3];
    const auto& g = T->tets[tet].glued[face];
    if (!g) return std::nullopt;
    return std::make_pair(g->to, apply_perm(g->perm, v));
}

bool LiftedCocycle::same_vertex(int tet1, const Ordering& v1, int tet2, const Ordering& v2) const {
    if (tet1 == tet2 && v1 == v2) return true;
    const auto p = partner(tet1, v1);
    return p && p->first == tet2 && p->second == v2;
}

LiftedCocycle build_lifted_cocycle(const AbstractTriangulation& T, const Branching& b,
                                   const Flattening& F) {
    LiftedCocycle C;
    C.T = &T;
    C.branching = b;
    C.flat = F;
    static const std::array<EdgeType, 3> kTypes = {EdgeType::E1, EdgeType::E2, EdgeType::E3};
    std::array<uint8_t, 4> perm = {0, 1, 2, 3};
    for (int t = 0; t < T.size(); ++t) {
        std::array<uint8_t, 4> o = perm;
        std::sort(o.begin(), o.end());
        do {
            const Ordering v = {o[0], o[1], o[2], o[3]};
            for (EdgeType ty : kTypes) {
                bool low = false;
                const Ordering lo = C.lower_endpoint(t, v, ty, &low);
                if (!low) continue;  // store each edge once, at its lower end
                C.labels[{t, ordering_code(lo), static_cast<int>(ty)}] =
                    C.edge_holonomy(t, lo, ty, true);
            }
        } while (std::next_permutation(o.begin(), o.end()));
    }
    return C;
}

namespace {

// Walks a closed cycle of edges inside one tetrahedron and returns the
// holonomy product (later edges multiply on the left).
Mat2 walk_cycle(const LiftedCocycle& C, int tet, Ordering start,
                const std::vector<EdgeType>& types) {
    Mat2 total = Mat2::id();
    Ordering v = start;
    for (EdgeType t : types) {
        total = C.edge_holonomy(tet, v, t, true) * total;
        v = swapped(v, t);
    }
    if (!(v == start)) throw ValidationError("cell walk did not close");
    return total;
}

double dev_from(const Mat2& m, const Mat2& target) { return m.dist(target); }

}  // namespace

double CellReport::max_cell_deviation() const {
    double m = 0.0;
    for (const auto& c : face_cells) m = std::max(m, c.deviation);
    for (const auto& c : edge_squares) m = std::max(m, c.deviation);
    for (const auto& c : vertex_hexagons) m = std::max(m, c.deviation);
    for (const auto& c : edge_stars) m = std::max(m, c.deviation);
    return m;
}

bool CellReport::all_ok(double tol) const {
    if (max_cell_deviation() > tol) return false;
    for (const auto& s : edge_stars)
        if (!s.plus_id) return false;
    return true;
}

std::string CellReport::first_failure(double tol) const {
    for (const auto& c : face_cells)
        if (c.deviation > tol) return "face relation " + c.cell;
    for (const auto& c : edge_squares)
        if (c.deviation > tol) return "edge-square relation " + c.cell;
    for (const auto& c : vertex_hexagons)
        if (c.deviation > tol) return "vertex-hexagon relation " + c.cell;
    for (const auto& s : edge_stars)
        if (s.deviation > tol || !s.plus_id)
            return "edge-star closure at edge " + std::to_string(s.edge) +
                   (s.tail_end ? " (tail end)" : " (head end)") +
                   (s.plus_id ? "" : ": product is -Id");
    return "";
}

CellReport verify_cells(const LiftedCocycle& C, const std::vector<EdgeClass>& edges) {
    CellReport rep;
    const auto& T = *C.T;

    for (int t = 0; t < T.size(); ++t) {
        // Type-face cells: fixed last letter, boundary alternates E2/E1.
        for (uint8_t last = 0; last < 4; ++last) {
            Ordering v;
            int k = 0;
            for (uint8_t x = 0; x < 4; ++x)
                if (x != last) v[k++] = x;
            v[3] = last;
            const Mat2 m = walk_cycle(C, t, v,
                                      {EdgeType::E2, EdgeType::E1, EdgeType::E2, EdgeType::E1,
                                       EdgeType::E2, EdgeType::E1});
            rep.face_cells.push_back(
                {"tet " + std::to_string(t) + " face " + std::to_string(int(last)),
                 dev_from(m, Mat2::id())});
        }
        // Type-edge squares: E1 E3 E1 E3 around each of the six edges.
        static const std::array<std::array<uint8_t, 4>, 6> kPairs = {{
            {0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}, {1, 2, 0, 3}, {1, 3, 0, 2}, {2, 3, 0, 1},
        }};
        for (const auto& pr : kPairs) {
            const Ordering v = {pr[0], pr[1], pr[2], pr[3]};
            const Mat2 m = walk_cycle(C, t, v,
                                      {EdgeType::E1, EdgeType::E3, EdgeType::E1, EdgeType::E3});
            rep.edge_squares.push_back(
                {"tet " + std::to_string(t) + " edge (" + std::to_string(int(pr[0])) + "," +
                     std::to_string(int(pr[1])) + ")",
                 dev_from(m, Mat2::id())});
        }
        // Type-vertex hexagons: fixed first letter, E3/E2 alternating.
        for (uint8_t first = 0; first < 4; ++first) {
            Ordering v;
            v[0] = first;
            int k = 1;
            for (uint8_t x = 0; x < 4; ++x)
                if (x != first) v[k++] = x;
            const Mat2 m = walk_cycle(C, t, v,
                                      {EdgeType::E3, EdgeType::E2, EdgeType::E3, EdgeType::E2,
                                       EdgeType::E3, EdgeType::E2});
            rep.vertex_hexagons.push_back(
                {"tet " + std::to_string(t) + " vertex " + std::to_string(int(first)),
                 dev_from(m, Mat2::id())});
        }
    }

    // Edge-star closures around each edge polyhedron, both ends.
    for (const auto& ec : edges) {
        if (!ec.closed) continue;
        for (bool tail : {true, false}) {
            Mat2 total = Mat2::id();
            for (const auto& e : ec.star) {
                const Ordering v = tail ? Ordering{e.a, e.b, e.c, e.d}
                                        : Ordering{e.b, e.a, e.c, e.d};
                total = C.edge_holonomy(e.tet, v, EdgeType::E3, true) * total;
            }
            EdgeStarCheck chk;
            chk.edge = ec.id;
            chk.tail_end = tail;
            const double dplus = dev_from(total, Mat2::id());
            Mat2 neg = Mat2::id();
            neg.a = -1.0;
            neg.d = -1.0;
            const double dminus = dev_from(total, neg);
            chk.plus_id = dplus <= dminus;
            chk.deviation = std::min(dplus, dminus);
            rep.edge_stars.push_back(chk);
        }
    }
    return rep;
}

Mat2 path_holonomy(const LiftedCocycle& C, const std::vector<PathStep>& path) {
    Mat2 total = Mat2::id();
    int cur_tet = -1;
    Ordering cur_v{0, 1, 2, 3};
    bool have_pos = false;
    for (const auto& s : path) {
        const Ordering from = s.forward ? s.ordering : swapped(s.ordering, s.type);
        const Ordering to = s.forward ? swapped(s.ordering, s.type) : s.ordering;
        if (have_pos && !C.same_vertex(cur_tet, cur_v, s.tet, from))
            throw ValidationError("path is disconnected at tet " + std::to_string(s.tet) +
                                  " ordering " + ordering_str(from));
        // Traverse from `from`: forward means along from -> swapped(from).
        total = C.edge_holonomy(s.tet, from, s.type, true) * total;
        cur_tet = s.tet;
        cur_v = to;
        have_pos = true;
    }
    return total;
}

namespace {

std::vector<PathStep> boundary_to_path(const BoundaryPath& loop) {
    std::vector<PathStep> p;
    for (const auto& s : loop.steps)
        p.push_back({s.tet, s.ordering, s.e3 ? EdgeType::E3 : EdgeType::E2, s.forward});
    return p;
}

}  // namespace

Mat2 boundary_matrix_holonomy(const LiftedCocycle& C, const BoundaryPath& loop) {
    return path_holonomy(C, boundary_to_path(loop));
}

cplx peripheral_log_holonomy(const LiftedCocycle& C, const BoundaryPath& loop) {
    if (loop.steps.empty()) return 0.0;
    // Closedness and connectivity.
    const auto path = boundary_to_path(loop);
    int cur_tet = -1;
    Ordering cur_v{0, 1, 2, 3};
    bool have = false;
    cplx sum = 0.0;
    for (const auto& s : path) {
        const Ordering from = s.forward ? s.ordering : swapped(s.ordering, s.type);
        const Ordering to = s.forward ? swapped(s.ordering, s.type) : s.ordering;
        if (have && !C.same_vertex(cur_tet, cur_v, s.tet, from))
            throw ValidationError("boundary loop is disconnected");
        bool from_low = false;
        const Ordering low = C.lower_endpoint(s.tet, from, s.type, &from_low);
        const double dir = from_low ? +1.0 : -1.0;
        if (s.type == EdgeType::E3)
            sum += -dir * 0.5 * expand_flattening(C.flat.tets[s.tet], C.branching.ranks(s.tet, low));
        else
            sum += -dir * 0.5 * kIPi;
        cur_tet = s.tet;
        cur_v = to;
        have = true;
    }
    const auto& f = loop.steps.front();
    const Ordering start = f.forward ? f.ordering : swapped(f.ordering, f.e3 ? EdgeType::E3 : EdgeType::E2);
    if (!C.same_vertex(cur_tet, cur_v, f.tet, start))
        throw ValidationError("boundary path is not a closed loop");
    return sum;
}

FundamentalRep fundamental_representation(const LiftedCocycle& C, int base_tet) {
    const auto& T = *C.T;
    const int n = T.size();
    // Spanning tree of the dual graph.
    std::vector<int> tree_parent(n, -1), tree_face(n, -1);
    std::vector<bool> seen(n, false);
    std::deque<int> bfs{base_tet};
    seen[base_tet] = true;
    std::vector<std::pair<int, int>> order;  // (tet, entered-via-face)
    while (!bfs.empty()) {
        const int t = bfs.front();
        bfs.pop_front();
        for (int f = 0; f < 4; ++f) {
            const auto& g = T.tets[t].glued[f];
            if (!g || seen[g->to]) continue;
            seen[g->to] = true;
            tree_parent[g->to] = t;
            tree_face[g->to] = f;
            bfs.push_back(g->to);
        }
    }
    for (int t = 0; t < n; ++t)
        if (!seen[t]) throw ValidationError("triangulation is not connected");

    // In-tetrahedron path between two orderings via BFS on the 24-vertex
    // graph with E1/E2/E3 moves.
    auto in_tet_path = [&](int tet, const Ordering& from, const Ordering& to) {
        std::map<int, std::pair<int, EdgeType>> prev;  // code -> (prev code, move)
        std::deque<Ordering> q{from};
        prev[ordering_code(from)] = {-1, EdgeType::E1};
        while (!q.empty()) {
            const Ordering v = q.front();
            q.pop_front();
            if (v == to) break;
            for (EdgeType ty : {EdgeType::E1, EdgeType::E2, EdgeType::E3}) {
                const Ordering w = swapped(v, ty);
                if (prev.count(ordering_code(w))) continue;
                prev[ordering_code(w)] = {ordering_code(v), ty};
                q.push_back(w);
            }
        }
        // Reconstruct as PathSteps from `from` to `to`.
        std::vector<PathStep> steps;
        int cur = ordering_code(to);
        while (prev.at(cur).first != -1) {
            const auto [pc, ty] = prev.at(cur);
            Ordering pv = {uint8_t(pc / 64), uint8_t((pc / 16) % 4), uint8_t((pc / 4) % 4),
                           uint8_t(pc % 4)};
            steps.push_back({tet, pv, ty, true});
            cur = pc;
        }
        std::reverse(steps.begin(), steps.end());
        return steps;
    };

    // Reference vertex per tet, connected to the base through tree gluings:
    // hol_to_ref[t] carries the holonomy of the path base_ref -> ref(t).
    const Ordering kRef{0, 1, 2, 3};
    std::vector<Mat2> hol_to_ref(n, Mat2::id());
    std::vector<Ordering> ref(n, kRef);
    // BFS order again to fill parents first.
    std::vector<int> topo;
    {
        std::deque<int> q{base_tet};
        std::vector<bool> vis(n, false);
        vis[base_tet] = true;
        while (!q.empty()) {
            const int t = q.front();
            q.pop_front();
            topo.push_back(t);
            for (int u = 0; u < n; ++u)
                if (!vis[u] && tree_parent[u] == t) {
                    vis[u] = true;
                    q.push_back(u);
                }
        }
    }
    for (int t : topo) {
        if (t == base_tet) continue;
        const int par = tree_parent[t];
        const int f = tree_face[t];
        const auto& g = *T.tets[par].glued[f];
        // Walk in the parent from its ref to a vertex on face f (any
        // ordering with last letter f), jump, then walk to the child's ref.
        Ordering exitv;
        int kk = 0;
        for (uint8_t x = 0; x < 4; ++x)
            if (x != f) exitv[kk++] = x;
        exitv[3] = static_cast<uint8_t>(f);
        Mat2 m = path_holonomy(C, in_tet_path(par, ref[par], exitv));
        const Ordering entry = apply_perm(g.perm, exitv);
        Mat2 m2 = path_holonomy(C, in_tet_path(t, entry, ref[t]));
        hol_to_ref[t] = m2 * m * hol_to_ref[par];
    }

    FundamentalRep repn;
    for (int t = 0; t < n; ++t)
        for (int f = 0; f < 4; ++f) {
            const auto& g = T.tets[t].glued[f];
            if (!g) continue;
            // Skip tree gluings (in either direction) and count each pairing once.
            const bool is_tree = (tree_parent[g->to] == t && tree_face[g->to] == f) ||
                                 (tree_parent[t] == g->to && g->perm[f] == tree_face[t]);
            if (is_tree) continue;
            if (std::make_pair(t, f) > std::make_pair(g->to, int(g->perm[f]))) continue;
            Ordering exitv;
            int k = 0;
            for (uint8_t x = 0; x < 4; ++x)
                if (x != f) exitv[k++] = x;
            exitv[3] = static_cast<uint8_t>(f);
            Mat2 m = path_holonomy(C, in_tet_path(t, ref[t], exitv));
            const Ordering entry = apply_perm(g->perm, exitv);
            Mat2 m2 = path_holonomy(C, in_tet_path(g->to, entry, ref[g->to]));
            // Loop: base -> ref(t) -> exit -> jump -> ref(to) -> base.
            const Mat2 loop = hol_to_ref[g->to].inverse() * m2 * m * hol_to_ref[t];
            repn.generators.push_back(loop);
            repn.dual_edges.push_back({t, f});
        }
    return repn;
}

}  // namespace csvol
