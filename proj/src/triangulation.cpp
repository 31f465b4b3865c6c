#include "csvol/triangulation.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

#include "csvol/errors.hpp"

namespace csvol {

bool AbstractTriangulation::fully_glued() const {
    for (const auto& t : tets)
        for (const auto& g : t.glued)
            if (!g) return false;
    return true;
}

void AbstractTriangulation::validate(bool strict) const {
    const int n = size();
    for (int t = 0; t < n; ++t) {
        for (int f = 0; f < 4; ++f) {
            const auto& g = tets[t].glued[f];
            if (!g) {
                if (strict)
                    throw ValidationError("tet " + std::to_string(t) + " face " +
                                          std::to_string(f) + " is unglued (strict mode)");
                continue;
            }
            if (g->to < 0 || g->to >= n)
                throw ValidationError("tet " + std::to_string(t) + " face " + std::to_string(f) +
                                      " glued to nonexistent tet " + std::to_string(g->to));
            if (g->perm.is_even())
                throw ValidationError("orientation violation: gluing of tet " + std::to_string(t) +
                                      " face " + std::to_string(f) + " has even permutation " +
                                      g->perm.str());
            // Involution: the target face must point back with the inverse map.
            const int tf = g->perm[f];
            const auto& back = tets[g->to].glued[tf];
            if (!back || back->to != t || !(back->perm == g->perm.inverse()) || back->perm[tf] != f)
                throw ValidationError("gluing of tet " + std::to_string(t) + " face " +
                                      std::to_string(f) + " is not involutive");
        }
    }
}

namespace {

int parse_int(const std::string& tok, int line) {
    try {
        std::size_t pos = 0;
        int v = std::stoi(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ParseError("expected integer, got '" + tok + "'", line);
    }
}

}  // namespace

AbstractTriangulation parse_triangulation(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    AbstractTriangulation T;
    bool have_header = false, have_count = false;

    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::istringstream ls(raw);
        std::vector<std::string> tok;
        for (std::string w; ls >> w;) tok.push_back(w);
        if (tok.empty()) continue;

        if (!have_header) {
            if (tok.size() != 2 || tok[0] != "tri" || tok[1] != "1")
                throw ParseError("expected header 'tri 1'", lineno);
            have_header = true;
            continue;
        }
        if (!have_count) {
            if (tok.size() != 2 || tok[0] != "tets")
                throw ParseError("expected 'tets N'", lineno);
            const int n = parse_int(tok[1], lineno);
            if (n < 0) throw ParseError("negative tetrahedron count", lineno);
            T.tets.resize(n);
            for (int i = 0; i < n; ++i) T.tets[i].id = i;
            have_count = true;
            continue;
        }
        if (tok[0] != "glue")
            throw ParseError("unknown directive '" + tok[0] + "'", lineno);
        if (tok.size() != 8)
            throw ParseError("glue line needs 7 fields: glue <t> <f> <t'> <p0> <p1> <p2> <p3>",
                             lineno);
        const int t = parse_int(tok[1], lineno);
        const int f = parse_int(tok[2], lineno);
        const int to = parse_int(tok[3], lineno);
        if (t < 0 || t >= T.size()) throw ParseError("tet index out of range", lineno);
        if (f < 0 || f > 3) throw ParseError("face index out of range", lineno);
        if (to < 0 || to >= T.size()) throw ParseError("target tet index out of range", lineno);
        Perm4 p;
        std::array<bool, 4> seen{};
        for (int i = 0; i < 4; ++i) {
            const int v = parse_int(tok[4 + i], lineno);
            if (v < 0 || v > 3) throw ParseError("permutation entry out of range", lineno);
            if (seen[v]) throw ParseError("permutation repeats label " + std::to_string(v), lineno);
            seen[v] = true;
            p.img[i] = static_cast<uint8_t>(v);
        }
        if (p.is_even())
            throw ParseError("orientation violation: even permutation " + p.str(), lineno);
        if (T.tets[t].glued[f])
            throw ParseError("dangling face / duplicate: tet " + std::to_string(t) + " face " +
                                 std::to_string(f) + " glued twice",
                             lineno);
        T.tets[t].glued[f] = FaceGluing{to, p};
    }
    if (!have_header) throw ParseError("empty file: missing 'tri 1' header", 1);
    if (!have_count) throw ParseError("missing 'tets N' line", lineno);
    T.validate(/*strict=*/false);
    return T;
}

std::string serialize_triangulation(const AbstractTriangulation& T) {
    std::ostringstream out;
    out << "tri 1\n";
    out << "tets " << T.size() << "\n";
    for (int t = 0; t < T.size(); ++t)
        for (int f = 0; f < 4; ++f)
            if (const auto& g = T.tets[t].glued[f]) {
                out << "glue " << t << " " << f << " " << g->to;
                for (int i = 0; i < 4; ++i) out << " " << int(g->perm[i]);
                out << "\n";
            }
    return out.str();
}

namespace {

// Advances one wedge around the edge: exit across the face opposite d.
// Returns false at an unglued face.
bool star_step(const AbstractTriangulation& T, const StarEntry& e, StarEntry* next) {
    const auto& g = T.tets[e.tet].glued[e.c];
    if (!g) return false;
    const Perm4& p = g->perm;
    next->tet = g->to;
    next->a = p[e.a];
    next->b = p[e.b];
    next->c = p[e.d];
    next->d = p[e.c];
    return true;
}

StarEntry reverse_entry(const StarEntry& e) { return {e.tet, e.b, e.a, e.d, e.c}; }

bool entry_less(const StarEntry& x, const StarEntry& y) {
    return std::tie(x.tet, x.a, x.b, x.c, x.d) < std::tie(y.tet, y.a, y.b, y.c, y.d);
}

// Canonical cyclic form: rotate so the smallest entry comes first, and for
// closed stars prefer the direction (as built or reversed) whose canonical
// first entry is smaller.
std::vector<StarEntry> canonical_cycle(std::vector<StarEntry> s, bool closed) {
    auto rotate_min = [](std::vector<StarEntry>& v) {
        auto it = std::min_element(v.begin(), v.end(), entry_less);
        std::rotate(v.begin(), it, v.end());
    };
    if (!closed) return s;  // chains keep their boundary-to-boundary order
    rotate_min(s);
    std::vector<StarEntry> r(s.rbegin(), s.rend());
    for (auto& e : r) e = reverse_entry(e);
    rotate_min(r);
    return entry_less(r.front(), s.front()) ? r : s;
}

}  // namespace

std::vector<EdgeClass> edge_classes(const AbstractTriangulation& T, bool lenient) {
    if (!lenient && !T.fully_glued())
        throw ValidationError("triangulation has unglued faces (use lenient mode)");

    // The six edges of a tetrahedron as (a,b,c,d) with (a,b,c,d) even.
    static const std::array<std::array<uint8_t, 4>, 6> kWedges = {{
        {0, 1, 2, 3}, {0, 2, 3, 1}, {0, 3, 1, 2}, {1, 2, 0, 3}, {1, 3, 2, 0}, {2, 3, 0, 1},
    }};

    std::vector<std::vector<bool>> used(T.size(), std::vector<bool>(16, false));
    auto edge_slot = [](uint8_t a, uint8_t b) { return std::min(a, b) * 4 + std::max(a, b); };

    std::vector<EdgeClass> classes;
    for (int t0 = 0; t0 < T.size(); ++t0) {
        for (const auto& w : kWedges) {
            if (used[t0][edge_slot(w[0], w[1])]) continue;
            StarEntry seed{t0, w[0], w[1], w[2], w[3]};

            std::vector<StarEntry> star{seed};
            bool closed = false;
            StarEntry cur = seed;
            for (;;) {
                StarEntry nxt;
                if (!star_step(T, cur, &nxt)) break;  // open chain
                if (nxt.tet == seed.tet && nxt.a == seed.a && nxt.b == seed.b &&
                    nxt.c == seed.c && nxt.d == seed.d) {
                    closed = true;
                    break;
                }
                if (nxt.tet == seed.tet && nxt.a == seed.b && nxt.b == seed.a)
                    throw ValidationError(
                        "edge star returned with reversed orientation (non-orientable gluing) at "
                        "tet " +
                        std::to_string(seed.tet));
                if (star.size() > 24u * T.tets.size())
                    throw ValidationError("edge star fails to close into a single cycle");
                star.push_back(nxt);
                cur = nxt;
            }
            if (!closed) {
                if (!lenient)
                    throw ValidationError("edge star fails to close into a single cycle");
                // Walk backwards from the seed to the other boundary face.
                std::vector<StarEntry> back;
                StarEntry rcur = reverse_entry(seed);
                for (;;) {
                    StarEntry nxt;
                    if (!star_step(T, rcur, &nxt)) break;
                    back.push_back(reverse_entry(nxt));
                    rcur = nxt;
                    if (back.size() > 24u * T.tets.size())
                        throw ValidationError("edge star fails to close into a single cycle");
                }
                std::reverse(back.begin(), back.end());
                back.insert(back.end(), star.begin(), star.end());
                star = std::move(back);
            }

            EdgeClass ec;
            ec.id = static_cast<int>(classes.size());
            ec.closed = closed;
            ec.star = canonical_cycle(std::move(star), closed);
            for (const auto& e : ec.star) {
                auto flag = used[e.tet][edge_slot(e.a, e.b)];
                if (flag)
                    throw ValidationError("edge wedge visited twice; invalid identification");
                used[e.tet][edge_slot(e.a, e.b)] = true;
            }
            classes.push_back(std::move(ec));
        }
    }
    return classes;
}

namespace {

// Directions the edge classes induce inside one tetrahedron, as a list of
// (tail, head) label pairs per tet.
std::vector<std::vector<std::pair<uint8_t, uint8_t>>> tet_edge_directions(
    const AbstractTriangulation& T, const std::vector<EdgeClass>& edges,
    const std::vector<bool>& as_stored) {
    std::vector<std::vector<std::pair<uint8_t, uint8_t>>> dir(T.size());
    for (std::size_t i = 0; i < edges.size(); ++i)
        for (const auto& e : edges[i].star) {
            uint8_t tail = e.a, head = e.b;
            if (!as_stored[i]) std::swap(tail, head);
            dir[e.tet].push_back({tail, head});
        }
    return dir;
}

bool topo_order(const std::vector<std::pair<uint8_t, uint8_t>>& arcs,
                std::array<uint8_t, 4>* order) {
    std::array<int, 4> indeg{};
    std::array<std::array<bool, 4>, 4> adj{};
    for (auto [a, b] : arcs) {
        if (a == b) return false;
        if (!adj[a][b]) {
            if (adj[b][a]) return false;  // both directions forced
            adj[a][b] = true;
            ++indeg[b];
        }
    }
    std::array<bool, 4> done{};
    for (int r = 0; r < 4; ++r) {
        int pick = -1;
        for (int v = 0; v < 4; ++v)
            if (!done[v] && indeg[v] == 0) {
                if (pick >= 0) {
                    // A branching needs all six directions; with a full set of
                    // arcs the order is unique, so two sources means the arcs
                    // were incomplete.  Prefer the smaller label for
                    // determinism; acyclicity is unaffected.
                    break;
                }
                pick = v;
            }
        if (pick < 0) return false;  // cycle
        done[pick] = true;
        (*order)[r] = static_cast<uint8_t>(pick);
        for (int v = 0; v < 4; ++v)
            if (adj[pick][v]) --indeg[v];
    }
    return true;
}

}  // namespace

bool branching_is_acyclic(const AbstractTriangulation& T, const std::vector<EdgeClass>& edges,
                          const std::vector<bool>& as_stored,
                          std::vector<std::array<uint8_t, 4>>* order_out) {
    auto dirs = tet_edge_directions(T, edges, as_stored);
    std::vector<std::array<uint8_t, 4>> orders(T.size());
    for (int t = 0; t < T.size(); ++t)
        if (!topo_order(dirs[t], &orders[t])) return false;
    if (order_out) *order_out = std::move(orders);
    return true;
}

namespace {

Branching make_branching(const AbstractTriangulation& T, std::vector<bool> as_stored,
                         std::vector<std::array<uint8_t, 4>> orders) {
    Branching b;
    b.as_stored = std::move(as_stored);
    b.order = std::move(orders);
    b.rank_of.resize(T.size());
    for (int t = 0; t < T.size(); ++t)
        for (int r = 0; r < 4; ++r) b.rank_of[t][b.order[t][r]] = static_cast<uint8_t>(r);
    return b;
}

}  // namespace

std::vector<Branching> find_branchings(const AbstractTriangulation& T,
                                       const std::vector<EdgeClass>& edges, std::size_t limit) {
    std::vector<Branching> out;
    if (limit == 0) return out;
    const std::size_t m = edges.size();
    std::vector<bool> choice(m, true);

    // Partial-assignment pruning: arcs of the first k classes must stay acyclic.
    auto prune = [&](std::size_t k) {
        std::vector<std::vector<std::pair<uint8_t, uint8_t>>> dirs(T.size());
        for (std::size_t i = 0; i < k; ++i)
            for (const auto& e : edges[i].star) {
                uint8_t tail = e.a, head = e.b;
                if (!choice[i]) std::swap(tail, head);
                dirs[e.tet].push_back({tail, head});
            }
        for (int t = 0; t < T.size(); ++t) {
            std::array<uint8_t, 4> o;
            if (!topo_order(dirs[t], &o)) return true;
        }
        return false;
    };

    // Tail-to-head (as stored) explored before the reversed direction.
    auto rec = [&](auto&& self, std::size_t k) -> void {
        if (out.size() >= limit) return;
        if (k == m) {
            std::vector<std::array<uint8_t, 4>> orders;
            if (branching_is_acyclic(T, edges, choice, &orders))
                out.push_back(make_branching(T, choice, std::move(orders)));
            return;
        }
        for (bool v : {true, false}) {
            choice[k] = v;
            if (!prune(k + 1)) self(self, k + 1);
            if (out.size() >= limit) return;
        }
    };
    rec(rec, 0);
    return out;
}

BoundaryInfo boundary_components(const AbstractTriangulation& T) {
    T.validate(true);
    const int n = T.size();
    // Truncation triangles indexed by 4*tet + vertex; union-find over them.
    std::vector<int> parent(4 * n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto unite = [&](int x, int y) { parent[find(x)] = find(y); };

    for (int t = 0; t < n; ++t)
        for (int f = 0; f < 4; ++f) {
            const auto& g = T.tets[t].glued[f];
            for (int v = 0; v < 4; ++v)
                if (v != f) unite(4 * t + v, 4 * g->to + g->perm[v]);
        }

    BoundaryInfo info;
    info.vertex_class.assign(n, {-1, -1, -1, -1});
    std::map<int, int> comp_of_root;
    for (int t = 0; t < n; ++t)
        for (int v = 0; v < 4; ++v) {
            int r = find(4 * t + v);
            auto [it, fresh] = comp_of_root.insert({r, static_cast<int>(comp_of_root.size())});
            info.vertex_class[t][v] = it->second;
        }

    const int ncomp = static_cast<int>(comp_of_root.size());
    std::vector<int> faces(ncomp, 0), edges2(ncomp, 0), verts(ncomp, 0);
    for (int t = 0; t < n; ++t)
        for (int v = 0; v < 4; ++v) faces[info.vertex_class[t][v]] += 1;
    // Each (tet, vertex, face) side is glued to exactly one other side.
    for (int t = 0; t < n; ++t)
        for (int v = 0; v < 4; ++v)
            edges2[info.vertex_class[t][v]] += 3;  // counts each edge twice
    // Boundary vertices = ends of edge classes; the corner cycle around a
    // boundary vertex is the edge star seen from that end.
    auto classes = edge_classes(T, /*lenient=*/false);
    for (const auto& ec : classes) {
        const auto& e = ec.star.front();
        verts[info.vertex_class[e.tet][e.a]] += 1;
        verts[info.vertex_class[e.tet][e.b]] += 1;
    }

    for (int c = 0; c < ncomp; ++c) {
        BoundaryComponent bc;
        bc.id = c;
        bc.triangles = faces[c];
        bc.euler_characteristic = verts[c] - edges2[c] / 2 + faces[c];
        info.components.push_back(bc);
    }
    return info;
}

Branching load_branching(const AbstractTriangulation& T, const std::vector<EdgeClass>& edges,
                         const std::string& text) {
    BoundaryInfo binfo = boundary_components(T);
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    std::vector<int> head_class(edges.size(), -1);
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::istringstream ls(raw);
        std::vector<std::string> tok;
        for (std::string w; ls >> w;) tok.push_back(w);
        if (tok.empty()) continue;
        if (tok[0] != "branch" || tok.size() != 4)
            throw ParseError("expected 'branch <edge> <tail-class> <head-class>'", lineno);
        const int e = parse_int(tok[1], lineno);
        const int tail = parse_int(tok[2], lineno);
        const int head = parse_int(tok[3], lineno);
        if (e < 0 || e >= static_cast<int>(edges.size()))
            throw ParseError("edge class out of range", lineno);
        if (tail == head)
            throw ValidationError("branch line for edge " + std::to_string(e) +
                                  " is ambiguous: both endpoints lie on vertex class " +
                                  std::to_string(head));
        head_class[e] = head;
        const auto& fe = edges[e].star.front();
        const int stored_tail = binfo.vertex_class[fe.tet][fe.a];
        const int stored_head = binfo.vertex_class[fe.tet][fe.b];
        if ((stored_tail != tail || stored_head != head) &&
            (stored_tail != head || stored_head != tail))
            throw ValidationError("branch line for edge " + std::to_string(e) +
                                  " names vertex classes not incident to it");
    }
    std::vector<bool> as_stored(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (head_class[e] < 0)
            throw ValidationError("no branch line for edge class " + std::to_string(e));
        const auto& fe = edges[e].star.front();
        as_stored[e] = binfo.vertex_class[fe.tet][fe.b] == head_class[e];
    }
    std::vector<std::array<uint8_t, 4>> orders;
    if (!branching_is_acyclic(T, edges, as_stored, &orders))
        throw ValidationError("edge directions do not form a branching (cyclic tetrahedron)");
    return make_branching(T, as_stored, std::move(orders));
}

std::string serialize_branching(const AbstractTriangulation& T,
                                const std::vector<EdgeClass>& edges, const Branching& b) {
    BoundaryInfo binfo = boundary_components(T);
    std::ostringstream out;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto& fe = edges[e].star.front();
        int tail = binfo.vertex_class[fe.tet][fe.a];
        int head = binfo.vertex_class[fe.tet][fe.b];
        if (!b.as_stored[e]) std::swap(tail, head);
        out << "branch " << e << " " << tail << " " << head << "\n";
    }
    return out.str();
}

std::vector<BoundaryPath> parse_paths(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    std::vector<BoundaryPath> paths;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::istringstream ls(raw);
        std::vector<std::string> tok;
        for (std::string w; ls >> w;) tok.push_back(w);
        if (tok.empty()) continue;
        if (tok[0] == "path") {
            if (tok.size() != 2) throw ParseError("expected 'path <name>'", lineno);
            paths.push_back(BoundaryPath{tok[1], {}});
            continue;
        }
        if (tok[0] != "step" || tok.size() != 5)
            throw ParseError("expected 'step <tet> <ordering> <E2|E3> <+|->'", lineno);
        if (paths.empty()) throw ParseError("step before any 'path' line", lineno);
        BoundaryStep s;
        s.tet = parse_int(tok[1], lineno);
        if (tok[2].size() != 4) throw ParseError("ordering must have 4 digits", lineno);
        std::array<bool, 4> seen{};
        for (int i = 0; i < 4; ++i) {
            const char c = tok[2][i];
            if (c < '0' || c > '3') throw ParseError("bad ordering digit", lineno);
            if (seen[c - '0']) throw ParseError("ordering repeats a label", lineno);
            seen[c - '0'] = true;
            s.ordering[i] = static_cast<uint8_t>(c - '0');
        }
        if (tok[3] == "E2")
            s.e3 = false;
        else if (tok[3] == "E3")
            s.e3 = true;
        else
            throw ParseError("edge type must be E2 or E3", lineno);
        if (tok[4] == "+")
            s.forward = true;
        else if (tok[4] == "-")
            s.forward = false;
        else
            throw ParseError("direction must be + or -", lineno);
        paths.back().steps.push_back(s);
    }
    return paths;
}

}  // namespace csvol
