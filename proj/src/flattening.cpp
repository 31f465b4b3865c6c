#include "csvol/flattening.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include "csvol/errors.hpp"

namespace csvol {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
const cplx kIPi(0.0, kPi);
const cplx kTwoPiI(0.0, 2.0 * kPi);
constexpr double kGuard = 1e-6;
}  // namespace

cplx TetFlattening::l3() const { return kIPi - l1 - l2; }

TetFlattening TetFlattening::from_lifts(cplx z, long long p, long long q, int sigma) {
    TetFlattening f;
    f.z = z;
    f.p = p;
    f.q = q;
    f.sigma = sigma;
    f.l1 = clog(z) + double(p) * kTwoPiI;
    f.l2 = -clog1m(z) + double(q) * kTwoPiI + double(sigma) * kIPi;
    return f;
}

TetFlattening TetFlattening::from_logs(cplx l1, cplx l2, double tol) {
    const cplx z = std::exp(l1);
    if (std::abs(z) < 1e-12 || std::abs(z - 1.0) < 1e-12)
        throw ValidationError("log pair exponentiates to a degenerate shape");
    const cplx pw = (l1 - clog(z)) / kTwoPiI;
    const cplx qw = (l2 + clog1m(z)) / kTwoPiI;
    const long long p = std::llround(pw.real());
    const long long q = std::llround(qw.real());
    if (std::abs(pw - cplx(double(p))) > tol || std::abs(qw - cplx(double(q))) > tol)
        throw ValidationError("log pair is not on the flattening surface (non-integer lift)");
    TetFlattening f = from_lifts(z, p, q, 0);
    f.l1 = l1;  // keep the caller's exact values
    f.l2 = l2;
    return f;
}

cplx expand_flattening(const TetFlattening& f, const Ordering& ranks) {
    const CrossRatioClass c = classify_ordering(ranks);
    cplx v;
    switch (c.base) {
        case 0: v = f.l1; break;
        case 1: v = f.l2 + (c.primed ? -kTwoPiI : cplx(0.0)); break;
        default: v = f.l3(); break;
    }
    return c.inverted ? -v : v;
}

namespace {

Ordering star_entry_ranks(const StarEntry& e, const Branching& b, bool as_stored) {
    Ordering o = as_stored ? Ordering{e.a, e.b, e.c, e.d} : Ordering{e.b, e.a, e.d, e.c};
    return b.ranks(e.tet, o);
}

}  // namespace

std::vector<cplx> edge_flattening_residuals(const std::vector<EdgeClass>& edges,
                                            const Branching& b, const Flattening& F) {
    std::vector<cplx> out;
    for (const auto& ec : edges) {
        if (!ec.closed) continue;
        cplx s = 0.0;
        for (const auto& e : ec.star)
            s += expand_flattening(F.tets[e.tet], star_entry_ranks(e, b, b.as_stored[ec.id]));
        out.push_back(s);
    }
    return out;
}

std::vector<cplx> edge_flattening_residuals(const AbstractTriangulation& T, const Branching& b,
                                            const Flattening& F) {
    return edge_flattening_residuals(edge_classes(T, /*lenient=*/true), b, F);
}

FlatteningSystem build_flattening_system(const std::vector<EdgeClass>& edges, const Branching& b,
                                         int ntets) {
    FlatteningSystem S;
    for (const auto& ec : edges) {
        if (!ec.closed) continue;
        S.edge_ids.push_back(ec.id);
        std::vector<bigint> arow(ntets, 0), brow(ntets, 0);
        for (const auto& e : ec.star) {
            const Ordering ranks = star_entry_ranks(e, b, b.as_stored[ec.id]);
            const CrossRatioClass c = classify_ordering(ranks);
            const int s = c.inverted ? -1 : 1;
            switch (c.base) {
                case 0: arow[e.tet] += s; break;
                case 1: brow[e.tet] += s; break;
                default: arow[e.tet] -= s; brow[e.tet] -= s; break;
            }
        }
        S.A.push_back(std::move(arow));
        S.B.push_back(std::move(brow));
    }
    return S;
}

namespace {

IntMatrix joined_pq_matrix(const FlatteningSystem& S, int ntets) {
    IntMatrix M;
    for (std::size_t r = 0; r < S.A.size(); ++r) {
        std::vector<bigint> row(2 * ntets);
        for (int t = 0; t < ntets; ++t) {
            row[t] = S.A[r][t];
            row[ntets + t] = S.B[r][t];
        }
        M.push_back(std::move(row));
    }
    return M;
}

long long to_ll(const bigint& v) { return v.convert_to<long long>(); }

// Canonical representative in the solution lattice: minimal sum of squares,
// ties broken lexicographically.  Greedy reduction followed by a bounded
// search around it.
std::vector<bigint> canonical_solution(std::vector<bigint> x,
                                       const std::vector<std::vector<bigint>>& kernel) {
    x = reduce_by_kernel(std::move(x), kernel);
    if (kernel.empty() || kernel.size() > 6) return x;
    auto norm2 = [](const std::vector<bigint>& v) {
        bigint s = 0;
        for (const bigint& a : v) s += a * a;
        return s;
    };
    std::vector<bigint> best = x;
    bigint bestn = norm2(best);
    const int R = 3;
    std::vector<int> coef(kernel.size(), -R);
    for (;;) {
        std::vector<bigint> cand = x;
        for (std::size_t k = 0; k < kernel.size(); ++k)
            if (coef[k] != 0)
                for (std::size_t i = 0; i < cand.size(); ++i)
                    cand[i] += coef[k] * kernel[k][i];
        const bigint n = norm2(cand);
        if (n < bestn || (n == bestn && cand < best)) {
            best = cand;
            bestn = n;
        }
        std::size_t k = 0;
        while (k < coef.size() && coef[k] == R) coef[k++] = -R;
        if (k == coef.size()) break;
        ++coef[k];
    }
    return best;
}

}  // namespace

Flattening solve_flattening(const AbstractTriangulation& T, const std::vector<EdgeClass>& edges,
                            const Branching& b, const ShapeAssignment& shapes) {
    check_shapes(shapes);
    const int n = T.size();
    Flattening principal;
    for (int t = 0; t < n; ++t) principal.tets.push_back(TetFlattening::from_lifts(shapes.z[t], 0, 0));

    const FlatteningSystem S = build_flattening_system(edges, b, n);
    const auto sums = edge_flattening_residuals(edges, b, principal);

    std::vector<long long> npi(sums.size());  // edge sums in units of i*pi
    for (std::size_t e = 0; e < sums.size(); ++e) {
        const double k = sums[e].imag() / kPi;
        const long long ke = std::llround(k);
        if (std::abs(sums[e].real()) > kGuard || std::abs(k - double(ke)) > kGuard / kPi)
            throw ValidationError(
                "edge log-sum is not on the i*pi lattice (rounding ambiguity); shapes may not "
                "solve the gluing equations");
        npi[e] = ke;
    }
    // S_e = i*pi*n_e + 2*pi*i*(A p + B q) must vanish, so n_e has to be even.
    bool all_even = true;
    for (long long k : npi) all_even &= (k % 2 == 0);
    if (!all_even) {
        // Carried parity bit: solve 2(Ap + Bq) + B sigma = -n over Z and
        // require every sigma even (an odd sigma breaks exp(l2) = X).
        IntMatrix M;
        for (std::size_t r = 0; r < S.A.size(); ++r) {
            std::vector<bigint> row(3 * n);
            for (int t = 0; t < n; ++t) {
                row[t] = 2 * S.A[r][t];
                row[n + t] = 2 * S.B[r][t];
                row[2 * n + t] = S.B[r][t];
            }
            M.push_back(std::move(row));
        }
        std::vector<bigint> rhs(npi.size());
        for (std::size_t e = 0; e < npi.size(); ++e) rhs[e] = -bigint(npi[e]);
        auto sol = solve_integer_system(M, rhs);
        if (!sol.solvable)
            throw NoIntegerSolution(
                "no integer lift makes all edge sums vanish (obstruction at edge relation " +
                    std::to_string(sol.obstruction_row) + ")",
                npi);
        // Fold even sigmas into q; odd parity cannot be repaired.
        for (int t = 0; t < n; ++t)
            if (sol.particular[2 * n + t] % 2 != 0)
                throw NoIntegerSolution("edge sums force an odd branch parity on tetrahedron " +
                                            std::to_string(t),
                                        npi);
        std::vector<bigint> pq(2 * n);
        for (int t = 0; t < n; ++t) {
            pq[t] = sol.particular[t];
            pq[n + t] = sol.particular[n + t] + sol.particular[2 * n + t] / 2;
        }
        Flattening F;
        for (int t = 0; t < n; ++t)
            F.tets.push_back(
                TetFlattening::from_lifts(shapes.z[t], to_ll(pq[t]), to_ll(pq[n + t])));
        return F;
    }

    IntMatrix M = joined_pq_matrix(S, n);
    std::vector<bigint> rhs(npi.size());
    for (std::size_t e = 0; e < npi.size(); ++e) rhs[e] = -bigint(npi[e] / 2);
    auto sol = solve_integer_system(M, rhs);
    if (!sol.solvable)
        throw NoIntegerSolution(
            "no integer lift makes all edge sums vanish (obstruction at edge relation " +
                std::to_string(sol.obstruction_row) + ")",
            npi);
    const auto pq = canonical_solution(sol.particular, sol.kernel);

    Flattening F;
    for (int t = 0; t < n; ++t)
        F.tets.push_back(TetFlattening::from_lifts(shapes.z[t], to_ll(pq[t]), to_ll(pq[n + t])));
    return F;
}

std::vector<std::vector<long long>> flattening_kernel(const std::vector<EdgeClass>& edges,
                                                      const Branching& b, int ntets) {
    const FlatteningSystem S = build_flattening_system(edges, b, ntets);
    IntMatrix M = joined_pq_matrix(S, ntets);
    auto sol = solve_integer_system(M, std::vector<bigint>(M.size(), 0));
    std::vector<std::vector<long long>> out;
    for (const auto& k : sol.kernel) {
        std::vector<long long> v(k.size());
        for (std::size_t i = 0; i < k.size(); ++i) v[i] = to_ll(k[i]);
        out.push_back(std::move(v));
    }
    return out;
}

Flattening shift_flattening(const Flattening& F, const std::vector<long long>& dpq) {
    const int n = F.size();
    Flattening G;
    for (int t = 0; t < n; ++t)
        G.tets.push_back(TetFlattening::from_lifts(F.tets[t].z, F.tets[t].p + dpq[t],
                                                   F.tets[t].q + dpq[n + t], F.tets[t].sigma));
    return G;
}

cplx expand_tangent(const TangentFlattening& t, int tet, const Ordering& ranks) {
    const CrossRatioClass c = classify_ordering(ranks);
    cplx v;
    switch (c.base) {
        case 0: v = t.dl1[tet]; break;
        case 1: v = t.dl2[tet]; break;
        default: v = -t.dl1[tet] - t.dl2[tet]; break;
    }
    return c.inverted ? -v : v;
}

std::vector<cplx> tangent_edge_residuals(const std::vector<EdgeClass>& edges, const Branching& b,
                                         const TangentFlattening& t) {
    std::vector<cplx> out;
    for (const auto& ec : edges) {
        if (!ec.closed) continue;
        cplx s = 0.0;
        for (const auto& e : ec.star)
            s += expand_tangent(t, e.tet, star_entry_ranks(e, b, b.as_stored[ec.id]));
        out.push_back(s);
    }
    return out;
}

TangentFlattening random_tangent(const std::vector<EdgeClass>& edges, const Branching& b,
                                 const Flattening& F, uint64_t seed) {
    const int n = F.size();
    TangentFlattening t;
    t.dl1.assign(n, 0.0);
    t.dl2.assign(n, 0.0);
    const FlatteningSystem S = build_flattening_system(edges, b, n);
    IntMatrix M = joined_pq_matrix(S, n);
    auto sol = solve_integer_system(M, std::vector<bigint>(M.size(), 0));
    if (sol.kernel.empty()) return t;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    for (const auto& k : sol.kernel) {
        const cplx c(g(rng), g(rng));
        for (int i = 0; i < n; ++i) {
            t.dl1[i] += c * double(to_ll(k[i]));
            t.dl2[i] += c * double(to_ll(k[n + i]));
        }
    }
    return t;
}

Flattening parse_flattening(const std::string& text, const ShapeAssignment& shapes) {
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    const int n = shapes.size();
    std::vector<std::array<long long, 3>> vals(n, {0, 0, 0});
    std::vector<bool> seen(n, false);
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::istringstream ls(raw);
        std::vector<std::string> tok;
        for (std::string w; ls >> w;) tok.push_back(w);
        if (tok.empty()) continue;
        if (tok[0] != "flat" || tok.size() != 5)
            throw ParseError("expected 'flat <tet-id> <p> <q> <sigma>'", lineno);
        int t;
        long long p, q, sg;
        try {
            t = std::stoi(tok[1]);
            p = std::stoll(tok[2]);
            q = std::stoll(tok[3]);
            sg = std::stoll(tok[4]);
        } catch (const std::exception&) {
            throw ParseError("bad numeric field", lineno);
        }
        if (t < 0 || t >= n) throw ParseError("tet id out of range", lineno);
        if (seen[t]) throw ParseError("duplicate flattening for tet " + std::to_string(t), lineno);
        if (sg != 0 && sg != 1) throw ParseError("sigma must be 0 or 1", lineno);
        seen[t] = true;
        vals[t] = {p, q, sg};
    }
    Flattening F;
    for (int t = 0; t < n; ++t) {
        if (!seen[t]) throw ParseError("missing flattening for tet " + std::to_string(t), lineno);
        F.tets.push_back(TetFlattening::from_lifts(shapes.z[t], vals[t][0], vals[t][1],
                                                   static_cast<int>(vals[t][2])));
    }
    return F;
}

std::string serialize_flattening(const Flattening& F) {
    std::ostringstream out;
    for (int t = 0; t < F.size(); ++t)
        out << "flat " << t << " " << F.tets[t].p << " " << F.tets[t].q << " " << F.tets[t].sigma
            << "\n";
    return out.str();
}

}  // namespace csvol
