#include "csvol/crossratio.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "csvol/errors.hpp"

namespace csvol {

void check_shapes(const ShapeAssignment& s, double eps) {
    for (int t = 0; t < s.size(); ++t) {
        const cplx z = s.z[t];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw DegenerateShapeError(t, "shape is not finite");
        if (std::abs(z) < eps) throw DegenerateShapeError(t, "shape too close to 0");
        if (std::abs(z - 1.0) < eps) throw DegenerateShapeError(t, "shape too close to 1");
    }
}

CrossRatioClass classify_ordering(const Ordering& ranks) {
    Ordering o = ranks;
    bool inv = false;
    if (o[0] > o[1]) { std::swap(o[0], o[1]); inv = !inv; }
    if (o[2] > o[3]) { std::swap(o[2], o[3]); inv = !inv; }
    CrossRatioClass c;
    c.inverted = inv;
    // Six sorted-pair forms; `primed` marks the pair-swapped coset.
    if (o[0] == 0 && o[1] == 1) { c.base = 0; c.primed = false; }        // 0123
    else if (o[0] == 2 && o[1] == 3) { c.base = 0; c.primed = true; }    // 2301
    else if (o[0] == 0 && o[1] == 2) { c.base = 1; c.primed = false; c.inverted = !c.inverted; }  // 0213 = inverse of the l2 vertex
    else if (o[0] == 1 && o[1] == 3) { c.base = 1; c.primed = true; c.inverted = !c.inverted; }   // 1302
    else if (o[0] == 0 && o[1] == 3) { c.base = 2; c.primed = false; }   // 0312
    else { c.base = 2; c.primed = true; }                                // 1203
    return c;
}

namespace {

cplx base_value(int base, cplx z) {
    switch (base) {
        case 0: return z;
        case 1: return 1.0 / (1.0 - z);
        default: return (z - 1.0) / z;
    }
}

cplx base_dz(int base, cplx z) {
    switch (base) {
        case 0: return 1.0;
        case 1: return 1.0 / ((1.0 - z) * (1.0 - z));
        default: return 1.0 / (z * z);
    }
}

}  // namespace

cplx expand_cross_ratio(cplx z, const Ordering& ranks) {
    // Configuration on the projective line with points (inf, 0, 1, z) at
    // ranks 0..3, each as (numerator, denominator); pairwise differences as
    // determinants so the infinite point needs no special case.
    const cplx num[4] = {1.0, 0.0, 1.0, z};
    const cplx den[4] = {0.0, 1.0, 1.0, 1.0};
    auto det = [&](int i, int j) { return num[i] * den[j] - num[j] * den[i]; };
    const int x = ranks[0], y = ranks[1], zz = ranks[2], t = ranks[3];
    return (det(t, y) * det(zz, x)) / (det(zz, y) * det(t, x));
}

cplx expand_cross_ratio_dz(cplx z, const Ordering& ranks) {
    const CrossRatioClass c = classify_ordering(ranks);
    const cplx v = base_value(c.base, z);
    const cplx dv = base_dz(c.base, z);
    return c.inverted ? -dv / (v * v) : dv;
}

GluingSystem build_gluing_system(const AbstractTriangulation& T,
                                 const std::vector<EdgeClass>& edges, const Branching& b) {
    GluingSystem S;
    S.T = &T;
    for (const auto& ec : edges) {
        if (!ec.closed) continue;
        GluingRelation rel;
        rel.edge = ec.id;
        for (const auto& e : ec.star) {
            GluingFactor f;
            f.tet = e.tet;
            Ordering o = b.as_stored[ec.id] ? Ordering{e.a, e.b, e.c, e.d}
                                            : Ordering{e.b, e.a, e.d, e.c};
            f.ranks = b.ranks(e.tet, o);
            rel.factors.push_back(f);
        }
        S.relations.push_back(std::move(rel));
    }
    return S;
}

std::vector<cplx> edge_residuals(const GluingSystem& S, const ShapeAssignment& shapes) {
    check_shapes(shapes);
    std::vector<cplx> r;
    r.reserve(S.relations.size());
    for (const auto& rel : S.relations) {
        cplx prod = 1.0;
        for (const auto& f : rel.factors) prod *= expand_cross_ratio(shapes.z[f.tet], f.ranks);
        r.push_back(prod - 1.0);
    }
    return r;
}

std::vector<std::vector<cplx>> edge_residual_jacobian(const GluingSystem& S,
                                                      const ShapeAssignment& shapes) {
    const int n = shapes.size();
    std::vector<std::vector<cplx>> J(S.relations.size(), std::vector<cplx>(n, 0.0));
    for (std::size_t e = 0; e < S.relations.size(); ++e) {
        const auto& rel = S.relations[e];
        std::vector<cplx> vals(rel.factors.size());
        cplx prod = 1.0;
        for (std::size_t i = 0; i < rel.factors.size(); ++i) {
            vals[i] = expand_cross_ratio(shapes.z[rel.factors[i].tet], rel.factors[i].ranks);
            prod *= vals[i];
        }
        for (std::size_t i = 0; i < rel.factors.size(); ++i) {
            const auto& f = rel.factors[i];
            const cplx dv = expand_cross_ratio_dz(shapes.z[f.tet], f.ranks);
            J[e][f.tet] += (prod / vals[i]) * dv;
        }
    }
    return J;
}

namespace {

double residual_norm(const std::vector<cplx>& r) {
    double m = 0.0;
    for (const cplx& v : r) m = std::max(m, std::abs(v));
    return m;
}

bool shapes_ok(const ShapeAssignment& s, double eps = 1e-10) {
    for (const cplx& z : s.z) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        if (std::abs(z) < eps || std::abs(z - 1.0) < eps) return false;
        if (std::abs(z) > 1e12) return false;
    }
    return true;
}

}  // namespace

ShapeAssignment solve_gluing(const GluingSystem& S, const ShapeAssignment& initial,
                             const SolverConfig& cfg, SolveTrace* trace) {
    if (cfg.tolerance <= 0) throw std::invalid_argument("tolerance must be positive");
    if (cfg.max_iterations < 1) throw std::invalid_argument("need at least one iteration");
    check_shapes(initial);
    const int n = initial.size();
    const int m = static_cast<int>(S.relations.size());
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> ure(-2.0, 3.0), uim(0.1, 2.0);

    std::string last_error = "no attempt made";
    for (int attempt = 0; attempt <= cfg.restarts; ++attempt) {
        ShapeAssignment cur = initial;
        if (attempt > 0) {
            // Upper half plane first, then lower.
            const double sign = attempt <= cfg.restarts / 2 ? +1.0 : -1.0;
            for (int t = 0; t < n; ++t) cur.z[t] = cplx(ure(rng), sign * uim(rng));
        }
        if (!shapes_ok(cur)) continue;

        std::vector<cplx> r = edge_residuals(S, cur);
        bool failed = false;
        int it = 0;
        for (; it < cfg.max_iterations; ++it) {
            const double rn = residual_norm(r);
            if (rn < cfg.tolerance) break;
            auto Jrows = edge_residual_jacobian(S, cur);
            Eigen::MatrixXcd J(m, n);
            Eigen::VectorXcd rv(m);
            for (int e = 0; e < m; ++e) {
                rv(e) = r[e];
                for (int t = 0; t < n; ++t) J(e, t) = Jrows[e][t];
            }
            Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(J);
            if (cod.rank() == 0) {
                last_error = "Jacobian rank-deficient (rank 0) at iterate " + std::to_string(it);
                failed = true;
                break;
            }
            Eigen::VectorXcd step = cod.solve(-rv);

            // Step damping: scale back until the residual norm decreases and
            // the iterate stays non-degenerate.
            double scale = 1.0;
            bool accepted = false;
            for (int h = 0; h <= cfg.max_halvings; ++h) {
                ShapeAssignment next = cur;
                for (int t = 0; t < n; ++t) next.z[t] += scale * step(t);
                if (shapes_ok(next)) {
                    auto rn2 = edge_residuals(S, next);
                    if (residual_norm(rn2) < rn) {
                        cur = std::move(next);
                        r = std::move(rn2);
                        accepted = true;
                        break;
                    }
                }
                scale *= cfg.damping;
            }
            if (!accepted) {
                last_error = "no descent after " + std::to_string(cfg.max_halvings) +
                             " dampings at iterate " + std::to_string(it) +
                             " (residual " + std::to_string(rn) + ")";
                failed = true;
                break;
            }
        }
        if (!failed && residual_norm(r) < cfg.tolerance) {
            if (trace) {
                trace->iterations = it;
                trace->restarts_used = attempt;
                trace->final_residual = residual_norm(edge_residuals(S, cur));
            }
            return cur;
        }
        if (!failed) last_error = "max iterations reached";
    }
    throw SolveError("gluing solve did not converge: " + last_error);
}

ShapeAssignment parse_shapes(const std::string& text, int expected_tets) {
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    ShapeAssignment s;
    s.z.assign(expected_tets, cplx(0, 0));
    std::vector<bool> seen(expected_tets, false);
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::istringstream ls(raw);
        std::vector<std::string> tok;
        for (std::string w; ls >> w;) tok.push_back(w);
        if (tok.empty()) continue;
        if (tok[0] != "shape" || tok.size() != 4)
            throw ParseError("expected 'shape <tet-id> <re> <im>'", lineno);
        int t;
        double re, im;
        try {
            t = std::stoi(tok[1]);
            re = std::stod(tok[2]);
            im = std::stod(tok[3]);
        } catch (const std::exception&) {
            throw ParseError("bad numeric field", lineno);
        }
        if (t < 0 || t >= expected_tets) throw ParseError("tet id out of range", lineno);
        if (seen[t]) throw ParseError("duplicate shape for tet " + std::to_string(t), lineno);
        seen[t] = true;
        s.z[t] = cplx(re, im);
    }
    for (int t = 0; t < expected_tets; ++t)
        if (!seen[t]) throw ParseError("missing shape for tet " + std::to_string(t), lineno);
    return s;
}

std::string serialize_shapes(const ShapeAssignment& s) {
    std::ostringstream out;
    out.precision(17);
    for (int t = 0; t < s.size(); ++t)
        out << "shape " << t << " " << s.z[t].real() << " " << s.z[t].imag() << "\n";
    return out.str();
}

}  // namespace csvol
