#include <doctest.h>

#include <algorithm>
#include <random>

#include "csvol/crossratio.hpp"
#include "csvol/errors.hpp"
#include "support/oracles.hpp"

using namespace csvol;
using csvol::testing::fig8_ordering;
using csvol::testing::fig8_tri_text;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

cplx rand_shape(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> re(-2.0, 3.0), im(0.15, 2.5);
    std::bernoulli_distribution coin;
    for (;;) {
        cplx z(re(rng), coin(rng) ? im(rng) : -im(rng));
        if (std::abs(z) > 0.15 && std::abs(z - 1.0) > 0.15) return z;
    }
}

struct Fig8 {
    AbstractTriangulation T;
    std::vector<EdgeClass> edges;
    Branching b;

    Fig8() {
        T = parse_triangulation(fig8_tri_text());
        edges = edge_classes(T);
        for (auto& cand : find_branchings(T, edges, 100)) {
            if (cand.order[0] == std::array<uint8_t, 4>{0, 1, 2, 3} &&
                cand.order[1] == std::array<uint8_t, 4>{0, 2, 1, 3}) {
                b = cand;
                return;
            }
        }
        REQUIRE(false);
    }

    // Worked-example variables u = X_A(xyzt), v = X_B(xyzt); canonical
    // shapes from them: z_A = u/(u-1), z_B = 1/(1-v).
    ShapeAssignment shapes_from_uv(cplx u, cplx v) const {
        ShapeAssignment s;
        s.z = {u / (u - 1.0), 1.0 / (1.0 - v)};
        return s;
    }
    cplx u_of(const ShapeAssignment& s) const {
        return expand_cross_ratio(s.z[0], b.ranks(0, fig8_ordering("xyzt")));
    }
    cplx v_of(const ShapeAssignment& s) const {
        return expand_cross_ratio(s.z[1], b.ranks(1, fig8_ordering("xyzt")));
    }
};

}  // namespace

TEST_CASE("cross-ratio values at the named orderings") {
    const cplx z(0.6, 1.1);
    CHECK(std::abs(expand_cross_ratio(z, {1, 0, 2, 3}) - 1.0 / z) < 1e-14);
    CHECK(std::abs(expand_cross_ratio(z, {0, 2, 3, 1}) - 1.0 / (1.0 - z)) < 1e-14);

    // The real configuration (inf, 0, u, 1) has canonical value z = 1/u.
    const double u = 0.37;
    const cplx zu = 1.0 / u;
    CHECK(std::abs(expand_cross_ratio(zu, {0, 1, 2, 3}) - 1.0 / u) < 1e-14);
    CHECK(std::abs(expand_cross_ratio(zu, {0, 2, 3, 1}) - (-u / (1.0 - u))) < 1e-13);
    CHECK(std::abs(expand_cross_ratio(zu, {0, 3, 1, 2}) - (1.0 - u)) < 1e-14);
}

TEST_CASE("cross-ratio identities over all 24 orderings") {
    std::mt19937_64 rng(7);
    std::array<uint8_t, 4> o{0, 1, 2, 3};
    for (int trial = 0; trial < 25; ++trial) {
        const cplx z = rand_shape(rng);
        auto ord = o;
        do {
            const Ordering v{ord[0], ord[1], ord[2], ord[3]};
            const cplx x = expand_cross_ratio(z, v);
            CHECK(std::isfinite(x.real()));
            CHECK(std::abs(x) > 1e-8);
            CHECK(std::abs(x - 1.0) > 1e-8);
            CHECK(std::abs(x - expand_cross_ratio(z, {v[2], v[3], v[0], v[1]})) <=
                  1e-12 * std::abs(x));
            CHECK(std::abs(x * expand_cross_ratio(z, swap_first(v)) - 1.0) < 1e-12);
            CHECK(std::abs(x * expand_cross_ratio(z, swap_last(v)) - 1.0) < 1e-12);
            const Ordering xzty{v[0], v[2], v[3], v[1]};
            CHECK(std::abs(expand_cross_ratio(z, xzty) - 1.0 / (1.0 - x)) <=
                  1e-11 * std::abs(1.0 / (1.0 - x)));
            const Ordering yxtz{v[1], v[0], v[3], v[2]};
            CHECK(std::abs(x - expand_cross_ratio(z, yxtz)) <= 1e-12 * std::abs(x));
        } while (std::next_permutation(ord.begin(), ord.end()));
    }
}

TEST_CASE("classified evaluation matches the projective formula") {
    std::mt19937_64 rng(8);
    std::array<uint8_t, 4> o{0, 1, 2, 3};
    for (int trial = 0; trial < 10; ++trial) {
        const cplx z = rand_shape(rng);
        auto ord = o;
        do {
            const Ordering v{ord[0], ord[1], ord[2], ord[3]};
            const CrossRatioClass c = classify_ordering(v);
            cplx base = c.base == 0 ? z : (c.base == 1 ? 1.0 / (1.0 - z) : (z - 1.0) / z);
            if (c.inverted) base = 1.0 / base;
            CHECK(std::abs(base - expand_cross_ratio(z, v)) <= 1e-12 * std::abs(base));
        } while (std::next_permutation(ord.begin(), ord.end()));
    }
}

TEST_CASE("analytic ordering derivative matches central differences") {
    std::mt19937_64 rng(9);
    const double h = 1e-6;
    std::array<uint8_t, 4> o{0, 1, 2, 3};
    for (int trial = 0; trial < 10; ++trial) {
        const cplx z = rand_shape(rng);
        auto ord = o;
        do {
            const Ordering v{ord[0], ord[1], ord[2], ord[3]};
            const cplx d = expand_cross_ratio_dz(z, v);
            const cplx fd =
                (expand_cross_ratio(z + h, v) - expand_cross_ratio(z - h, v)) / (2.0 * h);
            CHECK(std::abs(d - fd) <= 1e-6 * std::max(1.0, std::abs(d)));
        } while (std::next_permutation(ord.begin(), ord.end()));
    }
}

TEST_CASE("figure-eight gluing system has two relations with six factors") {
    Fig8 f;
    auto S = build_gluing_system(f.T, f.edges, f.b);
    REQUIRE(S.relations.size() == 2);
    for (const auto& r : S.relations) CHECK(r.factors.size() == 6);
}

TEST_CASE("figure-eight relations reduce to uv = (1-u)^2 (1-v)^2") {
    Fig8 f;
    auto S = build_gluing_system(f.T, f.edges, f.b);
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const cplx u = rand_shape(rng), v = rand_shape(rng);
        const auto shapes = f.shapes_from_uv(u, v);
        if (std::abs(shapes.z[0]) < 0.05 || std::abs(shapes.z[0] - 1.0) < 0.05 ||
            std::abs(shapes.z[1]) < 0.05 || std::abs(shapes.z[1] - 1.0) < 0.05)
            continue;
        const auto res = edge_residuals(S, shapes);
        const cplx lhs = u * v;
        const cplx rhs = (1.0 - u) * (1.0 - u) * (1.0 - v) * (1.0 - v);
        for (const auto& r : res) {
            const cplx ratio = r + 1.0;
            const bool direct = std::abs(ratio - lhs / rhs) < 1e-9 * std::abs(ratio);
            const bool inverse = std::abs(ratio - rhs / lhs) < 1e-9 * std::abs(ratio);
            CHECK((direct || inverse));
        }
    }
}

TEST_CASE("figure-eight residuals at the worked points") {
    Fig8 f;
    auto S = build_gluing_system(f.T, f.edges, f.b);

    SUBCASE("u = v = exp(i pi/3) solves the equations") {
        const cplx u = std::polar(1.0, kPi / 3.0);
        const auto res = edge_residuals(S, f.shapes_from_uv(u, u));
        for (const auto& r : res) CHECK(std::abs(r) < 1e-12);
    }
    SUBCASE("u = v = 2 misses by the expected amount") {
        // uv - (1-u)^2(1-v)^2 = 4 - 1 = 3; the relation ratios are 4 and 1/4.
        const auto res = edge_residuals(S, f.shapes_from_uv(2.0, 2.0));
        std::vector<double> got;
        for (const auto& r : res) got.push_back(r.real());
        std::sort(got.begin(), got.end());
        CHECK(std::abs(got[0] - (0.25 - 1.0)) < 1e-12);
        CHECK(std::abs(got[1] - 3.0) < 1e-12);
        for (const auto& r : res) CHECK(std::abs(r.imag()) < 1e-12);
    }
}

TEST_CASE("toy star with a factor and its inverse has zero residual") {
    GluingSystem S;
    GluingRelation rel;
    rel.edge = 0;
    rel.factors.push_back({0, {0, 1, 2, 3}});
    rel.factors.push_back({0, {1, 0, 2, 3}});
    S.relations.push_back(rel);
    std::mt19937_64 rng(13);
    for (int i = 0; i < 20; ++i) {
        ShapeAssignment s;
        s.z = {rand_shape(rng)};
        CHECK(std::abs(edge_residuals(S, s)[0]) < 1e-14);
    }
}

TEST_CASE("gluing Jacobian matches central finite differences") {
    Fig8 f;
    auto S = build_gluing_system(f.T, f.edges, f.b);
    std::mt19937_64 rng(17);
    const double h = 1e-7;
    for (int trial = 0; trial < 20; ++trial) {
        ShapeAssignment s;
        s.z = {rand_shape(rng), rand_shape(rng)};
        const auto J = edge_residual_jacobian(S, s);
        for (int t = 0; t < 2; ++t) {
            ShapeAssignment sp = s, sm = s;
            sp.z[t] += h;
            sm.z[t] -= h;
            const auto rp = edge_residuals(S, sp), rm = edge_residuals(S, sm);
            for (std::size_t e = 0; e < rp.size(); ++e) {
                const cplx fd = (rp[e] - rm[e]) / (2.0 * h);
                CHECK(std::abs(fd - J[e][t]) <= 1e-6 * std::max(1.0, std::abs(J[e][t])));
            }
        }
    }
}

TEST_CASE("solver converges from the worked initial point") {
    Fig8 f;
    auto S = build_gluing_system(f.T, f.edges, f.b);
    SolverConfig cfg;
    SolveTrace trace;
    const auto sol = solve_gluing(S, f.shapes_from_uv(cplx(0.5, 0.8), cplx(0.5, 0.8)), cfg, &trace);
    const cplx target = std::polar(1.0, kPi / 3.0);
    CHECK(std::abs(f.u_of(sol) - target) < 1e-10);
    CHECK(std::abs(f.v_of(sol) - target) < 1e-10);
    const cplx u = f.u_of(sol);
    CHECK(std::abs(-(1.0 - u) * (1.0 - u) - u) < 1e-10);
    for (const auto& r : edge_residuals(S, sol)) CHECK(std::abs(r) < 1e-12);
}

TEST_CASE("already-solved input returns unchanged with zero iterations") {
    Fig8 f;
    auto S = build_gluing_system(f.T, f.edges, f.b);
    const cplx u = std::polar(1.0, kPi / 3.0);
    const auto exact = f.shapes_from_uv(u, u);
    SolverConfig cfg;
    SolveTrace trace;
    const auto sol = solve_gluing(S, exact, cfg, &trace);
    CHECK(trace.iterations == 0);
    CHECK(sol.z[0] == exact.z[0]);
    CHECK(sol.z[1] == exact.z[1]);
}

TEST_CASE("degenerate initial shapes are rejected") {
    Fig8 f;
    auto S = build_gluing_system(f.T, f.edges, f.b);
    ShapeAssignment s;
    s.z = {cplx(1.0, 1e-15), cplx(0.5, 0.8)};
    CHECK_THROWS_AS(solve_gluing(S, s, SolverConfig{}), DegenerateShapeError);
}

TEST_CASE("solutions re-verify independently of the solver path") {
    Fig8 f;
    auto S = build_gluing_system(f.T, f.edges, f.b);
    std::mt19937_64 rng(23);
    for (uint64_t seed : {1ull, 2ull, 3ull}) {
        SolverConfig cfg;
        cfg.seed = seed;
        ShapeAssignment init;
        init.z = {rand_shape(rng), rand_shape(rng)};
        ShapeAssignment sol;
        try {
            sol = solve_gluing(S, init, cfg);
        } catch (const SolveError&) {
            continue;  // a start may legitimately fail; convergence implies validity
        }
        for (const auto& r : edge_residuals(S, sol)) CHECK(std::abs(r) < cfg.tolerance);
    }
}

TEST_CASE("shapes file round-trips") {
    ShapeAssignment s;
    s.z = {cplx(0.123456789012345, -1.5), cplx(2.25, 0.0)};
    const auto text = serialize_shapes(s);
    const auto back = parse_shapes(text, 2);
    CHECK(back.z[0] == s.z[0]);
    CHECK(back.z[1] == s.z[1]);
    CHECK_THROWS_AS(parse_shapes("shape 0 0.5 0.5\n", 2), ParseError);
}
