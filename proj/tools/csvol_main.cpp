#include <CLI11.hpp>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "csvol/cs.hpp"
#include "csvol/crossratio.hpp"
#include "csvol/errors.hpp"
#include "csvol/flattening.hpp"
#include "csvol/holonomy.hpp"
#include "csvol/report.hpp"
#include "csvol/triangulation.hpp"

namespace {

using namespace csvol;

constexpr int kExitParse = 2;
constexpr int kExitSolve = 3;
constexpr int kExitInteger = 4;
constexpr int kExitVerify = 5;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

uint64_t seed_from_env(uint64_t cli_seed, bool seed_given) {
    if (seed_given) return cli_seed;
    if (const char* env = std::getenv("CSVOL_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            std::cerr << "warning: ignoring malformed CSVOL_SEED\n";
        }
    }
    return 0;
}

struct CommonOpts {
    std::string file;
    std::string branching = "auto";
    std::string paths_file;
    std::string shapes_file;
    std::string flattening_file;
    uint64_t seed = 0;
    bool seed_given = false;
    double tol = 1e-12;
    bool json = false;
};

struct Pipeline {
    AbstractTriangulation T;
    std::vector<EdgeClass> edges;
    BoundaryInfo boundary;
    Branching branching;
    ShapeAssignment shapes;
    Flattening flat;
    LiftedCocycle cocycle;
    CellReport cells;
    std::vector<BoundaryPath> paths;
    RunReport report;
};

void emit(const RunReport& rep, bool json) {
    if (json) std::cout << rep.to_json();
}

int fail(RunReport& rep, bool json, int code, const std::string& msg) {
    rep.exit_status = code;
    std::cerr << "error: " << msg << "\n";
    emit(rep, json);
    return code;
}

void describe(const Pipeline& P, std::ostream& os) {
    os << P.T.size() << " tetrahedra, " << P.edges.size() << " edges, "
       << P.boundary.components.size()
       << (P.boundary.components.size() == 1 ? " cusp" : " cusps");
    for (const auto& c : P.boundary.components) {
        os << (c.id == 0 ? ": " : ", ");
        if (c.euler_characteristic == 0)
            os << "torus";
        else
            os << "chi=" << c.euler_characteristic;
    }
    os << "\n";
}

int load_and_census(const std::string& path, bool lenient, Pipeline& P) {
    const std::string text = read_file(path);
    P.report.input_digest = content_digest(text);
    P.T = parse_triangulation(text);
    P.T.validate(!lenient);
    P.edges = edge_classes(P.T, lenient);
    P.report.tetrahedra = P.T.size();
    P.report.edge_classes_count = static_cast<int>(P.edges.size());
    if (P.T.fully_glued() && P.T.size() > 0) {
        P.boundary = boundary_components(P.T);
        for (const auto& c : P.boundary.components) {
            P.report.cusp_euler.push_back(c.euler_characteristic);
            if (c.euler_characteristic != 0)
                P.report.warnings.push_back("boundary component " + std::to_string(c.id) +
                                            " has Euler characteristic " +
                                            std::to_string(c.euler_characteristic));
        }
    }
    return 0;
}

void pick_branching(const CommonOpts& opt, Pipeline& P) {
    if (opt.branching == "auto") {
        auto found = find_branchings(P.T, P.edges, 1);
        if (found.empty()) throw ValidationError("no branching found");
        P.branching = found.front();
    } else {
        P.branching = load_branching(P.T, P.edges, read_file(opt.branching));
    }
    for (bool d : P.branching.as_stored) P.report.branching_dirs.push_back(d ? 1 : 0);
    for (int t = 0; t < P.T.size(); ++t) {
        std::string o;
        for (int r = 0; r < 4; ++r) o += char('0' + P.branching.order[t][r]);
        P.report.branching_orders.push_back(o);
    }
}

bool geometric_tag(const Branching& b, const ShapeAssignment& s) {
    int pos = 0, neg = 0;
    for (int t = 0; t < s.size(); ++t) {
        const double im = b.orientation_sign(t) > 0 ? s.z[t].imag() : -s.z[t].imag();
        (im > 0 ? pos : neg) += 1;
    }
    return pos == s.size() || neg == s.size();
}

// Everything from branching to the invariant; throws on failure.
void run_pipeline(const CommonOpts& opt, Pipeline& P) {
    pick_branching(opt, P);

    ShapeAssignment initial;
    if (!opt.shapes_file.empty())
        initial = parse_shapes(read_file(opt.shapes_file), P.T.size());
    else
        initial.z.assign(P.T.size(), cplx(0.5, 0.8));

    GluingSystem sys = build_gluing_system(P.T, P.edges, P.branching);
    SolverConfig cfg;
    cfg.tolerance = opt.tol;
    cfg.seed = seed_from_env(opt.seed, opt.seed_given);
    SolveTrace trace;
    P.shapes = solve_gluing(sys, initial, cfg, &trace);
    P.report.has_solver = true;
    P.report.solver_iterations = trace.iterations;
    P.report.solver_restarts = trace.restarts_used;
    P.report.solver_residual = trace.final_residual;
    P.report.seed = cfg.seed;
    P.report.geometric_candidate = geometric_tag(P.branching, P.shapes);
    P.report.shapes = P.shapes.z;
    {
        double m = 0.0;
        for (const cplx& r : edge_residuals(sys, P.shapes)) m = std::max(m, std::abs(r));
        P.report.gluing_residual_max = m;
    }

    if (!opt.flattening_file.empty())
        P.flat = parse_flattening(read_file(opt.flattening_file), P.shapes);
    else
        P.flat = solve_flattening(P.T, P.edges, P.branching, P.shapes);
    for (const auto& f : P.flat.tets)
        P.report.flattening_pqs.push_back({f.p, f.q, f.sigma});
    {
        double m = 0.0;
        for (const cplx& r : edge_flattening_residuals(P.edges, P.branching, P.flat))
            m = std::max(m, std::abs(r));
        P.report.edge_flattening_max = m;
    }

    P.cocycle = build_lifted_cocycle(P.T, P.branching, P.flat);
    P.cells = verify_cells(P.cocycle, P.edges);
    P.report.cell_deviation_max = P.cells.max_cell_deviation();
    for (const auto& s : P.cells.edge_stars) P.report.edge_stars_plus_id &= s.plus_id;

    const auto signs = orientation_signs(P.branching);
    P.report.signs = signs;
    for (const auto& f : P.flat.tets) P.report.cs_per_tet.push_back(cs_tet(f).rep);
    P.report.cs_total_value = cs_total(P.flat, signs).rep;

    if (!opt.paths_file.empty()) {
        P.paths = parse_paths(read_file(opt.paths_file));
        for (const auto& loop : P.paths) {
            RunReport::PeripheralEntry pe;
            pe.name = loop.name;
            pe.value = peripheral_log_holonomy(P.cocycle, loop);
            const Mat2 m = boundary_matrix_holonomy(P.cocycle, loop);
            pe.exp_vs_matrix = std::abs(std::exp(pe.value) - m.a);
            pe.trace_abs = std::abs(m.trace());
            P.report.peripheral.push_back(pe);
        }
    }
}

// Relation suite for the verify command: cross-ratio identities,
// flattening exponentiation, the derivative law, the five-term identity,
// and peripheral consistency.  Throws VerifyError naming the first failure.
void verify_properties(const Pipeline& P) {
    std::mt19937_64 rng(P.report.seed + 17);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    // All 24 orderings per tetrahedron: identities of the cross-ratio map
    // and exp(flattening) = cross-ratio.
    std::array<uint8_t, 4> o{0, 1, 2, 3};
    for (int t = 0; t < P.T.size(); ++t) {
        const cplx z = P.shapes.z[t];
        auto ord = o;
        do {
            const Ordering v{ord[0], ord[1], ord[2], ord[3]};
            const cplx x = expand_cross_ratio(z, v);
            const cplx xswap = expand_cross_ratio(z, swap_first(v));
            if (std::abs(x * xswap - 1.0) > 1e-9)
                throw VerifyError("cross-ratio inversion identity failed on tet " +
                                  std::to_string(t));
            const Ordering pairsw{v[2], v[3], v[0], v[1]};
            if (std::abs(x - expand_cross_ratio(z, pairsw)) > 1e-9 * std::abs(x))
                throw VerifyError("cross-ratio pair-swap identity failed on tet " +
                                  std::to_string(t));
            const cplx L = expand_flattening(P.flat.tets[t], v);
            if (std::abs(std::exp(L) - x) > 1e-9 * std::max(1.0, std::abs(x)))
                throw VerifyError("flattening exponentiation failed on tet " + std::to_string(t) +
                                  " ordering " + ordering_str(v));
        } while (std::next_permutation(ord.begin(), ord.end()));
    }

    // Derivative law per tetrahedron along a surface tangent.
    for (int t = 0; t < P.T.size(); ++t) {
        const auto& f = P.flat.tets[t];
        const cplx dl1(uni(rng) - 0.5, uni(rng) - 0.5);
        const cplx dl2 = f.z / (1.0 - f.z) * dl1;
        const double h = 1e-6;
        const cplx q_shift = f.l2 + clog1m(f.z);  // 2 pi i q, fixed along the move
        auto at = [&](double s) {
            const cplx l1 = f.l1 + s * dl1;
            const cplx z = std::exp(l1);
            const cplx l2 = -clog1m(z) + q_shift;
            return cs_tet(TetFlattening::from_logs(l1, l2)).rep;
        };
        cplx diff = at(h) - at(-h);
        diff -= std::round(diff.real());  // mod-Z representative jump
        const cplx fd = diff / (2.0 * h);
        const double pi = 3.141592653589793238462643383279502884;
        const cplx formula =
            (f.l2 * dl1 - f.l1 * dl2 - cplx(0, pi) * dl1) / (8.0 * pi * pi);
        if (std::abs(fd - formula) > 1e-4 * std::max(1.0, std::abs(formula)))
            throw VerifyError("derivative law failed on tet " + std::to_string(t));
    }

    // Five-term identity on the real interval.
    for (int k = 0; k < 5; ++k) {
        double u = 0.1 + 0.8 * uni(rng), v = 0.1 + 0.8 * uni(rng);
        if (v > u) std::swap(u, v);
        if (u - v < 1e-3) continue;
        if (std::abs(five_term_residual(u, v)) > 1e-10)
            throw VerifyError("five-term identity failed at u=" + std::to_string(u) +
                              " v=" + std::to_string(v));
    }

    for (const auto& pe : P.report.peripheral) {
        if (pe.exp_vs_matrix > 1e-9)
            throw VerifyError("peripheral log-holonomy disagrees with the matrix holonomy on " +
                              pe.name);
    }
}

int cmd_info(const CommonOpts& opt, bool lenient) {
    Pipeline P;
    P.report.command = "info";
    try {
        load_and_census(opt.file, lenient, P);
    } catch (const ParseError& e) {
        return fail(P.report, opt.json, kExitParse, e.what());
    } catch (const ValidationError& e) {
        return fail(P.report, opt.json, kExitParse, e.what());
    }
    describe(P, std::cerr);
    for (const auto& w : P.report.warnings) std::cerr << "warning: " << w << "\n";
    emit(P.report, opt.json);
    return 0;
}

int run_guarded(const CommonOpts& opt, const std::string& cmd, bool full_verify) {
    Pipeline P;
    P.report.command = cmd;
    try {
        load_and_census(opt.file, /*lenient=*/false, P);
    } catch (const ParseError& e) {
        return fail(P.report, opt.json, kExitParse, e.what());
    } catch (const ValidationError& e) {
        return fail(P.report, opt.json, kExitParse, e.what());
    }
    if (P.T.size() == 0) {
        P.report.cs_total_value = cplx(0.0, 0.0);
        std::cerr << "empty triangulation: total CS = 0\n";
        emit(P.report, opt.json);
        return 0;
    }
    try {
        run_pipeline(opt, P);
    } catch (const ParseError& e) {
        return fail(P.report, opt.json, kExitParse, e.what());
    } catch (const ValidationError& e) {
        return fail(P.report, opt.json, kExitParse, e.what());
    } catch (const SolveError& e) {
        return fail(P.report, opt.json, kExitSolve, e.what());
    } catch (const DegenerateShapeError& e) {
        return fail(P.report, opt.json, kExitSolve, e.what());
    } catch (const NoIntegerSolution& e) {
        return fail(P.report, opt.json, kExitInteger, e.what());
    }

    const double vtol = 1e-10;
    if (P.report.edge_flattening_max > vtol || !P.cells.all_ok(vtol)) {
        std::string what = P.cells.first_failure(vtol);
        if (what.empty()) what = "edge flattening sum above tolerance";
        return fail(P.report, opt.json, kExitVerify, "verification failed: " + what);
    }

    if (full_verify) {
        try {
            verify_properties(P);
        } catch (const VerifyError& e) {
            return fail(P.report, opt.json, kExitVerify, e.what());
        }
    }

    describe(P, std::cerr);
    std::cerr << "total CS = " << P.report.cs_total_value->real() << " + "
              << P.report.cs_total_value->imag() << " i (mod 1)\n";
    for (const auto& pe : P.report.peripheral)
        std::cerr << "peripheral " << pe.name << ": " << pe.value.real() << " + "
                  << pe.value.imag() << " i, |trace| = " << pe.trace_abs << "\n";
    emit(P.report, opt.json);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"complex Chern-Simons invariants of cusped triangulated 3-manifolds"};
    app.require_subcommand(1);

    CommonOpts opt;
    bool lenient = false;

    auto add_common = [&](CLI::App* sub, bool solver_opts) {
        sub->add_option("file", opt.file, "triangulation file (.tri)")->required();
        sub->add_flag("--json", opt.json, "machine-readable report on stdout");
        if (solver_opts) {
            sub->add_option("--branching", opt.branching, "branching file or 'auto'");
            sub->add_option("--seed", opt.seed, "solver RNG seed")
                ->each([&](const std::string&) { opt.seed_given = true; });
            sub->add_option("--tol", opt.tol, "gluing residual tolerance");
            sub->add_option("--paths", opt.paths_file, "peripheral path file");
            sub->add_option("--shapes", opt.shapes_file, "initial shapes file");
            sub->add_option("--flattening", opt.flattening_file, "flattening file (skips solve)");
        }
    };

    CLI::App* info = app.add_subcommand("info", "parse and print the census");
    add_common(info, false);
    info->add_flag("--lenient", lenient, "allow unglued faces");

    CLI::App* cs = app.add_subcommand("cs", "compute the Chern-Simons invariant");
    add_common(cs, true);

    CLI::App* verify = app.add_subcommand("verify", "compute and run the full relation suite");
    add_common(verify, true);

    CLI11_PARSE(app, argc, argv);

    if (info->parsed()) return cmd_info(opt, lenient);
    if (cs->parsed()) return run_guarded(opt, "cs", false);
    return run_guarded(opt, "verify", true);
}
