#pragma once

#include <optional>
#include <string>
#include <vector>

#include "csvol/crossratio.hpp"
#include "csvol/flattening.hpp"

namespace csvol {

// Machine-readable run summary.  Deterministic for fixed seed and inputs.
struct RunReport {
    int schema_version = 1;
    std::string command;
    std::string input_digest;
    int tetrahedra = 0;
    int edge_classes_count = 0;
    std::vector<int> cusp_euler;      // per boundary component
    std::vector<int> branching_dirs;  // 1 = as stored, 0 = reversed
    std::vector<std::string> branching_orders;

    bool has_solver = false;
    int solver_iterations = 0;
    int solver_restarts = 0;
    double solver_residual = 0.0;
    uint64_t seed = 0;
    bool geometric_candidate = false;

    std::vector<cplx> shapes;
    std::vector<std::array<long long, 3>> flattening_pqs;
    std::vector<cplx> cs_per_tet;
    std::vector<int> signs;
    std::optional<cplx> cs_total_value;

    double gluing_residual_max = 0.0;
    double edge_flattening_max = 0.0;
    double cell_deviation_max = 0.0;
    bool edge_stars_plus_id = true;

    struct PeripheralEntry {
        std::string name;
        cplx value;
        double exp_vs_matrix = 0.0;  // |exp(value) - upper-left of matrix holonomy|
        double trace_abs = 0.0;
    };
    std::vector<PeripheralEntry> peripheral;

    std::vector<std::string> warnings;
    int exit_status = 0;

    // JSON with every numeric field printed to 17 significant digits.
    std::string to_json() const;
};

// 64-bit FNV-1a content digest, hex-encoded.
std::string content_digest(const std::string& bytes);

}  // namespace csvol
