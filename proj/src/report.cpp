#include "csvol/report.hpp"

#include <cinttypes>
#include <cstdio>
#include <sstream>

namespace csvol {

std::string content_digest(const std::string& bytes) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016" PRIx64, h);
    return buf;
}

namespace {

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s = buf;
    if (s == "-0") s = "0";
    return s;
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

void complex_fields(std::ostringstream& o, const cplx& z) {
    o << "\"re\": " << num(z.real()) << ", \"im\": " << num(z.imag());
}

}  // namespace

std::string RunReport::to_json() const {
    std::ostringstream o;
    o << "{\n";
    o << "  \"schema_version\": " << schema_version << ",\n";
    o << "  \"command\": " << quoted(command) << ",\n";
    o << "  \"input_digest\": " << quoted(input_digest) << ",\n";
    o << "  \"tetrahedra\": " << tetrahedra << ",\n";
    o << "  \"edge_classes\": " << edge_classes_count << ",\n";
    o << "  \"cusps\": [";
    for (std::size_t i = 0; i < cusp_euler.size(); ++i)
        o << (i ? ", " : "") << "{\"id\": " << i << ", \"euler_characteristic\": " << cusp_euler[i]
          << "}";
    o << "],\n";
    o << "  \"branching\": {\"edge_directions\": [";
    for (std::size_t i = 0; i < branching_dirs.size(); ++i) o << (i ? ", " : "") << branching_dirs[i];
    o << "], \"orders\": [";
    for (std::size_t i = 0; i < branching_orders.size(); ++i)
        o << (i ? ", " : "") << quoted(branching_orders[i]);
    o << "]},\n";
    if (has_solver) {
        o << "  \"solver\": {\"iterations\": " << solver_iterations
          << ", \"restarts\": " << solver_restarts << ", \"residual\": " << num(solver_residual)
          << ", \"seed\": " << seed
          << ", \"geometric_candidate\": " << (geometric_candidate ? "true" : "false") << "},\n";
    }
    o << "  \"shapes\": [";
    for (std::size_t t = 0; t < shapes.size(); ++t) {
        o << (t ? ", " : "") << "{\"tet\": " << t << ", ";
        complex_fields(o, shapes[t]);
        o << "}";
    }
    o << "],\n";
    o << "  \"flattening\": [";
    for (std::size_t t = 0; t < flattening_pqs.size(); ++t)
        o << (t ? ", " : "") << "{\"tet\": " << t << ", \"p\": " << flattening_pqs[t][0]
          << ", \"q\": " << flattening_pqs[t][1] << ", \"sigma\": " << flattening_pqs[t][2] << "}";
    o << "],\n";
    o << "  \"cs_per_tet\": [";
    for (std::size_t t = 0; t < cs_per_tet.size(); ++t) {
        o << (t ? ", " : "") << "{\"tet\": " << t << ", \"sign\": " << signs[t] << ", ";
        complex_fields(o, cs_per_tet[t]);
        o << "}";
    }
    o << "],\n";
    if (cs_total_value) {
        o << "  \"cs_total\": {";
        complex_fields(o, *cs_total_value);
        o << "},\n";
    }
    o << "  \"residuals\": {\"gluing_max\": " << num(gluing_residual_max)
      << ", \"edge_flattening_max\": " << num(edge_flattening_max)
      << ", \"cell_max\": " << num(cell_deviation_max)
      << ", \"edge_stars_plus_id\": " << (edge_stars_plus_id ? "true" : "false")
      << ", \"peripheral\": [";
    for (std::size_t i = 0; i < peripheral.size(); ++i) {
        o << (i ? ", " : "") << "{\"name\": " << quoted(peripheral[i].name) << ", ";
        complex_fields(o, peripheral[i].value);
        o << ", \"exp_vs_matrix\": " << num(peripheral[i].exp_vs_matrix)
          << ", \"trace_abs\": " << num(peripheral[i].trace_abs) << "}";
    }
    o << "]},\n";
    o << "  \"warnings\": [";
    for (std::size_t i = 0; i < warnings.size(); ++i) o << (i ? ", " : "") << quoted(warnings[i]);
    o << "],\n";
    o << "  \"exit_status\": " << exit_status << "\n";
    o << "}\n";
    return o.str();
}

}  // namespace csvol
