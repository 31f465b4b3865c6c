#include "csvol/cs.hpp"

#include <cmath>
#include <map>

#include "csvol/errors.hpp"
#include "csvol/intlinalg.hpp"

namespace csvol {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
const cplx kIPi(0.0, kPi);
const cplx kTwoPiI(0.0, 2.0 * kPi);
}  // namespace

CSValue cs_tet(const TetFlattening& f) {
    const cplx z = f.z;
    if (std::abs(z) < 1e-12 || std::abs(z - 1.0) < 1e-12)
        throw ValidationError("cs_tet: degenerate shape");
    if (f.sigma != 0) throw ValidationError("cs_tet: flattening carries odd branch parity");
    const double p = double(f.p), q = double(f.q);
    const cplx val = (2.0 * rogers_R(z) + ((2.0 * q - 1.0) * kIPi) * clog(z) +
                      (2.0 * p) * kIPi * clog1m(z)) /
                         (8.0 * kPi * kPi) +
                     p / 4.0 - p * q / 2.0 - 1.0 / 24.0;
    return CSValue(val);
}

std::vector<int> orientation_signs(const Branching& b) {
    std::vector<int> s(b.order.size());
    for (std::size_t t = 0; t < b.order.size(); ++t)
        s[t] = b.orientation_sign(static_cast<int>(t));
    return s;
}

CSValue cs_total(const Flattening& F, const std::vector<int>& signs) {
    cplx sum = 0.0;
    for (int t = 0; t < F.size(); ++t) sum += double(signs[t]) * cs_tet(F.tets[t]).rep;
    return CSValue(sum);
}

double five_term_residual(double u, double v) {
    if (!(0.0 < v && v < u && u < 1.0))
        throw std::domain_error("five_term_residual requires 0 < v < u < 1");
    return H(u) - H(v) + H(v / u) - H((1.0 - 1.0 / u) / (1.0 - 1.0 / v)) +
           H((1.0 - u) / (1.0 - v));
}

namespace {

// Log differences with integer 2*pi*i adjustments; pairs touching an
// infinite point are dropped (they cancel inside every L value).
struct LamTable {
    std::array<ConfigPoint, 5> pts;
    std::map<std::pair<int, int>, cplx> lam;            // finite ordered pairs
    std::map<std::pair<int, int>, int> col;             // column index per pair
    std::vector<std::pair<int, int>> pairs;             // column -> pair

    explicit LamTable(const std::array<ConfigPoint, 5>& points) : pts(points) {
        for (int a = 0; a < 5; ++a)
            for (int b = 0; b < 5; ++b) {
                if (a == b || pts[a].at_infinity || pts[b].at_infinity) continue;
                const cplx d = pts[a].value - pts[b].value;
                if (std::abs(d) < 1e-13)
                    throw ValidationError("five-term configuration has coincident points");
                col[{a, b}] = static_cast<int>(pairs.size());
                pairs.push_back({a, b});
                lam[{a, b}] = clog(d);
            }
    }

    bool dropped(int a, int b) const {
        return pts[a].at_infinity || pts[b].at_infinity;
    }
};

// Coefficient row + value of one L(x y z t) in terms of the lam table.
struct LinForm {
    std::vector<int> coeff;  // per lam column
    cplx value{0.0, 0.0};
};

LinForm l_value(const LamTable& T, int x, int y, int z, int t) {
    LinForm f;
    f.coeff.assign(T.pairs.size(), 0);
    auto add = [&](int a, int b, int s) {
        if (T.dropped(a, b)) return;
        f.coeff[T.col.at({a, b})] += s;
        f.value += double(s) * T.lam.at({a, b});
    };
    add(t, y, +1);
    add(z, x, +1);
    add(z, y, -1);
    add(t, x, -1);
    return f;
}

// The five sub-tetrahedra: tet i omits point i, letters ascending.
std::array<std::array<int, 4>, 5> sub_tets() {
    std::array<std::array<int, 4>, 5> T;
    for (int i = 0; i < 5; ++i) {
        int k = 0;
        for (int v = 0; v < 5; ++v)
            if (v != i) T[i][k++] = v;
    }
    return T;
}

struct RepairedConfig {
    LamTable lam;
    std::array<TetFlattening, 5> flat;
};

RepairedConfig repair_and_flatten(const std::array<ConfigPoint, 5>& points) {
    int ninf = 0;
    for (const auto& p : points) ninf += p.at_infinity ? 1 : 0;
    if (ninf > 1) throw ValidationError("at most one point may be infinite");

    LamTable lam(points);
    const auto tets = sub_tets();

    // Linear conditions on the 2*pi*i adjustments:
    //  - per tetrahedron, the i*pi sum at each of its four vertices;
    //  - the interior edge of the three-tetrahedron decomposition:
    //    l2(tet0) + l3(tet2) + l2(tet4) = 2 i pi.
    IntMatrix M;
    std::vector<bigint> rhs;
    auto push_condition = [&](const LinForm& f, const cplx& target) {
        const cplx gap = target - f.value;  // must be an integer multiple of 2 pi i
        const double w = gap.imag() / (2.0 * kPi);
        const long long k = std::llround(w);
        if (std::abs(gap.real()) > 1e-8 || std::abs(w - double(k)) > 1e-8)
            throw ValidationError("five-term repair failed: condition gap off the lattice");
        std::vector<bigint> row(f.coeff.size());
        for (std::size_t i = 0; i < f.coeff.size(); ++i) row[i] = f.coeff[i];
        M.push_back(std::move(row));
        rhs.push_back(k);
    };

    for (const auto& tet : tets) {
        for (int w = 0; w < 4; ++w) {
            // Remaining three letters in ascending order.
            std::array<int, 3> rest;
            int k = 0;
            for (int j = 0; j < 4; ++j)
                if (j != w) rest[k++] = tet[j];
            LinForm c1 = l_value(lam, tet[w], rest[0], rest[1], rest[2]);
            LinForm c2 = l_value(lam, tet[w], rest[1], rest[2], rest[0]);
            LinForm c3 = l_value(lam, tet[w], rest[2], rest[0], rest[1]);
            LinForm sum;
            sum.coeff.assign(lam.pairs.size(), 0);
            for (std::size_t i = 0; i < sum.coeff.size(); ++i)
                sum.coeff[i] = c1.coeff[i] + c2.coeff[i] + c3.coeff[i];
            sum.value = c1.value + c2.value + c3.value;
            push_condition(sum, kIPi);
        }
    }
    {
        // Interior edge {x1, x3} of the 3-tet side.
        LinForm a = l_value(lam, tets[0][0], tets[0][2], tets[0][3], tets[0][1]);  // l2(tet 0)
        LinForm b = l_value(lam, tets[2][0], tets[2][3], tets[2][1], tets[2][2]);  // l3(tet 2)
        LinForm c = l_value(lam, tets[4][0], tets[4][2], tets[4][3], tets[4][1]);  // l2(tet 4)
        LinForm sum;
        sum.coeff.assign(lam.pairs.size(), 0);
        for (std::size_t i = 0; i < sum.coeff.size(); ++i)
            sum.coeff[i] = a.coeff[i] + b.coeff[i] + c.coeff[i];
        sum.value = a.value + b.value + c.value;
        push_condition(sum, 2.0 * kIPi);
    }

    auto sol = solve_integer_system(M, rhs);
    if (!sol.solvable)
        throw ValidationError("five-term repair failed: no integer adjustment satisfies the "
                              "flattening conditions (configuration rejected)");
    const auto adj = reduce_by_kernel(sol.particular, sol.kernel);
    for (std::size_t i = 0; i < lam.pairs.size(); ++i)
        lam.lam[lam.pairs[i]] += double(adj[i].convert_to<long long>()) * kTwoPiI;

    RepairedConfig rc{std::move(lam), {}};
    for (int i = 0; i < 5; ++i) {
        const auto& tet = tets[i];
        const LinForm l1 = l_value(rc.lam, tet[0], tet[1], tet[2], tet[3]);
        const LinForm l2 = l_value(rc.lam, tet[0], tet[2], tet[3], tet[1]);
        rc.flat[i] = TetFlattening::from_logs(l1.value, l2.value);
    }
    return rc;
}

}  // namespace

std::array<TetFlattening, 5> five_term_flattenings(const std::array<ConfigPoint, 5>& points) {
    return repair_and_flatten(points).flat;
}

cplx five_term_config_residual(const std::array<ConfigPoint, 5>& points) {
    const auto flat = five_term_flattenings(points);
    cplx sum = 0.0;
    for (int i = 0; i < 5; ++i) {
        const cplx v = cs_tet(flat[i]).rep;
        sum += (i % 2 == 0) ? v : -v;
    }
    sum -= std::round(sum.real());
    return sum;
}

}  // namespace csvol
