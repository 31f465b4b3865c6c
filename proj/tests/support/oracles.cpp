#include "support/oracles.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "csvol/crossratio.hpp"
#include "csvol/dilog.hpp"
#include "csvol/errors.hpp"
#include "csvol/holonomy.hpp"

namespace csvol::testing {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
const cplx kIPi(0.0, kPi);
const cplx kTwoPiI(0.0, 2.0 * kPi);
}  // namespace

double tanh_sinh(const std::function<double(double)>& f, double a, double b, double tol) {
    const double c = 0.5 * (a + b), w = 0.5 * (b - a);
    auto g = [&](double t) {
        const double s = std::sinh(t);
        const double x = std::tanh(0.5 * kPi * s);
        const double dx = 0.5 * kPi * std::cosh(t) / std::pow(std::cosh(0.5 * kPi * s), 2);
        const double xx = c + w * x;
        if (xx <= a || xx >= b) return 0.0;  // underflow at the ends
        return f(xx) * w * dx;
    };
    const double tmax = 6.5;
    double h = 1.0;
    double sum = g(0.0);
    for (double t = h; t < tmax; t += h) sum += g(t) + g(-t);
    double prev = sum * h;
    for (int level = 1; level <= 12; ++level) {
        h *= 0.5;
        double add = 0.0;
        for (double t = h; t < tmax; t += 2 * h) add += g(t) + g(-t);
        sum += add;
        const double cur = sum * h;
        if (level >= 3 && std::abs(cur - prev) < tol * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    return prev;
}

double bloch_wigner(cplx z) {
    return li2(z).imag() + std::arg(1.0 - z) * std::log(std::abs(z));
}

namespace {

// State (l2, F) driven by l1 along a parametrised curve.
struct SurfaceState {
    cplx l2, F;
};

SurfaceState rk_step(const SurfaceState& s, const std::function<cplx(double)>& l1_of,
                     const std::function<cplx(double)>& dl1_of, double t, double h) {
    auto rhs = [&](double tt, const SurfaceState& st) {
        const cplx l1 = l1_of(tt);
        const cplx dl1 = dl1_of(tt);
        const cplx z = std::exp(l1);
        const cplx dl2 = z / (1.0 - z) * dl1;
        const cplx dF = (st.l2 * dl1 - l1 * dl2 - kIPi * dl1) / (8.0 * kPi * kPi);
        return SurfaceState{dl2, dF};
    };
    auto add = [](const SurfaceState& x, const SurfaceState& y, double c) {
        return SurfaceState{x.l2 + c * y.l2, x.F + c * y.F};
    };
    const SurfaceState k1 = rhs(t, s);
    const SurfaceState k2 = rhs(t + h / 2, add(s, k1, h / 2));
    const SurfaceState k3 = rhs(t + h / 2, add(s, k2, h / 2));
    const SurfaceState k4 = rhs(t + h, add(s, k3, h));
    SurfaceState out = s;
    out.l2 += h / 6.0 * (k1.l2 + 2.0 * k2.l2 + 2.0 * k3.l2 + k4.l2);
    out.F += h / 6.0 * (k1.F + 2.0 * k2.F + 2.0 * k3.F + k4.F);
    return out;
}

// Integrates along one parametrised curve with step-doubling control.
SurfaceState integrate_curve(SurfaceState s, const std::function<cplx(double)>& l1_of,
                             const std::function<cplx(double)>& dl1_of, double t0, double t1) {
    double t = t0;
    double h = (t1 - t0) / 16.0;
    const double hmin = std::abs(t1 - t0) * 1e-9;
    while ((t1 - t) * (t1 - t0) > 0) {
        if (std::abs(h) > std::abs(t1 - t)) h = t1 - t;
        const SurfaceState one = rk_step(s, l1_of, dl1_of, t, h);
        const SurfaceState half = rk_step(rk_step(s, l1_of, dl1_of, t, h / 2), l1_of, dl1_of,
                                          t + h / 2, h / 2);
        const double err = std::abs(one.l2 - half.l2) + std::abs(one.F - half.F);
        if (err < 1e-12 || std::abs(h) <= hmin) {
            s = half;
            t += h;
            if (err < 1e-14) h *= 2.0;
        } else {
            h *= 0.5;
        }
    }
    return s;
}

SurfaceState integrate_segment(SurfaceState s, cplx a, cplx b) {
    auto l1 = [=](double t) { return a + t * (b - a); };
    auto dl1 = [=](double) { return b - a; };
    return integrate_curve(s, l1, dl1, 0.0, 1.0);
}

// Full circle around l1 = 0 with radius r, counterclockwise (dir=+1) or
// clockwise, starting and ending at l1 = r.
SurfaceState integrate_loop(SurfaceState s, double r, int dir) {
    auto l1 = [=](double th) { return cplx(r * std::cos(th), r * std::sin(th)); };
    auto dl1 = [=](double th) { return cplx(-r * std::sin(th), r * std::cos(th)); };
    return integrate_curve(s, l1, dl1, 0.0, dir > 0 ? 2.0 * kPi : -2.0 * kPi);
}

// Axis-aligned route from a to b keeping clear of the lattice 2 pi i Z.
std::vector<cplx> route_points(cplx a, cplx b) {
    auto lattice_dist = [](double im) {
        const double k = std::round(im / (2.0 * kPi));
        return std::abs(im - 2.0 * kPi * k);
    };
    std::vector<cplx> pts{a};
    const double R = std::max({std::abs(a.real()), std::abs(b.real()), 1.0}) + 2.0;
    // Leave `a` rightward; if that would pass close to a lattice point
    // (only possible when crossing Re=0), first shift vertically.
    double ima = a.imag();
    if (a.real() < 0.0 && lattice_dist(ima) < 0.4) {
        const double k = std::round(ima / (2.0 * kPi));
        ima = 2.0 * kPi * k + (ima >= 2.0 * kPi * k ? 0.6 : -0.6);
        pts.push_back(cplx(a.real(), ima));
    }
    pts.push_back(cplx(R, ima));
    double imb = b.imag();
    if (b.real() < 0.0 && lattice_dist(imb) < 0.4) {
        const double k = std::round(imb / (2.0 * kPi));
        imb = 2.0 * kPi * k + (imb >= 2.0 * kPi * k ? 0.6 : -0.6);
    }
    pts.push_back(cplx(R, imb));
    if (imb != b.imag()) pts.push_back(cplx(b.real(), imb));
    pts.push_back(b);
    return pts;
}

}  // namespace

cplx cs_path_oracle(const TetFlattening& target) {
    // Base branch at u0 = 1/2.
    const cplx l1_base(std::log(2.0), 0.0);
    const cplx l2_base = kIPi;
    SurfaceState s{l2_base, cplx(1.0 / 48.0, 0.0)};

    // Main route in the l1 plane.
    const auto pts = route_points(l1_base, target.l1);
    cplx cur = pts.front();
    for (std::size_t i = 1; i < pts.size(); ++i) {
        s = integrate_segment(s, cur, pts[i]);
        cur = pts[i];
    }

    // Sheet fix-up: loops around l1 = 0 change l2 by -2 pi i per ccw turn.
    const cplx gap = (s.l2 - target.l2) / kTwoPiI;
    const long long n = std::llround(gap.real());
    if (std::abs(gap - cplx(double(n))) > 1e-6)
        throw std::runtime_error("path oracle: l2 gap is not an integer multiple of 2 pi i");
    if (n != 0) {
        const cplx anchor(0.5, 0.0);
        auto go = [&](cplx from, cplx to) {
            const auto leg = route_points(from, to);
            cplx c = leg.front();
            for (std::size_t i = 1; i < leg.size(); ++i) {
                s = integrate_segment(s, c, leg[i]);
                c = leg[i];
            }
        };
        go(cur, anchor);
        for (long long k = 0; k < std::llabs(n); ++k)
            s = integrate_loop(s, 0.5, n > 0 ? +1 : -1);
        go(anchor, cur);
    }
    if (std::abs(s.l2 - target.l2) > 1e-7)
        throw std::runtime_error("path oracle: failed to land on the target sheet");
    return s.F;
}

std::string fig8_tri_text() {
    return "tri 1\n"
           "tets 2\n"
           "glue 0 0 1 1 0 2 3\n"
           "glue 0 1 1 0 3 2 1\n"
           "glue 0 2 1 2 1 0 3\n"
           "glue 0 3 1 0 1 3 2\n"
           "glue 1 0 0 2 1 0 3\n"
           "glue 1 1 0 1 0 2 3\n"
           "glue 1 2 0 0 1 3 2\n"
           "glue 1 3 0 0 3 2 1\n";
}

Ordering fig8_ordering(const std::string& letters) {
    // Letter dictionary of the fixture: x=0, y=3, z=2, t=1.
    Ordering o{};
    for (int i = 0; i < 4; ++i) {
        switch (letters.at(i)) {
            case 'x': o[i] = 0; break;
            case 'y': o[i] = 3; break;
            case 'z': o[i] = 2; break;
            case 't': o[i] = 1; break;
            default: throw std::invalid_argument("bad letter");
        }
    }
    return o;
}

int count_branchings_bruteforce(const AbstractTriangulation& T,
                                const std::vector<EdgeClass>& edges) {
    const std::size_t m = edges.size();
    if (m > 20) throw std::invalid_argument("too many edges for brute force");
    int count = 0;
    for (std::size_t mask = 0; mask < (1ull << m); ++mask) {
        std::vector<bool> dir(m);
        for (std::size_t i = 0; i < m; ++i) dir[i] = mask & (1ull << i);
        if (branching_is_acyclic(T, edges, dir)) ++count;
    }
    return count;
}

std::string MuSym::str() const {
    static const char* names[5] = {"i*pi", "a1", "a2", "b1", "b2"};
    std::ostringstream o;
    bool first = true;
    for (int i = 0; i < 5; ++i) {
        if (c[i] == 0) continue;
        if (!first) o << " + ";
        o << "(" << c[i] << "/2)" << names[i];
        first = false;
    }
    if (first) o << "0";
    return o.str();
}

MuSym flattening_symbol(const Branching& b, int tet, const Ordering& ordering) {
    if (tet < 0 || tet > 1) throw std::invalid_argument("two-tet triangulations only");
    const CrossRatioClass c = classify_ordering(b.ranks(tet, ordering));
    MuSym v;  // in whole units first, halved by callers
    const int a1 = 1 + 2 * tet, a2 = 2 + 2 * tet;  // basis slots of l1, l2
    switch (c.base) {
        case 0: v.c[a1] = 2; break;
        case 1:
            v.c[a2] = 2;
            if (c.primed) v.c[0] = -4;  // -2 i pi
            break;
        default:  // l3 = i pi - l1 - l2
            v.c[0] = 2;
            v.c[a1] = -2;
            v.c[a2] = -2;
            break;
    }
    if (c.inverted)
        for (auto& x : v.c) x = -x;
    return v;
}

MuSym mu_symbolic(const AbstractTriangulation& T, const Branching& b, const BoundaryPath& loop) {
    MuSym sum;
    for (const auto& s : loop.steps) {
        const Ordering from = s.forward
                                  ? s.ordering
                                  : (s.e3 ? swap_last(s.ordering) : swap_middle(s.ordering));
        const Ordering ranks = b.ranks(s.tet, from);
        const int pos = s.e3 ? 2 : 1;
        const bool from_low = ranks[pos] < ranks[pos + 1];
        const int dir = from_low ? +1 : -1;
        if (s.e3) {
            const Ordering low = from_low ? from : (s.e3 ? swap_last(from) : swap_middle(from));
            MuSym L = flattening_symbol(b, s.tet, low);
            for (int i = 0; i < 5; ++i) sum.c[i] -= dir * L.c[i] / 2;  // -dir * L/2, halves
        } else {
            sum.c[0] -= dir;  // -dir * (i pi)/2 in half-units
        }
    }
    return sum;
}

}  // namespace csvol::testing
