#include "csvol/dilog.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace csvol {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kPi2_6 = kPi * kPi / 6.0;

// Real z on a cut is nudged to the convention side: below [1,inf) for the
// dilogarithm cut, above (-inf,0] for the log cut.  The two are coherent:
// if z sits below [1,inf) then 1-z sits above (-inf,0].
cplx side_canonical(cplx z) {
    if (z.imag() == 0.0) {
        if (z.real() >= 1.0) return {z.real(), -0.0};
        return {z.real(), +0.0};
    }
    return z;
}

// 1-z with the sign of a zero imaginary part flipped to the opposite side.
cplx one_minus(cplx z) { return {1.0 - z.real(), -z.imag()}; }

// Direct power series, |z| <= 0.55.
cplx li2_series(cplx z) {
    cplx sum = 0.0, term = z;
    for (int k = 1; k < 96; ++k) {
        sum += term / double(k * k);
        if (std::abs(term) < 1e-17 * k * k) break;
        term *= z;
    }
    return sum;
}

// Coefficients c_n = B_n / n! via the stable recurrence
// c_{n} = -sum_{j<n} c_j / (n-j+1)!,  c_0 = 1.
const std::array<double, 76>& bernoulli_over_factorial() {
    static const std::array<double, 76> table = [] {
        std::array<double, 76> c{};
        std::array<double, 78> inv_fact{};
        inv_fact[0] = 1.0;
        for (std::size_t k = 1; k < inv_fact.size(); ++k) inv_fact[k] = inv_fact[k - 1] / double(k);
        c[0] = 1.0;
        for (std::size_t n = 1; n < c.size(); ++n) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += c[j] * inv_fact[n - j + 1];
            c[n] = -s;
        }
        return c;
    }();
    return table;
}

// Li2 as a series in u = -log(1-z); converges for |u| < 2*pi, used on the
// middle annulus where neither the direct series nor one-step reflection
// or inversion applies.
cplx li2_log_series(cplx u) {
    const auto& c = bernoulli_over_factorial();
    cplx sum = 0.0, upow = u;
    for (std::size_t n = 0; n < c.size(); ++n) {
        sum += c[n] * upow / double(n + 1);
        // Odd coefficients beyond the first vanish; only stop on a genuinely
        // small term.
        if (c[n] != 0.0 && n > 1 && std::abs(upow) * std::abs(c[n]) < 1e-19) break;
        upow *= u;
    }
    return sum;
}

}  // namespace

cplx clog(cplx w) {
    if (w.imag() == 0.0 && w.real() < 0.0) return {std::log(-w.real()), kPi};
    return std::log(w);
}

cplx clog1m(cplx z) { return clog(one_minus(side_canonical(z))); }

cplx li2(cplx z) {
    z = side_canonical(z);
    const double az = std::abs(z);
    if (az <= 0.55) return li2_series(z);

    const cplx omz = one_minus(z);
    if (std::abs(omz) < 1e-15) return kPi2_6;
    if (std::abs(omz) <= 0.55)
        return kPi2_6 - clog(z) * clog(omz) - li2_series(omz);

    if (az >= 2.0) {
        const cplx lmz = clog(cplx(-z.real(), -z.imag()));
        return -kPi2_6 - 0.5 * lmz * lmz - li2(1.0 / z);
    }
    return li2_log_series(-clog(omz));
}

cplx rogers_R(cplx z) {
    z = side_canonical(z);
    return 0.5 * clog(z) * clog(one_minus(z)) + li2(z);
}

double H(double u) {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("H(u) requires 0 < u < 1");
    return (kPi2_6 - rogers_R(cplx(u, 0.0)).real()) / (4.0 * kPi * kPi);
}

}  // namespace csvol
