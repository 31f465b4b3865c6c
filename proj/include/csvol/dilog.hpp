#pragma once

#include <complex>

namespace csvol {

using cplx = std::complex<double>;

// Principal logarithm with the cut along (-inf, 0] and the value on the cut
// continuous from above: clog(-x) = log x + i*pi for x > 0.
cplx clog(cplx w);

// log(1-z) under the coherent side convention: a real z on [1, inf) is
// treated as approached from below, so 1-z sits on the upper side of the
// log cut.
cplx clog1m(cplx z);

// Dilogarithm, principal branch, cut along [1, inf) with on-cut values
// taken as the limit from below.  Series on |z| <= 1/2, functional
// equations elsewhere; absolute error below 1e-13.
cplx li2(cplx z);

// Rogers dilogarithm R(z) = 1/2 log z log(1-z) + Li2(z) with the same cut
// conventions.
cplx rogers_R(cplx z);

// H(u) = (1/4pi^2)(pi^2/6 - R(u)) for u in (0,1).  Throws
// std::domain_error outside the open interval.
double H(double u);

// A complex number understood modulo Z: the representative keeps the real
// part in [0,1), the imaginary part is never reduced.
struct CSValue {
    cplx rep{0.0, 0.0};

    CSValue() = default;
    explicit CSValue(cplx v) { rep = reduce(v); }

    static cplx reduce(cplx v) {
        double r = v.real() - std::floor(v.real());
        if (r >= 1.0) r -= 1.0;  // guard against floor rounding at 1-eps
        return {r, v.imag()};
    }

    CSValue operator+(const CSValue& o) const { return CSValue(rep + o.rep); }
    CSValue operator-(const CSValue& o) const { return CSValue(rep - o.rep); }

    // Distance between the real parts as elements of R/Z.
    static double mod1_distance(double a, double b) {
        double d = a - b;
        d -= std::round(d);
        return std::abs(d);
    }
};

}  // namespace csvol
