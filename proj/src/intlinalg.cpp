#include "csvol/intlinalg.hpp"

#include <algorithm>

namespace csvol {

namespace {

// Column echelon form H = M * U with U unimodular.  Returns the pivot
// (row, col) list in elimination order.
struct Echelon {
    IntMatrix H;
    IntMatrix U;
    std::vector<std::pair<int, int>> pivots;
};

Echelon column_echelon(const IntMatrix& M) {
    const int m = static_cast<int>(M.size());
    const int n = m ? static_cast<int>(M[0].size()) : 0;
    Echelon E;
    E.H = M;
    E.U.assign(n, std::vector<bigint>(n, 0));
    for (int i = 0; i < n; ++i) E.U[i][i] = 1;

    auto col_addmul = [&](int dst, int src, const bigint& k) {
        for (int r = 0; r < m; ++r) E.H[r][dst] += k * E.H[r][src];
        for (int r = 0; r < n; ++r) E.U[r][dst] += k * E.U[r][src];
    };
    auto col_swap = [&](int a, int b) {
        for (int r = 0; r < m; ++r) std::swap(E.H[r][a], E.H[r][b]);
        for (int r = 0; r < n; ++r) std::swap(E.U[r][a], E.U[r][b]);
    };
    auto col_negate = [&](int c) {
        for (int r = 0; r < m; ++r) E.H[r][c] = -E.H[r][c];
        for (int r = 0; r < n; ++r) E.U[r][c] = -E.U[r][c];
    };

    int c = 0;
    for (int r = 0; r < m && c < n; ++r) {
        // Euclidean reduction across columns c..n-1 on row r.
        for (;;) {
            int best = -1;
            for (int j = c; j < n; ++j)
                if (E.H[r][j] != 0 &&
                    (best < 0 || abs(E.H[r][j]) < abs(E.H[r][best])))
                    best = j;
            if (best < 0) break;
            if (best != c) col_swap(c, best);
            bool clean = true;
            for (int j = c + 1; j < n; ++j)
                if (E.H[r][j] != 0) {
                    const bigint k = E.H[r][j] / E.H[r][c];
                    col_addmul(j, c, -k);
                    if (E.H[r][j] != 0) clean = false;
                }
            if (clean) break;
        }
        if (E.H[r][c] != 0) {
            if (E.H[r][c] < 0) col_negate(c);
            E.pivots.push_back({r, c});
            ++c;
        }
    }
    return E;
}

}  // namespace

int integer_rank(const IntMatrix& M) {
    return static_cast<int>(column_echelon(M).pivots.size());
}

IntSolveResult solve_integer_system(const IntMatrix& M, const std::vector<bigint>& rhs) {
    const int m = static_cast<int>(M.size());
    const int n = m ? static_cast<int>(M[0].size()) : 0;
    Echelon E = column_echelon(M);

    IntSolveResult res;
    // Kernel: columns of U past the last pivot column.
    const int rank = static_cast<int>(E.pivots.size());
    for (int j = rank; j < n; ++j) {
        std::vector<bigint> v(n);
        for (int i = 0; i < n; ++i) v[i] = E.U[i][j];
        res.kernel.push_back(std::move(v));
    }

    // Forward substitution in the echelon basis: y on pivot columns.
    std::vector<bigint> y(n, 0);
    std::vector<bigint> acc = rhs;  // remaining right-hand side
    for (const auto& [r, c] : E.pivots) {
        if (acc[r] % E.H[r][c] != 0) {
            res.solvable = false;
            res.obstruction_row = r;
            return res;
        }
        const bigint k = acc[r] / E.H[r][c];
        y[c] = k;
        for (int i = 0; i < m; ++i) acc[i] -= k * E.H[i][c];
    }
    for (int i = 0; i < m; ++i)
        if (acc[i] != 0) {
            res.solvable = false;
            res.obstruction_row = i;
            return res;
        }

    res.solvable = true;
    res.particular.assign(n, 0);
    for (int i = 0; i < n; ++i) {
        bigint s = 0;
        for (int j = 0; j < n; ++j) s += E.U[i][j] * y[j];
        res.particular[i] = s;
    }
    return res;
}

std::vector<bigint> reduce_by_kernel(std::vector<bigint> x,
                                     const std::vector<std::vector<bigint>>& kernel) {
    if (kernel.empty()) return x;
    auto norm2 = [](const std::vector<bigint>& v) {
        bigint s = 0;
        for (const bigint& a : v) s += a * a;
        return s;
    };
    bool improved = true;
    int guard = 0;
    while (improved && guard++ < 10000) {
        improved = false;
        for (const auto& k : kernel) {
            // Optimal integer multiple of k to subtract: round(<x,k>/<k,k>).
            bigint xk = 0, kk = 0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                xk += x[i] * k[i];
                kk += k[i] * k[i];
            }
            if (kk == 0) continue;
            // Rounded division toward nearest.
            bigint t;
            if (xk >= 0)
                t = (2 * xk + kk) / (2 * kk);
            else
                t = -bigint((-2 * xk + kk) / (2 * kk));
            if (t == 0) continue;
            std::vector<bigint> cand = x;
            for (std::size_t i = 0; i < x.size(); ++i) cand[i] -= t * k[i];
            if (norm2(cand) < norm2(x)) {
                x = std::move(cand);
                improved = true;
            }
        }
    }
    return x;
}

}  // namespace csvol
