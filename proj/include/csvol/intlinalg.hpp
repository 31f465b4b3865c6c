#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <vector>

namespace csvol {

using bigint = boost::multiprecision::cpp_int;
using IntMatrix = std::vector<std::vector<bigint>>;  // row-major

struct IntSolveResult {
    bool solvable = false;
    std::vector<bigint> particular;       // one solution of M x = rhs
    std::vector<std::vector<bigint>> kernel;  // basis of { x : M x = 0 }
    int obstruction_row = -1;             // inconsistent row when unsolvable
};

// Solves M x = rhs exactly over the integers via a column Hermite-style
// reduction with a unimodular column transform.  Kernel basis is exact.
IntSolveResult solve_integer_system(const IntMatrix& M, const std::vector<bigint>& rhs);

// Rank of M over the rationals (equals the integer column-echelon rank).
int integer_rank(const IntMatrix& M);

// Greedy lattice reduction of `x` by the kernel basis, minimising the
// squared euclidean norm; deterministic.  Small instances only.
std::vector<bigint> reduce_by_kernel(std::vector<bigint> x,
                                     const std::vector<std::vector<bigint>>& kernel);

}  // namespace csvol
