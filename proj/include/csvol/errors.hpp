#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace csvol {

// Failure while reading one of the text formats (.tri, shapes, flattening,
// paths, branchings).  Carries a 1-based line number when known.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string msg, int line = 0, int column = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) +
                                            (column > 0 ? ":" + std::to_string(column) : "") +
                                            ": " + msg
                                      : msg),
          line_(line), column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

// Structural violation in a triangulation or derived data.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A cross-ratio drifted to 0, 1 or infinity.
class DegenerateShapeError : public std::runtime_error {
public:
    explicit DegenerateShapeError(int tet, const std::string& what)
        : std::runtime_error("tetrahedron " + std::to_string(tet) + ": " + what), tet_(tet) {}
    int tet() const { return tet_; }

private:
    int tet_;
};

// Newton iteration failed to reach the requested tolerance.
class SolveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The integer lift system has no solution over the integers.
class NoIntegerSolution : public std::runtime_error {
public:
    explicit NoIntegerSolution(std::string msg, std::vector<long long> obstruction = {})
        : std::runtime_error(std::move(msg)), obstruction_(std::move(obstruction)) {}
    const std::vector<long long>& obstruction() const { return obstruction_; }

private:
    std::vector<long long> obstruction_;
};

// A verification relation exceeded its tolerance.
class VerifyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace csvol
