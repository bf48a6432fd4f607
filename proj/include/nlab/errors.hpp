#pragma once

#include <stdexcept>
#include <string>

namespace nlab {

struct SpecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidGrid : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AssemblyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BracketError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Iterative routine hit its iteration cap; carries the best value reached.
struct ConvergenceError : std::runtime_error {
    double best_value;
    int iterations;
    ConvergenceError(const std::string& what, double best, int iters)
        : std::runtime_error(what), best_value(best), iterations(iters) {}
};

} // namespace nlab
