#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace asvobs {

// Numerics
struct NotPositiveDefinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct Singular : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonFinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Synthesis
struct InvalidConfig : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct Infeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidTheta : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Harness / IO
struct EmptyWindow : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A run that produced non-finite values. Carries the offending step index.
struct DivergedRun : NonFinite {
    DivergedRun(const std::string& what, std::size_t step_index)
        : NonFinite(what), step(step_index) {}
    std::size_t step;
};

/// Config-file problem, with the 1-based line number when one applies (0 otherwise).
struct ParseError : std::runtime_error {
    ParseError(const std::string& what, int line_number = 0)
        : std::runtime_error(line_number > 0 ? "line " + std::to_string(line_number) + ": " + what
                                             : what),
          line(line_number) {}
    int line;
};

}  // namespace asvobs
