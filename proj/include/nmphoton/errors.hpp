// errors.hpp — exception types shared by the library and the CLI exit-code mapping

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nmphoton {

// Bad input: malformed config, inconsistent parameters, mismatched grids.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Numerical failure during a run (non-finite state, inconsistent design).
struct SolverError : std::runtime_error {
    std::size_t step{0};
    double time{0.0};

    SolverError(const std::string& what, std::size_t step_, double time_)
        : std::runtime_error(what + " (step " + std::to_string(step_) + ", t=" + std::to_string(time_) + ")"),
          step(step_),
          time(time_) {}
};

}  // namespace nmphoton
