#pragma once

#include <stdexcept>
#include <string>

namespace cpush {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad graph input (missing self-loop, mismatched node counts, unreadable file).
struct InvalidGraphError : Error {
    using Error::Error;
};

// Bad run configuration (unparseable file, out-of-range parameter, missing path).
struct ConfigError : Error {
    using Error::Error;
};

// An active constraint with a vanishing gradient; the correction step is undefined.
struct DegenerateConstraintError : Error {
    using Error::Error;
};

// Non-finite value produced during iteration; carries the agent and term it came from.
struct NumericalError : Error {
    NumericalError(int agent_, std::string term_)
        : Error("non-finite value at agent " + std::to_string(agent_) + " in term '" + term_ + "'"),
          agent(agent_), term(std::move(term_)) {}
    int agent;
    std::string term;
};

// A graph schedule that could not be verified uniformly jointly strongly connected.
struct ConnectivityError : Error {
    using Error::Error;
};

}  // namespace cpush
