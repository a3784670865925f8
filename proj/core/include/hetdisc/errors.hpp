#pragma once

#include <stdexcept>
#include <string>

namespace hetdisc {

// Input outside the admissible domain of a utility or technology map. Kept
// distinct from a legitimate -inf utility value.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Numerical procedure could not produce a result (empty feasible set, bracket
// failure, path leaving the grid, iteration cap).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hetdisc
