#pragma once

#include <stdexcept>
#include <string>

namespace seqtest {

/// Argument outside the open unit interval (or another mathematical domain).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid construction parameter (nonpositive weight, grid too small, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operation not defined for this kind of penalty (e.g. a kinked one).
class UnsupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A numerical routine could not produce a trustworthy answer.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace seqtest
