#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tfcomm {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
public:
    using Error::Error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

/// The Weyl-Heisenberg set has a vanishing lower frame bound.
class NotAFrame : public Error {
public:
    using Error::Error;
};

/// Lattice parameters cannot support the requested construction.
class InfeasibleGrid : public Error {
public:
    using Error::Error;
};

/// An internal consistency check failed beyond its numerical tolerance.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// The sounding matrix does not have full column rank.
class IdentifiabilityError : public Error {
public:
    IdentifiabilityError(const std::string& what, std::size_t rank, std::size_t unknowns)
        : Error(what), rank_(rank), unknowns_(unknowns) {}

    std::size_t numerical_rank() const noexcept { return rank_; }
    std::size_t unknowns() const noexcept { return unknowns_; }

private:
    std::size_t rank_;
    std::size_t unknowns_;
};

}  // namespace tfcomm
