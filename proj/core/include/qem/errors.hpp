#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qem {

// Base class for every error thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RingMismatch : Error {
    using Error::Error;
};

struct UnknownVariable : Error {
    using Error::Error;
};

// Parse failure; `position` is the byte offset into the input text.
struct SyntaxError : Error {
    std::size_t position;
    SyntaxError(const std::string& what, std::size_t pos)
        : Error(what + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

struct CoefficientError : Error {
    using Error::Error;
};

struct UnsupportedField : Error {
    using Error::Error;
};

struct MissingImage : Error {
    using Error::Error;
};

struct BudgetExceeded : Error {
    using Error::Error;
};

struct ParameterConstraintViolated : Error {
    using Error::Error;
};

struct WitnessFails : Error {
    using Error::Error;
};

// A claimed equivalence witness does not satisfy its defining equation.
struct WitnessInvalid : Error {
    using Error::Error;
};

struct DegreeTooHigh : Error {
    using Error::Error;
};

struct NotAQuadricAmbient : Error {
    using Error::Error;
};

struct NotUnimodular : Error {
    using Error::Error;
};

struct NormalizationFails : Error {
    using Error::Error;
};

struct NotWellDefined : Error {
    using Error::Error;
};

struct DecompositionFailed : Error {
    using Error::Error;
};

struct DerivationFailed : Error {
    using Error::Error;
};

struct IdentityFails : Error {
    using Error::Error;
};

} // namespace qem
