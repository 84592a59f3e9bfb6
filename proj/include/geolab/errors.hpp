#pragma once

#include <stdexcept>
#include <string>

namespace geolab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Precondition violated by the caller (bad modulus, R too small, ...).
struct DomainError : Error {
    using Error::Error;
};

// Input exceeds a desk-scale limit (norm bound, enumeration size).
struct LimitError : Error {
    using Error::Error;
};

// Integer overflow in checked 64-bit arithmetic.
struct OverflowError : Error {
    using Error::Error;
};

// An exact certification step failed (Markov containment, glue lookup, ...).
struct CertificationError : Error {
    using Error::Error;
};

}  // namespace geolab
