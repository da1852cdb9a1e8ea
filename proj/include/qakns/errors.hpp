#pragma once

#include <stdexcept>
#include <string>

namespace qakns {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Operands carry different truncation orders or dimensions.
class TruncationMismatch : public Error {
public:
    using Error::Error;
};

// a_j q^m = a_i makes an order-by-order solve singular.
class ResonanceError : public Error {
public:
    using Error::Error;
};

// (D - 1) had to be inverted on a nonzero constant term.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

// A requested coefficient lies beyond what the inputs determine.
class DepthError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace qakns
