#pragma once

#include <stdexcept>
#include <string>

namespace theta {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or out-of-contract input (dimension mismatch, asymmetric matrix, bad parameter).
class ValidationError : public Error {
public:
    using Error::Error;
};

// The instance lies outside every regime the requested computation supports.
class RegimeError : public Error {
public:
    using Error::Error;
};

// An iterative routine hit its iteration or evaluation cap.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

// A brute-force routine would exceed its configured size cap.
class CapError : public Error {
public:
    using Error::Error;
};

// Should-not-happen numerical condition (e.g. a product factor that must be positive is not).
class InternalError : public Error {
public:
    using Error::Error;
};

} // namespace theta
