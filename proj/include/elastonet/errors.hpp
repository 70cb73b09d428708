#pragma once

#include <stdexcept>
#include <string>

namespace elastonet {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class ZeroRestLength : public Error {
public:
    using Error::Error;
};

/// Thrown when an evaluation frequency is too close to a resonance.
class ResonanceProximity : public Error {
public:
    ResonanceProximity(const std::string& msg, double offending_omega_sq)
        : Error(msg), omega_sq(offending_omega_sq) {}
    double omega_sq;
};

class RankDeficient : public Error {
public:
    using Error::Error;
};

class DegenerateTarget : public Error {
public:
    using Error::Error;
};

class GadgetVerificationFailed : public Error {
public:
    using Error::Error;
};

class RetryExhausted : public Error {
public:
    using Error::Error;
};

class NoBalancingPoint : public Error {
public:
    using Error::Error;
};

class ValidationFailed : public Error {
public:
    using Error::Error;
};

class NegativeStiffness : public Error {
public:
    using Error::Error;
};

class UnfixableFloppy : public Error {
public:
    using Error::Error;
};

class NotSupported : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace elastonet
