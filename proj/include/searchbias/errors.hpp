#pragma once

#include <stdexcept>
#include <string>

namespace searchbias {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Vector lengths disagree with the declared search-space size.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// A probability entry is more negative than the clamping tolerance allows.
class NegativeMass : public Error {
public:
    using Error::Error;
};

/// A probability vector does not sum to one within tolerance.
class NotNormalized : public Error {
public:
    using Error::Error;
};

/// An enumeration would exceed the configured cap.
class TooLarge : public Error {
public:
    using Error::Error;
};

/// A resource id has no strategy in the supplied map.
class MissingStrategy : public Error {
public:
    using Error::Error;
};

/// Unknown algorithm name or out-of-range algorithm parameter.
class InvalidAlgorithmSpec : public Error {
public:
    using Error::Error;
};

/// An operation requiring a non-empty sample received none.
class EmptySample : public Error {
public:
    using Error::Error;
};

/// A numeric argument is outside its documented domain.
class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// Verification-harness configuration is unusable.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A resource-set file violates the expected schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

}  // namespace searchbias
