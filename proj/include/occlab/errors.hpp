#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace occlab {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed references inside a model or policy (unknown state, wrong arity, ...).
class StructuralError : public Error {
public:
    using Error::Error;
};

/// Schema violation while reading JSON. `key_path()` names the offending key.
class ParseError : public Error {
public:
    ParseError(std::string key_path, const std::string& what)
        : Error(key_path + ": " + what), key_path_(std::move(key_path))
    {
    }
    const std::string& key_path() const noexcept { return key_path_; }

private:
    std::string key_path_;
};

/// A state set + allowed actions closed under transitions inside the transient states.
struct EndComponent {
    std::vector<std::size_t> states;
    std::vector<std::vector<std::size_t>> actions;  // parallel to `states`, action indices
};

/// The model lets some policy avoid the absorbing set forever.
class NotAbsorbingError : public Error {
public:
    NotAbsorbingError(const std::string& what, std::vector<EndComponent> witness)
        : Error(what), witness_(std::move(witness))
    {
    }
    const std::vector<EndComponent>& witness() const noexcept { return witness_; }

private:
    std::vector<EndComponent> witness_;
};

/// Input violates a precondition that depends on numbers (residual, sign, simplex).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The requested performance vector / measure is not achievable.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// An enumeration or iteration cap was exceeded.
class CapExceededError : public Error {
public:
    using Error::Error;
};

/// Numerical breakdown (singular system, support escape, divergence).
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace occlab
