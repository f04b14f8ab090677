#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace driftpp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Vector lengths or requested column counts do not agree.
class DimensionError : public Error {
public:
    using Error::Error;
};

class EmptyTrainingSet : public Error {
public:
    EmptyTrainingSet() : Error("training set is empty") {}
};

class EmptyWindow : public Error {
public:
    EmptyWindow() : Error("window is empty") {}
};

class EmptyEnsemble : public Error {
public:
    EmptyEnsemble() : Error("ensemble has no hypotheses") {}
};

/// A Learn++ round could not find a weak hypothesis below the error threshold.
class RoundFailed : public Error {
public:
    using Error::Error;
};

class PretrainFailed : public Error {
public:
    using Error::Error;
};

/// Zero total variance, or too few rows to estimate a covariance.
class DegenerateData : public Error {
public:
    using Error::Error;
};

class UndefinedAUC : public Error {
public:
    UndefinedAUC() : Error("AUC is undefined when only one class is present") {}
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed CSV or JSON-lines input. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line) : Error(what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class LabelError : public ParseError {
public:
    using ParseError::ParseError;
};

class RaggedRow : public ParseError {
public:
    using ParseError::ParseError;
};

} // namespace driftpp
