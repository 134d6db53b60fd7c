#pragma once

#include <stdexcept>
#include <string>

namespace qfa {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// exit code 3 at the CLI
class DataError : public Error {
public:
    using Error::Error;
};

class SchemaError : public DataError {
public:
    using DataError::DataError;
};

class KeyingError : public DataError {
public:
    using DataError::DataError;
};

class DomainError : public DataError {
public:
    DomainError(const std::string& what, std::size_t index)
        : DataError(what), index_(index) {}
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

// exit code 4 at the CLI
class NumericError : public Error {
public:
    using Error::Error;
};

class InvalidParameter : public NumericError {
public:
    using NumericError::NumericError;
};

class InvalidRegime : public NumericError {
public:
    using NumericError::NumericError;
};

class SimulationDiverged : public NumericError {
public:
    SimulationDiverged(const std::string& what, std::size_t interval)
        : NumericError(what), interval_(interval) {}
    std::size_t interval() const { return interval_; }

private:
    std::size_t interval_;
};

class StuckChain : public NumericError {
public:
    using NumericError::NumericError;
};

// exit code 2 at the CLI
class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace qfa
