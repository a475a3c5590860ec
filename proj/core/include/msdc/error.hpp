#pragma once

#include <stdexcept>
#include <string>

namespace msdc {

enum class ErrorKind {
    config,       // bad parameters or uncalibrated state
    dimension,    // shape / size incompatibility
    calibration,  // least-squares fits that cannot be solved
    integrity,    // corrupt or truncated files
    io,           // filesystem failures
    numerical,    // non-finite values escaping a computation
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& what) : Error(ErrorKind::dimension, what) {}
};

class CalibrationError : public Error {
public:
    explicit CalibrationError(const std::string& what) : Error(ErrorKind::calibration, what) {}
};

class IntegrityError : public Error {
public:
    explicit IntegrityError(const std::string& what) : Error(ErrorKind::integrity, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

/// Process exit code used by the command-line tool for each error kind:
/// 2 usage/config, 3 data/integrity, 4 numerical failure.
int exit_code_for(ErrorKind kind) noexcept;

}  // namespace msdc
