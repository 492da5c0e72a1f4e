#pragma once

#include <stdexcept>
#include <string>

namespace bodyfat {

// Error taxonomy mirrors the CLI exit codes:
//   2 domain/configuration, 3 data/parse, 4 numerical, 5 I/O.
class error : public std::runtime_error {
public:
    error(const std::string& msg, int exit_code)
        : std::runtime_error(msg), exit_code_(exit_code) {}
    int exit_code() const noexcept { return exit_code_; }

private:
    int exit_code_;
};

// Invalid value fed to an operation (non-positive weight, waist <= neck, ...).
class domain_error : public error {
public:
    explicit domain_error(const std::string& msg) : error(msg, 2) {}
};

// Invalid configuration: bad arity, unknown field name, bad layer dims, ...
class config_error : public error {
public:
    explicit config_error(const std::string& msg) : error(msg, 2) {}
};

// Malformed input data (CSV parse failures, schema mismatches).
class data_error : public error {
public:
    explicit data_error(const std::string& msg) : error(msg, 3) {}
};

class numeric_error : public error {
public:
    explicit numeric_error(const std::string& msg) : error(msg, 4) {}
};

// Rank-deficient design matrix.
class singular_error : public numeric_error {
public:
    explicit singular_error(const std::string& msg) : numeric_error(msg) {}
};

// Training loss blew up or became non-finite.
class divergence_error : public numeric_error {
public:
    explicit divergence_error(const std::string& msg) : numeric_error(msg) {}
};

class io_error : public error {
public:
    explicit io_error(const std::string& msg) : error(msg, 5) {}
};

}  // namespace bodyfat
