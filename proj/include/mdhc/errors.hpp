#pragma once

#include <stdexcept>
#include <string>

namespace mdhc {

/// Base for all library errors. `category()` is a stable machine-parsable tag.
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& what)
        : std::runtime_error(what), category_(std::move(category)) {}
    const std::string& category() const noexcept { return category_; }

private:
    std::string category_;
};

/// Rejected input (dimension mismatch, out-of-range argument).
class InvalidArgumentError : public Error {
public:
    explicit InvalidArgumentError(const std::string& what) : Error("invalid_argument", what) {}
};

class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& what) : Error("dimension_mismatch", what) {}
};

/// Inadmissible configuration (schedule exponents, bad mixture spec).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("config", what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("io", what) {}
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error("parse", what) {}
};

} // namespace mdhc
