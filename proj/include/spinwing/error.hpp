#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace spinwing {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed config text, unknown/missing key, or a bad unit suffix.
class ConfigError : public Error {
public:
    ConfigError(std::string key_path, const std::string& message)
        : Error(key_path.empty() ? message : key_path + ": " + message),
          key_path_(std::move(key_path)) {}

    [[nodiscard]] const std::string& key_path() const { return key_path_; }

private:
    std::string key_path_;
};

struct Violation {
    std::string field;
    std::string reason;

    bool operator==(const Violation&) const = default;
};

class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Violation> violations);

    [[nodiscard]] const std::vector<Violation>& violations() const { return violations_; }

private:
    std::vector<Violation> violations_;
};

/// Argument outside the domain where a model is defined.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A search or calibration target that cannot be met.
class InfeasibleError : public Error {
public:
    InfeasibleError(const std::string& message, double best_achievable)
        : Error(message), best_achievable_(best_achievable) {}

    [[nodiscard]] double best_achievable() const { return best_achievable_; }

private:
    double best_achievable_;
};

}  // namespace spinwing
