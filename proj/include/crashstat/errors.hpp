#pragma once

#include <stdexcept>
#include <string>

namespace crashstat {

/// Unreadable or malformed input: files, schemas, configuration values.
/// The CLI maps this to exit code 1.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Structurally valid input on which the requested analysis cannot run
/// (series too short, infeasible break estimation, empty windows).
/// The CLI maps this to exit code 2.
class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace crashstat
