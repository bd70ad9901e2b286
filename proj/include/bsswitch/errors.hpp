#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace bsswitch {

// Caller broke a documented precondition (wrong action length, empty state...).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Bad user input: scenario files, CLI values. `path` names the offending field.
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string path, const std::string& what)
        : std::runtime_error(path.empty() ? what : path + ": " + what), path_(std::move(path)), message_(what)
    {
    }

    const std::string& path() const { return path_; }
    // The message without the path prefix.
    const std::string& message() const { return message_; }

private:
    std::string path_;
    std::string message_;
};

}  // namespace bsswitch
