#pragma once

#include <stdexcept>
#include <string>

namespace berry {

struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Evaluation outside the region where a truncated representation is valid.
struct OutOfDomain : std::domain_error {
    using std::domain_error::domain_error;
};

// Grid spacing too coarse for the requested energy.
struct ResolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedCase : std::logic_error {
    using std::logic_error::logic_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, long line)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    long line() const noexcept { return line_; }

private:
    long line_;
};

// Config file problems (unknown key, bad value); reported with exit code 2 by the CLI.
class ConfigError : public ParseError {
public:
    using ParseError::ParseError;
};

} // namespace berry
