#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace corrattack {

// Shape mismatches, out-of-range indices and similar caller errors surface as
// std::invalid_argument. The types below cover the remaining failure classes.

class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CannotSplit : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NoCandidates : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised by an oracle when the installed query budget is spent. Carries the
/// number of queries that were answered before the refusal.
class BudgetExhausted : public std::runtime_error {
public:
    explicit BudgetExhausted(std::size_t used)
        : std::runtime_error("query budget exhausted after " + std::to_string(used) + " queries"),
          used_(used) {}

    std::size_t queries_used() const noexcept { return used_; }

private:
    std::size_t used_;
};

class OracleUnavailable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

class DatasetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace corrattack
