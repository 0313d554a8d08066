#pragma once

#include <stdexcept>
#include <string>

namespace lssboost {

/// Broad failure classes; the CLI maps them to exit codes 1, 2 and 3.
enum class ErrorCategory { config = 1, data = 2, numerical = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}
    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorCategory::data, what) {}
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ErrorCategory::numerical, what) {}
};

class InvalidGridError : public DataError {
public:
    explicit InvalidGridError(const std::string& what) : DataError("invalid grid: " + what) {}
};

class DimensionError : public DataError {
public:
    explicit DimensionError(const std::string& what) : DataError("dimension error: " + what) {}
};

class IncompatibleGridError : public DataError {
public:
    explicit IncompatibleGridError(const std::string& what)
        : DataError("incompatible grid: " + what) {}
};

class DegenerateResponseError : public DataError {
public:
    explicit DegenerateResponseError(const std::string& what)
        : DataError("degenerate response: " + what) {}
};

class ZeroBasisError : public DataError {
public:
    explicit ZeroBasisError(const std::string& what) : DataError("zero basis: " + what) {}
};

class InfeasibleDfError : public ConfigError {
public:
    InfeasibleDfError(const std::string& what, double lo, double hi)
        : ConfigError("infeasible df: " + what + " (attainable range [" + std::to_string(lo) +
                      ", " + std::to_string(hi) + "])"),
          lower_(lo), upper_(hi) {}
    double lower() const noexcept { return lower_; }
    double upper() const noexcept { return upper_; }

private:
    double lower_;
    double upper_;
};

class UnknownLabelError : public ConfigError {
public:
    explicit UnknownLabelError(const std::string& label)
        : ConfigError("unknown block label: " + label) {}
};

class RankDeficiencyError : public NumericalError {
public:
    explicit RankDeficiencyError(const std::string& block)
        : NumericalError("rank deficient system in block '" + block + "'"), block_(block) {}
    const std::string& block() const noexcept { return block_; }

private:
    std::string block_;
};

class EvaluationError : public NumericalError {
public:
    explicit EvaluationError(const std::string& what)
        : NumericalError("evaluation error: " + what) {}
};

class OverflowError : public NumericalError {
public:
    OverflowError(const std::string& what, long index)
        : NumericalError("overflow at index " + std::to_string(index) + ": " + what),
          index_(index) {}
    long index() const noexcept { return index_; }

private:
    long index_;
};

}  // namespace lssboost
