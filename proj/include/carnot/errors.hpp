#pragma once

#include <stdexcept>
#include <string>

namespace carnot {

enum class ErrorKind {
    NotSkew,
    DependentSpan,
    BadDimensions,
    DimensionMismatch,
    TruncationTooSmall,
    ConsistencyFailure,
    NoConvergence,
    ZeroTarget,
    GridTooCoarse,
    NotAMultiplier,
    RankMismatch,
    NonGenericTarget,
    NotNested,
    GuardViolated,
    NotCommuting,
    Precondition,
    Parse,
};

const char* error_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind k, const std::string& what)
        : std::runtime_error(std::string(error_name(k)) + ": " + what), kind_(k) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

// numerical failures map to exit code 3 in the CLI, everything else to 2
inline bool is_numerical(ErrorKind k) {
    return k == ErrorKind::NoConvergence || k == ErrorKind::ConsistencyFailure ||
           k == ErrorKind::GridTooCoarse;
}

}  // namespace carnot
