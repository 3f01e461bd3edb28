#pragma once

#include <stdexcept>
#include <string>

namespace fibspec {

enum class ErrorKind {
    InvalidArgument,
    Overflow,
    InsufficientDepth,
    WindowTooShort,
    Precondition,
    NumericalDivergence,
    RootIsolation,
    InsufficientScales,
    DegenerateFit,
    EmptySet,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::Overflow: return "overflow";
    case ErrorKind::InsufficientDepth: return "insufficient depth";
    case ErrorKind::WindowTooShort: return "window too short";
    case ErrorKind::Precondition: return "precondition violated";
    case ErrorKind::NumericalDivergence: return "diverged numerically";
    case ErrorKind::RootIsolation: return "root isolation failure";
    case ErrorKind::InsufficientScales: return "insufficient scale span";
    case ErrorKind::DegenerateFit: return "degenerate fit";
    case ErrorKind::EmptySet: return "empty set";
    }
    return "unknown";
}

/// Exception carrying a machine-checkable kind. The CLI maps kinds onto exit
/// codes: numerical kinds exit 3, everything else exits 2.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    bool numerical() const noexcept {
        return kind_ == ErrorKind::NumericalDivergence || kind_ == ErrorKind::RootIsolation ||
               kind_ == ErrorKind::DegenerateFit;
    }

private:
    ErrorKind kind_;
};

namespace detail {
inline void require(bool cond, ErrorKind kind, const std::string& msg) {
    if (!cond) throw Error(kind, msg);
}
} // namespace detail

} // namespace fibspec
