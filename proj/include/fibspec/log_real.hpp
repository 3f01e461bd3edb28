#pragma once

#include <cmath>
#include <limits>

namespace fibspec {

/// Real number stored as sign and log|x|, for trace orbits that leave the
/// double range. Zero is sign 0 with log_abs = -inf.
struct LogReal {
    int sign = 0;
    double log_abs = -std::numeric_limits<double>::infinity();

    static LogReal from(double x) {
        if (x == 0.0) return {};
        return {x > 0 ? 1 : -1, std::log(std::abs(x))};
    }

    double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
    bool is_zero() const { return sign == 0; }

    friend LogReal operator*(LogReal lhs, LogReal rhs) {
        if (lhs.sign == 0 || rhs.sign == 0) return {};
        return {lhs.sign * rhs.sign, lhs.log_abs + rhs.log_abs};
    }

    friend LogReal operator-(LogReal x) { return {-x.sign, x.log_abs}; }

    friend LogReal operator+(LogReal lhs, LogReal rhs) {
        if (lhs.sign == 0) return rhs;
        if (rhs.sign == 0) return lhs;
        if (lhs.log_abs < rhs.log_abs) std::swap(lhs, rhs);
        const double ratio = std::exp(rhs.log_abs - lhs.log_abs);
        const double factor = lhs.sign == rhs.sign ? 1.0 + ratio : 1.0 - ratio;
        if (factor == 0.0) return {};
        return {lhs.sign, lhs.log_abs + std::log(factor)};
    }

    friend LogReal operator-(LogReal lhs, LogReal rhs) { return lhs + (-rhs); }
};

} // namespace fibspec
