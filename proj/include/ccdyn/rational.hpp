#pragma once

#include <boost/rational.hpp>

#include <cstdio>
#include <string>

namespace ccdyn {

/// Exact rational number used for all DoF arithmetic.
using Rational = boost::rational<long long>;

/// Ceiling of a/b for a >= 0, b > 0.
inline long long ceil_div(long long a, long long b) {
    return (a + b - 1) / b;
}

inline double to_double(const Rational& r) {
    return boost::rational_cast<double>(r);
}

inline std::string to_fraction_string(const Rational& r) {
    if (r.denominator() == 1)
        return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

/// Decimal rendering with a fixed number of significant digits (CSV output).
inline std::string to_decimal_string(const Rational& r, int sig_digits = 12) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", sig_digits, to_double(r));
    return buf;
}

} // namespace ccdyn
