#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>

namespace concfn {

// Exact rational arithmetic. All probability weights and measure masses in
// this library are mpq_class values; positions of atoms are exact as well
// (every finite double is a dyadic rational, so conversion is lossless).
using Rational = mpq_class;

// Parses "p/q", "p", or "-p/q". Rejects empty strings, zero denominators
// and garbage. Does not accept decimal notation; JSON numbers are converted
// through rational_from_double instead.
inline Rational rational_from_string(std::string_view s) {
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    mpq_class q;
    if (q.set_str(std::string(s), 10) != 0)
        throw std::invalid_argument("bad rational literal: " + std::string(s));
    if (q.get_den() == 0)
        throw std::invalid_argument("zero denominator in rational literal: " + std::string(s));
    q.canonicalize();
    return q;
}

// Exact conversion; never rounds.
inline Rational rational_from_double(double x) {
    return mpq_class(x);
}

inline std::string rational_to_string(const Rational& q) {
    return q.get_str();
}

inline double to_double(const Rational& q) {
    return q.get_d();
}

// Largest integer strictly less than x; differs from the standard floor at
// integers (e.g. 2 maps to 1).
inline long strict_floor_rational(const Rational& x) {
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
    if (Rational(fl) == x) fl -= 1;
    return fl.get_si();
}

// True when the rational is exactly representable as a double, i.e. the
// round trip through mpq_class(double) is lossless.
inline bool fits_double(const Rational& q) {
    double d = q.get_d();
    return mpq_class(d) == q;
}

}  // namespace concfn
