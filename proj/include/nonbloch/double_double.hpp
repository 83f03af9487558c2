#pragma once

// Unevaluated-sum ("double-double") arithmetic, roughly 106 bits of mantissa.
// Only the operations needed by the propagator are provided.

#include <cmath>

namespace nonbloch {

struct DoubleDouble {
    double hi = 0.0;
    double lo = 0.0;

    constexpr DoubleDouble() = default;
    constexpr DoubleDouble(double h) : hi(h), lo(0.0) {}  // NOLINT(google-explicit-constructor)
    constexpr DoubleDouble(double h, double l) : hi(h), lo(l) {}

    explicit operator double() const { return hi + lo; }
};

namespace dd_detail {

inline DoubleDouble quick_two_sum(double a, double b) {
    const double s = a + b;
    return {s, b - (s - a)};
}

inline DoubleDouble two_sum(double a, double b) {
    const double s = a + b;
    const double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

inline DoubleDouble two_prod(double a, double b) {
    const double p = a * b;
#if defined(__FMA__) || defined(FP_FAST_FMA)
    return {p, std::fma(a, b, -p)};
#else
    // Dekker split
    constexpr double split = 134217729.0;  // 2^27 + 1
    double t = split * a;
    const double ahi = t - (t - a);
    const double alo = a - ahi;
    t = split * b;
    const double bhi = t - (t - b);
    const double blo = b - bhi;
    return {p, ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo};
#endif
}

}  // namespace dd_detail

inline DoubleDouble operator+(DoubleDouble a, DoubleDouble b) {
    DoubleDouble s = dd_detail::two_sum(a.hi, b.hi);
    const DoubleDouble t = dd_detail::two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = dd_detail::quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return dd_detail::quick_two_sum(s.hi, s.lo);
}

inline DoubleDouble operator-(DoubleDouble a) { return {-a.hi, -a.lo}; }
inline DoubleDouble operator-(DoubleDouble a, DoubleDouble b) { return a + (-b); }

inline DoubleDouble operator*(DoubleDouble a, DoubleDouble b) {
    DoubleDouble p = dd_detail::two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return dd_detail::quick_two_sum(p.hi, p.lo);
}

inline DoubleDouble operator*(DoubleDouble a, double b) {
    DoubleDouble p = dd_detail::two_prod(a.hi, b);
    p.lo += a.lo * b;
    return dd_detail::quick_two_sum(p.hi, p.lo);
}

inline DoubleDouble& operator+=(DoubleDouble& a, DoubleDouble b) { return a = a + b; }
inline DoubleDouble& operator-=(DoubleDouble& a, DoubleDouble b) { return a = a - b; }
inline DoubleDouble& operator*=(DoubleDouble& a, DoubleDouble b) { return a = a * b; }

/// Division, only used for rescaling by a power of two or a plain double.
inline DoubleDouble operator/(DoubleDouble a, double b) {
    const double q1 = a.hi / b;
    DoubleDouble r = a - dd_detail::two_prod(q1, b);
    const double q2 = r.hi / b;
    r = r - dd_detail::two_prod(q2, b);
    const double q3 = r.hi / b;
    return DoubleDouble(q1) + DoubleDouble(q2) + DoubleDouble(q3);
}

inline double to_double(DoubleDouble a) { return a.hi + a.lo; }
inline double to_double(double a) { return a; }

}  // namespace nonbloch
