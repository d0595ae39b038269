#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

// Double-double arithmetic: an unevaluated sum hi + lo of two IEEE doubles
// carrying ~31 significant decimal digits.  Used by the Nystrom spectrum
// pipeline, where eigenvalues spanning 16+ orders of magnitude must be
// resolved to relative accuracy that plain double cannot represent.
//
// Algorithms are the classical error-free transformations (Dekker, Knuth);
// products are split with Veltkamp's constant so no fma is required.

namespace contstab {

struct DD {
    double hi = 0.0;
    double lo = 0.0;

    constexpr DD() = default;
    constexpr DD(double h) : hi(h), lo(0.0) {}
    constexpr DD(double h, double l) : hi(h), lo(l) {}

    explicit operator double() const { return hi; }
};

namespace detail {

inline void two_sum(double a, double b, double& s, double& e) {
    s = a + b;
    double bb = s - a;
    e = (a - (s - bb)) + (b - bb);
}

// requires |a| >= |b| or a == 0
inline void quick_two_sum(double a, double b, double& s, double& e) {
    s = a + b;
    e = b - (s - a);
}

inline void split(double a, double& hi, double& lo) {
    constexpr double splitter = 134217729.0; // 2^27 + 1
    double t = splitter * a;
    hi = t - (t - a);
    lo = a - hi;
}

inline void two_prod(double a, double b, double& p, double& e) {
    p = a * b;
    double ahi, alo, bhi, blo;
    split(a, ahi, alo);
    split(b, bhi, blo);
    e = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo;
}

} // namespace detail

inline DD operator+(DD a, DD b) {
    double s1, e1, s2, e2;
    detail::two_sum(a.hi, b.hi, s1, e1);
    detail::two_sum(a.lo, b.lo, s2, e2);
    e1 += s2;
    detail::quick_two_sum(s1, e1, s1, e1);
    e1 += e2;
    detail::quick_two_sum(s1, e1, s1, e1);
    return {s1, e1};
}

inline DD operator-(DD a) { return {-a.hi, -a.lo}; }
inline DD operator-(DD a, DD b) { return a + (-b); }

inline DD operator*(DD a, DD b) {
    double p, e;
    detail::two_prod(a.hi, b.hi, p, e);
    e += a.hi * b.lo + a.lo * b.hi;
    detail::quick_two_sum(p, e, p, e);
    return {p, e};
}

inline DD operator/(DD a, DD b) {
    double q1 = a.hi / b.hi;
    DD r = a - b * DD(q1);
    double q2 = r.hi / b.hi;
    r = r - b * DD(q2);
    double q3 = r.hi / b.hi;
    double s, e;
    detail::quick_two_sum(q1, q2, s, e);
    DD q(s, e);
    return q + DD(q3);
}

inline DD& operator+=(DD& a, DD b) { a = a + b; return a; }
inline DD& operator-=(DD& a, DD b) { a = a - b; return a; }
inline DD& operator*=(DD& a, DD b) { a = a * b; return a; }
inline DD& operator/=(DD& a, DD b) { a = a / b; return a; }

inline DD operator+(DD a, double b) { return a + DD(b); }
inline DD operator+(double a, DD b) { return DD(a) + b; }
inline DD operator-(DD a, double b) { return a - DD(b); }
inline DD operator-(double a, DD b) { return DD(a) - b; }
inline DD operator*(DD a, double b) { return a * DD(b); }
inline DD operator*(double a, DD b) { return DD(a) * b; }
inline DD operator/(DD a, double b) { return a / DD(b); }
inline DD operator/(double a, DD b) { return DD(a) / b; }

inline bool operator==(DD a, DD b) { return a.hi == b.hi && a.lo == b.lo; }
inline bool operator!=(DD a, DD b) { return !(a == b); }
inline bool operator<(DD a, DD b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
inline bool operator>(DD a, DD b) { return b < a; }
inline bool operator<=(DD a, DD b) { return !(b < a); }
inline bool operator>=(DD a, DD b) { return !(a < b); }

inline DD fabs(DD a) { return (a.hi < 0.0 || (a.hi == 0.0 && a.lo < 0.0)) ? -a : a; }
inline DD abs(DD a) { return fabs(a); }

inline DD sqrt(DD a) {
    if (a.hi == 0.0 && a.lo == 0.0) return DD(0.0);
    // Karp's high-precision square root: one Newton step on 1/sqrt in double.
    double x = 1.0 / std::sqrt(a.hi);
    double ax = a.hi * x;
    DD err = a - DD(ax) * DD(ax);
    double d = err.hi * (x * 0.5);
    double s, e;
    detail::quick_two_sum(ax, d, s, e);
    return {s, e};
}

inline double to_double(DD a) { return a.hi; }

// pi and 2*pi with the double-double correction term.
inline constexpr DD dd_pi{3.141592653589793116, 1.224646799147353207e-16};
inline constexpr DD dd_two_pi{6.283185307179586232, 2.449293598294706414e-16};

// sin/cos for theta in [0, 2*pi), via reduction to [-pi/4, pi/4] and Taylor
// series.  Quadrature nodes must be placed to dd accuracy, otherwise node
// placement error alone perturbs the Nystrom eigenvalues at the 1e-17 level.
void dd_sincos(DD theta, DD& s, DD& c);

// Machine epsilon of the format (2^-104); used as the eigensolver's
// convergence threshold when instantiated with DD.
inline constexpr double dd_epsilon = 4.93038065763132e-32;

template <typename R> struct real_traits;
template <> struct real_traits<double> {
    static double eps() { return std::numeric_limits<double>::epsilon(); }
    static double from_double(double x) { return x; }
    static double value(double x) { return x; }
};
template <> struct real_traits<DD> {
    static double eps() { return dd_epsilon; }
    static DD from_double(double x) { return DD(x); }
    static double value(DD x) { return x.hi; }
};

// Minimal complex type over a generic real scalar.  std::complex is only
// specified for built-in floating types, so the dd pipeline uses this.
template <typename R>
struct Cx {
    R re{};
    R im{};

    Cx() = default;
    Cx(R r) : re(r), im(R(0.0)) {}
    Cx(R r, R i) : re(r), im(i) {}
};

template <typename R> Cx<R> operator+(Cx<R> a, Cx<R> b) { return {a.re + b.re, a.im + b.im}; }
template <typename R> Cx<R> operator-(Cx<R> a, Cx<R> b) { return {a.re - b.re, a.im - b.im}; }
template <typename R> Cx<R> operator-(Cx<R> a) { return {-a.re, -a.im}; }
template <typename R> Cx<R> operator*(Cx<R> a, Cx<R> b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
template <typename R> Cx<R> operator*(R a, Cx<R> b) { return {a * b.re, a * b.im}; }
template <typename R> Cx<R> operator*(Cx<R> a, R b) { return {a.re * b, a.im * b}; }
template <typename R> Cx<R> conj(Cx<R> a) { return {a.re, -a.im}; }
template <typename R> R norm_sq(Cx<R> a) { return a.re * a.re + a.im * a.im; }
template <typename R> R abs(Cx<R> a) { using std::sqrt; return sqrt(norm_sq(a)); }
template <typename R> Cx<R> operator/(Cx<R> a, Cx<R> b) {
    R d = norm_sq(b);
    Cx<R> n = a * conj(b);
    return {n.re / d, n.im / d};
}
template <typename R> Cx<R> operator/(Cx<R> a, R b) { return {a.re / b, a.im / b}; }

} // namespace contstab
