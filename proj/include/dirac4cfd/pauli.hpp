#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

namespace dirac4cfd {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

/// Two-component wave function value at one node.
struct Spinor {
  Complex c1{};
  Complex c2{};

  Spinor& operator+=(const Spinor& o) {
    c1 += o.c1;
    c2 += o.c2;
    return *this;
  }
  Spinor& operator-=(const Spinor& o) {
    c1 -= o.c1;
    c2 -= o.c2;
    return *this;
  }
  Spinor& operator*=(Complex s) {
    c1 *= s;
    c2 *= s;
    return *this;
  }

  friend Spinor operator+(Spinor a, const Spinor& b) { return a += b; }
  friend Spinor operator-(Spinor a, const Spinor& b) { return a -= b; }
  friend Spinor operator*(Complex s, Spinor a) { return a *= s; }
  friend Spinor operator*(Spinor a, Complex s) { return a *= s; }
  friend bool operator==(const Spinor&, const Spinor&) = default;
};

// Spinor arrays are handed to FFTW as interleaved complex pairs.
static_assert(sizeof(Spinor) == 2 * sizeof(Complex));

inline double norm2(const Spinor& s) { return std::norm(s.c1) + std::norm(s.c2); }

/// a^* b
inline Complex inner(const Spinor& a, const Spinor& b) {
  return std::conj(a.c1) * b.c1 + std::conj(a.c2) * b.c2;
}

inline bool is_finite(const Spinor& s) {
  return std::isfinite(s.c1.real()) && std::isfinite(s.c1.imag()) &&
         std::isfinite(s.c2.real()) && std::isfinite(s.c2.imag());
}

/// Dense 2x2 complex matrix [[a, b], [c, d]].
struct Mat2 {
  Complex a{}, b{}, c{}, d{};

  constexpr Mat2() = default;
  constexpr Mat2(Complex a_, Complex b_, Complex c_, Complex d_) : a(a_), b(b_), c(c_), d(d_) {}

  Complex det() const { return a * d - b * c; }

  Mat2 inverse() const {
    const Complex inv = 1.0 / det();
    return {d * inv, -b * inv, -c * inv, a * inv};
  }

  Mat2 adjoint() const { return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)}; }

  Mat2& operator+=(const Mat2& o) {
    a += o.a;
    b += o.b;
    c += o.c;
    d += o.d;
    return *this;
  }
  Mat2& operator-=(const Mat2& o) {
    a -= o.a;
    b -= o.b;
    c -= o.c;
    d -= o.d;
    return *this;
  }
  Mat2& operator*=(Complex s) {
    a *= s;
    b *= s;
    c *= s;
    d *= s;
    return *this;
  }

  friend Mat2 operator+(Mat2 x, const Mat2& y) { return x += y; }
  friend Mat2 operator-(Mat2 x, const Mat2& y) { return x -= y; }
  friend Mat2 operator*(Complex s, Mat2 x) { return x *= s; }
  friend Mat2 operator*(Mat2 x, Complex s) { return x *= s; }

  friend Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
            x.c * y.b + x.d * y.d};
  }

  friend Spinor operator*(const Mat2& m, const Spinor& s) {
    return {m.a * s.c1 + m.b * s.c2, m.c * s.c1 + m.d * s.c2};
  }

  friend bool operator==(const Mat2&, const Mat2&) = default;
};

/// Largest entry modulus.
inline double max_abs(const Mat2& m) {
  return std::max({std::abs(m.a), std::abs(m.b), std::abs(m.c), std::abs(m.d)});
}

namespace pauli {

inline constexpr Mat2 identity{1.0, 0.0, 0.0, 1.0};
inline constexpr Mat2 sigma1{0.0, 1.0, 1.0, 0.0};
inline constexpr Mat2 sigma2{0.0, Complex{0.0, -1.0}, Complex{0.0, 1.0}, 0.0};
inline constexpr Mat2 sigma3{1.0, 0.0, 0.0, -1.0};

/// alpha I + beta sigma1 + gamma sigma2 + delta sigma3.
inline Mat2 combine(Complex alpha, Complex beta, Complex gamma, Complex delta) {
  return {alpha + delta, beta - kI * gamma, beta + kI * gamma, alpha - delta};
}

inline Spinor apply(Complex alpha, Complex beta, Complex gamma, Complex delta, const Spinor& s) {
  return combine(alpha, beta, gamma, delta) * s;
}

inline Spinor apply_sigma1(const Spinor& s) { return {s.c2, s.c1}; }
inline Spinor apply_sigma2(const Spinor& s) { return {-kI * s.c2, kI * s.c1}; }
inline Spinor apply_sigma3(const Spinor& s) { return {s.c1, -s.c2}; }

}  // namespace pauli

}  // namespace dirac4cfd
