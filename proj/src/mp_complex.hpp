#pragma once

// Minimal complex type over an arbitrary real scalar, enough for the
// shifted-QR eigensolver and banded solves.  Division uses Smith's
// algorithm; abs is overflow-safe.

#include <cmath>
#include <complex>

namespace heun::detail {

template <class R>
struct Cx {
  R re{}, im{};

  Cx() = default;
  Cx(R r) : re(std::move(r)) {}
  Cx(R r, R i) : re(std::move(r)), im(std::move(i)) {}

  Cx& operator+=(const Cx& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Cx& operator-=(const Cx& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
};

template <class R>
Cx<R> operator+(const Cx<R>& a, const Cx<R>& b) {
  return {a.re + b.re, a.im + b.im};
}
template <class R>
Cx<R> operator-(const Cx<R>& a, const Cx<R>& b) {
  return {a.re - b.re, a.im - b.im};
}
template <class R>
Cx<R> operator-(const Cx<R>& a) {
  return {-a.re, -a.im};
}
template <class R>
Cx<R> operator*(const Cx<R>& a, const Cx<R>& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
template <class R>
Cx<R> operator*(const R& s, const Cx<R>& a) {
  return {s * a.re, s * a.im};
}
template <class R>
Cx<R> conj(const Cx<R>& a) {
  return {a.re, -a.im};
}
template <class R>
R abs2(const Cx<R>& a) {
  return a.re * a.re + a.im * a.im;
}

using std::abs;
using std::sqrt;

template <class R>
R abs(const Cx<R>& a) {
  const R ar = abs(a.re), ai = abs(a.im);
  if (ar == R(0)) return ai;
  if (ai == R(0)) return ar;
  if (ar >= ai) {
    const R q = ai / ar;
    return ar * sqrt(R(1) + q * q);
  }
  const R q = ar / ai;
  return ai * sqrt(R(1) + q * q);
}

template <class R>
Cx<R> operator/(const Cx<R>& a, const Cx<R>& b) {
  // Smith's algorithm
  if (abs(b.re) >= abs(b.im)) {
    const R r = b.im / b.re;
    const R d = b.re + b.im * r;
    return {(a.re + a.im * r) / d, (a.im - a.re * r) / d};
  }
  const R r = b.re / b.im;
  const R d = b.re * r + b.im;
  return {(a.re * r + a.im) / d, (a.im * r - a.re) / d};
}
template <class R>
Cx<R> operator/(const Cx<R>& a, const R& s) {
  return {a.re / s, a.im / s};
}

template <class R>
Cx<R> sqrt(const Cx<R>& a) {
  // principal branch via half-magnitude identities
  const R m = abs(a);
  if (m == R(0)) return {R(0), R(0)};
  if (a.re >= R(0)) {
    const R t = sqrt((m + a.re) / R(2));
    return {t, a.im / (R(2) * t)};
  }
  const R t = sqrt((m - a.re) / R(2));
  if (a.im >= R(0)) return {a.im / (R(2) * t), t};
  return {-a.im / (R(2) * t), -t};
}

template <class R>
std::complex<double> to_std(const Cx<R>& a) {
  return {static_cast<double>(a.re), static_cast<double>(a.im)};
}

template <class R>
Cx<R> from_std(const std::complex<double>& a) {
  return {R(a.real()), R(a.imag())};
}

}  // namespace heun::detail
