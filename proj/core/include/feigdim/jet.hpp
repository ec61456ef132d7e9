#pragma once

#include <array>
#include <cstddef>

namespace feigdim {

/// Truncated Taylor expansion c_0 + c_1 h + ... + c_N h^N about some base
/// point. Used to push exact derivatives through compositions of H, E and G.
template <std::size_t N>
struct Jet {
  std::array<double, N + 1> c{};

  static Jet constant(double v) {
    Jet j;
    j.c[0] = v;
    return j;
  }
  static Jet variable(double x0) {
    Jet j;
    j.c[0] = x0;
    if constexpr (N >= 1) j.c[1] = 1.0;
    return j;
  }

  double value() const { return c[0]; }

  /// The k-th derivative, k! * c_k.
  double derivative(std::size_t k) const {
    double f = 1.0;
    for (std::size_t i = 2; i <= k; ++i) f *= static_cast<double>(i);
    return f * c[k];
  }

  friend Jet operator+(Jet a, const Jet& b) {
    for (std::size_t i = 0; i <= N; ++i) a.c[i] += b.c[i];
    return a;
  }
  friend Jet operator-(Jet a, const Jet& b) {
    for (std::size_t i = 0; i <= N; ++i) a.c[i] -= b.c[i];
    return a;
  }
  friend Jet operator*(double s, Jet a) {
    for (auto& v : a.c) v *= s;
    return a;
  }
  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (std::size_t i = 0; i <= N; ++i)
      for (std::size_t j = 0; i + j <= N; ++j) r.c[i + j] += a.c[i] * b.c[j];
    return r;
  }
};

template <std::size_t N>
Jet<N> pow(Jet<N> base, unsigned exponent) {
  Jet<N> result = Jet<N>::constant(1.0);
  while (exponent > 0) {
    if (exponent & 1u) result = result * base;
    base = base * base;
    exponent >>= 1u;
  }
  return result;
}

/// outer holds the Taylor coefficients of f at inner.value(); returns the jet of f(inner).
template <std::size_t N>
Jet<N> compose(const Jet<N>& outer, const Jet<N>& inner) {
  Jet<N> h = inner;
  h.c[0] = 0.0;
  Jet<N> result = Jet<N>::constant(outer.c[0]);
  Jet<N> hp = Jet<N>::constant(1.0);
  for (std::size_t k = 1; k <= N; ++k) {
    hp = hp * h;
    result = result + outer.c[k] * hp;
  }
  return result;
}

}  // namespace feigdim
