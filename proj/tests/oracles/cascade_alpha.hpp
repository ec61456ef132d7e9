#pragma once

#include <cmath>
#include <vector>

namespace feigdim::oracle {

// Period-doubling cascade of f_mu(x) = 1 - mu |x|^2. At the superstable parameter
// mu_n the critical point 0 has period 2^n; d_n = f^{2^{n-1}}(0) is the cycle point
// closest to it, and d_n / d_{n+1} -> alpha. Everything here is plain iteration in
// long double; no part of the library is used.
struct CascadeResult {
  std::vector<long double> mu;
  std::vector<long double> alpha;  // successive ratio estimates
  long double alpha_extrapolated = 0;
};

inline long double orbit_after(long double mu, long n, long double* dmu = nullptr) {
  long double x = 0, dx = 0;
  for (long i = 0; i < n; ++i) {
    const long double nx = 1 - mu * x * x;
    dx = -x * x - 2 * mu * x * dx;
    x = nx;
  }
  if (dmu) *dmu = dx;
  return x;
}

inline long double superstable(long double guess, long period) {
  long double mu = guess;
  for (int it = 0; it < 100; ++it) {
    long double d = 0;
    const long double f = orbit_after(mu, period, &d);
    const long double step = f / d;
    mu -= step;
    if (std::fabs(step) < 1e-18L * std::fabs(mu)) break;
  }
  return mu;
}

inline CascadeResult cascade_alpha(int levels = 13) {
  CascadeResult r;
  r.mu = {1.0L, superstable(1.31L, 4)};
  long double delta = 4.67L;
  for (int n = 2; n < levels; ++n) {
    const std::size_t k = r.mu.size();
    const long double guess = r.mu[k - 1] + (r.mu[k - 1] - r.mu[k - 2]) / delta;
    r.mu.push_back(superstable(guess, 1L << (n + 1)));
    const std::size_t m = r.mu.size();
    delta = (r.mu[m - 2] - r.mu[m - 3]) / (r.mu[m - 1] - r.mu[m - 2]);
  }
  std::vector<long double> d;
  for (std::size_t n = 0; n < r.mu.size(); ++n) d.push_back(orbit_after(r.mu[n], 1L << n));
  for (std::size_t n = 0; n + 1 < d.size(); ++n) r.alpha.push_back(d[n] / d[n + 1]);
  // Aitken on the last three ratios.
  const std::size_t a = r.alpha.size();
  const long double x0 = r.alpha[a - 3], x1 = r.alpha[a - 2], x2 = r.alpha[a - 1];
  const long double den = x2 - 2 * x1 + x0;
  r.alpha_extrapolated = den == 0 ? x2 : x2 - (x2 - x1) * (x2 - x1) / den;
  return r;
}

}  // namespace feigdim::oracle
