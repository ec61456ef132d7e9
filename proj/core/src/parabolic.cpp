#include "feigdim/parabolic.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "feigdim/error.hpp"

namespace feigdim {

PoincareDiagnostics dominance_table(std::span<const UnimodalSystem> systems) {
  if (systems.size() < 2) throw Error(ErrorCode::DomainError, "dominance table needs >= 2 systems");
  PoincareDiagnostics out;
  for (std::size_t i = 0; i < systems.size(); ++i) {
    const UnimodalSystem& s = systems[i];
    if (i > 0 && (s.ell() <= systems[i - 1].ell() || s.p() != systems[i - 1].p() ||
                  s.combinatorics().orientation != systems[i - 1].combinatorics().orientation)) {
      throw Error(ErrorCode::DomainError, "systems must share combinatorics and ascend in ell");
    }
    const TaylorData td = s.taylor_at_fixed_point();
    DominanceRow r;
    r.ell = s.ell();
    r.lambda = td.lambda;
    r.b = td.b;
    r.a = td.a;
    r.N = s.nonsymmetry();
    r.dominance_ratio = std::abs(td.b) / std::abs(td.lambda - 1.0);
    r.sigma = 1.0 / (td.lambda * td.lambda);
    r.d = td.a > 0 ? std::sqrt(td.lambda * td.lambda * td.lambda / (2.0 * td.a))
                   : std::numeric_limits<double>::quiet_NaN();
    const double predicted = r.N * td.lambda * (1.0 - td.lambda);
    r.identity_rel_error = std::abs(std::abs(2.0 * td.b) - predicted) / std::abs(predicted);
    out.max_ratio = std::max(out.max_ratio, r.dominance_ratio);
    out.max_N = std::max(out.max_N, r.N);
    out.rows.push_back(r);
  }
  return out;
}

void PoincareDiagnostics::write_csv(std::ostream& out) const {
  out << "ell,lambda,b,a,N,dominance_ratio\n";
  char buf[256];
  for (const DominanceRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%.12g,%.12g,%.12g\n", r.ell, r.lambda, r.b, r.a,
                  r.N, r.dominance_ratio);
    out << buf;
  }
}

QuadraticNormalization quadratic_normalization(double lambda, double b, double a) {
  if (std::abs(lambda - 1.0) < 1e-12 || lambda == 0.0) {
    throw Error(ErrorCode::LambdaDegenerate, "quadratic normalization needs lambda != 0, 1");
  }
  QuadraticNormalization out;
  out.B = b / (lambda * (lambda - 1.0));
  const double B = out.B;
  Jet<3> f, h, hinv;
  f.c = {0.0, lambda, b, -a};
  h.c = {0.0, 1.0, -B, 0.0};
  hinv.c = {0.0, 1.0, B, 2.0 * B * B};
  const Jet<3> conj = compose(h, compose(f, hinv));
  out.lambda = conj.c[1];
  out.quadratic = conj.c[2];
  out.cubic = conj.c[3];
  return out;
}

ParabolicModel::ParabolicModel(double lambda, double a, std::vector<double> higher, double R0)
    : lambda_(lambda), a_(a), higher_(std::move(higher)), R0_(R0) {
  if (!(lambda > 0.0) || !(a > 0.0)) {
    throw Error(ErrorCode::DomainError, "parabolic model needs lambda > 0 and a > 0");
  }
  sigma_ = 1.0 / (lambda * lambda);
  d_ = std::sqrt(lambda * lambda * lambda / (2.0 * a));
}

std::complex<double> ParabolicModel::f(std::complex<double> z) const {
  std::complex<double> high = 0.0;
  for (auto it = higher_.rbegin(); it != higher_.rend(); ++it) high = high * z + *it;
  const std::complex<double> z3 = z * z * z;
  return lambda_ * z - a_ * z3 + high * z3 * z;
}

std::complex<double> ParabolicModel::g(std::complex<double> w) const {
  if (!(w.real() > R0_)) {
    throw Error(ErrorCode::BranchCutCrossed, "parabolic coordinates need Re w > R0");
  }
  const std::complex<double> z = d_ / std::sqrt(w);
  const std::complex<double> fz = f(z);
  const std::complex<double> q = d_ / fz;
  const std::complex<double> out = q * q;
  if (!(out.real() > 0.0) || !std::isfinite(out.real()) || !std::isfinite(out.imag())) {
    throw Error(ErrorCode::BranchCutCrossed, "image left the right half-plane");
  }
  return out;
}

std::complex<double> ParabolicModel::alpha(std::complex<double> w) const {
  return g(w) - sigma_ * w - 1.0;
}

double alpha_decay_sup(const ParabolicModel& model, double extent) {
  constexpr int kRe = 64;
  const double lo = model.R0() * (1.0 + 1e-9);
  const double hi = model.R0() * extent;
  double worst = 0.0;
  for (int i = 0; i < kRe; ++i) {
    const double x = lo * std::pow(hi / lo, static_cast<double>(i) / (kRe - 1));
    for (double frac : {-0.5, -0.25, 0.0, 0.25, 0.5}) {
      const std::complex<double> w(x, frac * x);
      worst = std::max(worst, std::abs(model.alpha(w)) * std::sqrt(std::abs(w)));
    }
  }
  return worst;
}

AffineScanResult affine_derivative_scan(double p, double w0, std::span<const double> sigma_grid, long i_max) {
  if (!(p > 1.0) || !(w0 > 1.0) || i_max < 1 || i_max > 10'000'000) {
    throw Error(ErrorCode::DomainError, "affine derivative scan needs p > 1, w0 > 1, 1 <= i_max <= 1e7");
  }
  AffineScanResult out;
  out.p = p;
  out.w0 = w0;
  out.i_max = i_max;
  for (double sigma : sigma_grid) {
    if (!(sigma >= 1.0)) throw Error(ErrorCode::DomainError, "affine derivative scan needs sigma >= 1");
    const double ls = std::log(sigma);
    AffineScanRow row{sigma, 0.0, 0};
    double best = -std::numeric_limits<double>::infinity();
    for (long i = 1; i <= i_max; ++i) {
      const double di = static_cast<double>(i);
      // T^i(w0) = sigma^i (w0 + (1 - sigma^{-i}) / (sigma - 1)); (T^i)' = sigma^i.
      const double geom = sigma == 1.0 ? di : -std::expm1(-di * ls) / (sigma - 1.0);
      const double v = p * std::log(di) + di * ls * (1.0 - p) - p * std::log(w0 + geom);
      if (v > best) {
        best = v;
        row.argmax_i = i;
      }
    }
    row.M = std::exp(best);
    out.M = std::max(out.M, row.M);
    out.rows.push_back(row);
  }
  return out;
}

void AffineScanResult::write_csv(std::ostream& out) const {
  out << "p,sigma,w0,i_max,M\n";
  char buf[256];
  for (const AffineScanRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%ld,%.12g\n", p, r.sigma, w0, i_max, r.M);
    out << buf;
  }
}

PoincareTail poincare_tail(const RealMap& g, double x, double center, double t, double V_radius,
                           long i_max) {
  if (!(t > 0.0) || !(V_radius > 0.0) || i_max < 1) {
    throw Error(ErrorCode::DomainError, "poincare tail needs t > 0, V_radius > 0, i_max >= 1");
  }
  PoincareTail out;
  double y = x, log_d = 0.0, last_term = 0.0;
  bool last_inside = false;
  for (long i = 0; i < i_max; ++i) {
    last_inside = std::abs(y - center) <= V_radius;
    if (last_inside) {
      last_term = std::exp(t * log_d);
      out.partial_sum += last_term;
      ++out.visits;
    }
    if (i + 1 == i_max) break;
    const auto [v, dv] = g(y);
    log_d += std::log(std::abs(dv));
    y = v;
  }
  out.multiplier = std::pow(std::abs(g(y).second), t);
  if (last_inside && out.multiplier < 1.0) {
    out.tail_estimate = last_term * out.multiplier / (1.0 - out.multiplier);
  }
  out.total = out.partial_sum + out.tail_estimate;
  return out;
}

PoincareTail poincare_tail(const UnimodalSystem& sys, double t, double x, double V_radius,
                           long i_max) {
  if (x == sys.x_c()) throw Error(ErrorCode::DomainError, "poincare tail needs x != x_c");
  const int eps = sys.epsilon();
  RealMap g = [&sys, eps](double y) {
    double v = y, dv = 1.0;
    for (int k = 0; k < eps; ++k) {
      const Jet<3> j = sys.G_jet(v);
      v = j.c[0];
      dv *= j.c[1];
    }
    return std::pair{v, dv};
  };
  return poincare_tail(g, x, sys.x_c(), t, V_radius, i_max);
}

double default_petal_point(const UnimodalSystem& sys) {
  const auto orbit = sys.critical_orbit(static_cast<std::size_t>(2 * sys.p()));
  const double width = std::abs(orbit.c.back() - orbit.c[static_cast<std::size_t>(sys.p())]);
  return sys.x_c() + 0.1 * width;
}

}  // namespace feigdim
