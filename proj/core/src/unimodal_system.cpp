#include "feigdim/unimodal_system.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "feigdim/error.hpp"
#include "feigdim/roots.hpp"

namespace feigdim {

namespace {

constexpr double kSlack = 1e-12;
constexpr std::size_t kLocalOrder = 8;
// Below this |y| the inverse of E is taken from its local Taylor polynomial at x_c.
constexpr double kLocalInverseCutoff = 1e-4;

std::vector<ChebSeries> derivative_chain(const ChebSeries& E, std::size_t order) {
  std::vector<ChebSeries> out{E};
  for (std::size_t k = 1; k <= order; ++k) out.push_back(out.back().derivative());
  return out;
}

}  // namespace

UnimodalSystem::UnimodalSystem(Combinatorics comb, ChebSeries E, int ell, double tau)
    : comb_(comb), ell_(ell), tau_(tau), E_(derivative_chain(E, 3)) {
  locate_critical_point();
}

UnimodalSystem::UnimodalSystem(FixedPointMap fp)
    : UnimodalSystem(fp.combinatorics(), fp.E(), fp.ell(), fp.tau()) {
  fp_ = std::move(fp);
  check_invariants();
}

UnimodalSystem UnimodalSystem::synthetic(ChebSeries E, int ell, double tau, Combinatorics comb) {
  return UnimodalSystem(comb, std::move(E), ell, tau);
}

void UnimodalSystem::locate_critical_point() {
  const ChebSeries& E = E_[0];
  const double e0 = E(0.0), e1 = E(1.0);
  if ((e0 > 0) == (e1 > 0)) {
    throw Error(ErrorCode::NoCriticalPoint, "E has no sign change on (0,1)");
  }
  x_c_ = bracketed_root([&](double x) { return E(x); }, 0.0, 1.0);

  // Local Taylor polynomial of E at x_c (constant term taken as exactly 0).
  auto chain = derivative_chain(E, kLocalOrder);
  local_taylor_.assign(kLocalOrder + 1, 0.0);
  double fact = 1.0;
  for (std::size_t k = 1; k <= kLocalOrder; ++k) {
    fact *= static_cast<double>(k);
    local_taylor_[k] = chain[k](x_c_) / fact;
  }

  const double ylo = std::min(e0, e1), yhi = std::max(e0, e1);
  inverse_guess_ = ChebSeries::interpolate(
      [&](double y) { return bracketed_root([&](double x) { return E(x) - y; }, 0.0, 1.0); }, 64,
      ylo, yhi);

  // Both laps reach H(x) iff -E(x) stays inside the range of E on the other lap.
  if (std::abs(e1) < std::abs(e0)) {
    inv_lo_ = E_inverse(-e1);
    inv_hi_ = 1.0;
  } else {
    inv_lo_ = 0.0;
    inv_hi_ = E_inverse(-e0);
  }

  const double g1 = G_jet(x_c_).derivative(1);
  epsilon_ = g1 < 0 ? 2 : 1;
}

void UnimodalSystem::check_invariants() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvariantViolation, msg); };
  if (std::abs(eval_H(x_c_)) > 1e-10) fail("H(x_c) != 0");
  if (std::abs(eval_H(0.0) - 1.0) > 1e-10) fail("H(0) != 1");
  constexpr int kGrid = 257;
  double worst = 0.0;
  for (int i = 0; i < kGrid; ++i) {
    const double x = static_cast<double>(i) / (kGrid - 1) / tau_;
    double y = x;
    for (int k = 0; k < comb_.p; ++k) y = eval_H(std::clamp(y, 0.0, 1.0));
    worst = std::max(worst, std::abs(tau_ * y - eval_H(std::min(tau_ * x, 1.0))));
  }
  if (worst > 1e-9) fail("tau H^p(x) = H(tau x) residual " + std::to_string(worst));
  const double mult = std::abs(G_jet(x_c_).derivative(1));
  if (std::abs(mult - std::pow(tau_, -1.0 / ell_)) > 1e-8) fail("|G'(x_c)| != tau^{-1/ell}");
  if (comb_.orientation == Orientation::reversing && epsilon_ != 2) {
    fail("orientation-reversing combinatorics must give epsilon = 2");
  }
}

Jet<3> UnimodalSystem::E_jet(double x) const {
  Jet<3> j;
  j.c[0] = E_[0](x);
  j.c[1] = E_[1](x);
  j.c[2] = E_[2](x) / 2.0;
  j.c[3] = E_[3](x) / 6.0;
  return j;
}

Jet<3> UnimodalSystem::H_jet(double x) const {
  if (x < -kSlack || x > 1.0 + kSlack) {
    throw Error(ErrorCode::DomainError, "H is defined on [0,1], got " + std::to_string(x));
  }
  // ell is even, so |E|^ell = E^ell and the jet power is exact.
  return pow(E_jet(std::clamp(x, 0.0, 1.0)), static_cast<unsigned>(ell_));
}

Jet<3> UnimodalSystem::G_jet(double x) const {
  Jet<3> y;
  y.c[0] = x / tau_;
  y.c[1] = 1.0 / tau_;
  for (int k = 0; k < comb_.p - 1; ++k) {
    if (y.c[0] < -kSlack || y.c[0] > 1.0 + kSlack) {
      throw Error(ErrorCode::IterateEscaped,
                  "H-iterate left [0,1] while evaluating G at " + std::to_string(x));
    }
    y = compose(H_jet(y.c[0]), y);
  }
  return y;
}

double UnimodalSystem::eval_H(double x, int deriv_order) const {
  if (deriv_order < 0 || deriv_order > 3) {
    throw Error(ErrorCode::DomainError, "eval_H supports derivative orders 0..3");
  }
  if (deriv_order == 0) {
    if (x < -kSlack || x > 1.0 + kSlack) {
      throw Error(ErrorCode::DomainError, "H is defined on [0,1], got " + std::to_string(x));
    }
    const double e = E_[0](std::clamp(x, 0.0, 1.0));
    if (e == 0.0) return 0.0;
    return std::exp(ell_ * std::log(std::abs(e)));
  }
  return H_jet(x).derivative(static_cast<std::size_t>(deriv_order));
}

double UnimodalSystem::eval_G(double x, int deriv_order) const {
  if (deriv_order < 0 || deriv_order > 3) {
    throw Error(ErrorCode::DomainError, "eval_G supports derivative orders 0..3");
  }
  if (x < -kSlack || x > 1.0 + kSlack) {
    throw Error(ErrorCode::DomainError, "G is defined on [0,1], got " + std::to_string(x));
  }
  return G_jet(x).derivative(static_cast<std::size_t>(deriv_order));
}

CriticalOrbit UnimodalSystem::critical_orbit(std::size_t n, std::size_t budget) const {
  if (n > budget) {
    throw Error(ErrorCode::OrbitIndexOverflow,
                "orbit length " + std::to_string(n) + " exceeds budget " + std::to_string(budget));
  }
  CriticalOrbit orbit;
  orbit.c.reserve(n + 1);
  orbit.c.push_back(x_c_);
  if (n >= 1) orbit.c.push_back(0.0);
  for (std::size_t j = 2; j <= n; ++j) {
    double v = eval_H(orbit.c.back());
    if (v < -kSlack || v > 1.0 + kSlack) {
      throw Error(ErrorCode::OrbitEscaped, "c_" + std::to_string(j) + " left [0,1]");
    }
    if (v < 0.0 || v > 1.0) {
      v = std::clamp(v, 0.0, 1.0);
      ++orbit.clamped;
    }
    orbit.c.push_back(v);
  }
  return orbit;
}

double UnimodalSystem::E_inverse(double y) const {
  const ChebSeries& E = E_[0];
  const double ylo = inverse_guess_.lo(), yhi = inverse_guess_.hi();
  if (y < ylo - kSlack || y > yhi + kSlack) {
    throw Error(ErrorCode::DomainError, "E^{-1}: " + std::to_string(y) + " outside range of E");
  }
  if (std::abs(y) < kLocalInverseCutoff) return x_c_ + E_inverse_offset(y);
  double z = std::clamp(inverse_guess_(std::clamp(y, ylo, yhi)), 0.0, 1.0);
  for (int it = 0; it < 3; ++it) {
    const double step = (E(z) - y) / E_[1](z);
    z -= step;
    if (std::abs(step) <= 4e-16 * std::max(1.0, std::abs(z))) break;
  }
  if (!(z >= -kSlack && z <= 1.0 + kSlack) || std::abs(E(z) - y) > 1e-12) {
    z = bracketed_root([&](double x) { return E(x) - y; }, 0.0, 1.0);
  }
  return z;
}

double UnimodalSystem::E_inverse_offset(double y) const {
  if (std::abs(y) >= kLocalInverseCutoff) return E_inverse(y) - x_c_;
  // Newton on the local polynomial sum_k e_k d^k = y, started at the linear guess.
  double d = y / local_taylor_[1];
  for (int it = 0; it < 8; ++it) {
    double q = 0.0, dq = 0.0;  // q = sum_k e_k d^{k-1}
    for (std::size_t k = kLocalOrder; k >= 1; --k) {
      dq = dq * d + q;
      q = q * d + local_taylor_[k];
    }
    const double step = (d * q - y) / (q + d * dq);
    d -= step;
    if (std::abs(step) <= 1e-17 * std::abs(d)) break;
  }
  return d;
}

double UnimodalSystem::involution(double x) const {
  if (x < inv_lo_ - kSlack || x > inv_hi_ + kSlack) {
    throw Error(ErrorCode::OutOfNeighborhood,
                "involution undefined at " + std::to_string(x) + " (neighborhood [" +
                    std::to_string(inv_lo_) + ", " + std::to_string(inv_hi_) + "])");
  }
  if (x == x_c_) return x_c_;
  // H(x^) = H(x) with x^ on the other lap means E(x^) = -E(x).
  const double target = -E_[0](std::clamp(x, 0.0, 1.0));
  if (std::abs(target) < kLocalInverseCutoff) return x_c_ + E_inverse_offset(target);
  return E_inverse(target);
}

double UnimodalSystem::involution_derivative(double x) const {
  if (x == x_c_) return -1.0;
  const double xh = involution(x);
  return -E_[1](x) / E_[1](xh);
}

double UnimodalSystem::nonsymmetry() const { return std::abs(E_[2](x_c_) / E_[1](x_c_)); }

Jet<3> UnimodalSystem::g_eps_jet() const {
  Jet<3> j = G_jet(x_c_);
  for (int k = 1; k < epsilon_; ++k) j = compose(G_jet(j.c[0]), j);
  return j;
}

TaylorData UnimodalSystem::taylor_at_fixed_point() const {
  const Jet<3> j = g_eps_jet();
  return {j.c[1], j.c[2], -j.c[3]};
}

double revalidate_fixed_point(const FixedPointMap& fp) {
  const double defect = fixed_point_defect(fp, validation_grid_size(fp.degree()));
  if (!(defect < fp.meta().tol)) {
    throw Error(ErrorCode::InvariantViolation,
                "fixed-point defect " + std::to_string(defect) + " not below tol");
  }
  validate_fixed_point(fp, fp.meta().tol);
  return defect;
}

}  // namespace feigdim
