#include "feigdim/fixed_point.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <sstream>

#include "feigdim/error.hpp"

namespace feigdim {

std::string_view to_string(Orientation o) noexcept {
  return o == Orientation::reversing ? "reversing" : "preserving";
}

void Combinatorics::validate() const {
  if (p != 2 || orientation != Orientation::reversing) {
    throw Error(ErrorCode::UnsupportedCombinatorics,
                "only period doubling (p=2, reversing) is supported; got p=" + std::to_string(p) +
                    ", orientation=" + std::string(to_string(orientation)));
  }
}

FixedPointMap::FixedPointMap(Combinatorics comb, int ell, double alpha,
                             std::vector<double> coeffs, double residual, SolverMeta meta)
    : comb_(comb),
      ell_(ell),
      alpha_(alpha),
      tau_(std::pow(std::abs(alpha), ell)),
      E_(std::move(coeffs)),
      dE_(E_.derivative()),
      d2E_(dE_.derivative()),
      d3E_(d2E_.derivative()),
      residual_(residual),
      meta_(std::move(meta)) {}

FixedPointSeed default_seed(std::size_t degree) {
  const std::array<double, 3> power{1.0, -1.52, 0.10};
  auto series = ChebSeries::from_power(power, std::max<std::size_t>(degree, 2));
  return {series.coeffs(), -2.5, "builtin ell=2 seed"};
}

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// |x|^ell, in log space for small |x| so large ell does not underflow early.
double abs_pow(double x, int ell) {
  const double ax = std::abs(x);
  if (ax == 0.0) return 0.0;
  if (ax < 1e-3) return std::exp(ell * std::log(ax));
  return std::pow(ax, ell);
}

template <class Real>
struct NewtonOutcome {
  std::vector<Real> coeffs;
  Real alpha;
  int iterations;
  Real last_step;
};

// Collocation of E(u) = alpha E(E(u/tau)^ell) at Chebyshev points plus the
// row E(0) = 1. Unknowns: the degree+1 coefficients and alpha.
template <class Real>
NewtonOutcome<Real> newton_collocation(int ell, std::size_t degree, std::vector<Real> c,
                                       Real alpha, int max_iter) {
  using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
  const std::size_t n = degree + 1;
  c.resize(n, Real(0));
  const auto nodes = chebyshev_points<Real>(n);
  const Real eps = std::numeric_limits<Real>::epsilon();

  Mat J(n + 1, n + 1);
  Vec F(n + 1);
  std::vector<Real> Tu(n), Tv(n), Tw(n);
  Real last_step = std::numeric_limits<Real>::infinity();
  Real prev_fnorm = std::numeric_limits<Real>::infinity();
  int stalled = 0;

  for (int it = 1; it <= max_iter; ++it) {
    const BasicChebSeries<Real> E(c);
    const BasicChebSeries<Real> dE = E.derivative();
    const Real tau = std::pow(alpha, ell);  // ell even: tau = |alpha|^ell
    const Real dtau_dalpha = Real(ell) * tau / alpha;

    for (std::size_t i = 0; i < n; ++i) {
      const Real u = nodes[i];
      const Real v = u / tau;
      const Real Ev = E(v);
      const Real w = std::pow(Ev, ell);
      const Real Ew = E(w);
      const Real dEw = dE(w);
      const Real dEv = dE(v);
      const Real dw_dEv = Real(ell) * std::pow(Ev, ell - 1);
      F(i) = E(u) - alpha * Ew;

      E.basis_row(u, Tu);
      E.basis_row(v, Tv);
      E.basis_row(w, Tw);
      for (std::size_t j = 0; j < n; ++j) {
        J(i, j) = Tu[j] - alpha * (Tw[j] + dEw * dw_dEv * Tv[j]);
      }
      const Real dv_dalpha = -v / tau * dtau_dalpha;
      J(i, n) = -Ew - alpha * dEw * dw_dEv * dEv * dv_dalpha;
    }
    E.basis_row(Real(0), Tu);
    for (std::size_t j = 0; j < n; ++j) J(n, j) = Tu[j];
    J(n, n) = 0;
    F(n) = E(Real(0)) - 1;

    if (!J.allFinite() || !F.allFinite()) break;
    Eigen::PartialPivLU<Mat> lu(J);
    if (!(lu.rcond() > Real(1e-15))) {
      throw Error(ErrorCode::DegenerateJacobian,
                  "collocation Jacobian singular (rcond=" +
                      std::to_string(static_cast<double>(lu.rcond())) + ")");
    }
    const Vec dx = lu.solve(-F);
    Real scale = std::abs(alpha);
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(c[j]));
    for (std::size_t j = 0; j < n; ++j) c[j] += dx(j);
    alpha += dx(n);
    last_step = dx.cwiseAbs().maxCoeff();

    if (!std::isfinite(static_cast<double>(last_step))) break;
    if (last_step <= 64 * eps * scale) return {c, alpha, it, last_step};
    // Once at roundoff level the step stops shrinking; stop after it stalls.
    const Real fnorm = F.cwiseAbs().maxCoeff();
    if (fnorm < Real(1e-12) && fnorm >= prev_fnorm) {
      if (++stalled >= 2) return {c, alpha, it, last_step};
    }
    prev_fnorm = std::min(prev_fnorm, fnorm);
  }
  return {c, alpha, max_iter + 1, last_step};
}

}  // namespace

double evaluate_g(const FixedPointMap& fp, double x, int deriv_order) {
  if (!(std::abs(x) <= 1.0)) {
    throw Error(ErrorCode::DomainError, "evaluate_g needs |x| <= 1, got " + std::to_string(x));
  }
  const int ell = fp.ell();
  const double u = abs_pow(x, ell);
  switch (deriv_order) {
    case 0:
      return fp.E()(u);
    case 1: {
      if (x == 0.0) return 0.0;
      const double du = ell * abs_pow(x, ell - 1) * (x > 0 ? 1.0 : -1.0);
      return fp.dE()(u) * du;
    }
    case 2: {
      const double du = ell * abs_pow(x, ell - 1);
      const double d2u = ell * (ell - 1) * abs_pow(x, ell - 2);
      return fp.d2E()(u) * du * du + fp.dE()(u) * d2u;
    }
    default:
      throw Error(ErrorCode::DomainError, "evaluate_g supports derivative orders 0..2");
  }
}

std::size_t validation_grid_size(std::size_t degree) {
  return std::max<std::size_t>(512, 4 * degree);
}

double fixed_point_defect(const FixedPointMap& fp, std::size_t points) {
  const double alpha = fp.alpha();
  const double xmax = 1.0 / std::abs(alpha);
  const int p = fp.combinatorics().p;
  double worst = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double x = -xmax + 2.0 * xmax * static_cast<double>(i) / static_cast<double>(points - 1);
    double y = x;
    for (int k = 0; k < p; ++k) y = evaluate_g(fp, std::clamp(y, -1.0, 1.0));
    const double rhs = evaluate_g(fp, std::clamp(alpha * x, -1.0, 1.0));
    worst = std::max(worst, std::abs(alpha * y - rhs));
  }
  return worst;
}

void validate_fixed_point(const FixedPointMap& fp, double tol) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvariantViolation, msg); };
  if (fp.ell() < 2 || fp.ell() % 2 != 0) fail("ell must be an even integer >= 2");
  if (std::abs(fp.E()(0.0) - 1.0) > 1e-12) fail("normalization E(0) = 1 violated");
  if (!(std::abs(fp.alpha()) > 1.0)) fail("|alpha| must exceed 1");
  if (fp.combinatorics().orientation == Orientation::reversing && !(fp.alpha() < 0.0)) {
    fail("orientation-reversing combinatorics needs alpha < 0");
  }
  const std::size_t n = validation_grid_size(fp.degree());
  const double s0 = fp.dE()(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(n - 1);
    const double d = fp.dE()(u);
    if (d == 0.0 || (d > 0) != (s0 > 0)) fail("E' changes sign on [0,1]");
  }
  if (!(fp.residual() < tol)) {
    fail("fixed-point residual " + std::to_string(fp.residual()) + " exceeds tol " +
         std::to_string(tol));
  }
}

FixedPointMap solve_fixed_point(const Combinatorics& comb, int ell, const SolverOptions& opts) {
  comb.validate();
  if (ell < 2 || ell % 2 != 0) {
    throw Error(ErrorCode::DomainError, "ell must be an even integer >= 2");
  }
  if (opts.degree < 10) throw Error(ErrorCode::DomainError, "degree must be >= 10");
  const FixedPointSeed seed = opts.initial_guess ? *opts.initial_guess : default_seed(opts.degree);

  std::vector<double> coeffs;
  double alpha = 0.0;
  int iterations = 0;
  if (opts.precision == Precision::extended) {
    std::vector<long double> c(seed.coeffs.begin(), seed.coeffs.end());
    auto out = newton_collocation<long double>(ell, opts.degree, std::move(c), seed.alpha,
                                               opts.max_iter);
    coeffs.assign(out.coeffs.begin(), out.coeffs.end());
    alpha = static_cast<double>(out.alpha);
    iterations = out.iterations;
  } else {
    auto out = newton_collocation<double>(ell, opts.degree, seed.coeffs, seed.alpha, opts.max_iter);
    coeffs = std::move(out.coeffs);
    alpha = out.alpha;
    iterations = out.iterations;
  }

  SolverMeta meta{iterations, opts.tol, utc_timestamp(), seed.provenance, opts.precision};
  if (!std::isfinite(alpha) || iterations > opts.max_iter) {
    throw NoConvergenceError("Newton did not converge for ell=" + std::to_string(ell),
                             std::numeric_limits<double>::infinity());
  }
  // Provisional map to measure the defect; residual field filled afterwards.
  FixedPointMap provisional(comb, ell, alpha, coeffs, 0.0, meta);
  const double residual =
      fixed_point_defect(provisional, validation_grid_size(opts.degree));
  if (!(residual < opts.tol)) {
    throw NoConvergenceError("residual " + std::to_string(residual) + " above tol for ell=" +
                                 std::to_string(ell),
                             residual);
  }
  FixedPointMap fp(comb, ell, alpha, std::move(coeffs), residual, std::move(meta));
  validate_fixed_point(fp, opts.tol);
  return fp;
}

FixedPointMap continue_in_ell(const FixedPointMap& prev, int next_ell, SolverOptions opts) {
  if (next_ell != prev.ell() + 2) {
    throw Error(ErrorCode::DomainError, "continuation steps ell by exactly 2");
  }
  // tau varies slowly in ell, so |alpha| is re-seeded from the previous tau.
  const double alpha_seed =
      std::copysign(std::pow(prev.tau(), 1.0 / next_ell), prev.alpha());
  FixedPointSeed seed{prev.coeffs(), alpha_seed,
                      "continuation from ell=" + std::to_string(prev.ell())};
  opts.initial_guess = seed;
  try {
    return solve_fixed_point(prev.combinatorics(), next_ell, opts);
  } catch (const NoConvergenceError&) {
    opts.degree = std::max<std::size_t>(60, 2 * opts.degree);
    opts.initial_guess->provenance += " (degree escalated to " + std::to_string(opts.degree) + ")";
    return solve_fixed_point(prev.combinatorics(), next_ell, opts);
  }
}

std::string cache_file_name(int p, int ell, std::size_t degree) {
  std::ostringstream os;
  os << "fp_p" << p << "_l" << ell << "_d" << degree << ".json";
  return os.str();
}

}  // namespace feigdim
