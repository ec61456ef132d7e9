#include "feigdim/presentation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <string>

#include "feigdim/error.hpp"

namespace feigdim {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::vector<double> sample_grid(Interval iv, std::size_t n) {
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = n == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(n - 1);
    xs[i] = iv.lo + s * iv.length();
  }
  xs.front() = iv.lo;
  xs.back() = iv.hi;
  return xs;
}

double log_hyperbolic_density(double y, double center, double radius) {
  const double d = y - center;
  return std::log(2.0 * radius) - std::log((radius - d) * (radius + d));
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace

double Cylinder::sup_deriv() const { return std::exp(log_sup_deriv); }
double Cylinder::min_deriv() const { return std::exp(log_min_deriv); }

int default_kmax(int ell) { return ell <= 8 ? 40 : 5 * ell; }

PresentationSystem::PresentationSystem(UnimodalSystem sys, int kmax, PresentationOptions opts)
    : sys_(std::move(sys)), kmax_(kmax), opts_(opts) {
  if (kmax_ < 1) throw Error(ErrorCode::DomainError, "Kmax must be positive");
  if (opts_.deriv_samples < 2) throw Error(ErrorCode::DomainError, "need >= 2 derivative samples");
  build_orbit();
  build_branches();
  check_branch_monotonicity();
  build_cylinders();
  verify();
  certify_contraction();
}

void PresentationSystem::build_orbit() {
  const auto p = static_cast<std::size_t>(sys_.p());
  // Longest index an endpoint check could use, capped by the budget.
  std::size_t needed = 2 * p;
  for (int k = 0; k < kmax_ && needed <= opts_.orbit_budget; ++k) needed *= p;
  const std::size_t n = std::min(needed, opts_.orbit_budget);
  orbit_ = sys_.critical_orbit(n, opts_.orbit_budget);

  orbit_error_.assign(orbit_.c.size(), 0.0);
  for (std::size_t j = 2; j < orbit_.c.size(); ++j) {
    const double dh = std::abs(sys_.eval_H(orbit_.c[j - 1], 1));
    orbit_error_[j] = dh * orbit_error_[j - 1] + 4.0 * kEps * std::max(1.0, orbit_.c[j]);
  }
  c_p_ = orbit_.c.at(p);
  c_2p_ = orbit_.c.at(2 * p);
  I_ = {std::min(c_p_, c_2p_), std::max(c_p_, c_2p_)};
}

void PresentationSystem::build_branches() {
  const double x_c = sys_.x_c();
  g_sign_ = sys_.eval_G(x_c, 1) < 0 ? -1 : 1;
  e_left_sign_ = sys_.E()(0.0) > 0 ? 1.0 : -1.0;
}

int PresentationSystem::lap_side(std::size_t orbit_index) const {
  return orbit_.c.at(orbit_index) < sys_.x_c() ? -1 : 1;
}

std::size_t PresentationSystem::letter_index(Letter l) const {
  const int p = sys_.p();
  if (l.k < 1 || l.k > kmax_ || l.m < 1 || l.m > p - 1) {
    throw Error(ErrorCode::IndexOutOfAlphabet,
                "letter (" + std::to_string(l.k) + "," + std::to_string(l.m) + ") outside alphabet");
  }
  return static_cast<std::size_t>((l.k - 1) * (p - 1) + (l.m - 1));
}

Letter PresentationSystem::letter_at(std::size_t index) const {
  if (index >= cylinders_.size()) {
    throw Error(ErrorCode::IndexOutOfAlphabet, "letter index " + std::to_string(index));
  }
  const int pm1 = sys_.p() - 1;
  const int i = static_cast<int>(index);
  return {i / pm1 + 1, i % pm1 + 1};
}

double PresentationSystem::orbit_point(std::size_t j) const {
  if (j >= orbit_.c.size()) {
    throw Error(ErrorCode::OrbitIndexOverflow,
                "c_" + std::to_string(j) + " beyond stored orbit of length " +
                    std::to_string(orbit_.c.size()));
  }
  return orbit_.c[j];
}

std::pair<double, double> PresentationSystem::inverse_chain(int m, int steps, double x) const {
  (void)m;
  const int p = sys_.p();
  const double ell = sys_.ell();
  double v = x, dv = 1.0;
  for (int i = 1; i <= steps; ++i) {
    const int side = lap_side(static_cast<std::size_t>(p - i));
    const double s = side < 0 ? e_left_sign_ : -e_left_sign_;
    const double y = std::pow(std::max(v, 0.0), 1.0 / ell);
    const double z = sys_.x_c() + sys_.E_inverse_offset(s * y);
    const double e = s * y;
    const double dH = ell * std::pow(e, ell - 1.0) * sys_.dE(1)(z);
    v = z;
    dv /= dH;
  }
  return {v, dv};
}

PsiEval PresentationSystem::psi(Letter l, double x) const {
  letter_index(l);
  if (!I_.contains(x, 1e-12)) {
    throw Error(ErrorCode::DomainError, "psi argument " + std::to_string(x) + " outside I");
  }
  const int p = sys_.p();
  const double ell = sys_.ell();
  const auto [v, dv] = inverse_chain(l.m, p - l.m - 1, x);
  int side = lap_side(static_cast<std::size_t>(l.m));
  if (g_sign_ < 0 && (l.k % 2 == 1)) side = -side;
  const double s = side < 0 ? e_left_sign_ : -e_left_sign_;

  const double log_y = (-l.k * std::log(sys_.tau()) + std::log(v)) / ell;
  const double y = std::exp(log_y);
  PsiEval out;
  out.offset = sys_.E_inverse_offset(s * y);
  out.value = sys_.x_c() + out.offset;
  const double dEz = sys_.dE(1)(out.value);
  out.log_abs_deriv = log_y + std::log(std::abs(dv)) - std::log(ell) - std::log(v) -
                      std::log(std::abs(dEz));
  const double sign = (dv > 0 ? 1.0 : -1.0) * s * (dEz > 0 ? 1.0 : -1.0);
  out.deriv = sign * std::exp(out.log_abs_deriv);
  return out;
}

double PresentationSystem::psi(Letter l, double x, int deriv) const {
  if (deriv == 0) return psi(l, x).value;
  if (deriv == 1) return psi(l, x).deriv;
  throw Error(ErrorCode::DomainError, "psi supports derivative orders 0 and 1");
}

double PresentationSystem::psi_composition(Letter l, double x, int deriv) const {
  letter_index(l);
  if (deriv < 0 || deriv > 1) {
    throw Error(ErrorCode::DomainError, "psi_composition supports derivative orders 0 and 1");
  }
  if (!I_.contains(x, 1e-12)) {
    throw Error(ErrorCode::DomainError, "psi argument " + std::to_string(x) + " outside I");
  }
  auto [y, dy] = inverse_chain(l.m, sys_.p() - l.m, x);
  for (int i = 0; i < l.k; ++i) {
    const Jet<3> g = sys_.G_jet(std::clamp(y, 0.0, 1.0));
    y = g.c[0];
    dy *= g.c[1];
  }
  return deriv == 0 ? y : dy;
}

void PresentationSystem::check_branch_monotonicity() const {
  const auto p = static_cast<std::size_t>(sys_.p());
  for (std::size_t m = 1; m < p; ++m) {
    const double a = orbit_.c.at(m), b = orbit_.c.at(p + m);
    const Interval lap{std::min(a, b), std::max(a, b)};
    int sign = 0;
    for (double x : sample_grid(lap, opts_.deriv_samples)) {
      Jet<3> j = Jet<3>::variable(x);
      for (std::size_t i = 0; i < p - m; ++i) j = compose(sys_.H_jet(std::clamp(j.c[0], 0.0, 1.0)), j);
      // The critical point may sit at an endpoint of the lap, where H' vanishes.
      if (j.c[1] == 0.0 && (x == lap.lo || x == lap.hi)) continue;
      const int s = j.c[1] > 0 ? 1 : -1;
      if (j.c[1] == 0.0 || (sign != 0 && s != sign)) {
        throw Error(ErrorCode::BranchNotMonotone,
                    "H^" + std::to_string(p - m) + " is not monotone on its orbit interval");
      }
      sign = s;
    }
  }
}

void PresentationSystem::build_cylinders() {
  const int p = sys_.p();
  const auto xs = sample_grid(I_, opts_.deriv_samples);
  cylinders_.clear();
  cylinders_.reserve(static_cast<std::size_t>(kmax_ * (p - 1)));
  for (int k = 1; k <= kmax_; ++k) {
    for (int m = 1; m <= p - 1; ++m) {
      Cylinder c;
      c.letter = {k, m};
      const PsiEval a = psi(c.letter, c_p_);
      const PsiEval b = psi(c.letter, c_2p_);
      c.image_of_cp = a.value;
      c.image_of_c2p = b.value;
      c.lo_offset = std::min(a.offset, b.offset);
      c.hi_offset = std::max(a.offset, b.offset);
      c.log_sup_deriv = -std::numeric_limits<double>::infinity();
      c.log_min_deriv = std::numeric_limits<double>::infinity();
      for (double x : xs) {
        const double ld = psi(c.letter, x).log_abs_deriv;
        c.log_sup_deriv = std::max(c.log_sup_deriv, ld);
        c.log_min_deriv = std::min(c.log_min_deriv, ld);
      }
      cylinders_.push_back(c);
    }
  }
}

void PresentationSystem::verify() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvariantViolation, msg); };
  const double x_c = sys_.x_c();
  const auto p = static_cast<std::size_t>(sys_.p());
  const double lo_off = I_.lo - x_c, hi_off = I_.hi - x_c;

  for (const Cylinder& c : cylinders_) {
    if (!(c.hi_offset > c.lo_offset)) fail("degenerate cylinder");
    if (c.lo_offset < lo_off - 1e-12 || c.hi_offset > hi_off + 1e-12) fail("cylinder outside I");
    // Orbit-table cross-check where the iterated orbit is still trustworthy.
    std::size_t scale = 1;
    bool in_table = true;
    for (int i = 0; i < c.letter.k && in_table; ++i) {
      scale *= p;
      in_table = scale * (p + static_cast<std::size_t>(c.letter.m)) < orbit_.c.size();
    }
    if (!in_table) continue;
    const std::size_t ja = scale * static_cast<std::size_t>(c.letter.m);
    const std::size_t jb = scale * (p + static_cast<std::size_t>(c.letter.m));
    if (orbit_error_[ja] > 1e-10 || orbit_error_[jb] > 1e-10) continue;
    if (std::abs(c.image_of_cp - orbit_.c[ja]) > 1e-8 ||
        std::abs(c.image_of_c2p - orbit_.c[jb]) > 1e-8) {
      fail("cylinder (" + std::to_string(c.letter.k) + "," + std::to_string(c.letter.m) +
           ") endpoints disagree with the critical orbit");
    }
  }

  std::vector<const Cylinder*> sorted;
  for (const Cylinder& c : cylinders_) sorted.push_back(&c);
  std::sort(sorted.begin(), sorted.end(),
            [](const Cylinder* a, const Cylinder* b) { return a->lo_offset < b->lo_offset; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (!(sorted[i]->lo_offset > sorted[i - 1]->hi_offset)) {
      fail("cylinders " + std::to_string(sorted[i - 1]->letter.k) + " and " +
           std::to_string(sorted[i]->letter.k) + " overlap");
    }
  }
}

double PresentationSystem::contraction_certificate_for(Letter l, double margin) const {
  const double w = I_.length();
  const Interval J{I_.lo - margin * w, I_.hi + margin * w};
  const double c = J.mid(), R = 0.5 * J.length();
  double worst = 0.0;
  for (double x : sample_grid(I_, opts_.deriv_samples)) {
    const PsiEval e = psi(l, x);
    const double q = e.log_abs_deriv + log_hyperbolic_density(e.value, c, R) -
                     log_hyperbolic_density(x, c, R);
    worst = std::max(worst, std::exp(q));
  }
  return worst;
}

double PresentationSystem::contraction_certificate(double margin) const {
  if (!(margin > 0.0)) throw Error(ErrorCode::DomainError, "margin must be positive");
  double worst = 0.0;
  for (const Cylinder& cyl : cylinders_) {
    worst = std::max(worst, contraction_certificate_for(cyl.letter, margin));
  }
  return worst;
}

void PresentationSystem::certify_contraction() {
  double margin = opts_.j_margin;
  for (int attempt = 0; attempt < 3; ++attempt, margin *= 2.0) {
    const double lam = contraction_certificate(margin);
    if (lam < 1.0) {
      lambda_rho_ = lam;
      const double w = I_.length();
      J_ = {I_.lo - margin * w, I_.hi + margin * w};
      return;
    }
  }
  throw Error(ErrorCode::NoContraction, "no hyperbolic contraction certificate on inflated I");
}

DecayProfile PresentationSystem::decay_profile(int m, double x, int k_lo, int k_hi) const {
  if (k_lo < 1 || k_hi > kmax_ || k_hi - k_lo < 1) {
    throw Error(ErrorCode::DomainError, "decay window must satisfy 1 <= k_lo < k_hi <= Kmax");
  }
  DecayProfile out;
  std::vector<double> lk, kk, ld;
  for (int k = 1; k <= kmax_; ++k) {
    const PsiEval e = psi({k, m}, x);
    const double a = std::exp(e.log_abs_deriv);
    out.rows.push_back({k, a, std::pow(static_cast<double>(k), 1.5) * a});
    if (k >= k_lo && k <= k_hi) {
      lk.push_back(std::log(static_cast<double>(k)));
      kk.push_back(static_cast<double>(k));
      ld.push_back(e.log_abs_deriv);
    }
  }
  out.loglog_slope = ls_slope(lk, ld);
  out.loglin_slope = ls_slope(kk, ld);
  return out;
}

double PresentationSystem::tail_bound(int K, double t) const {
  if (K < 3 || K > kmax_) {
    throw Error(ErrorCode::DomainError, "tail bound needs 3 <= K <= Kmax");
  }
  if (!(t > 0.0)) throw Error(ErrorCode::DomainError, "tail bound needs t > 0");
  double total = 0.0;
  for (int m = 1; m <= sys_.p() - 1; ++m) {
    const double s0 = cylinder({K - 2, m}).log_sup_deriv;
    const double s1 = cylinder({K - 1, m}).log_sup_deriv;
    const double s2 = cylinder({K, m}).log_sup_deriv;
    const double lr = t * (s2 - s1);
    const double lr_prev = t * (s1 - s0);
    // Inflate the ratio by 10% (in the exponent) before summing the geometric tail.
    const double lr_infl = 0.9 * lr;
    if (!(lr_infl < 0.0)) {
      throw Error(ErrorCode::RatioNotContracting, "derivative ratio at K is not below 1");
    }
    if (std::abs(lr - lr_prev) > 0.1 * std::abs(lr)) {
      throw Error(ErrorCode::RatioNotContracting,
                  "derivative ratios not yet geometric at K = " + std::to_string(K));
    }
    total += std::exp(t * s2 + lr_infl) / -std::expm1(lr_infl);
  }
  return total;
}

PsiEval PresentationSystem::word_map(std::span<const Letter> word, double x) const {
  if (word.size() > opts_.max_word_depth) {
    throw Error(ErrorCode::DomainError, "word longer than the supported depth");
  }
  PsiEval acc{x, x - sys_.x_c(), 1.0, 0.0};
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    const PsiEval e = psi(*it, acc.value);
    acc.value = e.value;
    acc.offset = e.offset;
    acc.deriv *= e.deriv;
    acc.log_abs_deriv += e.log_abs_deriv;
  }
  return acc;
}

Interval PresentationSystem::cylinder_of_word(std::span<const Letter> word) const {
  const double a = word_map(word, c_p_).value;
  const double b = word_map(word, c_2p_).value;
  return {std::min(a, b), std::max(a, b)};
}

double PresentationSystem::distortion_estimate(int depth, int k_limit) const {
  if (depth < 1 || k_limit < 1 || k_limit > kmax_) {
    throw Error(ErrorCode::DomainError, "distortion needs depth >= 1 and 1 <= k_limit <= Kmax");
  }
  const int pm1 = sys_.p() - 1;
  const int base = k_limit * pm1;
  const auto xs = sample_grid(I_, 9);
  std::vector<Letter> word(static_cast<std::size_t>(depth));
  std::vector<int> digits(static_cast<std::size_t>(depth), 0);
  double worst = 1.0;
  while (true) {
    for (int i = 0; i < depth; ++i) word[i] = {digits[i] / pm1 + 1, digits[i] % pm1 + 1};
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double x : xs) {
      const double ld = word_map(word, x).log_abs_deriv;
      lo = std::min(lo, ld);
      hi = std::max(hi, ld);
    }
    worst = std::max(worst, std::exp(hi - lo));
    int i = depth - 1;
    while (i >= 0 && ++digits[i] == base) digits[i--] = 0;
    if (i < 0) break;
  }
  return worst;
}

void write_cylinders_csv(const PresentationSystem& ps, std::ostream& out) {
  out << "k,m,left,right,sup_deriv,min_deriv\n";
  const double x_c = ps.system().x_c();
  char buf[256];
  for (const Cylinder& c : ps.cylinders()) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.12g,%.12g\n", c.letter.k, c.letter.m,
                  c.lo(x_c), c.hi(x_c), c.sup_deriv(), c.min_deriv());
    out << buf;
  }
}

}  // namespace feigdim
