#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "feigdim/error.hpp"
#include "feigdim/presentation.hpp"
#include "oracles/finite_difference.hpp"
#include "support/fixtures.hpp"

using namespace feigdim;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::UsageError;
}

const PresentationSystem& presentation(int ell, int kmax) {
  static std::map<std::pair<int, int>, PresentationSystem> memo;
  auto it = memo.find({ell, kmax});
  if (it == memo.end()) it = memo.emplace(std::pair{ell, kmax}, PresentationSystem(testing::system(ell), kmax)).first;
  return it->second;
}

// Hyperbolic length of [x, y] in the disk whose diameter is J.
double hyperbolic_length(Interval J, double x, double y) {
  auto g = [&](double z) { return std::log((z - J.lo) / (J.hi - z)); };
  return std::abs(g(y) - g(x));
}

std::vector<Letter> random_word(std::mt19937& rng, int len, int kmax) {
  std::uniform_int_distribution<int> k(1, kmax);
  std::vector<Letter> w;
  for (int i = 0; i < len; ++i) w.push_back({k(rng), 1});
  return w;
}

}  // namespace

TEST_CASE("cylinders at ell = 2 sit on the critical orbit") {
  const PresentationSystem& ps = presentation(2, 8);
  const double xc = ps.system().x_c();
  REQUIRE(ps.alphabet_size() == 8);
  CHECK(ps.c_p() == ps.orbit_point(2));
  CHECK(ps.c_2p() == ps.orbit_point(4));
  const Interval I = ps.I();
  for (int k = 1; k <= 8; ++k) {
    const Cylinder& cyl = ps.cylinder({k, 1});
    const double a = ps.orbit_point(std::size_t{1} << k);
    const double b = ps.orbit_point(3 * (std::size_t{1} << k));
    CAPTURE(k);
    CHECK(std::abs(std::min(a, b) - cyl.lo(xc)) < 1e-8);
    CHECK(std::abs(std::max(a, b) - cyl.hi(xc)) < 1e-8);
    CHECK(I.contains(cyl.lo(xc)));
    CHECK(I.contains(cyl.hi(xc)));
  }
  std::vector<Cylinder> sorted(ps.cylinders().begin(), ps.cylinders().end());
  std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.lo_offset < b.lo_offset; });
  for (std::size_t i = 1; i < sorted.size(); ++i) CHECK(sorted[i].lo_offset > sorted[i - 1].hi_offset);
}

TEST_CASE("alphabet bookkeeping") {
  const PresentationSystem one(testing::system(2), 1);
  CHECK(one.alphabet_size() == 1);
  const PresentationSystem& ps = presentation(2, 8);
  for (std::size_t i = 0; i < ps.alphabet_size(); ++i) CHECK(ps.letter_index(ps.letter_at(i)) == i);
  CHECK(code_of([&] { ps.letter_index({9, 1}); }) == ErrorCode::IndexOutOfAlphabet);
  CHECK(code_of([&] { ps.letter_index({1, 2}); }) == ErrorCode::IndexOutOfAlphabet);
  CHECK(code_of([&] { ps.psi({0, 1}, ps.I().mid()); }) == ErrorCode::IndexOutOfAlphabet);
  CHECK(code_of([&] { ps.psi({1, 1}, 2.0); }) == ErrorCode::DomainError);
  CHECK(code_of([&] { ps.orbit_point(1u << 20); }) == ErrorCode::OrbitIndexOverflow);
  CHECK(code_of([&] { PresentationSystem(testing::system(2), 0); }) == ErrorCode::DomainError);
}

TEST_CASE("rebuilding gives bitwise identical cylinders") {
  const PresentationSystem a(testing::system(2), 12), b(testing::system(2), 12);
  REQUIRE(a.alphabet_size() == b.alphabet_size());
  for (std::size_t i = 0; i < a.alphabet_size(); ++i) {
    CHECK(a.cylinders()[i].lo_offset == b.cylinders()[i].lo_offset);
    CHECK(a.cylinders()[i].hi_offset == b.cylinders()[i].hi_offset);
    CHECK(a.cylinders()[i].log_sup_deriv == b.cylinders()[i].log_sup_deriv);
  }
  CHECK(a.lambda_rho() == b.lambda_rho());
}

TEST_CASE("both forms of psi agree") {
  for (int ell : {2, 6}) {
    const PresentationSystem& ps = presentation(ell, 8);
    const Interval I = ps.I();
    double worst = 0.0;
    for (int k = 1; k <= 6; ++k) {
      for (int i = 0; i < 50; ++i) {
        const double x = I.lo + I.length() * i / 49.0;
        worst = std::max(worst, std::abs(ps.psi({k, 1}, x, 0) - ps.psi_composition({k, 1}, x, 0)));
      }
    }
    CAPTURE(ell);
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("psi endpoints and derivative") {
  const PresentationSystem& ps = presentation(2, 8);
  for (int k = 1; k <= 6; ++k) {
    const std::size_t s = std::size_t{1} << k;
    CAPTURE(k);
    CHECK(std::abs(ps.psi({k, 1}, ps.c_p(), 0) - ps.orbit_point(s)) < 1e-8);
    CHECK(std::abs(ps.psi({k, 1}, ps.c_2p(), 0) - ps.orbit_point(3 * s)) < 1e-8);
    auto f = [&](double x) { return ps.psi({k, 1}, x, 0); };
    const double x = ps.I().mid();
    CHECK(oracle::rel_error(ps.psi({k, 1}, x, 1), oracle::derivative(f, x, 1e-5)) < 1e-6);
    const PsiEval e = ps.psi({k, 1}, x);
    CHECK(std::abs(e.log_abs_deriv - std::log(std::abs(e.deriv))) < 1e-12);
    CHECK(std::abs(e.value - ps.system().x_c() - e.offset) < 1e-15);
  }
  const PsiEval far = ps.psi({8, 1}, ps.I().mid());
  CHECK(std::isfinite(far.log_abs_deriv));
  CHECK(ps.cylinder({8, 1}).lo_offset <= far.offset);
  CHECK(far.offset <= ps.cylinder({8, 1}).hi_offset);
}

TEST_CASE("words nest and shrink") {
  const PresentationSystem& ps = presentation(2, 8);
  const Interval I = ps.I();
  const std::vector<Letter> empty;
  CHECK(ps.word_map(empty, 0.7).value == 0.7);
  CHECK(ps.cylinder_of_word(empty).lo == I.lo);
  CHECK(ps.cylinder_of_word(empty).hi == I.hi);

  std::mt19937 rng(7);
  std::uniform_int_distribution<int> len(1, 5);
  const double C = ps.distortion_estimate(3, 4);
  CHECK(C >= 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<Letter> w = random_word(rng, len(rng), 4);
    const Interval outer = ps.cylinder_of_word(std::span(w).first(w.size() - 1));
    const Interval inner = ps.cylinder_of_word(w);
    CHECK(inner.lo >= outer.lo);
    CHECK(inner.hi <= outer.hi);
    CHECK(inner.length() < outer.length());
    double prod = I.length();
    for (const Letter& l : w) prod *= ps.cylinder(l).sup_deriv();
    CHECK(inner.length() <= C * prod * (1 + 1e-9));
    const Interval tail = ps.cylinder_of_word(std::span(w).subspan(1));
    const Interval J = ps.J();
    CHECK(hyperbolic_length(J, inner.lo, inner.hi) <=
          ps.lambda_rho() * hyperbolic_length(J, tail.lo, tail.hi) * (1 + 1e-12));
  }
  const std::vector<Letter> too_long(ps.kmax() + 20, Letter{1, 1});
  CHECK(code_of([&] { ps.word_map(too_long, I.mid()); }) == ErrorCode::DomainError);
}

TEST_CASE("contraction certificate") {
  const PresentationSystem& ps = presentation(2, 8);
  CHECK(ps.lambda_rho() < 1.0);
  CHECK(ps.lambda_rho() > 0.0);
  const double tight = ps.contraction_certificate(0.2);
  const double loose = ps.contraction_certificate(0.8);
  CHECK(loose < tight);
  CHECK(ps.contraction_certificate_for({1, 1}, 0.2) <= tight);
  CHECK(std::abs(tight - ps.lambda_rho()) < 1e-15);
}

TEST_CASE("geometric decay of the derivatives") {
  const PresentationSystem& ps = presentation(2, 40);
  const DecayProfile prof = ps.decay_profile(1, ps.I().mid(), 20, 40);
  const double expected = -std::log(ps.system().tau()) / 2.0;
  CHECK(oracle::rel_error(prof.loglin_slope, expected) < 0.1);
  const DecayProfile head = ps.decay_profile(1, ps.I().mid(), 1, 5);
  CHECK(head.rows.front().k == 1);
  CHECK(oracle::rel_error(head.rows.front().abs_deriv, std::abs(ps.psi({1, 1}, ps.I().mid(), 1))) < 1e-12);
  CHECK(head.rows.front().scaled == head.rows.front().abs_deriv);
}

TEST_CASE("crossover range at large ell") {
  const PresentationSystem ps(testing::system(32), 40);
  const DecayProfile prof = ps.decay_profile(1, ps.I().mid(), 3, 15);
  MESSAGE("ell = 32 log-log slope on k in [3, 15]: " << prof.loglog_slope);
  CHECK(std::isfinite(prof.loglog_slope));
  CHECK(prof.loglog_slope < 0.0);
}

TEST_CASE("tail bound") {
  const PresentationSystem& ps = presentation(2, 40);
  CHECK(ps.tail_bound(20, 1.0) < 1e-6);
  CHECK(ps.tail_bound(25, 1.0) < ps.tail_bound(20, 1.0));
  CHECK(ps.tail_bound(20, 0.5) > ps.tail_bound(20, 1.0));
  CHECK(ps.tail_bound(20, 1e-4) > 1e3);
  CHECK(code_of([&] { ps.tail_bound(20, 0.0); }) == ErrorCode::DomainError);
  CHECK(code_of([&] { ps.tail_bound(2, 1.0); }) == ErrorCode::DomainError);
}

TEST_CASE("depth-8 images of I's endpoints lie on the critical orbit") {
  const PresentationSystem& ps = presentation(2, 8);
  constexpr std::size_t kLimit = 1024;
  std::vector<double> closure;
  for (std::size_t j = 0; j <= kLimit; ++j) {
    const double c = ps.orbit().c[j];
    if (ps.I().contains(c)) closure.push_back(c);
  }
  std::sort(closure.begin(), closure.end());
  auto distance = [&](double x) {
    auto it = std::lower_bound(closure.begin(), closure.end(), x);
    double d = 1.0;
    if (it != closure.end()) d = std::min(d, *it - x);
    if (it != closure.begin()) d = std::min(d, x - *std::prev(it));
    return d;
  };
  // psi_{k,1} sends c_j to c_{2^k (j - 1)}; keep words whose image index stays in the table.
  std::mt19937 rng(11);
  int found = 0;
  double worst = 0.0;
  while (found < 64) {
    const std::vector<Letter> w = random_word(rng, 8, 2);
    const std::size_t start = rng() % 2 ? 2 : 4;
    std::size_t index = start;
    for (auto it = w.rbegin(); it != w.rend(); ++it) index = (std::size_t{1} << it->k) * (index - 1);
    if (index > kLimit) continue;
    ++found;
    worst = std::max(worst, distance(ps.word_map(w, ps.orbit_point(start)).value));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("cylinder csv") {
  const PresentationSystem& ps = presentation(2, 8);
  std::ostringstream out;
  write_cylinders_csv(ps, out);
  const std::string text = out.str();
  CHECK(text.rfind("k,m,left,right,sup_deriv,min_deriv\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 9);
}
