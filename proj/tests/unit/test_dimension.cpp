#include <doctest.h>

#include <cmath>
#include <memory>
#include <sstream>

#include "feigdim/dimension.hpp"
#include "feigdim/error.hpp"
#include "feigdim/presentation.hpp"
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

std::shared_ptr<const Ifs> cantor() { return std::make_shared<AffineIfs>(AffineIfs::middle_thirds()); }

std::shared_ptr<const Ifs> presentation_ifs(int ell, int K) {
  auto ps = std::make_shared<const PresentationSystem>(testing::system(ell), default_kmax(ell));
  return std::make_shared<PresentationIfs>(ps, K);
}

const DimensionResult& hd2() {
  static const DimensionResult r = hausdorff_dimension(testing::system(2));
  return r;
}

}  // namespace

TEST_CASE("middle-thirds pressure is an exact line") {
  const PressureModel pm(cantor(), 16);
  for (double t : {0.1, 0.4, 0.63, 1.0, 1.7}) {
    CAPTURE(t);
    CHECK(std::abs(pressure_eigen(pm, t) - (std::log(2.0) + t * std::log(1.0 / 3.0))) < 1e-12);
  }
  const DimensionResult r = hausdorff_dimension(cantor());
  CHECK(std::abs(r.hd - std::log(2.0) / std::log(3.0)) < 1e-10);
  CHECK(r.hd_lo <= r.hd + 1e-12);
  CHECK(r.hd <= r.hd_hi + 1e-12);
  const MoranBracket mb = moran_oracle(*cantor(), 3);
  CHECK(std::abs(mb.t_lo - std::log(2.0) / std::log(3.0)) < 1e-10);
  CHECK(std::abs(mb.t_hi - std::log(2.0) / std::log(3.0)) < 1e-10);
}

TEST_CASE("unequal affine ratios solve the Moran equation") {
  auto ifs = std::make_shared<AffineIfs>(Interval{0.0, 1.0},
                                         std::vector<AffineIfs::Map>{{0.5, 0.0}, {0.25, 0.75}});
  // 0.5^t + 0.25^t = 1 gives 2^{-t} = (sqrt 5 - 1) / 2.
  const double exact = -std::log((std::sqrt(5.0) - 1.0) / 2.0) / std::log(2.0);
  CHECK(std::abs(hausdorff_dimension(ifs).hd - exact) < 1e-10);
  CHECK(code_of([] { AffineIfs(Interval{0, 1}, {{1.2, 0.0}}); }) == ErrorCode::NoContraction);
}

TEST_CASE("pressure is strictly decreasing") {
  const PressureModel pm(presentation_ifs(2, 40), 24);
  double prev = pressure_eigen(pm, 0.1);
  for (int i = 2; i <= 10; ++i) {
    const double cur = pressure_eigen(pm, 0.1 * i);
    CAPTURE(i);
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK(code_of([&] { pressure_eigen(pm, 0.0); }) == ErrorCode::DomainError);
  CHECK(code_of([&] { pressure_eigen(pm, 2.5); }) == ErrorCode::DomainError);
}

TEST_CASE("pressure sums bracket the collocated pressure") {
  const PressureModel pm(cantor(), 12);
  const PressureBracket b = pressure_sums(*cantor(), 0.5, 4);
  CHECK(std::abs(b.lower - pressure_eigen(pm, 0.5)) < 1e-12);
  CHECK(std::abs(b.upper - pressure_eigen(pm, 0.5)) < 1e-12);

  auto ifs = presentation_ifs(2, 40);
  const PressureModel pres(ifs, 24);
  const double P = pressure_eigen(pres, 0.6);
  double prev_width = INFINITY;
  for (int n = 1; n <= 3; ++n) {
    const PressureBracket pb = pressure_sums(*ifs, 0.6, n);
    CAPTURE(n);
    CHECK(pb.lower <= P);
    CHECK(P <= pb.upper);
    CHECK(pb.upper - pb.lower < prev_width);
    prev_width = pb.upper - pb.lower;
  }
}

TEST_CASE("dimension of the ell = 2 attractor") {
  const DimensionResult& r = hd2();
  MESSAGE("hd(2) = " << r.hd << " in [" << r.hd_lo << ", " << r.hd_hi << "], K = " << r.K);
  CHECK(std::abs(r.hd - 0.538) < 0.003);
  CHECK(r.hd_lo <= r.hd);
  CHECK(r.hd <= r.hd_hi);
  CHECK(r.hd_hi - r.hd_lo < 0.01);
  CHECK(r.tail_bound < 1e-8);
  CHECK(std::abs(r.log_lambda_at_root) < 1e-9);
  CHECK(r.lambda_rho < 1.0);
}

TEST_CASE("Moran brackets tighten with depth") {
  auto ifs = presentation_ifs(2, 40);
  double prev = INFINITY;
  for (int n = 1; n <= 4; ++n) {
    const MoranBracket mb = moran_oracle(*ifs, n);
    CAPTURE(n);
    CHECK(mb.t_lo <= hd2().hd);
    CHECK(hd2().hd <= mb.t_hi);
    CHECK(mb.width() <= prev);
    prev = mb.width();
  }
  CHECK(prev < 0.01);
  CHECK(code_of([&] { moran_oracle(*ifs, 6); }) == ErrorCode::DomainError);
}

TEST_CASE("eigen root agrees with the Moran bracket at ell = 16") {
  DimensionOptions opts;
  opts.bracket_depth = 4;
  const DimensionResult r = hausdorff_dimension(testing::system(16), opts);
  CHECK(r.hd_lo <= r.hd);
  CHECK(r.hd <= r.hd_hi);
  CHECK(std::abs(r.hd - 0.5 * (r.hd_lo + r.hd_hi)) < 5e-3);
}

TEST_CASE("conformal measure") {
  const PressureModel pm(presentation_ifs(2, 40), 24);
  const double t = hd2().hd;
  for (int depth = 1; depth <= 3; ++depth) {
    const CylinderMeasure cm = cylinder_measure(pm, t, depth);
    CAPTURE(depth);
    CHECK(cm.weights.size() == static_cast<std::size_t>(std::pow(40, depth)));
    double sum = 0.0;
    for (double w : cm.weights) {
      CHECK(w > 0.0);
      sum += w;
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
    CHECK(cm.conformality_residual < 1e-6);
    CHECK(cm.additivity_residual < 1e-10);
  }
  CHECK(cylinder_measure(pm, t + 0.05, 2).conformality_residual > 1e-3);
  CHECK(code_of([&] { cylinder_measure(pm, t, 5); }) == ErrorCode::DomainError);
}

TEST_CASE("truncation and node stability") {
  DimensionOptions a, b;
  a.K = 40;
  b.K = 50;
  CHECK(std::abs(hausdorff_dimension(testing::system(2), a).hd -
                 hausdorff_dimension(testing::system(2), b).hd) < 1e-4);
  DimensionOptions c;
  c.nodes = 48;
  CHECK(std::abs(hausdorff_dimension(testing::system(2), c).hd - hd2().hd) < 1e-6);
}

TEST_CASE("threads do not change results") {
  DimensionOptions one, many;
  one.threads = 1;
  many.threads = 4;
  const DimensionResult a = hausdorff_dimension(testing::system(4), one);
  const DimensionResult b = hausdorff_dimension(testing::system(4), many);
  CHECK(a.hd == b.hd);
  CHECK(a.hd_lo == b.hd_lo);
  CHECK(a.hd_hi == b.hd_hi);
  const PressureModel p1(presentation_ifs(4, 40), 24, 1), p4(presentation_ifs(4, 40), 24, 4);
  CHECK(p1.operator_matrix(0.7) == p4.operator_matrix(0.7));
}

TEST_CASE("failure modes") {
  std::vector<AffineIfs::Map> fat;
  for (int i = 0; i < 10; ++i) fat.push_back({0.9, 0.01 * i});
  auto crowded = std::make_shared<AffineIfs>(Interval{0.0, 1.0}, fat);
  CHECK(code_of([&] { hausdorff_dimension(crowded); }) == ErrorCode::RootNotBracketed);

  const PressureModel pm(presentation_ifs(2, 40), 24);
  PowerOptions starved;
  starved.max_iter = 2;
  starved.rel_tol = 1e-16;
  CHECK(code_of([&] { pm.eigenpair(0.5, starved); }) == ErrorCode::PowerIterationStall);

  DimensionOptions capped;
  capped.tail_target = 1e-30;
  capped.K_cap = 60;
  CHECK(code_of([&] { hausdorff_dimension(testing::system(2), capped); }) == ErrorCode::TailTooFat);
}

TEST_CASE("sweep over ell") {
  const std::vector<int> ells{2, 4, 6, 8, 10, 12};
  SweepOptions opts;
  opts.solver = testing::test_solver_options();
  const DimensionReport rep = sweep(ells, opts);
  REQUIRE(rep.rows.size() == ells.size());
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const DimensionRow& r = rep.rows[i];
    CAPTURE(r.ell);
    CHECK(r.ok);
    CHECK(r.hd > 0.0);
    CHECK(r.hd < 1.0);
    CHECK(r.hd_lo <= r.hd);
    CHECK(r.hd <= r.hd_hi);
    if (i > 0) CHECK(r.hd > rep.rows[i - 1].hd);
  }
  CHECK(std::abs(rep.rows[0].hd - hd2().hd) < 1e-12);
  const auto dt = rep.delta_tau();
  REQUIRE(dt.size() == ells.size());
  CHECK(std::isnan(dt[0]));
  for (std::size_t i = 2; i < dt.size(); ++i) CHECK(dt[i] < dt[i - 1]);

  std::ostringstream out;
  rep.write_csv(out);
  CHECK(out.str().rfind("ell,hd,hd_lo,hd_hi,alpha,tau,K,Nc,tail_bound,runtime_s\n", 0) == 0);

  const std::vector<int> bad{4, 2};
  CHECK(code_of([&] { sweep(bad, opts); }) == ErrorCode::UsageError);
  const std::vector<int> odd{3};
  CHECK(code_of([&] { sweep(odd, opts); }) == ErrorCode::UsageError);
}
