#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "feigdim/dimension.hpp"
#include "feigdim/error.hpp"
#include "feigdim/fixed_point.hpp"
#include "feigdim/parabolic.hpp"
#include "feigdim/presentation.hpp"
#include "feigdim/unimodal_system.hpp"
#include "oracles/cascade_alpha.hpp"

#ifdef FEIGDIM_HAVE_CLI
#include "feigdim/cli.hpp"
#endif

using namespace feigdim;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

enum class Grade { hard, report, expected_failure };

int unexpected_failures = 0;

void verdict(int id, const std::string& name, bool pass, const std::string& detail,
             Grade grade = Grade::hard) {
  std::string tag;
  if (grade == Grade::report) tag = " (report-only)";
  if (grade == Grade::expected_failure && !pass) tag = " (known deviation)";
  std::printf("%s [%2d] %s%s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), tag.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass && grade == Grade::hard) ++unexpected_failures;
}

void guarded(int id, const std::string& name, auto&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    verdict(id, name, false, std::string("threw ") + e.what());
  }
}

struct Chain {
  std::vector<FixedPointMap> fps;
  std::vector<UnimodalSystem> systems;
  double solve_seconds = 0.0;
};

Chain solve_chain(int ell_max) {
  SolverOptions o;
  o.degree = 40;
  o.tol = 1e-10;
  Chain c;
  const auto t0 = Clock::now();
  c.fps.push_back(solve_fixed_point(Combinatorics::period_doubling(), 2, o));
  for (int ell = 4; ell <= ell_max; ell += 2) c.fps.push_back(continue_in_ell(c.fps.back(), ell, o));
  c.solve_seconds = seconds_since(t0);
  for (const auto& fp : c.fps) c.systems.emplace_back(fp);
  return c;
}

double dim_via_cli(double& runtime) {
  const auto t0 = Clock::now();
#ifdef FEIGDIM_HAVE_CLI
  const fs::path cache = fs::temp_directory_path() / "feigdim_acceptance_cache";
  fs::remove_all(cache);
  const std::string cache_s = cache.string();
  const char* argv[] = {"feigdim", "dim", "--ell", "2", "--p", "2", "--cache", cache_s.c_str()};
  std::ostringstream out, err;
  const int code = cli::run(8, argv, out, err);
  runtime = seconds_since(t0);
  if (code != 0) throw std::runtime_error("feigdim dim exited with " + std::to_string(code) + ": " + err.str());
  std::istringstream in(out.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  return std::stod(row.substr(row.find(',') + 1));
#else
  SolverOptions o;
  o.degree = 40;
  const UnimodalSystem sys(solve_fixed_point(Combinatorics::period_doubling(), 2, o));
  const double hd = hausdorff_dimension(sys).hd;
  runtime = seconds_since(t0);
  return hd;
#endif
}

}  // namespace

int main() {
  constexpr int kEllMax = 20;
  std::printf("feigdim acceptance run, ell = 2..%d\n", kEllMax);

  guarded(1, "dimension at ell = 2", [] {
    double runtime = 0.0;
    const double hd = dim_via_cli(runtime);
    verdict(1, "dimension at ell = 2", std::abs(hd - 0.538) <= 0.003 && runtime < 60.0,
            fmt("hd = %.10f (target 0.538 +- 0.003), cold-cache runtime %.2f s (< 60 s)", hd, runtime));
  });

  Chain chain;
  try {
    chain = solve_chain(kEllMax);
  } catch (const std::exception& e) {
    std::printf("FAIL fixed-point chain could not be solved: %s\n", e.what());
    return 1;
  }

  guarded(2, "fixed-point certification", [&] {
    double worst = 0.0;
    int worst_ell = 0;
    for (const auto& fp : chain.fps) {
      const double d = fixed_point_defect(fp, validation_grid_size(fp.degree()));
      if (d > worst) worst = d, worst_ell = fp.ell();
    }
    const auto cascade = oracle::cascade_alpha(13);
    const double oracle_alpha = static_cast<double>(cascade.alpha_extrapolated);
    const double alpha_err = std::abs(chain.fps.front().alpha() - oracle_alpha);
    verdict(2, "fixed-point certification",
            worst < 1e-10 && alpha_err < 1e-5 && chain.solve_seconds < 300.0,
            fmt("max defect %.2e at ell=%d (< 1e-10); alpha(2) = %.12f vs cascade %.12f, "
                "|diff| %.1e (< 1e-5); chain solve %.2f s (< 300 s)",
                worst, worst_ell, chain.fps.front().alpha(), oracle_alpha, alpha_err, chain.solve_seconds));
  });

  guarded(3, "orbit scaling G(c_j) = c_2j", [&] {
    double worst = 0.0;
    std::string per;
    for (int ell : {2, 8, 16}) {
      const UnimodalSystem& sys = chain.systems[ell / 2 - 1];
      const CriticalOrbit orb = sys.critical_orbit(64);
      double w = 0.0;
      for (int j = 0; j <= 32; ++j) w = std::max(w, std::abs(sys.eval_G(orb.c[j]) - orb.c[2 * j]));
      per += fmt(" ell=%d: %.1e", ell, w);
      worst = std::max(worst, w);
    }
    verdict(3, "orbit scaling G(c_j) = c_2j", worst < 1e-8, "max_{j<=32} error" + per + " (< 1e-8)");
  });

  guarded(4, "cylinder endpoints and disjointness", [&] {
    const PresentationSystem ps(chain.systems.front(), 10);
    const double xc = ps.system().x_c();
    double worst = 0.0;
    for (int k = 1; k <= 10; ++k) {
      const std::size_t s = std::size_t{1} << k;
      const double a = ps.orbit_point(s), b = ps.orbit_point(3 * s);
      const double lo = ps.psi({k, 1}, ps.c_p(), 0), hi = ps.psi({k, 1}, ps.c_2p(), 0);
      worst = std::max({worst, std::abs(lo - a), std::abs(hi - b)});
    }
    std::vector<Cylinder> cyl(ps.cylinders().begin(), ps.cylinders().end());
    std::sort(cyl.begin(), cyl.end(), [](auto& x, auto& y) { return x.lo_offset < y.lo_offset; });
    double min_gap = INFINITY;
    for (std::size_t i = 1; i < cyl.size(); ++i) min_gap = std::min(min_gap, cyl[i].lo(xc) - cyl[i - 1].hi(xc));
    verdict(4, "cylinder endpoints and disjointness", worst < 1e-8 && min_gap > 0.0,
            fmt("ell=2, k<=10: max endpoint error %.1e (< 1e-8), min gap %.3e (> 0)", worst, min_gap));
  });

  guarded(5, "multiplier law", [&] {
    double worst = 0.0;
    int worst_ell = 0;
    for (const auto& sys : chain.systems) {
      const double e = std::abs(std::abs(sys.eval_G(sys.x_c(), 1)) - std::pow(sys.tau(), -1.0 / sys.ell()));
      if (e >= worst) worst = e, worst_ell = sys.ell();
    }
    verdict(5, "multiplier law", worst < 1e-8,
            fmt("max ||G'(x_c)| - tau^(-1/ell)| = %.1e at ell=%d (< 1e-8)", worst, worst_ell));
  });

  guarded(6, "nonsymmetry identity and dominance", [&] {
    const PoincareDiagnostics diag = dominance_table(chain.systems);
    double worst_tilde = 0.0, worst_sq = 0.0;
    for (std::size_t i = 0; i < chain.systems.size(); ++i) {
      const UnimodalSystem& sys = chain.systems[i];
      const double lt = std::abs(sys.eval_G(sys.x_c(), 1));
      const double lhs = std::abs(2.0 * diag.rows[i].b);
      const double rhs = sys.nonsymmetry() * lt * (1.0 - lt);
      worst_tilde = std::max(worst_tilde, std::abs(lhs - rhs) / rhs);
      worst_sq = std::max(worst_sq, diag.rows[i].identity_rel_error);
    }
    const bool bounded = std::isfinite(diag.max_ratio) && diag.max_ratio < 10.0 * diag.max_N;
    verdict(6, "nonsymmetry identity and dominance", worst_tilde < 1e-5 && bounded,
            fmt("with lambda~ = |G'(x_c)|: max rel error %.3f (< 1e-5); with the multiplier of G^2 "
                "instead: %.1e; max |b|/|lambda-1| = %.4f (< 10 max N = %.3f)",
                worst_tilde, worst_sq, diag.max_ratio, 10.0 * diag.max_N),
            Grade::expected_failure);
  });

  std::vector<DimensionResult> dims;
  guarded(7, "eigen root inside depth-4 Moran bracket", [&] {
    DimensionOptions opts;
    opts.bracket_depth = 4;
    bool inside = true;
    std::string outside;
    for (const auto& sys : chain.systems) {
      dims.push_back(hausdorff_dimension(sys, opts));
      const DimensionResult& r = dims.back();
      if (!(r.hd_lo <= r.hd && r.hd <= r.hd_hi)) {
        inside = false;
        outside += fmt(" ell=%d", sys.ell());
      }
    }
    const double w2 = dims.front().hd_hi - dims.front().hd_lo;
    verdict(7, "eigen root inside depth-4 Moran bracket", inside && w2 < 0.01,
            fmt("all %zu ells inside%s; ell=2 bracket [%.6f, %.6f], width %.2e (< 0.01)", dims.size(),
                outside.empty() ? "" : (", outside:" + outside).c_str(), dims.front().hd_lo,
                dims.front().hd_hi, w2));
  });

  guarded(8, "truncation and node stability", [&] {
    const UnimodalSystem& sys = chain.systems.front();
    DimensionOptions base;
    base.K = default_kmax(2);
    DimensionOptions more_k = base, more_nodes = base;
    more_k.K = base.K + 10;
    more_nodes.nodes = 48;
    const double h0 = hausdorff_dimension(sys, base).hd;
    const double dk = std::abs(hausdorff_dimension(sys, more_k).hd - h0);
    const double dn = std::abs(hausdorff_dimension(sys, more_nodes).hd - h0);
    verdict(8, "truncation and node stability", dk < 1e-4 && dn < 1e-6,
            fmt("ell=2: |hd(K=%d) - hd(K=%d)| = %.1e (< 1e-4), |hd(Nc=24) - hd(Nc=48)| = %.1e (< 1e-6)",
                base.K, more_k.K, dk, dn));
  });

  guarded(9, "trend probes", [&] {
    if (dims.size() != chain.systems.size()) throw std::runtime_error("dimensions unavailable");
    bool increasing = true;
    for (std::size_t i = 1; i < dims.size(); ++i) increasing &= dims[i].hd > dims[i - 1].hd;
    const std::size_t n = chain.fps.size();
    auto dtau = [&](std::size_t i) { return std::abs(chain.fps[i].tau() - chain.fps[i - 1].tau()); };
    const bool dtau_down = dtau(n - 1) < dtau(n - 2) && dtau(n - 2) < dtau(n - 3);
    int crossed_at = 0;
    for (std::size_t i = 0; i < dims.size() && !crossed_at; ++i)
      if (dims[i].hd > 2.0 / 3.0) crossed_at = chain.fps[i].ell();
    const double slope = dims[n - 1].hd - dims[n - 2].hd;
    verdict(9, "trend probes", increasing && dtau_down,
            fmt("hd strictly increasing: %s (hd(%d) = %.6f); last three delta tau %.4g, %.4g, %.4g "
                "decreasing: %s; 2/3 level %s (first at ell=%d), last increment %.2e per step",
                increasing ? "yes" : "no", kEllMax, dims.back().hd, dtau(n - 3), dtau(n - 2), dtau(n - 1),
                dtau_down ? "yes" : "no", crossed_at ? "crossed" : "not crossed", crossed_at, slope),
            Grade::report);
  });

  guarded(10, "affine derivative scan", [&] {
    const std::vector<double> grid{1.0, 1.001, 1.01, 1.1};
    const AffineScanResult a = affine_derivative_scan(1.5, 2.0, grid, 100000);
    const AffineScanResult b = affine_derivative_scan(1.5, 2.0, grid, 200000);
    bool finite = std::isfinite(a.M);
    for (const auto& r : a.rows) finite &= std::isfinite(r.M) && r.M > 0.0;
    const double change = std::abs(b.M - a.M) / a.M;
    const double closed = std::pow(100000.0 / (2.0 + 100000.0), 1.5);
    const double unit_err = std::abs(a.rows.front().M - closed) / closed;
    verdict(10, "affine derivative scan", finite && change < 0.05 && unit_err < 1e-12,
            fmt("p = 3/2, w0 = 2: M = %.6f over sigma {1, 1.001, 1.01, 1.1}; i_max doubling change %.2e "
                "(< 5%%); sigma = 1 vs closed form rel. error %.1e",
                a.M, change, unit_err));
  });

  guarded(11, "conformal measure", [&] {
    const UnimodalSystem& sys = chain.systems.front();
    const double t = dims.empty() ? hausdorff_dimension(sys).hd : dims.front().hd;
    auto ps = std::make_shared<const PresentationSystem>(sys, default_kmax(2));
    const PressureModel pm(std::make_shared<PresentationIfs>(ps, default_kmax(2)), 24);
    const CylinderMeasure cm = cylinder_measure(pm, t, 3);
    verdict(11, "conformal measure", cm.conformality_residual < 1e-6,
            fmt("depth 3, t = %.10f: conformality residual %.1e (< 1e-6), additivity residual %.1e",
                t, cm.conformality_residual, cm.additivity_residual));
  });

  guarded(12, "self-similar toy", [&] {
    const DimensionResult r = hausdorff_dimension(std::make_shared<AffineIfs>(AffineIfs::middle_thirds()));
    const double exact = std::log(2.0) / std::log(3.0);
    verdict(12, "self-similar toy", std::abs(r.hd - exact) < 1e-10,
            fmt("middle thirds: %.15f vs log2/log3 = %.15f, |diff| %.1e (< 1e-10)", r.hd, exact,
                std::abs(r.hd - exact)));
  });

  std::printf("%s: %d unexpected failure(s)\n", unexpected_failures ? "FAILED" : "OK", unexpected_failures);
  return unexpected_failures ? 1 : 0;
}
