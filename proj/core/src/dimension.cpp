#include "feigdim/dimension.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "feigdim/error.hpp"
#include "feigdim/parallel.hpp"

namespace feigdim {

namespace {

void check_bracket(const DimensionResult& r, double root_tol) {
  if (!(r.hd > 0.0 && r.hd < 1.0)) {
    throw Error(ErrorCode::InvariantViolation, "dimension " + std::to_string(r.hd) + " outside (0,1)");
  }
  if (r.hd_lo > r.hd + root_tol || r.hd > r.hd_hi + root_tol) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "dimension %.12g outside Moran bracket [%.12g, %.12g]", r.hd,
                  r.hd_lo, r.hd_hi);
    throw Error(ErrorCode::InvariantViolation, buf);
  }
}

}  // namespace

DimensionResult hausdorff_dimension(const UnimodalSystem& sys, DimensionOptions opts) {
  int K = opts.K > 0 ? opts.K : default_kmax(sys.ell());
  DimensionResult r;
  for (;;) {
    if (K > opts.K_cap) {
      throw Error(ErrorCode::TailTooFat, "alphabet escalation exceeded K = " + std::to_string(opts.K_cap));
    }
    auto ps = std::make_shared<const PresentationSystem>(sys, K);
    const PressureModel pm(std::make_shared<PresentationIfs>(ps, K, opts.metric), opts.nodes,
                           opts.threads);
    r.hd = bowen_root(pm, opts.root_tol);
    r.log_lambda_at_root = pressure_eigen(pm, r.hd);
    r.tail_bound = ps->tail_bound(K, r.hd);
    r.K = K;
    r.nodes = opts.nodes;
    r.lambda_rho = ps->lambda_rho();
    r.presentation = ps;
    if (r.tail_bound < opts.tail_target) break;
    // Extrapolate the geometric tail to the K that reaches a quarter of the target.
    const auto& c = ps->cylinders();
    const double lr = r.hd * (c.back().log_sup_deriv - c[c.size() - 1 - (sys.p() - 1)].log_sup_deriv);
    const int need = K + static_cast<int>(std::ceil(std::log(opts.tail_target / (4.0 * r.tail_bound)) / lr));
    K = std::max(need, K + 10);
  }

  const int km = std::min(r.K, opts.moran_letters);
  const PresentationIfs bracket_ifs(r.presentation, km, opts.metric);
  const MoranBracket mb = moran_oracle(bracket_ifs, opts.bracket_depth);
  r.hd_lo = mb.t_lo;
  r.hd_hi = mb.t_hi;
  check_bracket(r, opts.root_tol);
  return r;
}

DimensionResult hausdorff_dimension(std::shared_ptr<const Ifs> ifs, DimensionOptions opts) {
  const PressureModel pm(ifs, opts.nodes, opts.threads);
  DimensionResult r;
  r.hd = bowen_root(pm, opts.root_tol);
  r.log_lambda_at_root = pressure_eigen(pm, r.hd);
  r.K = static_cast<int>(ifs->size());
  r.nodes = opts.nodes;
  r.tail_bound = ifs->tail_bound(r.hd);
  const MoranBracket mb = moran_oracle(*ifs, opts.bracket_depth);
  r.hd_lo = mb.t_lo;
  r.hd_hi = mb.t_hi;
  check_bracket(r, opts.root_tol);
  return r;
}

std::vector<double> DimensionReport::delta_tau() const {
  std::vector<double> out(rows.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].ok && rows[i - 1].ok && rows[i].ell == rows[i - 1].ell + 2) {
      out[i] = std::abs(rows[i].tau - rows[i - 1].tau);
    }
  }
  return out;
}

std::vector<double> DimensionReport::delta_hd() const {
  std::vector<double> out(rows.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].ok && rows[i - 1].ok && rows[i].ell == rows[i - 1].ell + 2) {
      out[i] = rows[i].hd - rows[i - 1].hd;
    }
  }
  return out;
}

void DimensionReport::write_csv(std::ostream& out) const {
  out << "ell,hd,hd_lo,hd_hi,alpha,tau,K,Nc,tail_bound,runtime_s\n";
  char buf[512];
  for (const DimensionRow& r : rows) {
    if (r.ok) {
      std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%.12g,%.12g,%.12g,%d,%zu,%.12g,%.12g\n", r.ell,
                    r.hd, r.hd_lo, r.hd_hi, r.alpha, r.tau, r.K, r.nodes, r.tail_bound, r.runtime_s);
    } else {
      std::snprintf(buf, sizeof buf, "%d,nan,nan,nan,nan,nan,%d,%zu,nan,%.12g\n", r.ell, r.K,
                    r.nodes, r.runtime_s);
    }
    out << buf;
  }
}

DimensionRow dimension_row(const FixedPointMap& fp, const DimensionOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  DimensionRow row;
  row.ell = fp.ell();
  row.alpha = fp.alpha();
  row.tau = fp.tau();
  row.nodes = opts.nodes;
  try {
    const UnimodalSystem sys(fp);
    const DimensionResult r = hausdorff_dimension(sys, opts);
    row.hd = r.hd;
    row.hd_lo = r.hd_lo;
    row.hd_hi = r.hd_hi;
    row.K = r.K;
    row.tail_bound = r.tail_bound;
    row.ok = true;
  } catch (const Error& e) {
    row.error = e.what();
  }
  row.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

FixedPointProvider continuation_provider(const SolverOptions& opts) {
  return [opts](int ell, const FixedPointMap* prev) {
    const Combinatorics comb = Combinatorics::period_doubling();
    if (prev == nullptr || prev->ell() >= ell) {
      FixedPointMap fp = solve_fixed_point(comb, 2, opts);
      for (int l = 4; l <= ell; l += 2) fp = continue_in_ell(fp, l, opts);
      return fp;
    }
    FixedPointMap fp = *prev;
    for (int l = prev->ell() + 2; l <= ell; l += 2) fp = continue_in_ell(fp, l, opts);
    return fp;
  };
}

DimensionReport sweep(std::span<const int> ells, const SweepOptions& opts, FixedPointProvider provider) {
  for (std::size_t i = 0; i < ells.size(); ++i) {
    if (ells[i] < 2 || ells[i] % 2 != 0 || (i > 0 && ells[i] <= ells[i - 1])) {
      throw Error(ErrorCode::UsageError, "sweep needs even, strictly ascending ell values");
    }
  }
  if (!provider) provider = continuation_provider(opts.solver);

  DimensionReport report;
  report.rows.resize(ells.size());
  std::vector<std::optional<FixedPointMap>> fps(ells.size());
  const FixedPointMap* prev = nullptr;
  for (std::size_t i = 0; i < ells.size(); ++i) {
    report.rows[i].ell = ells[i];
    report.rows[i].nodes = opts.dim.nodes;
    try {
      fps[i] = provider(ells[i], prev);
      prev = &*fps[i];
    } catch (const Error& e) {
      report.rows[i].error = e.what();
    }
  }
  parallel_for(
      ells.size(),
      [&](std::size_t i) {
        if (fps[i]) report.rows[i] = dimension_row(*fps[i], opts.dim);
      },
      opts.threads);
  return report;
}

}  // namespace feigdim
