#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "feigdim/fixed_point.hpp"
#include "feigdim/ifs.hpp"

namespace feigdim {

struct Eigenpair {
  double lambda = 0.0;
  std::vector<double> right;  // eigenfunction at the nodes, sum 1
  std::vector<double> left;   // eigenfunctional weights, sum 1
  int iterations = 0;
};

struct PowerOptions {
  double rel_tol = 1e-12;
  int max_iter = 20000;
};

/// Weighted composition operator (L_t f)(x) = sum_i |phi_i'(x)|^t f(phi_i(x)),
/// collocated on Chebyshev points of the domain with barycentric interpolation.
class PressureModel {
 public:
  PressureModel(std::shared_ptr<const Ifs> ifs, std::size_t nodes, unsigned threads = 0);

  const Ifs& ifs() const noexcept { return *ifs_; }
  std::shared_ptr<const Ifs> ifs_ptr() const noexcept { return ifs_; }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Row-major N x N matrix of L_t.
  std::vector<double> operator_matrix(double t) const;
  Eigenpair eigenpair(double t, PowerOptions opts = {}) const;
  /// Same as eigenpair but only the right iteration; cheaper.
  double leading_eigenvalue(double t, PowerOptions opts = {}) const;

 private:
  std::shared_ptr<const Ifs> ifs_;
  std::vector<double> nodes_;
  std::size_t letters_ = 0;
  std::vector<double> log_deriv_;  // [node][letter]
  std::vector<double> interp_;     // [node][letter][node] Lagrange rows at the image point
};

/// log lambda(t).
double pressure_eigen(const PressureModel& pm, double t, PowerOptions opts = {});

struct PressureBracket {
  double lower = 0.0;
  double upper = 0.0;
};

/// (1/n) log sum_{|w|=n} (inf or sup |D phi_w|)^t over the IFS alphabet.
PressureBracket pressure_sums(const Ifs& ifs, double t, int n);

struct MoranBracket {
  double t_lo = 0.0;
  double t_hi = 0.0;
  double width() const noexcept { return t_hi - t_lo; }
};

/// Roots of sum (inf |D phi_w|)^t = 1 and sum (sup |D phi_w|)^t + tail = 1
/// over words of length n; the tail of omitted letters widens t_hi.
MoranBracket moran_oracle(const Ifs& ifs, int n);

struct DimensionOptions {
  int K = 0;  // 0: default_kmax(ell)
  std::size_t nodes = 24;
  double root_tol = 1e-10;
  int bracket_depth = 3;
  int moran_letters = 40;
  double tail_target = 1e-8;
  int K_cap = 4000;
  BracketMetric metric = BracketMetric::root;
  unsigned threads = 0;
};

struct DimensionResult {
  double hd = 0.0;
  double hd_lo = 0.0;
  double hd_hi = 0.0;
  int K = 0;
  std::size_t nodes = 0;
  double tail_bound = 0.0;
  double log_lambda_at_root = 0.0;
  double lambda_rho = 0.0;
  std::shared_ptr<const PresentationSystem> presentation;
};

/// Bowen root of the collocated pressure, with K escalated until the tail at
/// the root is below tail_target, bracketed by moran_oracle at bracket_depth.
DimensionResult hausdorff_dimension(const UnimodalSystem& sys, DimensionOptions opts = {});
/// Same for an arbitrary finite IFS (no truncation tail).
DimensionResult hausdorff_dimension(std::shared_ptr<const Ifs> ifs, DimensionOptions opts = {});

/// Root of log lambda(t) = 0 on (0, 2); RootNotBracketed unless log lambda
/// changes sign exactly once on the probe grid 0.1, 0.2, ..., 1.0 (or 2.0).
double bowen_root(const PressureModel& pm, double root_tol);

struct CylinderMeasure {
  int depth = 0;
  std::size_t letters = 0;
  double t = 0.0;
  double lambda = 0.0;
  std::vector<double> weights;  // index sum_i w_i letters^{depth-i}, w_1 outermost
  double raw_mass = 0.0;        // sum of weights before normalization
  /// max over cylinders of |m(phi_u I) - sum_i m(phi_{u.i} I)| and of the outer-letter
  /// chain rule, with m(phi_w I) = lambda^{-|w|} int |phi_w'|^t dm; relative to the total mass.
  double conformality_residual = 0.0;
  /// |sum_w m(phi_w I) - m(I)| / m(I) over all words of the given depth.
  double additivity_residual = 0.0;
};

CylinderMeasure cylinder_measure(const PressureModel& pm, double t_star, int depth);

struct DimensionRow {
  int ell = 0;
  bool ok = false;
  std::string error;
  double hd = 0.0, hd_lo = 0.0, hd_hi = 0.0;
  double alpha = 0.0, tau = 0.0;
  int K = 0;
  std::size_t nodes = 0;
  double tail_bound = 0.0;
  double runtime_s = 0.0;
};

struct DimensionReport {
  std::vector<DimensionRow> rows;

  /// Aligned with rows: |tau(ell) - tau(ell-2)| when both rows succeeded, NaN otherwise.
  std::vector<double> delta_tau() const;
  std::vector<double> delta_hd() const;
  /// Header ell,hd,hd_lo,hd_hi,alpha,tau,K,Nc,tail_bound,runtime_s; 12 significant digits.
  void write_csv(std::ostream& out) const;
};

DimensionRow dimension_row(const FixedPointMap& fp, const DimensionOptions& opts);

/// Supplies the fixed point for ell given the previous one in the chain (null for the first).
using FixedPointProvider = std::function<FixedPointMap(int ell, const FixedPointMap* prev)>;

struct SweepOptions {
  SolverOptions solver;
  DimensionOptions dim;
  unsigned threads = 0;
};

/// Default provider: solve at ell = 2, then continue in steps of 2.
FixedPointProvider continuation_provider(const SolverOptions& opts);

DimensionReport sweep(std::span<const int> ells, const SweepOptions& opts,
                      FixedPointProvider provider = {});

}  // namespace feigdim
