#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "feigdim/chebyshev.hpp"

namespace feigdim {

enum class Orientation { reversing, preserving };

std::string_view to_string(Orientation o) noexcept;

/// Stationary combinatorics of the renormalization. Only period doubling
/// (p = 2, orientation reversing) is supported; anything else is rejected.
struct Combinatorics {
  int p = 2;
  Orientation orientation = Orientation::reversing;

  void validate() const;
  static Combinatorics period_doubling() { return {}; }
};

enum class Precision { standard, extended };

/// Starting point for Newton: Chebyshev coefficients of E in u on [0, 1] and alpha.
struct FixedPointSeed {
  std::vector<double> coeffs;
  double alpha = 0.0;
  std::string provenance;
};

struct SolverOptions {
  std::size_t degree = 30;
  double tol = 1e-10;
  int max_iter = 60;
  std::optional<FixedPointSeed> initial_guess;
  Precision precision = Precision::standard;
};

struct SolverMeta {
  int iterations = 0;
  double tol = 0.0;
  std::string timestamp;
  std::string seed;
  Precision precision = Precision::standard;
};

/// Solution (E, alpha) of alpha g^p(x) = g(alpha x) with g(x) = E(|x|^ell),
/// E(0) = 1. Immutable once constructed.
class FixedPointMap {
 public:
  FixedPointMap(Combinatorics comb, int ell, double alpha, std::vector<double> coeffs,
                double residual, SolverMeta meta);

  const Combinatorics& combinatorics() const noexcept { return comb_; }
  int ell() const noexcept { return ell_; }
  double alpha() const noexcept { return alpha_; }
  /// tau = |alpha|^ell, the scaling of the conjugate map H.
  double tau() const noexcept { return tau_; }
  std::size_t degree() const noexcept { return E_.degree(); }
  const std::vector<double>& coeffs() const noexcept { return E_.coeffs(); }
  double residual() const noexcept { return residual_; }
  const SolverMeta& meta() const noexcept { return meta_; }

  /// E and its first three u-derivatives.
  const ChebSeries& E() const noexcept { return E_; }
  const ChebSeries& dE() const noexcept { return dE_; }
  const ChebSeries& d2E() const noexcept { return d2E_; }
  const ChebSeries& d3E() const noexcept { return d3E_; }

 private:
  Combinatorics comb_;
  int ell_;
  double alpha_;
  double tau_;
  ChebSeries E_, dE_, d2E_, d3E_;
  double residual_;
  SolverMeta meta_;
};

/// Built-in ell = 2 seed: E(u) = 1 - 1.52 u + 0.10 u^2, alpha = -2.5.
FixedPointSeed default_seed(std::size_t degree);

FixedPointMap solve_fixed_point(const Combinatorics& comb, int ell, const SolverOptions& opts);

/// g(x) = E(|x|^ell) or one of its first two derivatives; |x| <= 1.
double evaluate_g(const FixedPointMap& fp, double x, int deriv_order = 0);

/// One continuation step ell -> ell + 2 seeded by prev. On NoConvergence the
/// degree is escalated once (doubled, at least to 60) before giving up.
FixedPointMap continue_in_ell(const FixedPointMap& prev, int next_ell, SolverOptions opts);

/// sup |alpha g^p(x) - g(alpha x)| over `points` equispaced x in [-1/|alpha|, 1/|alpha|].
double fixed_point_defect(const FixedPointMap& fp, std::size_t points);

/// Default validation grid: max(512, 4 * degree) points.
std::size_t validation_grid_size(std::size_t degree);

/// Checks E(0) = 1, E' sign-constant on [0,1], alpha sign/magnitude and
/// residual < tol; throws InvariantViolation otherwise.
void validate_fixed_point(const FixedPointMap& fp, double tol);

// -- cache files ------------------------------------------------------------

inline constexpr std::string_view kFixedPointSchema = "feigdim-fp-1";

std::string to_json(const FixedPointMap& fp);
FixedPointMap from_json(std::string_view text);

void save_fixed_point(const FixedPointMap& fp, const std::filesystem::path& path);
FixedPointMap load_fixed_point(const std::filesystem::path& path);

/// fp_p{p}_l{ell}_d{degree}.json
std::string cache_file_name(int p, int ell, std::size_t degree);

}  // namespace feigdim
