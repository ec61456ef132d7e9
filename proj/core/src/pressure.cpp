#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "feigdim/chebyshev.hpp"
#include "feigdim/dimension.hpp"
#include "feigdim/error.hpp"
#include "feigdim/parallel.hpp"
#include "feigdim/roots.hpp"

namespace feigdim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> barycentric_weights(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double s = std::sin((2.0 * static_cast<double>(j) + 1.0) * std::numbers::pi /
                              (2.0 * static_cast<double>(n)));
    w[j] = (j % 2 == 0) ? s : -s;
  }
  return w;
}

void lagrange_row(const std::vector<double>& nodes, const std::vector<double>& bw, double y,
                  double* out) {
  const std::size_t n = nodes.size();
  for (std::size_t j = 0; j < n; ++j) {
    if (y == nodes[j]) {
      std::fill(out, out + n, 0.0);
      out[j] = 1.0;
      return;
    }
  }
  double denom = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = bw[j] / (y - nodes[j]);
    denom += out[j];
  }
  for (std::size_t j = 0; j < n; ++j) out[j] /= denom;
}

double log_sum_exp(const std::vector<double>& v, double t) {
  double mx = -kInf;
  for (double x : v) mx = std::max(mx, t * x);
  if (mx == -kInf) return -kInf;
  double s = 0.0;
  for (double x : v) s += std::exp(t * x - mx);
  return mx + std::log(s);
}

// Power iteration for a positive-dominant N x N row-major matrix.
double power_iterate(const std::vector<double>& A, std::size_t n, bool transpose,
                     std::vector<double>& v, const PowerOptions& opts, int& iterations) {
  v.assign(n, 1.0 / static_cast<double>(n));
  std::vector<double> w(n);
  double lambda = 0.0;
  for (int it = 1; it <= opts.max_iter; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      if (transpose) {
        for (std::size_t j = 0; j < n; ++j) s += A[j * n + i] * v[j];
      } else {
        for (std::size_t j = 0; j < n; ++j) s += A[i * n + j] * v[j];
      }
      w[i] = s;
    }
    double sum = 0.0;
    for (double x : w) sum += x;
    if (!std::isfinite(sum) || sum <= 0.0) {
      throw Error(ErrorCode::PowerIterationStall, "power iteration lost positivity");
    }
    double change = 0.0, vmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] /= sum;
      change = std::max(change, std::abs(w[i] - v[i]));
      vmax = std::max(vmax, std::abs(w[i]));
    }
    const double prev = lambda;
    lambda = sum;  // v sums to 1
    v.swap(w);
    if (it > 1 && std::abs(lambda - prev) <= opts.rel_tol * lambda && change <= 1e-10 * vmax) {
      iterations = it;
      return lambda;
    }
  }
  throw Error(ErrorCode::PowerIterationStall,
              "power iteration did not converge in " + std::to_string(opts.max_iter) + " steps");
}

// Bracketing data for every word of length n: log inf / log sup of D_sigma phi_w on the domain.
struct WordTable {
  std::size_t letters = 0;
  int depth = 0;
  std::vector<double> log_inf, log_sup;
  std::vector<double> level1_sup;
};

constexpr std::size_t kWordBudget = 30'000'000;
constexpr std::size_t kLevel1Samples = 33;

WordTable build_word_table(const Ifs& ifs, int n) {
  if (n < 1 || n > 6) throw Error(ErrorCode::DomainError, "word depth must lie in 1..6");
  const std::size_t L = ifs.size();
  std::size_t count = 1;
  for (int i = 0; i < n; ++i) {
    if (count > kWordBudget / L) {
      throw Error(ErrorCode::DomainError, "too many words: reduce the alphabet or the depth");
    }
    count *= L;
  }
  const Interval D = ifs.domain();
  auto dsigma = [&](std::size_t j, double x, double& image) {
    const MapEval e = ifs.apply(j, x);
    image = e.value;
    return e.log_deriv + ifs.log_metric(e.value) - ifs.log_metric(x);
  };

  WordTable tab;
  tab.letters = L;
  tab.depth = n;
  std::vector<double> inf(L), sup(L), lo(L), hi(L);
  for (std::size_t j = 0; j < L; ++j) {
    inf[j] = kInf;
    sup[j] = -kInf;
    for (std::size_t s = 0; s < kLevel1Samples; ++s) {
      const double x =
          s + 1 == kLevel1Samples ? D.hi : D.lo + D.length() * static_cast<double>(s) / (kLevel1Samples - 1);
      double img = 0.0;
      const double d = dsigma(j, x, img);
      inf[j] = std::min(inf[j], d);
      sup[j] = std::max(sup[j], d);
    }
    const double a = ifs.apply(j, D.lo).value, b = ifs.apply(j, D.hi).value;
    lo[j] = std::min(a, b);
    hi[j] = std::max(a, b);
  }
  tab.level1_sup = sup;

  for (int level = 2; level <= n; ++level) {
    const std::size_t prev = inf.size();
    std::vector<double> ninf(prev * L), nsup(prev * L);
    const bool keep = level < n;
    std::vector<double> nlo(keep ? prev * L : 0), nhi(keep ? prev * L : 0);
    const bool use_mid = level == 2;
    parallel_for(L, [&](std::size_t j) {
      for (std::size_t v = 0; v < prev; ++v) {
        double ia = 0.0, ib = 0.0, im = 0.0;
        const double da = dsigma(j, lo[v], ia);
        const double db = dsigma(j, hi[v], ib);
        double dmin = std::min(da, db), dmax = std::max(da, db);
        if (use_mid) {
          const double dm = dsigma(j, 0.5 * (lo[v] + hi[v]), im);
          dmin = std::min(dmin, dm);
          dmax = std::max(dmax, dm);
        }
        const std::size_t w = j * prev + v;
        ninf[w] = inf[v] + dmin;
        nsup[w] = sup[v] + dmax;
        if (keep) {
          nlo[w] = std::min(ia, ib);
          nhi[w] = std::max(ia, ib);
        }
      }
    });
    inf.swap(ninf);
    sup.swap(nsup);
    lo.swap(nlo);
    hi.swap(nhi);
  }
  tab.log_inf = std::move(inf);
  tab.log_sup = std::move(sup);
  return tab;
}

}  // namespace

PressureModel::PressureModel(std::shared_ptr<const Ifs> ifs, std::size_t nodes, unsigned threads)
    : ifs_(std::move(ifs)) {
  if (nodes < 2) throw Error(ErrorCode::DomainError, "need at least 2 collocation nodes");
  const Interval D = ifs_->domain();
  nodes_ = chebyshev_points<double>(nodes, D.lo, D.hi);
  letters_ = ifs_->size();
  const auto bw = barycentric_weights(nodes);
  log_deriv_.assign(nodes * letters_, 0.0);
  interp_.assign(nodes * letters_ * nodes, 0.0);
  parallel_for(
      nodes,
      [&](std::size_t i) {
        for (std::size_t j = 0; j < letters_; ++j) {
          const MapEval e = ifs_->apply(j, nodes_[i]);
          log_deriv_[i * letters_ + j] = e.log_deriv;
          lagrange_row(nodes_, bw, e.value, &interp_[(i * letters_ + j) * nodes]);
        }
      },
      threads);
}

std::vector<double> PressureModel::operator_matrix(double t) const {
  const std::size_t n = nodes_.size();
  std::vector<double> A(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double* row = &A[i * n];
    for (std::size_t j = 0; j < letters_; ++j) {
      const double w = std::exp(t * log_deriv_[i * letters_ + j]);
      const double* li = &interp_[(i * letters_ + j) * n];
      for (std::size_t c = 0; c < n; ++c) row[c] += w * li[c];
    }
  }
  return A;
}

double PressureModel::leading_eigenvalue(double t, PowerOptions opts) const {
  const auto A = operator_matrix(t);
  std::vector<double> v;
  int it = 0;
  return power_iterate(A, nodes_.size(), false, v, opts, it);
}

Eigenpair PressureModel::eigenpair(double t, PowerOptions opts) const {
  const auto A = operator_matrix(t);
  Eigenpair ep;
  int it_r = 0, it_l = 0;
  ep.lambda = power_iterate(A, nodes_.size(), false, ep.right, opts, it_r);
  const double lambda_left = power_iterate(A, nodes_.size(), true, ep.left, opts, it_l);
  if (std::abs(lambda_left - ep.lambda) > 1e-9 * ep.lambda) {
    throw Error(ErrorCode::PowerIterationStall, "left and right leading eigenvalues disagree");
  }
  ep.iterations = std::max(it_r, it_l);
  return ep;
}

double pressure_eigen(const PressureModel& pm, double t, PowerOptions opts) {
  if (!(t > 0.0 && t <= 2.0)) throw Error(ErrorCode::DomainError, "pressure needs t in (0, 2]");
  return std::log(pm.leading_eigenvalue(t, opts));
}

double bowen_root(const PressureModel& pm, double root_tol) {
  std::vector<double> grid, vals;
  for (int i = 1; i <= 20; ++i) {
    const double t = 0.1 * i;
    grid.push_back(t);
    vals.push_back(pressure_eigen(pm, t));
    if (i >= 10 && vals.back() < 0.0) break;
  }
  int changes = 0;
  std::size_t at = 0;
  for (std::size_t i = 1; i < vals.size(); ++i) {
    if (!(vals[i] < vals[i - 1])) {
      throw Error(ErrorCode::InvariantViolation, "log lambda(t) not decreasing on the probe grid");
    }
    if ((vals[i] < 0.0) != (vals[i - 1] < 0.0)) {
      ++changes;
      at = i;
    }
  }
  if (vals.front() < 0.0) {
    // Root below the first probe.
    return bracketed_root([&](double t) { return pressure_eigen(pm, t); }, 1e-3, grid.front(),
                          root_tol);
  }
  if (changes != 1) {
    throw Error(ErrorCode::RootNotBracketed,
                "log lambda(t) changes sign " + std::to_string(changes) + " times on the probe grid");
  }
  return bracketed_root([&](double t) { return pressure_eigen(pm, t); }, grid[at - 1], grid[at],
                        root_tol);
}

PressureBracket pressure_sums(const Ifs& ifs, double t, int n) {
  if (!(t > 0.0)) throw Error(ErrorCode::DomainError, "pressure needs t > 0");
  const WordTable tab = build_word_table(ifs, n);
  return {log_sum_exp(tab.log_inf, t) / n, log_sum_exp(tab.log_sup, t) / n};
}

MoranBracket moran_oracle(const Ifs& ifs, int n) {
  if (n > 5) throw Error(ErrorCode::DomainError, "Moran depth must be at most 5");
  const WordTable tab = build_word_table(ifs, n);
  auto lower = [&](double t) { return log_sum_exp(tab.log_inf, t); };
  auto upper = [&](double t) {
    const double s = log_sum_exp(tab.log_sup, t);
    const double tail = ifs.tail_bound(t);
    if (tail == 0.0) return s;
    const double lp1 = log_sum_exp(tab.level1_sup, t);
    // (P1 + T)^n - P1^n in logs.
    const double extra = n * lp1 + std::log(std::expm1(n * std::log1p(tail * std::exp(-lp1))));
    const double mx = std::max(s, extra);
    return mx + std::log(std::exp(s - mx) + std::exp(extra - mx));
  };
  auto solve = [&](auto&& f) {
    double hi = 2.0;
    while (f(hi) > 0.0 && hi < 64.0) hi *= 2.0;
    return bracketed_root(f, 1e-4, hi, 1e-13);
  };
  MoranBracket out;
  out.t_lo = solve(lower);
  out.t_hi = solve(upper);
  return out;
}

CylinderMeasure cylinder_measure(const PressureModel& pm, double t_star, int depth) {
  if (depth < 1 || depth > 4) throw Error(ErrorCode::DomainError, "measure depth must lie in 1..4");
  const Ifs& ifs = pm.ifs();
  const std::size_t L = ifs.size(), N = pm.size();
  std::size_t count = 1;
  for (int i = 0; i < depth; ++i) count *= L;
  if (count * N > kWordBudget) {
    throw Error(ErrorCode::DomainError, "too many cylinders for the measure table");
  }

  const Eigenpair ep = pm.eigenpair(t_star);
  for (double h : ep.right) {
    if (!(h > 0.0)) throw Error(ErrorCode::EigenvectorSignFailure, "eigenfunction not positive");
  }
  const double lambda = ep.lambda;
  const auto& mu = ep.left;
  const auto& x = pm.nodes();

  // Words are grown by prepending the outer letter: index(j.v) = j * L^{level-1} + index(v).
  std::vector<double> pos(x.begin(), x.end()), logd(N, 0.0);
  std::size_t words = 1;
  std::vector<double> prev_weights;  // weights of all words one letter shorter
  auto weights_of = [&](const std::vector<double>& ld, std::size_t nw, double scale) {
    std::vector<double> W(nw);
    for (std::size_t w = 0; w < nw; ++w) {
      double s = 0.0;
      for (std::size_t j = 0; j < N; ++j) s += mu[j] * std::exp(t_star * ld[w * N + j]);
      W[w] = s * scale;
    }
    return W;
  };

  std::vector<double> W;
  CylinderMeasure out;
  out.depth = depth;
  out.letters = L;
  out.t = t_star;
  out.lambda = lambda;
  for (int level = 1; level <= depth; ++level) {
    std::vector<double> npos(words * L * N), nlogd(words * L * N);
    std::vector<double> conf(level == depth ? words * L : 0);
    for (std::size_t j = 0; j < L; ++j) {
      for (std::size_t v = 0; v < words; ++v) {
        const std::size_t w = j * words + v;
        double rhs = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
          const MapEval e = ifs.apply(j, pos[v * N + i]);
          npos[w * N + i] = e.value;
          nlogd[w * N + i] = logd[v * N + i] + e.log_deriv;
          if (level == depth) {
            // Quadrature of |D phi_j|^t against the discrete measure on cyl(v).
            rhs += mu[i] * std::exp(t_star * logd[v * N + i]) * std::exp(t_star * e.log_deriv);
          }
        }
        if (level == depth) conf[w] = rhs * std::pow(lambda, -(level - 1));
      }
    }
    if (level == depth) {
      prev_weights = weights_of(logd, words, std::pow(lambda, -(level - 1)));
      W = weights_of(nlogd, words * L, std::pow(lambda, -level));
      for (std::size_t w = 0; w < W.size(); ++w) {
        out.conformality_residual = std::max(out.conformality_residual, std::abs(W[w] - conf[w]));
      }
    }
    pos.swap(npos);
    logd.swap(nlogd);
    words *= L;
  }

  // Appending an inner letter partitions cyl(u): sum_i W(u.i) = W(u), u of length depth-1.
  for (std::size_t u = 0; u < prev_weights.size(); ++u) {
    double s = 0.0;
    for (std::size_t i = 0; i < L; ++i) s += W[u * L + i];
    out.additivity_residual = std::max(out.additivity_residual, std::abs(s - prev_weights[u]));
  }
  out.conformality_residual = std::max(out.conformality_residual, out.additivity_residual);
  for (double w : W) {
    if (!(w > 0.0)) throw Error(ErrorCode::EigenvectorSignFailure, "non-positive cylinder weight");
  }
  out.raw_mass = 0.0;
  for (double w : W) out.raw_mass += w;
  double total = 0.0;  // m(I)
  for (double m : mu) total += m;
  out.additivity_residual = std::abs(out.raw_mass - total) / total;
  for (double& w : W) w /= out.raw_mass;
  out.conformality_residual /= out.raw_mass;
  out.weights = std::move(W);
  return out;
}

}  // namespace feigdim
