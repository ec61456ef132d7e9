#include "feigdim/ifs.hpp"

#include <cmath>
#include <string>

#include "feigdim/error.hpp"

namespace feigdim {

AffineIfs::AffineIfs(Interval domain, std::vector<Map> maps)
    : domain_(domain), maps_(std::move(maps)) {
  if (maps_.empty()) throw Error(ErrorCode::DomainError, "affine IFS needs at least one map");
  for (const Map& m : maps_) {
    if (!(std::abs(m.ratio) > 0.0 && std::abs(m.ratio) < 1.0)) {
      throw Error(ErrorCode::NoContraction, "affine map ratio must lie in (0,1) in modulus");
    }
  }
}

AffineIfs AffineIfs::middle_thirds() {
  return AffineIfs({0.0, 1.0}, {{1.0 / 3.0, 0.0}, {1.0 / 3.0, 2.0 / 3.0}});
}

MapEval AffineIfs::apply(std::size_t letter, double x) const {
  if (letter >= maps_.size()) {
    throw Error(ErrorCode::IndexOutOfAlphabet, "letter " + std::to_string(letter));
  }
  const Map& m = maps_[letter];
  return {m.ratio * x + m.shift, std::log(std::abs(m.ratio))};
}

PresentationIfs::PresentationIfs(std::shared_ptr<const PresentationSystem> ps, int K,
                                 BracketMetric metric)
    : ps_(std::move(ps)), K_(K), metric_(metric) {
  if (K_ < 1 || K_ > ps_->kmax()) {
    throw Error(ErrorCode::DomainError, "truncation K must lie in [1, Kmax]");
  }
  if (metric_ == BracketMetric::root) {
    log_metric_spread_ = std::abs(log_metric(ps_->I().lo) - log_metric(ps_->I().hi));
  }
}

std::size_t PresentationIfs::size() const {
  return static_cast<std::size_t>(K_) * static_cast<std::size_t>(ps_->p() - 1);
}

MapEval PresentationIfs::apply(std::size_t letter, double x) const {
  if (letter >= size()) throw Error(ErrorCode::IndexOutOfAlphabet, "letter " + std::to_string(letter));
  const PsiEval e = ps_->psi(ps_->letter_at(letter), x);
  return {e.value, e.log_abs_deriv};
}

double PresentationIfs::log_metric(double x) const {
  if (metric_ == BracketMetric::euclidean) return 0.0;
  const double ell = ps_->system().ell();
  return (1.0 / ell - 1.0) * std::log(x);
}

double PresentationIfs::tail_bound(double t) const {
  double total = 0.0;
  for (int k = K_ + 1; k <= ps_->kmax(); ++k) {
    for (int m = 1; m <= ps_->p() - 1; ++m) {
      total += std::exp(t * ps_->cylinder({k, m}).log_sup_deriv);
    }
  }
  total += ps_->tail_bound(ps_->kmax(), t);
  return total * std::exp(t * log_metric_spread_);
}

}  // namespace feigdim
