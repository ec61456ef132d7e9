#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "feigdim/presentation.hpp"

namespace feigdim {

struct MapEval {
  double value = 0.0;
  double log_deriv = 0.0;  // log |phi'(x)|
};

/// A finite conformal IFS on an interval, as seen by the dimension engine.
class Ifs {
 public:
  virtual ~Ifs() = default;

  virtual Interval domain() const = 0;
  virtual std::size_t size() const = 0;
  virtual MapEval apply(std::size_t letter, double x) const = 0;

  /// log sigma(x) for the metric sigma(x)|dx| in which word derivatives are
  /// bracketed. Any metric comparable to |dx| on the domain gives the same pressure.
  virtual double log_metric(double x) const {
    (void)x;
    return 0.0;
  }
  /// Bound on sum over omitted letters of sup |D phi|^t, measured in log_metric.
  virtual double tail_bound(double t) const {
    (void)t;
    return 0.0;
  }
};

/// x -> ratio * x + shift on a fixed domain; the self-similar test harness.
class AffineIfs final : public Ifs {
 public:
  struct Map {
    double ratio;
    double shift;
  };

  AffineIfs(Interval domain, std::vector<Map> maps);
  /// Middle-thirds Cantor set on [0,1].
  static AffineIfs middle_thirds();

  Interval domain() const override { return domain_; }
  std::size_t size() const override { return maps_.size(); }
  MapEval apply(std::size_t letter, double x) const override;

 private:
  Interval domain_;
  std::vector<Map> maps_;
};

enum class BracketMetric {
  euclidean,
  root,  // sigma(x) = x^{1/ell - 1}, the |dE| coordinate of the conjugacy
};

/// The presentation system truncated at k <= K (all m).
class PresentationIfs final : public Ifs {
 public:
  PresentationIfs(std::shared_ptr<const PresentationSystem> ps, int K,
                  BracketMetric metric = BracketMetric::root);

  const PresentationSystem& presentation() const noexcept { return *ps_; }
  int K() const noexcept { return K_; }

  Interval domain() const override { return ps_->I(); }
  std::size_t size() const override;
  MapEval apply(std::size_t letter, double x) const override;
  double log_metric(double x) const override;
  /// Letters K < k <= Kmax summed exactly, beyond Kmax by the geometric bound.
  double tail_bound(double t) const override;

 private:
  std::shared_ptr<const PresentationSystem> ps_;
  int K_;
  BracketMetric metric_;
  double log_metric_spread_ = 0.0;  // log(sup sigma / inf sigma) over I
};

}  // namespace feigdim
