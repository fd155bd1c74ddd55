#pragma once

#include <memory>
#include <span>
#include <vector>

#include "expkant/core_model.hpp"
#include "expkant/quadrature.hpp"

namespace expkant {

struct TruncationPolicy {
  enum class Mode {
    automatic,  // full support for compact kernels, tolerance(1e-10) otherwise
    window,     // |t_k - w ln x| <= gamma w
    tolerance,  // gamma from the tail bound so that it is <= epsilon
  };

  Mode mode = Mode::automatic;
  double gamma = 0.0;
  double epsilon = 1e-10;
  double beta = 0.0;  // moment order of the tail bound; 0 picks a default
  // Hard cap on retained terms; the reported bound reflects the cap.
  Index max_terms = Index{1} << 22;

  static TruncationPolicy window(double gamma, double beta = 0.0);
  static TruncationPolicy tolerance(double epsilon, double beta = 0.0);
};

struct EvalResult {
  double value = 0.0;
  double truncation_bound = 0.0;
  Index terms = 0;
};

// Steklov mean (w / Delta_k) int_{t_k / w}^{t_{k+1} / w} f(e^u) du.
double mean_value(const Signal& f, Index k, double w, const SamplingScheme& scheme,
                  const QuadratureSpec& quad = {});

struct SupError {
  double value = 0.0;
  double at = 0.0;  // x attaining the max
  double truncation_bound = 0.0;
};

class KantorovichOperator {
 public:
  KantorovichOperator(NonlinearKernel kernel, SamplingScheme scheme,
                      TruncationPolicy truncation = {}, QuadratureSpec quadrature = {});

  const NonlinearKernel& kernel() const noexcept { return kernel_; }
  const SamplingScheme& scheme() const noexcept { return scheme_; }
  const TruncationPolicy& truncation() const noexcept { return truncation_; }
  const QuadratureSpec& quadrature() const noexcept { return quadrature_; }

  // (K_w f)(x).
  EvalResult evaluate(const Signal& f, double w, double x) const;
  // (K_w f)(e^v).
  EvalResult evaluate_log(const Signal& f, double w, double v) const;
  // Batch version sharing the Steklov means across points.
  std::vector<EvalResult> evaluate_many_log(const Signal& f, double w,
                                            std::span<const double> vs) const;

  // (S_w f)(x) with samples f(e^{t_k / w}) in place of the means.
  EvalResult evaluate_generalized(const Signal& f, double w, double x) const;
  EvalResult evaluate_generalized_log(const Signal& f, double w, double v) const;

  // max over the grid (x values) of |K_w f(x) - f(x)|.
  SupError sup_error(const Signal& f, double w, std::span<const double> xs) const;
  // Same on log-coordinates.
  SupError sup_error_log(const Signal& f, double w, std::span<const double> vs) const;

  // Upper bound of M_{beta,Pi}(L), computed once per order and cached.
  double moment_bound(double beta) const;

 private:
  struct Window {
    Index k0 = 0;
    Index k1 = -1;  // empty when k1 < k0
    double bound = 0.0;
  };
  Window window_for(const Signal& f, double w, double y, bool sampled) const;
  double tail_order() const;

  NonlinearKernel kernel_;
  SamplingScheme scheme_;
  TruncationPolicy truncation_;
  QuadratureSpec quadrature_;
  struct Cache;
  std::shared_ptr<Cache> cache_;
};

}  // namespace expkant
