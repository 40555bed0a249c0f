#pragma once

// Growth-function machinery: the named growth families with their monotone
// extensions, Legendre-Fenchel conjugates, stationary points of x*y - g(x),
// the regularization g_inf(x) = inf_{0<eps<=1} x^eps g(1/eps), and the
// entire series M(z) = sum_{n>=1} z^n/n^2 e^{-g*(n)}.
//
// Each case family comes in two forms. The t-form grows slowly (iterated
// logs of the argument), the z-form is its fast-growing counterpart:
//
//   case1: t-form exp((llt)^{1+eps/2-delta}),  z-form expexp(log z / (1+eps/2-delta))
//   case2: t-form expexp(llt / lllt),          z-form exp(log z * loglog z)
//   case3: t-form (llt)^A,                     z-form expexp(z / A)
//   case4: t-form expexp((llt)^alpha),         z-form exp((log z)^{1/alpha})
//
// (llt = loglog t). double_exp is e^{e^x}, exponential is e^x, linear is x;
// the latter two mostly serve tests and counterexamples. Every family is
// extended below its natural domain by the constant value at the domain's
// left endpoint, which keeps evaluation monotone on [0, inf).

#include "zomega/errors.hpp"
#include "zomega/numeric.hpp"

#include "json.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace zomega {

enum class GrowthFamily {
  case1_t,
  case1_z,
  case2_t,
  case2_z,
  case3_t,
  case3_z,
  case4_t,
  case4_z,
  double_exp,
  exponential,
  linear,
  custom,
};

struct GrowthValue {
  double value = 0;
  bool saturated = false;  // an intermediate exp overflowed; value is clamped
};

class GrowthFunction {
 public:
  static GrowthFunction case1_t(double eps, double delta);
  static GrowthFunction case1_z(double eps, double delta);
  static GrowthFunction case2_t();
  static GrowthFunction case2_z();
  static GrowthFunction case3_t(double A);
  static GrowthFunction case3_z(double A);
  static GrowthFunction case4_t(double alpha);
  static GrowthFunction case4_z(double alpha);
  static GrowthFunction double_exp();
  static GrowthFunction exponential();
  static GrowthFunction linear();
  static GrowthFunction custom(std::string name, std::function<double(double)> f,
                               std::function<double(double)> df = {}, double domain_start = 0);

  GrowthFamily family() const { return family_; }
  const std::string& name() const { return name_; }

  // Saturating evaluation on [0, inf); constant left of domain_start().
  GrowthValue eval(double x) const;

  // Same formulas over a wide type (used for Lemma-style envelope bounds
  // where the result exceeds double range). Custom functions evaluate in
  // double and widen.
  real128 eval_wide(real128 x) const;

  // log g(x), stable far past the point where g itself overflows. For a
  // custom function this is log of the (possibly saturating) evaluation.
  double log_eval(double x) const;

  // Analytic first derivative on (domain_start, inf). For custom functions
  // requires the user-provided derivative.
  double derivative(double x) const;

  // log g'(x), computed in a form that stays finite long after g' itself
  // leaves double range. Throws ContractError when no analytic derivative
  // is available.
  double log_derivative(double x) const;

  bool has_analytic_derivative() const;

  // Left endpoint of the natural (monotone) domain of the family formula.
  double domain_start() const;

  // Point past which the family is convex and increasing, making the
  // stationary-point solver applicable.
  double convexity_threshold() const;

  std::string extension_rule() const;

  // Sampling check of g(x)/x -> inf at geometrically spaced points.
  bool superlinear() const;

  nlohmann::json to_json() const;
  static GrowthFunction from_json(const nlohmann::json& j);

 private:
  GrowthFunction() = default;

  GrowthFamily family_ = GrowthFamily::custom;
  std::string name_;
  double eps_ = 0, delta_ = 0, A_ = 0, alpha_ = 0;
  std::function<double(double)> custom_f_;
  std::function<double(double)> custom_df_;
  double custom_domain_start_ = 0;
};

struct ConjugateResult {
  double y = 0;
  double value = 0;   // g*(y) = sup_{x>=0} (x y - g(x))
  double argmax_x = 0;
};

// Legendre-Fenchel conjugate. Golden-section over a geometrically grown
// bracket, refined by a stationary-point polish when an analytic derivative
// exists; falls back to a dense grid if convexity spot-checks fail.
ConjugateResult conjugate(const GrowthFunction& g, double y);

// Solves g'(x) = k (in log space) for the unique x beyond the convexity
// threshold. k may be as large as double allows; the residual contract
// |g'(x) - k|/k <= 1e-9 is enforced via |log g'(x) - log k|.
double stationary_point(const GrowthFunction& g, double k);

// inf over eps in (0, 1] of x^eps g(1/eps), minimized in log space.
GrowthValue f_infinity(const GrowthFunction& g, double x);
// log of the same, usable when the value leaves double range.
double f_infinity_log(const GrowthFunction& g, double x);

// Envelope bound (pi^2/6) e^{g(log+ |z|)} for the entire series below,
// returned as its natural log (the value itself often exceeds any float).
double mf_log_bound(const GrowthFunction& g, double abs_z);

// M(z) = sum_{n>=1} z^n / n^2 e^{-g*(n)}. An MfSeries instance owns a cache
// of conjugate values g*(n), so evaluating many z against one growth
// function amortizes the conjugate solves.
class MfSeries {
 public:
  explicit MfSeries(GrowthFunction g);
  ~MfSeries();

  // |returned - exact| <= tol, or PrecisionUnreachable when tol sits below
  // the rounding floor of the term summation at this z.
  cx<real128> eval(const cx<real128>& z, const real128& tol) const;

  const GrowthFunction& growth() const { return g_; }

 private:
  double fstar(int64_t n) const;  // cached g*(n)

  GrowthFunction g_;
  mutable std::mutex mu_;
  mutable std::vector<double> fstar_cache_;  // fstar_cache_[n-1] = g*(n)
  mutable double warm_x_ = 1.0;
};

cx<real128> mf_eval(const GrowthFunction& g, const cx<real128>& z, const real128& tol);

}  // namespace zomega
