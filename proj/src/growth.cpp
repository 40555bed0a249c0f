#include "zomega/growth.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <optional>

namespace zomega {

namespace {

constexpr double kE = 2.71828182845904523536;
constexpr double kEE = 15.15426224147926418976;          // e^e
constexpr double kDomainCase2T = 3814279.10476022059094;  // e^{e^e}

double sat_value() { return DBL_MAX; }

}  // namespace

// ---------------------------------------------------------------------------
// construction
// ---------------------------------------------------------------------------

GrowthFunction GrowthFunction::case1_t(double eps, double delta) {
  if (!(eps > 0) || !(delta > 0) || !(delta < eps / 2 + 1))
    throw ContractError("case1 requires eps > 0 and 0 < delta < eps/2 + 1");
  GrowthFunction g;
  g.family_ = GrowthFamily::case1_t;
  g.eps_ = eps;
  g.delta_ = delta;
  g.name_ = "case1_t";
  return g;
}

GrowthFunction GrowthFunction::case1_z(double eps, double delta) {
  GrowthFunction g = case1_t(eps, delta);
  g.family_ = GrowthFamily::case1_z;
  g.name_ = "case1_z";
  return g;
}

GrowthFunction GrowthFunction::case2_t() {
  GrowthFunction g;
  g.family_ = GrowthFamily::case2_t;
  g.name_ = "case2_t";
  return g;
}

GrowthFunction GrowthFunction::case2_z() {
  GrowthFunction g;
  g.family_ = GrowthFamily::case2_z;
  g.name_ = "case2_z";
  return g;
}

GrowthFunction GrowthFunction::case3_t(double A) {
  if (!(A > 0)) throw ContractError("case3 requires A > 0");
  GrowthFunction g;
  g.family_ = GrowthFamily::case3_t;
  g.A_ = A;
  g.name_ = "case3_t";
  return g;
}

GrowthFunction GrowthFunction::case3_z(double A) {
  GrowthFunction g = case3_t(A);
  g.family_ = GrowthFamily::case3_z;
  g.name_ = "case3_z";
  return g;
}

GrowthFunction GrowthFunction::case4_t(double alpha) {
  if (!(alpha > 0) || !(alpha < 1)) throw ContractError("case4 requires 0 < alpha < 1");
  GrowthFunction g;
  g.family_ = GrowthFamily::case4_t;
  g.alpha_ = alpha;
  g.name_ = "case4_t";
  return g;
}

GrowthFunction GrowthFunction::case4_z(double alpha) {
  GrowthFunction g = case4_t(alpha);
  g.family_ = GrowthFamily::case4_z;
  g.name_ = "case4_z";
  return g;
}

GrowthFunction GrowthFunction::double_exp() {
  GrowthFunction g;
  g.family_ = GrowthFamily::double_exp;
  g.name_ = "double_exp";
  return g;
}

GrowthFunction GrowthFunction::exponential() {
  GrowthFunction g;
  g.family_ = GrowthFamily::exponential;
  g.name_ = "exp";
  return g;
}

GrowthFunction GrowthFunction::linear() {
  GrowthFunction g;
  g.family_ = GrowthFamily::linear;
  g.name_ = "linear";
  return g;
}

GrowthFunction GrowthFunction::custom(std::string name, std::function<double(double)> f,
                                      std::function<double(double)> df, double domain_start) {
  if (!f) throw ContractError("custom growth function requires an evaluator");
  if (!(domain_start >= 0)) throw ContractError("custom domain_start must be >= 0");
  GrowthFunction g;
  g.family_ = GrowthFamily::custom;
  g.name_ = std::move(name);
  g.custom_f_ = std::move(f);
  g.custom_df_ = std::move(df);
  g.custom_domain_start_ = domain_start;
  return g;
}

double GrowthFunction::domain_start() const {
  switch (family_) {
    case GrowthFamily::case1_t: return kE;
    case GrowthFamily::case1_z: return 1.0;
    case GrowthFamily::case2_t: return kDomainCase2T;
    case GrowthFamily::case2_z: return kE;
    case GrowthFamily::case3_t: return kE;
    case GrowthFamily::case3_z: return 0.0;
    case GrowthFamily::case4_t: return kE;
    case GrowthFamily::case4_z: return 1.0;
    case GrowthFamily::double_exp:
    case GrowthFamily::exponential:
    case GrowthFamily::linear: return 0.0;
    case GrowthFamily::custom: return custom_domain_start_;
  }
  return 0.0;
}

double GrowthFunction::convexity_threshold() const {
  switch (family_) {
    case GrowthFamily::case1_z: {
      // log g' has u-derivative e^{u/c}/c + 1/c - 1 (u = log x); for c > 2
      // it turns positive only past u = c log(c-1).
      double c = 1 + eps_ / 2 - delta_;
      return c > 2 ? std::pow(c - 1, c) : 1.0;
    }
    case GrowthFamily::case2_z: return kE;
    case GrowthFamily::case3_z: return 0.0;
    case GrowthFamily::case4_z: return 1.0;
    case GrowthFamily::double_exp:
    case GrowthFamily::exponential:
    case GrowthFamily::linear: return 0.0;
    default: return domain_start();
  }
}

std::string GrowthFunction::extension_rule() const {
  double d = domain_start();
  if (d == 0.0) return "natural domain covers [0, inf); no extension";
  char buf[128];
  std::snprintf(buf, sizeof buf, "constant value g(%.17g) on [0, %.17g)", d, d);
  return buf;
}

// ---------------------------------------------------------------------------
// evaluation
// ---------------------------------------------------------------------------

namespace {

// family formula, valid for x >= domain_start; generic over the real type
template <class Real>
Real raw_eval(GrowthFamily fam, double eps, double delta, double A, double alpha, Real x) {
  using std::exp;
  using std::log;
  using std::pow;
  switch (fam) {
    case GrowthFamily::case1_t: {
      Real u = log(log(x));
      return exp(pow(u, Real(1 + eps / 2 - delta)));
    }
    case GrowthFamily::case1_z:
      return exp(exp(log(x) / Real(1 + eps / 2 - delta)));
    case GrowthFamily::case2_t: {
      Real u = log(log(x));
      return exp(exp(u / log(u)));
    }
    case GrowthFamily::case2_z: {
      Real L = log(x);
      return exp(L * log(L));
    }
    case GrowthFamily::case3_t: {
      Real u = log(log(x));
      return pow(u, Real(A));
    }
    case GrowthFamily::case3_z:
      return exp(exp(x / Real(A)));
    case GrowthFamily::case4_t: {
      Real u = log(log(x));
      return exp(exp(pow(u, Real(alpha))));
    }
    case GrowthFamily::case4_z:
      return exp(pow(log(x), Real(1 / alpha)));
    case GrowthFamily::double_exp:
      return exp(exp(x));
    case GrowthFamily::exponential:
      return exp(x);
    case GrowthFamily::linear:
      return x;
    case GrowthFamily::custom:
      break;
  }
  throw ContractError("raw_eval does not handle custom families");
}

}  // namespace

GrowthValue GrowthFunction::eval(double x) const {
  if (!(x >= 0)) throw ContractError("growth functions are defined on x >= 0");
  double d = domain_start();
  if (x < d) x = d;
  double v;
  if (family_ == GrowthFamily::custom) {
    v = custom_f_(x);
    if (!(v >= 0) && std::isfinite(v))
      throw ContractError("custom growth function returned a negative value");
  } else {
    v = raw_eval<double>(family_, eps_, delta_, A_, alpha_, x);
  }
  if (!std::isfinite(v)) return {sat_value(), true};
  return {v, false};
}

real128 GrowthFunction::eval_wide(real128 x) const {
  if (!(x >= real128(0))) throw ContractError("growth functions are defined on x >= 0");
  real128 d(domain_start());
  if (x < d) x = d;
  if (family_ == GrowthFamily::custom) return real128(custom_f_(to_double(x)));
  return raw_eval<real128>(family_, eps_, delta_, A_, alpha_, x);
}

// log g(x), stable far beyond double range of g itself
double GrowthFunction::log_eval(double x) const {
  if (!(x >= 0)) throw ContractError("growth functions are defined on x >= 0");
  double d = domain_start();
  if (x < d) x = d;
  double L = std::log(x);
  double u = std::log(L);  // loglog x (only used where defined)
  switch (family_) {
    case GrowthFamily::case1_t: return std::pow(u, 1 + eps_ / 2 - delta_);
    case GrowthFamily::case1_z: return std::exp(L / (1 + eps_ / 2 - delta_));
    case GrowthFamily::case2_t: return std::exp(u / std::log(u));
    case GrowthFamily::case2_z: return L * u;
    case GrowthFamily::case3_t: return A_ * std::log(u);
    case GrowthFamily::case3_z: return std::exp(x / A_);
    case GrowthFamily::case4_t: return std::exp(std::pow(u, alpha_));
    case GrowthFamily::case4_z: return std::pow(L, 1 / alpha_);
    case GrowthFamily::double_exp: return std::exp(x);
    case GrowthFamily::exponential: return x;
    case GrowthFamily::linear: return L;
    case GrowthFamily::custom: {
      double v = custom_f_(x);
      return std::isfinite(v) ? std::log(v) : std::numeric_limits<double>::infinity();
    }
  }
  throw ContractError("unhandled family");
}

bool GrowthFunction::has_analytic_derivative() const {
  if (family_ == GrowthFamily::custom) return static_cast<bool>(custom_df_);
  return true;
}

double GrowthFunction::derivative(double x) const {
  if (!(x >= 0)) throw ContractError("growth functions are defined on x >= 0");
  double d = domain_start();
  if (x < d) return 0.0;  // constant extension
  if (family_ == GrowthFamily::custom) {
    if (!custom_df_) throw ContractError("custom growth function has no derivative");
    return custom_df_(x);
  }
  double L = std::log(x);
  double u = std::log(L);
  double g = raw_eval<double>(family_, eps_, delta_, A_, alpha_, x);
  switch (family_) {
    case GrowthFamily::case1_t: {
      double c = 1 + eps_ / 2 - delta_;
      return g * c * std::pow(u, c - 1) / (x * L);
    }
    case GrowthFamily::case1_z: {
      double c = 1 + eps_ / 2 - delta_;
      return g * std::exp(L / c) / (c * x);
    }
    case GrowthFamily::case2_t: {
      double lu = std::log(u);
      return g * std::exp(u / lu) * ((lu - 1) / (lu * lu)) / (x * L);
    }
    case GrowthFamily::case2_z: return g * (u + 1) / x;
    case GrowthFamily::case3_t: return A_ * std::pow(u, A_ - 1) / (x * L);
    case GrowthFamily::case3_z: return g * std::exp(x / A_) / A_;
    case GrowthFamily::case4_t:
      return g * std::exp(std::pow(u, alpha_)) * alpha_ * std::pow(u, alpha_ - 1) / (x * L);
    case GrowthFamily::case4_z:
      return g * (1 / alpha_) * std::pow(L, 1 / alpha_ - 1) / x;
    case GrowthFamily::double_exp: return g * std::exp(x);
    case GrowthFamily::exponential: return g;
    case GrowthFamily::linear: return 1.0;
    case GrowthFamily::custom: break;
  }
  throw ContractError("unhandled family");
}

double GrowthFunction::log_derivative(double x) const {
  double d = domain_start();
  if (x < d) throw ContractError("log_derivative is defined beyond the natural domain start");
  double L = std::log(x);
  double u = std::log(L);
  switch (family_) {
    case GrowthFamily::case1_t: {
      double c = 1 + eps_ / 2 - delta_;
      return std::pow(u, c) + std::log(c) + (c - 1) * std::log(u) - L - u;
    }
    case GrowthFamily::case1_z: {
      double c = 1 + eps_ / 2 - delta_;
      return std::exp(L / c) + L / c - std::log(c) - L;
    }
    case GrowthFamily::case2_t: {
      double lu = std::log(u);
      return std::exp(u / lu) + u / lu + std::log((lu - 1) / (lu * lu)) - L - u;
    }
    case GrowthFamily::case2_z: return L * u + std::log(u + 1) - L;
    case GrowthFamily::case3_t: return std::log(A_) + (A_ - 1) * std::log(u) - L - u;
    case GrowthFamily::case3_z: return std::exp(x / A_) + x / A_ - std::log(A_);
    case GrowthFamily::case4_t:
      return std::exp(std::pow(u, alpha_)) + std::pow(u, alpha_) + std::log(alpha_) +
             (alpha_ - 1) * std::log(u) - L - u;
    case GrowthFamily::case4_z:
      return std::pow(L, 1 / alpha_) - std::log(alpha_) + (1 / alpha_ - 1) * u - L;
    case GrowthFamily::double_exp: return std::exp(x) + x;
    case GrowthFamily::exponential: return x;
    case GrowthFamily::linear: return 0.0;
    case GrowthFamily::custom: {
      if (!custom_df_) throw ContractError("custom growth function has no derivative");
      double dv = custom_df_(x);
      if (!(dv > 0)) throw ContractError("custom derivative must be positive for log form");
      return std::log(dv);
    }
  }
  throw ContractError("unhandled family");
}

bool GrowthFunction::superlinear() const {
  // named families are classified exactly: every z-form outgrows any power
  // of x, every t-form is an iterated log and stays sublinear
  switch (family_) {
    case GrowthFamily::case1_z:
    case GrowthFamily::case2_z:
    case GrowthFamily::case3_z:
    case GrowthFamily::case4_z:
    case GrowthFamily::double_exp:
    case GrowthFamily::exponential: return true;
    case GrowthFamily::case1_t:
    case GrowthFamily::case2_t:
    case GrowthFamily::case3_t:
    case GrowthFamily::case4_t:
    case GrowthFamily::linear: return false;
    case GrowthFamily::custom: break;
  }
  // custom functions: watch g(x)/x along x = 2^i; saturation certifies
  // divergence outright
  double r_first = -1, r_last = -1;
  for (int i = 0; i <= 60; ++i) {
    double x = std::ldexp(1.0, i);
    GrowthValue gv = eval(x);
    if (gv.saturated) return true;
    double r = gv.value / x;
    if (r_first < 0) r_first = r;
    r_last = r;
  }
  return r_last > 100 * std::max(1.0, r_first) || r_last > 1e8;
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

nlohmann::json GrowthFunction::to_json() const {
  nlohmann::json j;
  j["family"] = name_;
  nlohmann::json p = nlohmann::json::object();
  switch (family_) {
    case GrowthFamily::case1_t:
    case GrowthFamily::case1_z:
      p["eps"] = eps_;
      p["delta"] = delta_;
      break;
    case GrowthFamily::case3_t:
    case GrowthFamily::case3_z: p["A"] = A_; break;
    case GrowthFamily::case4_t:
    case GrowthFamily::case4_z: p["alpha"] = alpha_; break;
    case GrowthFamily::custom:
      throw ContractError("custom growth functions are not serializable");
    default: break;
  }
  j["params"] = p;
  return j;
}

GrowthFunction GrowthFunction::from_json(const nlohmann::json& j) {
  std::string fam = j.at("family").get<std::string>();
  nlohmann::json p = j.value("params", nlohmann::json::object());
  if (fam == "case1_t") return case1_t(p.at("eps").get<double>(), p.at("delta").get<double>());
  if (fam == "case1_z") return case1_z(p.at("eps").get<double>(), p.at("delta").get<double>());
  if (fam == "case2_t") return case2_t();
  if (fam == "case2_z") return case2_z();
  if (fam == "case3_t") return case3_t(p.at("A").get<double>());
  if (fam == "case3_z") return case3_z(p.at("A").get<double>());
  if (fam == "case4_t") return case4_t(p.at("alpha").get<double>());
  if (fam == "case4_z") return case4_z(p.at("alpha").get<double>());
  if (fam == "double_exp") return double_exp();
  if (fam == "exp") return exponential();
  if (fam == "linear") return linear();
  throw ContractError("unknown growth family: " + fam);
}

// ---------------------------------------------------------------------------
// conjugate and stationary points
// ---------------------------------------------------------------------------

namespace {

// phi(x) = x y - g(x); -inf once g saturates (we are then far past the peak)
double phi_at(const GrowthFunction& g, double y, double x) {
  GrowthValue gv = g.eval(x);
  if (gv.saturated) return -std::numeric_limits<double>::infinity();
  return x * y - gv.value;
}

// log-space bisection for log g'(x) = target on [lo, hi]; requires a sign
// change; returns the abscissa to ulp-level accuracy
std::optional<double> bisect_log_deriv(const GrowthFunction& g, double target, double lo,
                                       double hi) {
  double a = std::log(lo), b = std::log(hi);
  double ha = g.log_derivative(lo) - target;
  double hb = g.log_derivative(hi) - target;
  if (ha > 0 || hb < 0) return std::nullopt;
  for (int i = 0; i < 200; ++i) {
    double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    double hm = g.log_derivative(std::exp(m)) - target;
    if (hm < 0)
      a = m;
    else
      b = m;
  }
  return std::exp(0.5 * (a + b));
}

// stationary candidate for the conjugate: solve g'(x) = y above the
// convexity threshold, expanding the window geometrically
std::optional<double> stationary_candidate(const GrowthFunction& g, double y, double warm) {
  if (!g.has_analytic_derivative() || !(y > 0)) return std::nullopt;
  double thr = std::max(g.convexity_threshold(), 1e-12);
  double target = std::log(y);
  double lo = std::max(thr, warm / 16);
  double hi = std::max(lo * 2, warm * 16);
  // expand until the root is bracketed (or provably absent)
  for (int i = 0; i < 700 && g.log_derivative(lo) - target > 0; ++i) {
    if (lo <= thr * (1 + 1e-12)) break;
    lo = std::max(thr, lo / 4);
  }
  if (g.log_derivative(lo) - target > 0) return std::nullopt;  // root below threshold
  for (int i = 0; i < 700 && g.log_derivative(hi) - target < 0; ++i) {
    hi *= 4;
    if (hi > 1e290) return std::nullopt;
  }
  return bisect_log_deriv(g, target, lo, hi);
}

}  // namespace

ConjugateResult conjugate(const GrowthFunction& g, double y) {
  if (!(y >= 0)) throw ContractError("conjugate requires y >= 0");
  if (!g.superlinear())
    throw NotSuperlinear("conjugate requires g(x)/x -> inf (sampling found it bounded)");

  double d = g.domain_start();

  // explicit candidates at the boundary and at the extension kink
  double best_x = 0.0;
  double best = phi_at(g, y, 0.0);
  if (d > 0) {
    double pd = phi_at(g, y, d);
    if (pd > best) {
      best = pd;
      best_x = d;
    }
  }

  // geometric bracket growth from x = 1 until phi has clearly fallen off
  double hi = std::max(1.0, d);
  double cap = 1e306 / std::max(y, 1.0);
  double run_best = best;
  for (;;) {
    double p = phi_at(g, y, hi);
    if (p > run_best) run_best = p;
    double margin = std::max(10.0, std::fabs(run_best) * 1e-3);
    if (p < run_best - margin) break;
    hi *= 2;
    if (hi > cap)
      throw OverflowSentinel("conjugate value exceeds double range before the bracket closes");
  }

  // convexity spot-check on the bracket; a failure switches to a dense grid
  bool convex_ok = true;
  {
    double a = d, b = hi;
    for (int i = 0; i + 2 <= 24 && convex_ok; ++i) {
      double x0 = a + (b - a) * i / 24.0;
      double x1 = a + (b - a) * (i + 2) / 24.0;
      GrowthValue g0 = g.eval(x0), g1 = g.eval(x1), gm = g.eval(0.5 * (x0 + x1));
      if (g0.saturated || g1.saturated || gm.saturated) break;
      double chord = 0.5 * (g0.value + g1.value);
      if (gm.value > chord * (1 + 1e-9) + 1e-9) convex_ok = false;
    }
  }

  double gx = 0, gphi = -std::numeric_limits<double>::infinity();
  if (convex_ok) {
    // golden-section on [0, hi]
    const double rho = 0.3819660112501051518;  // 2 - golden ratio
    double a = 0.0, b = hi;
    double x1 = a + rho * (b - a), x2 = b - rho * (b - a);
    double f1 = phi_at(g, y, x1), f2 = phi_at(g, y, x2);
    for (int i = 0; i < 240; ++i) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = b - rho * (b - a);
        f2 = phi_at(g, y, x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = a + rho * (b - a);
        f1 = phi_at(g, y, x1);
      }
      if (b - a <= 1e-14 * std::max(1.0, std::fabs(a))) break;
    }
    gx = 0.5 * (a + b);
    gphi = phi_at(g, y, gx);
  } else {
    // dense grid, then a local golden pass around the best cell
    const int grid = 1 << 21;
    double fbest = -std::numeric_limits<double>::infinity();
    int ibest = 0;
    for (int i = 0; i <= grid; ++i) {
      double x = hi * i / grid;
      double p = phi_at(g, y, x);
      if (p > fbest) {
        fbest = p;
        ibest = i;
      }
    }
    double a = hi * std::max(0, ibest - 2) / grid;
    double b = hi * std::min(grid, ibest + 2) / grid;
    const double rho = 0.3819660112501051518;
    double x1 = a + rho * (b - a), x2 = b - rho * (b - a);
    double f1 = phi_at(g, y, x1), f2 = phi_at(g, y, x2);
    for (int i = 0; i < 160; ++i) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = b - rho * (b - a);
        f2 = phi_at(g, y, x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = a + rho * (b - a);
        f1 = phi_at(g, y, x1);
      }
    }
    gx = 0.5 * (a + b);
    gphi = phi_at(g, y, gx);
  }
  if (gphi > best) {
    best = gphi;
    best_x = gx;
  }

  // stationarity polish: exact root of g'(x) = y beats the golden estimate
  // whenever the peak is interior and the family has an analytic derivative
  if (auto xs = stationary_candidate(g, y, std::max(gx, 1.0))) {
    double ps = phi_at(g, y, *xs);
    if (ps >= best) {
      best = ps;
      best_x = *xs;
    }
  }

  return {y, best, best_x};
}

double stationary_point(const GrowthFunction& g, double k) {
  if (!(k >= 1)) throw ContractError("stationary_point requires k >= 1");
  if (!g.has_analytic_derivative())
    throw ContractError("stationary_point requires an analytic derivative");
  double thr = std::max(g.convexity_threshold(), 1e-12);
  double target = std::log(k);
  if (g.log_derivative(thr) - target > 0)
    throw NoRoot("derivative already exceeds k at the convexity threshold");
  double hi = std::max(2 * thr, 1.0);
  for (int i = 0; i < 2000 && g.log_derivative(hi) - target < 0; ++i) {
    hi *= 2;
    if (hi > 1e300) throw NoRoot("bracketing failed: derivative never reaches k");
  }
  auto x = bisect_log_deriv(g, target, thr, hi);
  if (!x) throw NoRoot("bracketing failed for the stationary point");
  // residual contract, measured in log space (equivalent to the relative
  // tolerance |g'(x)-k|/k at this scale)
  double resid = std::fabs(g.log_derivative(*x) - target);
  if (resid > 1e-9)
    throw NoRoot("stationary point residual exceeded tolerance");
  return *x;
}

// ---------------------------------------------------------------------------
// f_infinity
// ---------------------------------------------------------------------------

double f_infinity_log(const GrowthFunction& g, double x) {
  if (!(x >= 2)) throw ContractError("f_infinity requires x >= 2");
  double L = std::log(x);
  // objective in v = log(1/eps), v in [0, log 1e8]
  auto obj = [&](double v) {
    double inv_eps = std::exp(v);
    return L / inv_eps + g.log_eval(inv_eps);
  };
  double a = 0.0, b = std::log(1e8);
  // coarse probe to seed the golden bracket (the objective is unimodal for
  // the named families, but a probe keeps odd custom functions honest)
  double pbest = obj(a);
  double vbest = a;
  for (int i = 1; i <= 64; ++i) {
    double v = a + (b - a) * i / 64.0;
    double p = obj(v);
    if (p < pbest) {
      pbest = p;
      vbest = v;
    }
  }
  double lo = std::max(a, vbest - (b - a) / 32);
  double hi = std::min(b, vbest + (b - a) / 32);
  const double rho = 0.3819660112501051518;
  double x1 = lo + rho * (hi - lo), x2 = hi - rho * (hi - lo);
  double f1 = obj(x1), f2 = obj(x2);
  for (int i = 0; i < 200; ++i) {
    if (f1 > f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = hi - rho * (hi - lo);
      f2 = obj(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = lo + rho * (hi - lo);
      f1 = obj(x1);
    }
  }
  double vm = 0.5 * (lo + hi);
  return std::min({obj(vm), pbest, obj(0.0)});
}

GrowthValue f_infinity(const GrowthFunction& g, double x) {
  double lv = f_infinity_log(g, x);
  if (lv > 709.0) return {sat_value(), true};
  return {std::exp(lv), false};
}

// ---------------------------------------------------------------------------
// the entire series M(z)
// ---------------------------------------------------------------------------

double mf_log_bound(const GrowthFunction& g, double abs_z) {
  if (!(abs_z >= 0)) throw ContractError("mf bound requires |z| >= 0");
  double lp = abs_z > 1 ? std::log(abs_z) : 0.0;
  GrowthValue gv = g.eval(lp);
  if (gv.saturated)
    throw OverflowSentinel("growth value at log+|z| exceeds the exponent range");
  return std::log(1.6449340668482264365) + gv.value;  // log(pi^2/6) + g(log+|z|)
}

MfSeries::MfSeries(GrowthFunction g) : g_(std::move(g)) {
  if (!g_.superlinear())
    throw NotSuperlinear("the entire series requires a superlinear growth function");
}

MfSeries::~MfSeries() = default;

double MfSeries::fstar(int64_t n) const {
  std::lock_guard<std::mutex> lock(mu_);
  while ((int64_t)fstar_cache_.size() < n) {
    int64_t m = (int64_t)fstar_cache_.size() + 1;
    double d = g_.domain_start();
    double best = -g_.eval(0.0).value;           // x = 0 candidate
    if (d > 0) best = std::max(best, m * d - g_.eval(d).value);
    if (auto xs = stationary_candidate(g_, (double)m, warm_x_)) {
      GrowthValue gv = g_.eval(*xs);
      if (!gv.saturated) best = std::max(best, m * *xs - gv.value);
      warm_x_ = *xs;
    }
    fstar_cache_.push_back(best);
  }
  return fstar_cache_[n - 1];
}

cx<real128> MfSeries::eval(const cx<real128>& z, const real128& tol) const {
  if (!(tol > real128(0))) throw ContractError("mf_eval requires tol > 0");
  real128 az = abs(z);
  if (az == real128(0)) return cx<real128>(real128(0));
  if (az > real128(1e300))
    throw OverflowSentinel("|z| exceeds the supported range of the term scan");
  double azd = to_double(az);

  // envelope check up front: it throws if g(log+|z|) overflows, and its
  // value caps every term exponent below
  double log_bound = mf_log_bound(g_, azd);
  if (log_bound > 1.4e9)
    throw OverflowSentinel("series envelope exceeds the result exponent range");

  const double L = std::log(azd);
  const double theta = std::atan2(to_double(z.im), to_double(z.re));

  // pass 1: log-magnitudes l_n = n log|z| - 2 log n - g*(n) until certified
  // geometric decay. Past the cutoff the step ratio never exceeds
  // exp(d + 2/n): the g*(n+1) - g*(n) increments grow with n (g* is convex)
  // and the -2 log(1+1/n) term recovers at most 2/n.
  std::vector<double> lmag;
  double lmax = -std::numeric_limits<double>::infinity();
  double maxop = 0.0;  // largest intermediate magnitude in any l_n
  double tail_log = 0.0;
  const int64_t n_cap = 2000000;
  for (int64_t n = 1;; ++n) {
    double fs = fstar(n);
    double l = n * L - 2 * std::log((double)n) - fs;
    lmag.push_back(l);
    lmax = std::max(lmax, l);
    maxop = std::max(maxop, std::fabs(n * L) + 2 * std::log((double)n) + std::fabs(fs));
    if (n >= 4) {
      double d = l - lmag[n - 2];  // l_n - l_{n-1}
      double r = std::exp(d + 2.0 / (double)(n - 1) + 1e-9);
      if (r < 0.9999) {
        double tl = l + std::log(r / (1 - r));
        if (tl < lmax - 41.5) {  // tail at most e^-41.5 ~ 1e-18 of the peak term
          tail_log = tl;
          break;
        }
      }
    }
    if (n >= n_cap)
      throw TruncationUnsound("term scan did not reach certified geometric decay");
  }

  // pass 2: accumulate scaled terms in double, then lift by e^{lmax}
  cx<double> acc(0.0, 0.0);
  double scaled_mag = 0.0;
  for (size_t i = 0; i < lmag.size(); ++i) {
    double w = std::exp(lmag[i] - lmax);
    double ph = theta * (double)(i + 1);
    acc += cx<double>(w * std::cos(ph), w * std::sin(ph));
    scaled_mag += w;
  }

  real128 lift = exp(real128(lmax));
  cx<real128> result = cx<real128>(real128(acc.re), real128(acc.im)) * lift;

  // achieved error: per-term exponent rounding (the l_n arithmetic cancels
  // quantities of size maxop down to l_n), serial summation rounding, and
  // the certified tail
  double rel = 2.3e-16 * (3.0 + maxop) + 1.2e-16 * (double)lmag.size();
  real128 rounding = lift * real128(scaled_mag) * real128(rel);
  real128 tail = exp(real128(tail_log));
  if (rounding + tail > tol)
    throw PrecisionUnreachable("mf_eval cannot certify the requested tolerance at this z");
  return result;
}

cx<real128> mf_eval(const GrowthFunction& g, const cx<real128>& z, const real128& tol) {
  MfSeries series(g);
  return series.eval(z, tol);
}

}  // namespace zomega
