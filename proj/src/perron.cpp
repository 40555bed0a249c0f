#include "zomega/perron.hpp"

#include <atomic>
#include <cmath>
#include <complex>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace zomega {

namespace {

using cxd = std::complex<double>;

// Gauss 7 / Kronrod 15 nodes and weights (positive half)
const double kXgk[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                        0.741531185599394, 0.586087235467691, 0.405845151377397,
                        0.207784955007898, 0.0};
const double kWgk[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                        0.140653259715525, 0.169004726639267, 0.190350578064785,
                        0.204432940075298, 0.209482141084728};
const double kWg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                       0.417959183673469};

struct PanelEval {
  double integral;
  double err;
};

// one Kronrod panel with the classical rescaled error estimate, which
// inflates toward the total-variation scale when the pair disagrees (the
// guard against accepting an unresolved oscillation by accident)
template <typename F>
PanelEval gk15(const F& f, double a, double b) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fv[15];
  double fc = f(c);
  double resk = kWgk[7] * fc, resg = kWg[3] * fc;
  fv[14] = fc;
  for (int j = 0; j < 7; ++j) {
    double f1 = f(c - h * kXgk[j]);
    double f2 = f(c + h * kXgk[j]);
    fv[2 * j] = f1;
    fv[2 * j + 1] = f2;
    resk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += kWg[(j - 1) / 2] * (f1 + f2);
  }
  double mean = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(fv[2 * j] - mean) + std::abs(fv[2 * j + 1] - mean));
  resasc *= std::abs(h);
  double err = std::abs((resk - resg) * h);
  if (resasc != 0 && err != 0)
    err = resasc * std::min(1.0, std::pow(200 * err / resasc, 1.5));
  return {resk * h, err};
}

template <typename F>
double integrate_recursive(const F& f, double a, double b, double tol, int depth,
                           int64_t& panels) {
  PanelEval e = gk15(f, a, b);
  if (e.err <= tol) {
    ++panels;
    return e.integral;
  }
  if (depth >= 48)
    throw QuadratureNonConverged("panel refinement hit the depth cap at [" +
                                 std::to_string(a) + ", " + std::to_string(b) + "]");
  double m = 0.5 * (a + b);
  double half = 0.5 * tol;
  return integrate_recursive(f, a, m, half, depth + 1, panels) +
         integrate_recursive(f, m, b, half, depth + 1, panels);
}

// dyadic top-level panels [0,s], [s,2s], [2s,4s], ... clipped at T
std::vector<std::pair<double, double>> dyadic_panels(double step, double T) {
  std::vector<std::pair<double, double>> out;
  double lo = 0, hi = step;
  while (lo < T) {
    out.emplace_back(lo, std::min(hi, T));
    lo = hi;
    hi *= 2;
  }
  return out;
}

// workers pull top panels by index; the combine is a fixed-order pairwise
// tree so the sum does not depend on thread timing
template <typename F>
double integrate_parallel(const F& f, const std::vector<std::pair<double, double>>& tops,
                          double tol_total, int workers, int64_t& panels) {
  std::vector<double> vals(tops.size(), 0.0);
  std::vector<int64_t> cnts(tops.size(), 0);
  double tol_each = tol_total / (double)tops.size();
  std::atomic<size_t> next{0};
  std::exception_ptr fail;
  std::mutex fail_mu;
  auto work = [&] {
    try {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= tops.size()) break;
        vals[i] = integrate_recursive(f, tops[i].first, tops[i].second, tol_each, 0,
                                      cnts[i]);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lk(fail_mu);
      if (!fail) fail = std::current_exception();
      next.store(tops.size());  // drain remaining work
    }
  };
  int spawn = std::min<int>(workers, (int)tops.size()) - 1;
  std::vector<std::thread> pool;
  for (int i = 0; i < spawn; ++i) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (fail) std::rethrow_exception(fail);
  for (int64_t c : cnts) panels += c;
  std::vector<double> v = std::move(vals);
  while (v.size() > 1) {
    std::vector<double> up((v.size() + 1) / 2);
    for (size_t i = 0; i < up.size(); ++i)
      up[i] = 2 * i + 1 < v.size() ? v[2 * i] + v[2 * i + 1] : v[2 * i];
    v = std::move(up);
  }
  return v[0];
}

}  // namespace

PerronReport perron_truncated(const DirichletSeries& f, const PerronCheckConfig& cfg) {
  if (!(cfg.b > 1)) throw ContractError("perron check requires b > 1");
  if (!(cfg.x >= 2)) throw ContractError("perron check requires x >= 2");
  if (!(cfg.T >= 2)) throw ContractError("perron check requires T >= 2");
  if (!(cfg.quadrature_step > 0)) throw ContractError("quadrature_step must be positive");
  if (!(cfg.rel_tol > 0)) throw ContractError("rel_tol must be positive");
  if (cfg.workers < 1) throw ContractError("workers must be >= 1");
  const int64_t X = f.cutoff();
  if ((double)X < cfg.x) throw ContractError("series cutoff must reach x");

  // table snapshot in double, plus prefix sums for the budget
  std::vector<double> bn((size_t)X), lam((size_t)X), prefix((size_t)X);
  double acc = 0;
  for (int64_t n = 1; n <= X; ++n) {
    bn[(size_t)n - 1] = to_double(f.as_wide(n));
    lam[(size_t)n - 1] = std::log((double)n);
    acc += bn[(size_t)n - 1];
    prefix[(size_t)n - 1] = acc;
  }

  PerronReport rep;
  rep.b = cfg.b;
  rep.x = cfg.x;
  rep.T = cfg.T;

  // lhs exactly: sum_{n<=x} b_n (x - n); x converts to a rational exactly
  if (f.mode() == SeriesMode::wide) {
    real256 s(0), xr(cfg.x);
    for (int64_t n = 1; n <= (int64_t)std::floor(cfg.x); ++n)
      s += f.wide(n) * (xr - real256(n));
    rep.lhs = to_double(s);
  } else {
    rational s(0), xr(cfg.x);
    for (int64_t n = 1; n <= (int64_t)std::floor(cfg.x); ++n) {
      rational c = f.mode() == SeriesMode::exact ? f.rat(n) : rational(f.integer(n));
      s += c * (xr - n);
    }
    rep.lhs = to_double(rational(s));
  }

  const double b = cfg.b, x = cfg.x, T = cfg.T, lx = std::log(x);
  const double xb1 = std::pow(x, b + 1);

  // F_B(s) as the exact finite sum over the table
  auto FB = [&](cxd s) {
    cxd acc2(0, 0);
    for (int64_t n = 1; n <= X; ++n) {
      if (bn[(size_t)n - 1] == 0) continue;
      double l = lam[(size_t)n - 1];
      acc2 += bn[(size_t)n - 1] * std::exp(-s.real() * l) *
              cxd(std::cos(s.imag() * l), -std::sin(s.imag() * l));
    }
    return acc2;
  };
  auto kernel = [&](cxd s) {
    return FB(s) * std::pow(x, s.real() + 1) *
           cxd(std::cos(s.imag() * lx), std::sin(s.imag() * lx)) / (s * (s + 1.0));
  };

  double tol_total = cfg.rel_tol * std::max(std::abs(rep.lhs), 1.0);
  auto tops = dyadic_panels(cfg.quadrature_step, T);

  if (cfg.contour == Contour::vertical_line) {
    // fast path: precompute b_n n^{-b}, conjugate symmetry doubles Re
    std::vector<double> cn((size_t)X);
    for (int64_t n = 1; n <= X; ++n)
      cn[(size_t)n - 1] = bn[(size_t)n - 1] * std::pow((double)n, -b);
    auto integrand = [&](double t) {
      double re = 0, im = 0;
      for (int64_t n = 1; n <= X; ++n) {
        double c = cn[(size_t)n - 1];
        if (c == 0) continue;
        double ph = t * lam[(size_t)n - 1];
        re += c * std::cos(ph);
        im -= c * std::sin(ph);
      }
      cxd val = cxd(re, im) * xb1 * cxd(std::cos(t * lx), std::sin(t * lx)) /
                (cxd(b, t) * cxd(b + 1, t));
      return val.real();
    };
    double I = integrate_parallel(integrand, tops, tol_total, cfg.workers, rep.panels);
    rep.main_integral = I / M_PI;
  } else {
    if (!cfg.sigma_of) throw ContractError("bent contour requires sigma_of");
    const auto& sg = cfg.sigma_of;
    // boundary sanity on a coarse grid: inside (0, b], non-decreasing
    double prev = sg(0.0);
    for (int i = 0; i <= 32; ++i) {
      double t = T * (double)i / 32.0;
      double s = sg(t);
      if (!(s > 0) || !(s <= b))
        throw ContractError("bent contour boundary must stay in (0, b]");
      if (s < prev - 1e-12 * std::max(1.0, std::abs(prev)))
        throw ContractError("bent contour boundary must be non-decreasing");
      prev = s;
    }
    auto dsg = [&](double t) {
      double h = 1e-5 * std::max(1.0, t);
      return (sg(std::abs(t + h)) - sg(std::abs(t - h))) / (2 * h);
    };
    auto path = [&](double t) {
      cxd s(sg(t), t);
      return (kernel(s) * cxd(dsg(t), 1.0)).imag();
    };
    auto side = [&](double u) { return kernel(cxd(u, T)).imag(); };
    double sT = sg(T);
    double I0 = integrate_parallel(path, tops, tol_total / 2, cfg.workers, rep.panels);
    int64_t side_panels = 0;
    double Is = sT < b ? integrate_recursive(side, sT, b, tol_total / 2, 0, side_panels)
                       : 0.0;
    rep.panels += side_panels;
    rep.i0 = I0 / M_PI;
    rep.i_side = Is / M_PI;
    rep.main_integral = rep.i0 + rep.i_side;
  }

  rep.residual = rep.lhs - rep.main_integral;

  // remainder budget with the classical bound's constants set to 1:
  //   x^{b+1}/T int_1^inf B(u) u^{-b-1} du + 2^b (x log x / T + log T) max B
  // B is the prefix-sum step function, constant at A(X) past the cutoff,
  // so the integral has an exact closed form
  double I1 = 0;
  for (int64_t n = 1; n < X; ++n)
    I1 += prefix[(size_t)n - 1] *
          (std::pow((double)n, -b) - std::pow((double)n + 1, -b)) / b;
  I1 += prefix[(size_t)X - 1] * std::pow((double)X, -b) / b;
  int64_t m32 = std::min<int64_t>((int64_t)std::floor(1.5 * x), X);
  double bmax = m32 >= 1 ? prefix[(size_t)m32 - 1] : 0.0;
  rep.remainder_budget =
      xb1 / T * I1 + std::pow(2.0, b) * (x * lx / T + std::log(T)) * bmax;
  rep.ratio = rep.remainder_budget > 0
                  ? std::abs(rep.residual) / rep.remainder_budget
                  : (rep.residual == 0 ? 0 : INFINITY);
  return rep;
}

SmoothingWindow smoothing_window(const std::function<double(double)>& Q,
                                 const std::function<double(double)>& F_inf, double x) {
  if (!Q || !F_inf) throw ContractError("smoothing_window requires both functions");
  if (!(x > 0)) throw ContractError("smoothing_window requires x > 0");
  double qx = Q(x), q2 = Q(2 * x);
  if (!(qx > 0) || !(q2 > 0)) throw PreconditionQ("Q must be positive");
  if (qx > x * x / 4 || q2 > x * x)
    throw PreconditionQ("Q exceeds the quarter-square ceiling");
  double fi = F_inf(2 * x);
  if (!(fi > 0)) throw ContractError("F_inf must be positive");
  SmoothingWindow w;
  w.h = std::sqrt(q2 / fi);
  w.error_scale = std::sqrt(q2 * fi);
  if (!(w.h <= x))
    throw NumericalError("smoothing window exceeds x; F_inf too small for this Q");
  return w;
}

double coefficient_upper_bound(const std::function<double(double)>& sigma_of,
                               const GrowthFunction& growth, double x) {
  if (!sigma_of) throw ContractError("coefficient_upper_bound requires sigma_of");
  if (!(x >= 2)) throw ContractError("coefficient_upper_bound requires x >= 2");

  // non-decreasing on a log grid spanning the evaluation range
  {
    double lo = 16.0, hi = std::max(2 * x, 1e6);
    double prev = sigma_of(lo);
    for (int i = 1; i <= 32; ++i) {
      double t = lo * std::pow(hi / lo, (double)i / 32.0);
      double s = sigma_of(t);
      if (!std::isfinite(s)) throw SigmaOutOfRange("sigma(t) must be finite");
      if (s < prev - 1e-12 * std::max(1.0, std::abs(prev)))
        throw SigmaOutOfRange("sigma(t) must be non-decreasing");
      prev = s;
    }
  }
  // the asymptotic ceiling 1 - 2 log log t / log t, checked deep into the
  // regime where that curve is meaningful (log t from 100 to 700)
  for (int i = 0; i <= 12; ++i) {
    double L = 100.0 + 50.0 * i;
    double ceiling = 1.0 - 2.0 * std::log(L) / L;
    if (sigma_of(std::exp(L)) > ceiling + 1e-12)
      throw SigmaOutOfRange("sigma(t) must eventually fall under 1 - 2 log log t/log t");
  }

  double lx = std::log(x);
  double lplus_llx = lx > 1 ? std::log(lx) : 0.0;  // log+ log x
  return 0.5 * (sigma_of(x) + 1.0) * lx + 0.5 * lplus_llx +
         0.5 * f_infinity_log(growth, 2 * x);
}

}  // namespace zomega
