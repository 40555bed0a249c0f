#pragma once

// Instance checks for the truncated Perron formula on finite coefficient
// tables. The smoothed summatory integral int_0^x B(xi) dxi has the exact
// closed form sum_{n<=x} b_n (x - n); the module compares it against the
// contour integral (1/2pi i) int_{b-iT}^{b+iT} F_B(s) x^{s+1} / (s(s+1)) ds
// computed by adaptive quadrature, and reports the residual next to an
// explicit remainder budget (the classical bound with its implied
// constants set to 1). Also houses the averaging-window calculation that
// turns a budget for the integral into one for the coefficients, and the
// resulting log-scale upper bound for sup_{n<=x} a_n.

#include "zomega/dirichlet.hpp"
#include "zomega/errors.hpp"
#include "zomega/growth.hpp"

#include <cstdint>
#include <functional>

namespace zomega {

enum class Contour {
  vertical_line,  // Re s = b throughout
  bent,           // Re s = sigma(|t|) with horizontal connectors at |t| = T
};

struct PerronCheckConfig {
  double b = 2;
  double x = 10;
  double T = 1e4;
  double quadrature_step = 1.0;  // width of the first dyadic panel
  double rel_tol = 1e-9;         // quadrature target relative to the lhs scale
  int workers = 1;
  Contour contour = Contour::vertical_line;
  // boundary abscissa for the bent contour, |t| -> sigma, required
  // non-decreasing with 0 < sigma(t) <= b. Differentiated numerically.
  std::function<double(double)> sigma_of;
};

struct PerronReport {
  double lhs = 0;            // exact sum_{n<=x} b_n (x - n), rounded once
  double main_integral = 0;
  double residual = 0;       // lhs - main_integral
  double remainder_budget = 0;
  double ratio = 0;          // |residual| / remainder_budget
  int64_t panels = 0;        // accepted quadrature panels
  double i0 = 0;             // bent-path piece, 0 on the vertical line
  double i_side = 0;         // connector piece, 0 on the vertical line
  double b = 0, x = 0, T = 0;  // config echo
};

// Evaluate both sides at the cutoff's truncation. Requires f.cutoff() >= x.
// Throws QuadratureNonConverged when panel refinement stalls before the
// tolerance is met.
PerronReport perron_truncated(const DirichletSeries& f, const PerronCheckConfig& cfg);

// The window width h = sqrt(Q(2x)/F_inf(2x)) that balances an O(Q) budget
// for the integral of A against the growth of A itself, and the error
// scale sqrt(Q(2x) F_inf(2x)) it implies for A(x). Q must satisfy
// 0 < Q(x) <= x^2/4 (checked at x and 2x, PreconditionQ otherwise);
// the resulting h <= x is re-checked.
struct SmoothingWindow {
  double h = 0;
  double error_scale = 0;
};
SmoothingWindow smoothing_window(const std::function<double(double)>& Q,
                                 const std::function<double(double)>& F_inf, double x);

// Log-scale upper bound for sup_{n<=x} a_n given the boundary abscissa
// sigma(x) and the growth budget near s = 1:
//   ((sigma(x)+1)/2) log x + (1/2) log+ log x + (1/2) log f_inf(2x).
// sigma_of must be non-decreasing (checked on a grid around x) and must
// fall under 1 - 2 log log t / log t in the large-t regime (checked on a
// far grid, log t in [100, 700]); SigmaOutOfRange otherwise.
double coefficient_upper_bound(const std::function<double(double)>& sigma_of,
                               const GrowthFunction& growth, double x);

}  // namespace zomega
