#pragma once

// Grid scanner for sup |zeta^(n)(sigma+it)| / F(t) over regions bounded below
// by a case-specific abscissa curve sigma(t) and above by sigma = 1.
//
// Five presets. Each pairs a boundary curve with the scaling F it is meant
// to witness (llt = log log t, lllt = log log log t):
//
//   zaitsev(eps)   sigma = 1 - (4+eps) lllt/llt        F = log T (constant)
//   case1(eps,d)   sigma = 1 - (4+eps) lllt/llt        F = exp((llt)^{1+eps/2-d})
//   case2          sigma = 1 - (2+o1)/lllt             F = exp(exp(llt/lllt))
//   case3(A)       sigma = 1 - (2+o1) lllt/llt         F = (llt)^A
//   case4(alpha)   sigma = 1 - (2+o1)/(llt)^{1-alpha}  F = exp(exp((llt)^alpha))
//
// The o(1) corrections in the source formulas are zero by default; the `o1`
// knob substitutes o1/(lllt)^{1/3}, which reproduces corrections of the
// shape c/(lllt)^{4/3} when the curve divides by lllt. Boundary values at or
// below kSigmaMin clamp to kSigmaMin: evaluation accuracy degrades far from
// sigma = 1 and the bounds the scan probes assume a positive floor anyway.
//
// Grids are nested by construction. A requested point count is rounded up to
// 2^L + 1 and the axis fractions are i/2^L, so any refinement's point set
// contains the coarser one and the reported supremum can only grow. Cell
// evaluations are pure functions of the spec, workers merge maxima with an
// order-independent rule, and canonical report serializations omit wall time,
// which makes reports byte-identical across runs and worker counts.

#include "zomega/errors.hpp"

#include "json.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace zomega {

enum class ScanCase { zaitsev, case1, case2, case3, case4 };

enum class GridSpacing { linear, log };

struct GridSpec {
  int t_points = 33;
  int sigma_points = 17;
  GridSpacing spacing = GridSpacing::log;
};

struct RegionSpec {
  ScanCase scan_case = ScanCase::zaitsev;
  double eps = 0;       // zaitsev and case1
  double delta = 0.25;  // case1
  double A = 2;         // case3
  double alpha = 0.5;   // case4
  double o1 = 0;        // coefficient of the vanishing boundary correction
  int n = 0;            // derivative order passed to the evaluator
  double t0 = 100;
  double T = 1e5;
  GridSpec grid;

  void validate() const;

  nlohmann::json to_json() const;
  static RegionSpec from_json(const nlohmann::json& j);
};

// boundary values at or below this clamp to it
constexpr double kSigmaMin = 0.55;

// raw curve value, which can be far below 0 at small heights
double sigma_boundary_raw(const RegionSpec& spec, double t);

// the clamped curve actually used as the lower grid edge
double sigma_boundary(const RegionSpec& spec, double t);

// same curves parameterized by log log t, for heights that overflow double
// (the curves only ever see t through its iterated logarithms)
double sigma_boundary_raw_loglog(const RegionSpec& spec, double loglog_t);
double sigma_boundary_loglog(const RegionSpec& spec, double loglog_t);

// natural log of the denominator F; kept in log form because case2 and
// case4 overflow double well inside sensible scan ranges
double log_f_scale(const RegionSpec& spec, double t);

// named defaults: "zaitsev", "case1", "case2", "case3", "case4"
RegionSpec preset_region(const std::string& name, double T, int n = 0);

struct BandMax {
  double t = 0;
  double sigma = 0;          // argmax abscissa of the raw ratio in this band
  double ratio = 0;          // band max of |zeta^(n)|/F
  double ratio_deflated = 0; // band max of (|zeta^(n)| - error bound)/F
  bool evaluated = false;
};

struct ScanReport {
  bool complete = false;
  double sup_ratio = 0;
  double sup_ratio_deflated = 0;
  double argmax_t = 0;
  double argmax_sigma = 0;
  int64_t cells_evaluated = 0;
  std::vector<BandMax> per_band;  // one entry per t grid point
  double elapsed_seconds = 0;     // not part of the canonical serializations
  RegionSpec spec;                // echo, with effective grid counts below
  double target_error = 0;
  int effective_t_points = 0;
  int effective_sigma_points = 0;
};

struct ScanOptions {
  int workers = 1;
  std::string checkpoint_path;        // empty disables checkpointing
  int64_t checkpoint_every = 0;       // cells between periodic writes; 0 = only on stop
  std::function<bool()> should_stop;  // polled before each cell; may be empty
};

ScanReport run_scan(const RegionSpec& spec, double target_error);
ScanReport run_scan(const RegionSpec& spec, double target_error, const ScanOptions& opt);

// canonical serializations, deterministic byte for byte for a given spec
std::string report_json(const ScanReport& rep);
std::string report_csv(const ScanReport& rep);

// hash binding checkpoints to the spec and target that produced them
uint64_t spec_hash(const RegionSpec& spec, double target_error);

}  // namespace zomega
