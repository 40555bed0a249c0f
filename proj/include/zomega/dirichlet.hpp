#pragma once

// Truncated Dirichlet series with exact coefficient arithmetic: convolution
// (Dirichlet multiplication), integer powers, prefix sums, the composed
// series M_F(g(s)) = sum_{n>=1} g^n(s)/n^2 e^{-g*(n)}, and the coefficient
// tables 1 + (-1)^n zeta^(n) used by the theorem instances.
//
// A series is a table of non-negative coefficients for indices 1..X. Three
// storage modes: exact rationals, exact int64 (fast path for counting
// identities like ordered factorizations), and 256-bit floats for tables
// that pick up e^{-g*(n)} or log^n factors. Series are immutable after
// construction; all operations allocate fresh results, so concurrent reads
// are safe.

#include "zomega/errors.hpp"
#include "zomega/growth.hpp"
#include "zomega/numeric.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace zomega {

enum class SeriesMode { exact, integer, wide };

class DirichletSeries {
 public:
  static DirichletSeries zeros(int64_t cutoff, SeriesMode mode);
  static DirichletSeries ones(int64_t cutoff, SeriesMode mode);      // zeta coefficients
  static DirichletSeries identity(int64_t cutoff, SeriesMode mode);  // 1 at n = 1
  static DirichletSeries from_rationals(std::vector<rational> coeffs);
  static DirichletSeries from_integers(std::vector<int64_t> coeffs);
  static DirichletSeries from_wide(std::vector<real256> coeffs);

  int64_t cutoff() const { return cutoff_; }
  SeriesMode mode() const { return mode_; }

  // 1-based accessors; the typed ones require the matching mode
  const rational& rat(int64_t n) const;
  int64_t integer(int64_t n) const;
  const real256& wide(int64_t n) const;
  real256 as_wide(int64_t n) const;  // any mode

  DirichletSeries to_wide() const;

  bool operator==(const DirichletSeries& o) const;

 private:
  DirichletSeries(int64_t cutoff, SeriesMode mode);
  friend DirichletSeries convolve(const DirichletSeries&, const DirichletSeries&);
  friend DirichletSeries compose_mf(const DirichletSeries&, const GrowthFunction&, int64_t);
  friend DirichletSeries compose_mf_partial(const DirichletSeries&, const GrowthFunction&,
                                            int64_t);

  void check_nonnegative() const;

  int64_t cutoff_ = 0;
  SeriesMode mode_ = SeriesMode::exact;
  std::vector<rational> rat_;
  std::vector<int64_t> int_;
  std::vector<real256> wide_;
};

// Dirichlet multiplication truncated at the common cutoff:
// result[n] = sum_{d|n} f[d] g[n/d]. Requires equal cutoffs and equal
// modes. Integer mode checks for int64 overflow and reports it.
DirichletSeries convolve(const DirichletSeries& f, const DirichletSeries& g);

// k-fold convolution power, k >= 0 (k = 0 is the convolution identity).
DirichletSeries power(const DirichletSeries& g, int64_t k);

// Exact prefix sum over indices <= x. The typed version requires exact or
// integer mode; the wide version accepts any mode.
rational summatory(const DirichletSeries& f, double x);
real256 summatory_wide(const DirichletSeries& f, double x);

// Coefficient table of M_F(g(s)) up to the cutoff of g, in wide mode.
// The n-sum runs to at least n_max and extends adaptively until a
// certified geometric tail falls below 1e-20 of the largest coefficient;
// if no certificate is reached the truncation is reported as unsound.
DirichletSeries compose_mf(const DirichletSeries& g, const GrowthFunction& growth,
                           int64_t n_max);

// The same composition summed to exactly n_terms, with no tail certificate.
// Every term is nonnegative, so each coefficient is a lower bound for the
// full composition and grows toward it as n_terms does. Useful where the
// certificate in compose_mf cannot fire at feasible depth (slowly growing
// conjugates) but a from-below table is still meaningful.
DirichletSeries compose_mf_partial(const DirichletSeries& g, const GrowthFunction& growth,
                                   int64_t n_terms);

// Coefficients of 1 + (-1)^n zeta^(n)(s): index 1 -> 1 (2 when n = 0),
// index m >= 2 -> (log m)^n. Exact mode for n = 0, wide mode otherwise.
// Consults the binary cache when ZOMEGA_CACHE_DIR is set.
DirichletSeries zeta_family_series(int n, int64_t cutoff, bool use_cache = true);

// CSV interchange: "index,coefficient" rows. Exact mode writes p/q form,
// integer mode plain integers, wide mode enough digits to round-trip.
void export_csv(const DirichletSeries& s, const std::string& path);
DirichletSeries import_csv(const std::string& path, SeriesMode mode);

// one coefficient as text in the mode's lossless form (p/q, decimal integer,
// or round-trip scientific)
std::string coeff_to_string(const DirichletSeries& s, int64_t n);

// Versioned binary cache for computed family tables, keyed by (family
// tag, n, cutoff) under $ZOMEGA_CACHE_DIR; disabled when the variable is
// unset. Loads validate magic, key, and a content hash, returning nullopt
// on any mismatch.
std::string cache_dir();
void cache_store(const DirichletSeries& s, const std::string& family, int n);
std::optional<DirichletSeries> cache_load(const std::string& family, int n, int64_t cutoff);

}  // namespace zomega
