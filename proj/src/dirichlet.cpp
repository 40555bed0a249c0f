#include "zomega/dirichlet.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace zomega {

// ---------------------------------------------------------------------------
// construction
// ---------------------------------------------------------------------------

DirichletSeries::DirichletSeries(int64_t cutoff, SeriesMode mode)
    : cutoff_(cutoff), mode_(mode) {
  if (cutoff < 1) throw ContractError("series cutoff must be >= 1");
}

void DirichletSeries::check_nonnegative() const {
  switch (mode_) {
    case SeriesMode::exact:
      for (const rational& v : rat_)
        if (v < 0) throw ContractError("series coefficients must be non-negative");
      break;
    case SeriesMode::integer:
      for (int64_t v : int_)
        if (v < 0) throw ContractError("series coefficients must be non-negative");
      break;
    case SeriesMode::wide:
      for (const real256& v : wide_)
        if (!(v >= real256(0))) throw ContractError("series coefficients must be non-negative");
      break;
  }
}

DirichletSeries DirichletSeries::zeros(int64_t cutoff, SeriesMode mode) {
  DirichletSeries s(cutoff, mode);
  switch (mode) {
    case SeriesMode::exact: s.rat_.assign(cutoff, rational(0)); break;
    case SeriesMode::integer: s.int_.assign(cutoff, 0); break;
    case SeriesMode::wide: s.wide_.assign(cutoff, real256(0)); break;
  }
  return s;
}

DirichletSeries DirichletSeries::ones(int64_t cutoff, SeriesMode mode) {
  DirichletSeries s(cutoff, mode);
  switch (mode) {
    case SeriesMode::exact: s.rat_.assign(cutoff, rational(1)); break;
    case SeriesMode::integer: s.int_.assign(cutoff, 1); break;
    case SeriesMode::wide: s.wide_.assign(cutoff, real256(1)); break;
  }
  return s;
}

DirichletSeries DirichletSeries::identity(int64_t cutoff, SeriesMode mode) {
  DirichletSeries s = zeros(cutoff, mode);
  switch (mode) {
    case SeriesMode::exact: s.rat_[0] = 1; break;
    case SeriesMode::integer: s.int_[0] = 1; break;
    case SeriesMode::wide: s.wide_[0] = 1; break;
  }
  return s;
}

DirichletSeries DirichletSeries::from_rationals(std::vector<rational> coeffs) {
  DirichletSeries s((int64_t)coeffs.size(), SeriesMode::exact);
  s.rat_ = std::move(coeffs);
  s.check_nonnegative();
  return s;
}

DirichletSeries DirichletSeries::from_integers(std::vector<int64_t> coeffs) {
  DirichletSeries s((int64_t)coeffs.size(), SeriesMode::integer);
  s.int_ = std::move(coeffs);
  s.check_nonnegative();
  return s;
}

DirichletSeries DirichletSeries::from_wide(std::vector<real256> coeffs) {
  DirichletSeries s((int64_t)coeffs.size(), SeriesMode::wide);
  s.wide_ = std::move(coeffs);
  s.check_nonnegative();
  return s;
}

const rational& DirichletSeries::rat(int64_t n) const {
  if (mode_ != SeriesMode::exact) throw ContractError("series is not in exact mode");
  if (n < 1 || n > cutoff_) throw ContractError("series index out of range");
  return rat_[n - 1];
}

int64_t DirichletSeries::integer(int64_t n) const {
  if (mode_ != SeriesMode::integer) throw ContractError("series is not in integer mode");
  if (n < 1 || n > cutoff_) throw ContractError("series index out of range");
  return int_[n - 1];
}

const real256& DirichletSeries::wide(int64_t n) const {
  if (mode_ != SeriesMode::wide) throw ContractError("series is not in wide mode");
  if (n < 1 || n > cutoff_) throw ContractError("series index out of range");
  return wide_[n - 1];
}

real256 DirichletSeries::as_wide(int64_t n) const {
  if (n < 1 || n > cutoff_) throw ContractError("series index out of range");
  switch (mode_) {
    case SeriesMode::exact: {
      const rational& q = rat_[n - 1];
      return real256(numerator(q).str()) / real256(denominator(q).str());
    }
    case SeriesMode::integer: return real256(int_[n - 1]);
    case SeriesMode::wide: return wide_[n - 1];
  }
  throw ContractError("unhandled mode");
}

DirichletSeries DirichletSeries::to_wide() const {
  if (mode_ == SeriesMode::wide) return *this;
  DirichletSeries s(cutoff_, SeriesMode::wide);
  s.wide_.reserve(cutoff_);
  for (int64_t n = 1; n <= cutoff_; ++n) s.wide_.push_back(as_wide(n));
  return s;
}

bool DirichletSeries::operator==(const DirichletSeries& o) const {
  return cutoff_ == o.cutoff_ && mode_ == o.mode_ && rat_ == o.rat_ && int_ == o.int_ &&
         wide_ == o.wide_;
}

// ---------------------------------------------------------------------------
// arithmetic
// ---------------------------------------------------------------------------

DirichletSeries convolve(const DirichletSeries& f, const DirichletSeries& g) {
  if (f.cutoff() != g.cutoff())
    throw CutoffMismatch("convolution requires equal cutoffs");
  if (f.mode() != g.mode())
    throw ContractError("convolution requires matching coefficient modes");
  const int64_t X = f.cutoff();
  DirichletSeries out = DirichletSeries::zeros(X, f.mode());
  // multiples loop: X/1 + X/2 + ... = O(X log X) coefficient updates
  switch (f.mode()) {
    case SeriesMode::exact:
      for (int64_t d = 1; d <= X; ++d) {
        const rational& fd = f.rat_[d - 1];
        if (fd == 0) continue;
        for (int64_t m = d; m <= X; m += d) out.rat_[m - 1] += fd * g.rat_[m / d - 1];
      }
      break;
    case SeriesMode::integer:
      for (int64_t d = 1; d <= X; ++d) {
        int64_t fd = f.int_[d - 1];
        if (fd == 0) continue;
        for (int64_t m = d; m <= X; m += d) {
          int64_t p;
          if (__builtin_mul_overflow(fd, g.int_[m / d - 1], &p) ||
              __builtin_add_overflow(out.int_[m - 1], p, &out.int_[m - 1]))
            throw OverflowSentinel("int64 overflow in convolution; use exact mode");
        }
      }
      break;
    case SeriesMode::wide:
      for (int64_t d = 1; d <= X; ++d) {
        const real256& fd = f.wide_[d - 1];
        if (fd == 0) continue;
        for (int64_t m = d; m <= X; m += d) out.wide_[m - 1] += fd * g.wide_[m / d - 1];
      }
      break;
  }
  return out;
}

DirichletSeries power(const DirichletSeries& g, int64_t k) {
  if (k < 0) throw ContractError("power requires k >= 0");
  DirichletSeries result = DirichletSeries::identity(g.cutoff(), g.mode());
  if (k == 0) return result;
  DirichletSeries base = g;
  for (;;) {
    if (k & 1) result = convolve(result, base);
    k >>= 1;
    if (!k) break;
    base = convolve(base, base);
  }
  return result;
}

rational summatory(const DirichletSeries& f, double x) {
  if (!(x >= 0) || !(x <= (double)f.cutoff()))
    throw ContractError("summatory requires 0 <= x <= cutoff");
  if (f.mode() == SeriesMode::wide)
    throw ContractError("wide-mode series: use summatory_wide");
  int64_t n = (int64_t)std::floor(x);
  rational s(0);
  for (int64_t m = 1; m <= n; ++m)
    s += f.mode() == SeriesMode::exact ? f.rat(m) : rational(f.integer(m));
  return s;
}

real256 summatory_wide(const DirichletSeries& f, double x) {
  if (!(x >= 0) || !(x <= (double)f.cutoff()))
    throw ContractError("summatory requires 0 <= x <= cutoff");
  int64_t n = (int64_t)std::floor(x);
  real256 s(0);
  for (int64_t m = 1; m <= n; ++m) s += f.as_wide(m);
  return s;
}

// ---------------------------------------------------------------------------
// composition under the entire series
// ---------------------------------------------------------------------------

DirichletSeries compose_mf(const DirichletSeries& g, const GrowthFunction& growth,
                           int64_t n_max) {
  if (n_max < 1) throw ContractError("compose_mf requires n_max >= 1");
  const int64_t X = g.cutoff();
  DirichletSeries gw = g.to_wide();

  std::vector<double> fs;  // fs[j-1] = g*(j)
  auto fstar = [&](int64_t j) {
    while ((int64_t)fs.size() < j)
      fs.push_back(conjugate(growth, (double)fs.size() + 1).value);
    return fs[j - 1];
  };

  // envelope for the tail: every convolution with g multiplies the largest
  // coefficient of g^j by at most D = max_m sum_{d|m} g[d]
  double D = 0;
  {
    std::vector<double> dsum((size_t)X, 0.0);
    for (int64_t d = 1; d <= X; ++d) {
      double gd = to_double(gw.wide_[d - 1]);
      if (gd == 0) continue;
      for (int64_t m = d; m <= X; m += d) dsum[m - 1] += gd;
    }
    for (double v : dsum) D = std::max(D, v);
    D *= 1 + 1e-9;  // absorb the double rounding of the envelope itself
  }

  DirichletSeries out = DirichletSeries::zeros(X, SeriesMode::wide);
  DirichletSeries P = gw;  // g^j as j advances
  const int64_t cap = std::max<int64_t>(n_max, 4096);
  bool certified = false;
  for (int64_t j = 1; j <= cap; ++j) {
    real256 w = exp(real256(-fstar(j))) / real256((double)j * (double)j);
    real256 pmax(0), lead(0);
    for (int64_t m = 1; m <= X; ++m) {
      out.wide_[m - 1] += w * P.wide_[m - 1];
      if (P.wide_[m - 1] > pmax) pmax = P.wide_[m - 1];
      if (out.wide_[m - 1] > lead) lead = out.wide_[m - 1];
    }
    if (j >= n_max) {
      if (pmax == 0) {  // g has no unit coefficient and 2^j already exceeds X
        certified = true;
        break;
      }
      double rho = D * std::exp(-(fstar(j + 1) - fstar(j)));
      if (rho < 0.5) {
        // remaining terms are bounded by a geometric series with ratio rho
        // starting from pmax * D * e^{-g*(j+1)}/(j+1)^2; rho < 1/2 makes the
        // sum at most twice its first term
        real256 t1 = real256(pmax) * real256(D) * exp(real256(-fstar(j + 1))) /
                     real256((double)(j + 1) * (double)(j + 1));
        if (2 * t1 <= real256(1e-20) * lead) {
          certified = true;
          break;
        }
      }
    }
    if (j < cap) P = convolve(P, gw);
  }
  if (!certified)
    throw TruncationUnsound("composition tail not certified within the iteration cap");
  return out;
}

DirichletSeries compose_mf_partial(const DirichletSeries& g, const GrowthFunction& growth,
                                   int64_t n_terms) {
  if (n_terms < 1) throw ContractError("compose_mf_partial requires n_terms >= 1");
  const int64_t X = g.cutoff();
  DirichletSeries gw = g.to_wide();
  DirichletSeries out = DirichletSeries::zeros(X, SeriesMode::wide);
  DirichletSeries P = gw;
  for (int64_t j = 1; j <= n_terms; ++j) {
    real256 w = exp(real256(-conjugate(growth, (double)j).value)) /
                real256((double)j * (double)j);
    for (int64_t m = 1; m <= X; ++m) out.wide_[m - 1] += w * P.wide_[m - 1];
    if (j < n_terms) P = convolve(P, gw);
  }
  return out;
}

// ---------------------------------------------------------------------------
// the 1 + (-1)^n zeta^(n) coefficient tables
// ---------------------------------------------------------------------------

DirichletSeries zeta_family_series(int n, int64_t cutoff, bool use_cache) {
  if (n < 0) throw ContractError("derivative order must be >= 0");
  if (cutoff < 2) throw ContractError("cutoff must be >= 2");
  const std::string family = "zeta_family";
  if (use_cache)
    if (auto cached = cache_load(family, n, cutoff)) return *cached;

  DirichletSeries s = [&] {
    if (n == 0) {
      std::vector<rational> c((size_t)cutoff, rational(1));
      c[0] = 2;  // the extra 1 lands on the n = 1 coefficient
      return DirichletSeries::from_rationals(std::move(c));
    }
    std::vector<real256> c;
    c.reserve((size_t)cutoff);
    c.push_back(real256(1));
    for (int64_t m = 2; m <= cutoff; ++m) c.push_back(pow(log(real256(m)), n));
    return DirichletSeries::from_wide(std::move(c));
  }();

  if (use_cache) cache_store(s, family, n);
  return s;
}

// ---------------------------------------------------------------------------
// CSV interchange
// ---------------------------------------------------------------------------

std::string coeff_to_string(const DirichletSeries& s, int64_t n) {
  switch (s.mode()) {
    case SeriesMode::exact: return s.rat(n).str();
    case SeriesMode::integer: return std::to_string(s.integer(n));
    // precision 0 asks for as many digits as an exact round trip needs
    case SeriesMode::wide: return s.wide(n).str(0, std::ios_base::scientific);
  }
  throw ContractError("unhandled mode");
}

void export_csv(const DirichletSeries& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ContractError("cannot open for writing: " + path);
  out << "index,coefficient\n";
  for (int64_t n = 1; n <= s.cutoff(); ++n) out << n << ',' << coeff_to_string(s, n) << '\n';
  if (!out) throw ContractError("write failed: " + path);
}

DirichletSeries import_csv(const std::string& path, SeriesMode mode) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "index,coefficient")
    throw ContractError("bad CSV header in " + path);
  std::vector<rational> rats;
  std::vector<int64_t> ints;
  std::vector<real256> wides;
  int64_t expect = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    size_t comma = line.find(',');
    if (comma == std::string::npos) throw ContractError("malformed CSV row: " + line);
    int64_t idx = std::stoll(line.substr(0, comma));
    if (idx != expect) throw ContractError("CSV rows must be dense and ordered from 1");
    std::string val = line.substr(comma + 1);
    switch (mode) {
      case SeriesMode::exact: rats.emplace_back(val); break;
      case SeriesMode::integer: ints.push_back(std::stoll(val)); break;
      case SeriesMode::wide: wides.emplace_back(val); break;
    }
    ++expect;
  }
  switch (mode) {
    case SeriesMode::exact: return DirichletSeries::from_rationals(std::move(rats));
    case SeriesMode::integer: return DirichletSeries::from_integers(std::move(ints));
    case SeriesMode::wide: return DirichletSeries::from_wide(std::move(wides));
  }
  throw ContractError("unhandled mode");
}

// ---------------------------------------------------------------------------
// binary cache
// ---------------------------------------------------------------------------

namespace {

constexpr char kCacheMagic[9] = "ZOMGDS01";

void put_u64(std::string& buf, uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back((char)(v >> (8 * i)));
}

void put_str(std::string& buf, const std::string& s) {
  put_u64(buf, s.size());
  buf += s;
}

bool get_u64(const std::string& buf, size_t& pos, uint64_t& v) {
  if (pos + 8 > buf.size()) return false;
  v = 0;
  for (int i = 0; i < 8; ++i) v |= (uint64_t)(unsigned char)buf[pos + i] << (8 * i);
  pos += 8;
  return true;
}

bool get_str(const std::string& buf, size_t& pos, std::string& s) {
  uint64_t len;
  if (!get_u64(buf, pos, len) || pos + len > buf.size()) return false;
  s.assign(buf, pos, len);
  pos += len;
  return true;
}

std::string cache_path(const std::string& family, int n, int64_t cutoff) {
  std::string safe;
  for (char c : family)
    safe += (std::isalnum((unsigned char)c) || c == '_') ? c : '_';
  return cache_dir() + "/" + safe + "_" + std::to_string(n) + "_" + std::to_string(cutoff) +
         ".zds";
}

}  // namespace

std::string cache_dir() {
  const char* dir = std::getenv("ZOMEGA_CACHE_DIR");
  return dir ? std::string(dir) : std::string();
}

void cache_store(const DirichletSeries& s, const std::string& family, int n) {
  if (cache_dir().empty()) return;
  std::string payload;
  put_str(payload, family);
  put_u64(payload, (uint64_t)n);
  put_u64(payload, (uint64_t)s.cutoff());
  put_u64(payload, (uint64_t)s.mode());
  for (int64_t m = 1; m <= s.cutoff(); ++m) put_str(payload, coeff_to_string(s, m));
  std::string path = cache_path(family, n, s.cutoff());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return;  // cache is best-effort; a read-only dir is not an error
  out.write(kCacheMagic, 8);
  out.write(payload.data(), (std::streamsize)payload.size());
  uint64_t h = fnv1a64(payload);
  std::string tail;
  put_u64(tail, h);
  out.write(tail.data(), 8);
}

std::optional<DirichletSeries> cache_load(const std::string& family, int n, int64_t cutoff) {
  if (cache_dir().empty()) return std::nullopt;
  std::ifstream in(cache_path(family, n, cutoff), std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  std::string blob = ss.str();
  if (blob.size() < 16 || blob.compare(0, 8, kCacheMagic, 8) != 0) return std::nullopt;
  std::string payload = blob.substr(8, blob.size() - 16);
  size_t hpos = blob.size() - 8;
  uint64_t stored = 0;
  for (int i = 0; i < 8; ++i) stored |= (uint64_t)(unsigned char)blob[hpos + i] << (8 * i);
  if (stored != fnv1a64(payload)) return std::nullopt;

  size_t pos = 0;
  std::string fam;
  uint64_t fn, fx, fmode;
  if (!get_str(payload, pos, fam) || !get_u64(payload, pos, fn) ||
      !get_u64(payload, pos, fx) || !get_u64(payload, pos, fmode))
    return std::nullopt;
  if (fam != family || fn != (uint64_t)n || fx != (uint64_t)cutoff) return std::nullopt;

  try {
    switch ((SeriesMode)fmode) {
      case SeriesMode::exact: {
        std::vector<rational> c;
        c.reserve(fx);
        for (uint64_t m = 0; m < fx; ++m) {
          std::string v;
          if (!get_str(payload, pos, v)) return std::nullopt;
          c.emplace_back(v);
        }
        return DirichletSeries::from_rationals(std::move(c));
      }
      case SeriesMode::integer: {
        std::vector<int64_t> c;
        c.reserve(fx);
        for (uint64_t m = 0; m < fx; ++m) {
          std::string v;
          if (!get_str(payload, pos, v)) return std::nullopt;
          c.push_back(std::stoll(v));
        }
        return DirichletSeries::from_integers(std::move(c));
      }
      case SeriesMode::wide: {
        std::vector<real256> c;
        c.reserve(fx);
        for (uint64_t m = 0; m < fx; ++m) {
          std::string v;
          if (!get_str(payload, pos, v)) return std::nullopt;
          c.emplace_back(v);
        }
        return DirichletSeries::from_wide(std::move(c));
      }
    }
  } catch (const std::exception&) {
    return std::nullopt;  // corrupted payload, fall back to recomputation
  }
  return std::nullopt;
}

}  // namespace zomega
