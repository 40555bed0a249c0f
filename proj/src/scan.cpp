#include "zomega/scan.hpp"

#include "zomega/numeric.hpp"
#include "zomega/zeta.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <mutex>
#include <optional>
#include <string_view>
#include <thread>

namespace zomega {

namespace {

const double kEE = std::exp(std::exp(1.0));

struct LogLadder {
  double llt;   // log log t
  double lllt;  // log log log t
};

LogLadder ladder_from_loglog(double llt) {
  if (!(llt > 1.0))
    throw DomainError("boundary curves need log log t > 1 (t > e^e); got log log t = " +
                      format_g17(llt));
  return {llt, std::log(llt)};
}

LogLadder ladder_from_t(double t) {
  if (!(t > kEE))
    throw DomainError("boundary curves need t > e^e = 15.15...; got t = " + format_g17(t));
  double llt = std::log(std::log(t));
  if (!(llt > 1.0))  // t barely past the edge can round llt down to 1
    throw DomainError("t = " + format_g17(t) + " is too close to e^e for the triple log");
  return ladder_from_loglog(llt);
}

const char* case_tag(ScanCase c) {
  switch (c) {
    case ScanCase::zaitsev: return "zaitsev";
    case ScanCase::case1: return "case1";
    case ScanCase::case2: return "case2";
    case ScanCase::case3: return "case3";
    case ScanCase::case4: return "case4";
  }
  throw ContractError("unknown scan case");
}

double raw_boundary(const RegionSpec& spec, const LogLadder& g) {
  // the o(1) slot, vanishing like (log log log t)^{-1/3}
  double o1 = spec.o1 > 0 ? spec.o1 / std::cbrt(g.lllt) : 0.0;
  switch (spec.scan_case) {
    case ScanCase::zaitsev:
    case ScanCase::case1: return 1.0 - (4.0 + spec.eps) * g.lllt / g.llt;
    case ScanCase::case2: return 1.0 - (2.0 + o1) / g.lllt;
    case ScanCase::case3: return 1.0 - (2.0 + o1) * g.lllt / g.llt;
    case ScanCase::case4: return 1.0 - (2.0 + o1) / std::pow(g.llt, 1.0 - spec.alpha);
  }
  throw ContractError("unknown scan case");
}

// grid axes are dyadic: a requested count rounds up to 2^L + 1 points at
// fractions i/2^L, so refined grids contain coarse ones exactly
int effective_points(int requested) {
  if (requested < 2) throw ContractError("grid needs at least 2 points per axis");
  int64_t segments = 1;
  while (segments < requested - 1) segments <<= 1;
  if (segments >= (int64_t(1) << 24)) throw ContractError("grid axis too large");
  return int(segments + 1);
}

std::vector<double> axis_fractions(int points) {
  std::vector<double> f(points);
  for (int i = 0; i < points; ++i) f[i] = double(i) / double(points - 1);
  return f;
}

// live scan state; also what checkpoints persist
struct ScanState {
  std::vector<uint8_t> done;   // one flag per cell, t-major
  std::vector<double> raw;     // per-band max of |zeta^(n)|/F
  std::vector<int32_t> sj;     // sigma index of that max, -1 if band untouched
  std::vector<double> defl;    // per-band max of the error-deflated ratio
  int64_t completed = 0;
};

constexpr std::string_view kCkptMagic = "ZOMGCKPT";
constexpr uint32_t kCkptVersion = 1;

void push_u32(std::string& s, uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(char((v >> (8 * i)) & 0xff));
}
void push_u64(std::string& s, uint64_t v) {
  for (int i = 0; i < 8; ++i) s.push_back(char((v >> (8 * i)) & 0xff));
}
void push_f64(std::string& s, double v) {
  uint64_t u;
  std::memcpy(&u, &v, 8);
  push_u64(s, u);
}

uint64_t read_u64(const std::string& s, size_t& p) {
  if (p + 8 > s.size()) throw ContractError("checkpoint file is truncated");
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= uint64_t(uint8_t(s[p + i])) << (8 * i);
  p += 8;
  return v;
}
uint32_t read_u32(const std::string& s, size_t& p) {
  if (p + 4 > s.size()) throw ContractError("checkpoint file is truncated");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= uint32_t(uint8_t(s[p + i])) << (8 * i);
  p += 4;
  return v;
}
double read_f64(const std::string& s, size_t& p) {
  uint64_t u = read_u64(s, p);
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}

std::string encode_checkpoint(uint64_t hash, int tp, int sp, const ScanState& st) {
  std::string payload;
  push_u32(payload, kCkptVersion);
  push_u64(payload, hash);
  push_u32(payload, uint32_t(tp));
  push_u32(payload, uint32_t(sp));
  push_u64(payload, uint64_t(st.completed));
  int64_t total = int64_t(tp) * sp;
  for (int64_t byte = 0; byte * 8 < total; ++byte) {
    uint8_t b = 0;
    for (int bit = 0; bit < 8 && byte * 8 + bit < total; ++bit)
      if (st.done[byte * 8 + bit]) b |= uint8_t(1) << bit;
    payload.push_back(char(b));
  }
  for (int i = 0; i < tp; ++i) {
    push_f64(payload, st.raw[i]);
    push_u32(payload, uint32_t(st.sj[i]));
    push_f64(payload, st.defl[i]);
  }
  std::string out(kCkptMagic);
  out += payload;
  push_u64(out, fnv1a64(payload));
  return out;
}

std::optional<ScanState> load_checkpoint(const std::string& path, uint64_t hash, int tp,
                                         int sp) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;  // nothing there yet, start fresh
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < kCkptMagic.size() + 8 ||
      std::string_view(buf).substr(0, kCkptMagic.size()) != kCkptMagic)
    throw ContractError("file at " + path + " is not a scan checkpoint");
  std::string payload = buf.substr(kCkptMagic.size(), buf.size() - kCkptMagic.size() - 8);
  size_t tail = buf.size() - 8;
  if (read_u64(buf, tail) != fnv1a64(payload))
    throw ContractError("checkpoint at " + path + " is corrupt");
  size_t p = 0;
  if (read_u32(payload, p) != kCkptVersion)
    throw ContractError("checkpoint at " + path + " has an unsupported version");
  if (read_u64(payload, p) != hash)
    throw ContractError("checkpoint at " + path +
                        " belongs to a different scan; remove it to start over");
  if (read_u32(payload, p) != uint32_t(tp) || read_u32(payload, p) != uint32_t(sp))
    throw ContractError("checkpoint grid does not match this scan");
  ScanState st;
  st.completed = int64_t(read_u64(payload, p));
  int64_t total = int64_t(tp) * sp;
  st.done.assign(total, 0);
  int64_t popcount = 0;
  for (int64_t byte = 0; byte * 8 < total; ++byte) {
    if (p >= payload.size()) throw ContractError("checkpoint file is truncated");
    uint8_t b = uint8_t(payload[p++]);
    popcount += std::popcount(unsigned(b));
    for (int bit = 0; bit < 8 && byte * 8 + bit < total; ++bit)
      st.done[byte * 8 + bit] = (b >> bit) & 1;
  }
  if (popcount != st.completed) throw ContractError("checkpoint at " + path + " is corrupt");
  st.raw.resize(tp);
  st.sj.resize(tp);
  st.defl.resize(tp);
  for (int i = 0; i < tp; ++i) {
    st.raw[i] = read_f64(payload, p);
    st.sj[i] = int32_t(read_u32(payload, p));
    st.defl[i] = read_f64(payload, p);
  }
  return st;
}

void write_checkpoint(const std::string& path, const std::string& bytes) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), std::streamsize(bytes.size()));
    if (!out) throw ContractError("cannot write checkpoint at " + path);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw ContractError("cannot replace checkpoint at " + path + ": " + ec.message());
}

void append_spec_fields(std::string& s, const RegionSpec& spec) {
  s += "case=";
  s += case_tag(spec.scan_case);
  s += ";eps=" + format_g17(spec.eps);
  s += ";delta=" + format_g17(spec.delta);
  s += ";A=" + format_g17(spec.A);
  s += ";alpha=" + format_g17(spec.alpha);
  s += ";o1=" + format_g17(spec.o1);
  s += ";n=" + std::to_string(spec.n);
  s += ";t0=" + format_g17(spec.t0);
  s += ";T=" + format_g17(spec.T);
  s += ";spacing=";
  s += spec.grid.spacing == GridSpacing::log ? "log" : "linear";
}

// json fragment for the spec echo; params listed per case only
std::string spec_json(const RegionSpec& spec) {
  std::string s = "{\"case\": \"";
  s += case_tag(spec.scan_case);
  s += "\", \"params\": {";
  switch (spec.scan_case) {
    case ScanCase::zaitsev: s += "\"eps\": " + format_g17(spec.eps); break;
    case ScanCase::case1:
      s += "\"eps\": " + format_g17(spec.eps) + ", \"delta\": " + format_g17(spec.delta);
      break;
    case ScanCase::case2: s += "\"o1\": " + format_g17(spec.o1); break;
    case ScanCase::case3:
      s += "\"A\": " + format_g17(spec.A) + ", \"o1\": " + format_g17(spec.o1);
      break;
    case ScanCase::case4:
      s += "\"alpha\": " + format_g17(spec.alpha) + ", \"o1\": " + format_g17(spec.o1);
      break;
  }
  s += "}, \"n\": " + std::to_string(spec.n);
  s += ", \"t0\": " + format_g17(spec.t0);
  s += ", \"T\": " + format_g17(spec.T);
  s += ", \"grid\": {\"t_points\": " + std::to_string(spec.grid.t_points);
  s += ", \"sigma_points\": " + std::to_string(spec.grid.sigma_points);
  s += ", \"spacing\": \"";
  s += spec.grid.spacing == GridSpacing::log ? "log" : "linear";
  s += "\"}}";
  return s;
}

}  // namespace

void RegionSpec::validate() const {
  if (!(t0 > kEE))
    throw DomainError("scan needs t0 > e^e = 15.15...; got t0 = " + format_g17(t0));
  if (!(T > t0)) throw ContractError("scan needs t0 < T");
  if (n < 0 || n > ZetaEvaluator<double>::max_derivative)
    throw ContractError("derivative order must lie in [0, 8]");
  if (grid.t_points < 2 || grid.sigma_points < 2)
    throw ContractError("grid needs at least 2 points per axis");
  if (!(o1 >= 0)) throw ContractError("the o1 correction coefficient must be >= 0");
  switch (scan_case) {
    case ScanCase::zaitsev:
      if (!(eps >= 0)) throw ContractError("zaitsev needs eps >= 0");
      break;
    case ScanCase::case1:
      if (!(eps >= 0) || !(delta >= 0) || !(1.0 + eps / 2 - delta > 0))
        throw ContractError("case1 needs eps, delta >= 0 with 1 + eps/2 - delta > 0");
      break;
    case ScanCase::case2: break;
    case ScanCase::case3:
      if (!(A > 0)) throw ContractError("case3 needs A > 0");
      break;
    case ScanCase::case4:
      if (!(alpha > 0 && alpha < 1)) throw ContractError("case4 needs 0 < alpha < 1");
      break;
  }
}

double sigma_boundary_raw_loglog(const RegionSpec& spec, double loglog_t) {
  return raw_boundary(spec, ladder_from_loglog(loglog_t));
}

double sigma_boundary_loglog(const RegionSpec& spec, double loglog_t) {
  return std::max(sigma_boundary_raw_loglog(spec, loglog_t), kSigmaMin);
}

double sigma_boundary_raw(const RegionSpec& spec, double t) {
  return raw_boundary(spec, ladder_from_t(t));
}

double sigma_boundary(const RegionSpec& spec, double t) {
  return std::max(sigma_boundary_raw(spec, t), kSigmaMin);
}

double log_f_scale(const RegionSpec& spec, double t) {
  if (spec.scan_case == ScanCase::zaitsev) return std::log(std::log(spec.T));
  LogLadder g = ladder_from_t(t);
  switch (spec.scan_case) {
    case ScanCase::case1: return std::pow(g.llt, 1.0 + spec.eps / 2 - spec.delta);
    case ScanCase::case2: return std::exp(g.llt / g.lllt);
    case ScanCase::case3: return spec.A * g.lllt;  // log (llt)^A
    case ScanCase::case4: return std::exp(std::pow(g.llt, spec.alpha));
    default: throw ContractError("unknown scan case");
  }
}

RegionSpec preset_region(const std::string& name, double T, int n) {
  RegionSpec spec;
  spec.T = T;
  spec.n = n;
  if (name == "zaitsev") {
    spec.scan_case = ScanCase::zaitsev;
    spec.eps = 0;
  } else if (name == "case1") {
    spec.scan_case = ScanCase::case1;
    spec.eps = 1;
    spec.delta = 0.25;
  } else if (name == "case2") {
    spec.scan_case = ScanCase::case2;
  } else if (name == "case3") {
    spec.scan_case = ScanCase::case3;
    spec.A = 2;
  } else if (name == "case4") {
    spec.scan_case = ScanCase::case4;
    spec.alpha = 0.5;
  } else {
    throw ContractError("unknown preset '" + name +
                        "'; valid names: zaitsev, case1, case2, case3, case4");
  }
  spec.validate();
  return spec;
}

uint64_t spec_hash(const RegionSpec& spec, double target_error) {
  std::string s;
  append_spec_fields(s, spec);
  s += ";teff=" + std::to_string(effective_points(spec.grid.t_points));
  s += ";seff=" + std::to_string(effective_points(spec.grid.sigma_points));
  s += ";target=" + format_g17(target_error);
  return fnv1a64(s);
}

ScanReport run_scan(const RegionSpec& spec, double target_error) {
  return run_scan(spec, target_error, ScanOptions{});
}

ScanReport run_scan(const RegionSpec& spec, double target_error, const ScanOptions& opt) {
  spec.validate();
  if (!(target_error > 0)) throw ContractError("target_error must be positive");
  if (opt.workers < 1) throw ContractError("workers must be >= 1");
  auto clock_start = std::chrono::steady_clock::now();

  int tp = effective_points(spec.grid.t_points);
  int sp = effective_points(spec.grid.sigma_points);
  std::vector<double> tfrac = axis_fractions(tp);
  std::vector<double> sfrac = axis_fractions(sp);

  // band geometry; exp/log round-off can spill a hair past the ends, clamp back
  std::vector<double> ts(tp), lo(tp), lf(tp);
  double lt0 = std::log(spec.t0), lT = std::log(spec.T);
  for (int i = 0; i < tp; ++i) {
    double t = spec.grid.spacing == GridSpacing::log
                   ? std::exp(lt0 + tfrac[i] * (lT - lt0))
                   : spec.t0 + tfrac[i] * (spec.T - spec.t0);
    ts[i] = std::clamp(t, spec.t0, spec.T);
    lo[i] = sigma_boundary(spec, ts[i]);
    lf[i] = log_f_scale(spec, ts[i]);
  }

  int64_t total = int64_t(tp) * sp;
  uint64_t hash = spec_hash(spec, target_error);

  ScanState st;
  st.done.assign(total, 0);
  st.raw.assign(tp, -1.0);
  st.sj.assign(tp, -1);
  st.defl.assign(tp, -1.0);
  if (!opt.checkpoint_path.empty()) {
    if (auto prior = load_checkpoint(opt.checkpoint_path, hash, tp, sp)) st = std::move(*prior);
  }

  std::mutex mu;  // guards st and serializes checkpoint writes
  std::atomic<int64_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr first_error;
  int64_t last_ckpt = st.completed;

  auto worker = [&]() {
    ZetaEvaluator<double> ev;
    try {
      while (!stop.load(std::memory_order_relaxed)) {
        int64_t k = next.fetch_add(1, std::memory_order_relaxed);
        if (k >= total) break;
        if (st.done[k]) continue;  // restored before threads started; owner-only writes
        if (opt.should_stop && opt.should_stop()) {
          stop.store(true, std::memory_order_relaxed);
          break;
        }
        int ti = int(k / sp), sj = int(k % sp);
        double sig = std::clamp(lo[ti] + sfrac[sj] * (1.0 - lo[ti]), lo[ti], 1.0);
        if (!(sig >= lo[ti] && sig <= 1.0 && ts[ti] >= spec.t0 && ts[ti] <= spec.T))
          throw NumericalError("grid cell escaped its region");
        EvalResult<double> r = ev.derivative(cx<double>(sig, ts[ti]), spec.n, target_error);
        double av = std::hypot(r.value.re, r.value.im);
        double ratio = 0, defl = 0;
        if (lf[ti] < 700.0) {  // else F overflows double and the ratio is 0
          double F = std::exp(lf[ti]);
          ratio = av / F;
          defl = std::max(0.0, av - r.error_bound) / F;
        }
        std::lock_guard<std::mutex> g(mu);
        // order-independent merge: larger ratio wins, ties go to the lower
        // sigma index, so any completion order gives the same state
        if (ratio > st.raw[ti] || (ratio == st.raw[ti] && sj < st.sj[ti])) {
          st.raw[ti] = ratio;
          st.sj[ti] = sj;
        }
        st.defl[ti] = std::max(st.defl[ti], defl);
        st.done[k] = 1;
        ++st.completed;
        if (!opt.checkpoint_path.empty() && opt.checkpoint_every > 0 &&
            st.completed - last_ckpt >= opt.checkpoint_every) {
          write_checkpoint(opt.checkpoint_path, encode_checkpoint(hash, tp, sp, st));
          last_ckpt = st.completed;
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> g(mu);
      if (!first_error) first_error = std::current_exception();
      stop.store(true, std::memory_order_relaxed);
    }
  };

  int nw = int(std::min<int64_t>(opt.workers, total));
  std::vector<std::thread> pool;
  for (int w = 1; w < nw; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);

  if (!opt.checkpoint_path.empty())
    write_checkpoint(opt.checkpoint_path, encode_checkpoint(hash, tp, sp, st));

  ScanReport rep;
  rep.spec = spec;
  rep.target_error = target_error;
  rep.effective_t_points = tp;
  rep.effective_sigma_points = sp;
  rep.cells_evaluated = st.completed;
  rep.complete = st.completed == total;
  rep.per_band.resize(tp);
  int best = -1;
  for (int i = 0; i < tp; ++i) {
    BandMax& m = rep.per_band[i];
    m.t = ts[i];
    if (st.sj[i] >= 0) {
      m.evaluated = true;
      m.sigma = std::clamp(lo[i] + sfrac[st.sj[i]] * (1.0 - lo[i]), lo[i], 1.0);
      m.ratio = st.raw[i];
      m.ratio_deflated = st.defl[i];
      if (best < 0 || m.ratio > rep.sup_ratio) {
        best = i;
        rep.sup_ratio = m.ratio;
      }
      rep.sup_ratio_deflated = std::max(rep.sup_ratio_deflated, m.ratio_deflated);
    } else {
      m.sigma = lo[i];
    }
  }
  if (best >= 0) {
    rep.argmax_t = rep.per_band[best].t;
    rep.argmax_sigma = rep.per_band[best].sigma;
  } else {
    rep.argmax_t = ts[0];  // nothing ran; point at the grid origin
    rep.argmax_sigma = lo[0];
  }
  rep.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
  return rep;
}

std::string report_json(const ScanReport& rep) {
  std::string s = "{\n";
  s += "  \"spec\": " + spec_json(rep.spec) + ",\n";
  s += "  \"target_error\": " + format_g17(rep.target_error) + ",\n";
  s += "  \"effective_grid\": {\"t_points\": " + std::to_string(rep.effective_t_points) +
       ", \"sigma_points\": " + std::to_string(rep.effective_sigma_points) + "},\n";
  s += std::string("  \"complete\": ") + (rep.complete ? "true" : "false") + ",\n";
  s += "  \"cells_evaluated\": " + std::to_string(rep.cells_evaluated) + ",\n";
  s += "  \"sup_ratio\": " + format_g17(rep.sup_ratio) + ",\n";
  s += "  \"sup_ratio_deflated\": " + format_g17(rep.sup_ratio_deflated) + ",\n";
  s += "  \"argmax\": {\"t\": " + format_g17(rep.argmax_t) +
       ", \"sigma\": " + format_g17(rep.argmax_sigma) + "},\n";
  s += "  \"per_band\": [";
  bool any = false;
  for (const BandMax& m : rep.per_band) {
    if (!m.evaluated) continue;
    s += any ? ",\n    " : "\n    ";
    any = true;
    s += "{\"t\": " + format_g17(m.t) + ", \"sigma\": " + format_g17(m.sigma) +
         ", \"ratio\": " + format_g17(m.ratio) +
         ", \"ratio_deflated\": " + format_g17(m.ratio_deflated) + "}";
  }
  s += any ? "\n  ]\n" : "]\n";
  s += "}\n";
  return s;
}

std::string report_csv(const ScanReport& rep) {
  std::string s = "t,sigma,ratio\n";
  for (const BandMax& m : rep.per_band) {
    if (!m.evaluated) continue;
    s += format_g17(m.t) + "," + format_g17(m.sigma) + "," + format_g17(m.ratio) + "\n";
  }
  return s;
}

nlohmann::json RegionSpec::to_json() const {
  nlohmann::json j;
  j["case"] = case_tag(scan_case);
  nlohmann::json p = nlohmann::json::object();
  switch (scan_case) {
    case ScanCase::zaitsev: p["eps"] = eps; break;
    case ScanCase::case1:
      p["eps"] = eps;
      p["delta"] = delta;
      break;
    case ScanCase::case2: p["o1"] = o1; break;
    case ScanCase::case3:
      p["A"] = A;
      p["o1"] = o1;
      break;
    case ScanCase::case4:
      p["alpha"] = alpha;
      p["o1"] = o1;
      break;
  }
  j["params"] = p;
  j["n"] = n;
  j["t0"] = t0;
  j["T"] = T;
  j["grid"] = {{"t_points", grid.t_points},
               {"sigma_points", grid.sigma_points},
               {"spacing", grid.spacing == GridSpacing::log ? "log" : "linear"}};
  return j;
}

RegionSpec RegionSpec::from_json(const nlohmann::json& j) {
  RegionSpec spec;
  std::string tag = j.at("case").get<std::string>();
  if (tag == "zaitsev")
    spec.scan_case = ScanCase::zaitsev;
  else if (tag == "case1")
    spec.scan_case = ScanCase::case1;
  else if (tag == "case2")
    spec.scan_case = ScanCase::case2;
  else if (tag == "case3")
    spec.scan_case = ScanCase::case3;
  else if (tag == "case4")
    spec.scan_case = ScanCase::case4;
  else
    throw ContractError("unknown scan case '" + tag + "'");
  if (j.contains("params")) {
    const nlohmann::json& p = j["params"];
    spec.eps = p.value("eps", spec.eps);
    spec.delta = p.value("delta", spec.delta);
    spec.A = p.value("A", spec.A);
    spec.alpha = p.value("alpha", spec.alpha);
    spec.o1 = p.value("o1", spec.o1);
  }
  spec.n = j.value("n", spec.n);
  spec.t0 = j.value("t0", spec.t0);
  spec.T = j.value("T", spec.T);
  if (j.contains("grid")) {
    const nlohmann::json& g = j["grid"];
    spec.grid.t_points = g.value("t_points", spec.grid.t_points);
    spec.grid.sigma_points = g.value("sigma_points", spec.grid.sigma_points);
    std::string sp = g.value("spacing", std::string("log"));
    if (sp == "log")
      spec.grid.spacing = GridSpacing::log;
    else if (sp == "linear")
      spec.grid.spacing = GridSpacing::linear;
    else
      throw ContractError("grid spacing must be 'log' or 'linear'");
  }
  spec.validate();
  return spec;
}

}  // namespace zomega
