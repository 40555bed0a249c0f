// zomega command line. Every verification in the library is a subcommand
// with json, csv, or table output. Exit codes: 0 success, 2 for contract
// violations (bad flags or inputs), 1 for numerical failures.

#include "CLI11.hpp"
#include "json.hpp"

#include "zomega/dirichlet.hpp"
#include "zomega/errors.hpp"
#include "zomega/growth.hpp"
#include "zomega/numeric.hpp"
#include "zomega/perron.hpp"
#include "zomega/primes.hpp"
#include "zomega/scan.hpp"
#include "zomega/zeta.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace {

using namespace zomega;

// ---------------------------------------------------------------------------
// canonical json: sorted keys (nlohmann's natural order), floats as %.17g.
// Artifacts embed their config plus fnv1a64 of the config's canonical text,
// and re-parsing the artifact reproduces the same hash (the printed tokens
// are fixed points of parse-then-print).
// ---------------------------------------------------------------------------

std::string canon_json(const nlohmann::json& j, int indent = 0) {
  std::string pad(size_t(indent) * 2, ' ');
  if (j.is_object()) {
    if (j.empty()) return "{}";
    std::string s = "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) s += ",\n";
      first = false;
      s += pad + "  " + nlohmann::json(it.key()).dump() + ": " + canon_json(it.value(), indent + 1);
    }
    return s + "\n" + pad + "}";
  }
  if (j.is_array()) {
    if (j.empty()) return "[]";
    std::string s = "[\n";
    bool first = true;
    for (const auto& e : j) {
      if (!first) s += ",\n";
      first = false;
      s += pad + "  " + canon_json(e, indent + 1);
    }
    return s + "\n" + pad + "]";
  }
  if (j.is_number_float()) return format_g17(j.get<double>());
  return j.dump();
}

uint64_t config_hash(const nlohmann::json& cfg) { return fnv1a64(canon_json(cfg)); }

// ---------------------------------------------------------------------------
// output plumbing
// ---------------------------------------------------------------------------

struct OutputOpts {
  std::string format = "table";
  std::string path;
  int digits = 12;  // csv only; json is always 17 significant digits
};

void add_output_flags(CLI::App* cmd, OutputOpts& out) {
  cmd->add_option("--format", out.format, "output format")
      ->check(CLI::IsMember({"json", "csv", "table"}))
      ->capture_default_str();
  cmd->add_option("--out", out.path, "write the artifact to this file instead of stdout");
  cmd->add_option("--digits", out.digits, "significant digits in csv output")
      ->check(CLI::Range(1, 17))
      ->capture_default_str();
}

void emit(const OutputOpts& out, const std::string& text) {
  if (out.path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out.path, std::ios::trunc);
  f << text;
  if (!f) throw ContractError("output path is not writable: " + out.path);
}

void log_config(const nlohmann::json& cfg) {
  std::clog << "config " << hex_u64(config_hash(cfg)) << ": " << cfg.dump() << "\n";
}

// artifact = config + hash + result, in the canonical form
std::string json_artifact(const nlohmann::json& cfg, const nlohmann::json& result) {
  nlohmann::json doc;
  doc["config"] = cfg;
  doc["config_hash"] = hex_u64(config_hash(cfg));
  doc["result"] = result;
  return canon_json(doc) + "\n";
}

// simple two column table; values are preformatted strings
std::string table_of(const std::vector<std::pair<std::string, std::string>>& rows) {
  size_t w = 0;
  for (const auto& r : rows) w = std::max(w, r.first.size());
  std::string s;
  for (const auto& r : rows) s += r.first + std::string(w - r.first.size() + 2, ' ') + r.second + "\n";
  return s;
}

std::string csv_of(const std::vector<std::string>& header,
                   const std::vector<std::vector<std::string>>& rows) {
  std::string s;
  for (size_t i = 0; i < header.size(); ++i) s += (i ? "," : "") + header[i];
  s += "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + row[i];
    s += "\n";
  }
  return s;
}

// ---------------------------------------------------------------------------
// flag parsing helpers
// ---------------------------------------------------------------------------

// complex numbers as "2", "0.5+14.1347i", "1.5-3i", "2i"
cx<double> parse_complex(const std::string& text) {
  std::string s = text;
  s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
  if (s.empty()) throw ContractError("empty complex literal");
  auto to_num = [](const std::string& part, double unit_value) {
    if (part.empty() || part == "+") return unit_value;
    if (part == "-") return -unit_value;
    size_t used = 0;
    double v = std::stod(part, &used);
    if (used != part.size()) throw ContractError("bad numeric literal '" + part + "'");
    return v;
  };
  try {
    if (s.back() == 'i' || s.back() == 'I') {
      std::string body = s.substr(0, s.size() - 1);
      // split at the last +/- that does not follow an exponent marker
      for (size_t i = body.size(); i-- > 1;) {
        if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
          return {to_num(body.substr(0, i), 0.0), to_num(body.substr(i), 1.0)};
        }
      }
      return {0.0, to_num(body, 1.0)};
    }
    return {to_num(s, 0.0), 0.0};
  } catch (const std::invalid_argument&) {
    throw ContractError("cannot parse complex number '" + text + "'");
  } catch (const std::out_of_range&) {
    throw ContractError("complex literal out of range '" + text + "'");
  }
}

struct GrowthFlags {
  std::string family;
  double eps = 1, delta = 0.25, A = 2, alpha = 0.5;
};

void add_growth_flags(CLI::App* cmd, GrowthFlags& gf) {
  cmd->add_option("--family", gf.family,
                  "growth family: linear, exponential, double_exp, case1_t, case1_z, "
                  "case2_t, case2_z, case3_t, case3_z, case4_t, case4_z")
      ->required()
      ->check(CLI::IsMember({"linear", "exponential", "double_exp", "case1_t", "case1_z",
                             "case2_t", "case2_z", "case3_t", "case3_z", "case4_t",
                             "case4_z"}));
  cmd->add_option("--eps", gf.eps, "case1 epsilon")->capture_default_str();
  cmd->add_option("--delta", gf.delta, "case1 delta")->capture_default_str();
  cmd->add_option("--A", gf.A, "case3 exponent")->capture_default_str();
  cmd->add_option("--alpha", gf.alpha, "case4 exponent")->capture_default_str();
}

GrowthFunction make_growth(const GrowthFlags& gf) {
  if (gf.family == "linear") return GrowthFunction::linear();
  if (gf.family == "exponential") return GrowthFunction::exponential();
  if (gf.family == "double_exp") return GrowthFunction::double_exp();
  if (gf.family == "case1_t") return GrowthFunction::case1_t(gf.eps, gf.delta);
  if (gf.family == "case1_z") return GrowthFunction::case1_z(gf.eps, gf.delta);
  if (gf.family == "case2_t") return GrowthFunction::case2_t();
  if (gf.family == "case2_z") return GrowthFunction::case2_z();
  if (gf.family == "case3_t") return GrowthFunction::case3_t(gf.A);
  if (gf.family == "case3_z") return GrowthFunction::case3_z(gf.A);
  if (gf.family == "case4_t") return GrowthFunction::case4_t(gf.alpha);
  if (gf.family == "case4_z") return GrowthFunction::case4_z(gf.alpha);
  throw ContractError("unknown growth family '" + gf.family + "'");
}

nlohmann::json growth_config(const GrowthFlags& gf) {
  nlohmann::json j;
  j["family"] = gf.family;
  if (gf.family == "case1_t" || gf.family == "case1_z") {
    j["eps"] = gf.eps;
    j["delta"] = gf.delta;
  } else if (gf.family == "case3_t" || gf.family == "case3_z") {
    j["A"] = gf.A;
  } else if (gf.family == "case4_t" || gf.family == "case4_z") {
    j["alpha"] = gf.alpha;
  }
  return j;
}

// config files: TOML natively, or a json object when the file starts with '{'
class SniffingConfig : public CLI::ConfigTOML {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::string content((std::istreambuf_iterator<char>(input)),
                        std::istreambuf_iterator<char>());
    size_t i = content.find_first_not_of(" \t\r\n");
    if (i != std::string::npos && content[i] == '{') {
      std::vector<CLI::ConfigItem> items;
      flatten(nlohmann::json::parse(content), {}, items);
      return items;
    }
    std::istringstream ss(content);
    return CLI::ConfigTOML::from_config(ss);
  }

 private:
  static void flatten(const nlohmann::json& j, std::vector<std::string> parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.value().is_object()) {
        auto deeper = parents;
        deeper.push_back(it.key());
        flatten(it.value(), deeper, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = it.key();
      if (it.value().is_array())
        for (const auto& e : it.value()) item.inputs.push_back(scalar(e));
      else
        item.inputs.push_back(scalar(it.value()));
      items.push_back(item);
    }
  }
  static std::string scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return format_g17(v.get<double>());
    return v.dump();
  }
};

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

void setup_zeta(CLI::App& app) {
  auto* cmd = app.add_subcommand("zeta", "evaluate zeta or an s-derivative with an error bound");
  auto s_text = std::make_shared<std::string>();
  auto n = std::make_shared<int>(0);
  auto target = std::make_shared<double>(1e-12);
  auto out = std::make_shared<OutputOpts>();
  cmd->add_option("--s", *s_text, "evaluation point, e.g. 2 or 0.5+14.1347i")->required();
  cmd->add_option("--n", *n, "derivative order")->check(CLI::Range(0, 8))->capture_default_str();
  cmd->add_option("--target-error", *target, "absolute error bound to certify")
      ->capture_default_str();
  add_output_flags(cmd, *out);

  cmd->callback([=]() {
    nlohmann::json cfg;
    cfg["subcommand"] = "zeta";
    cfg["s"] = *s_text;
    cfg["n"] = *n;
    cfg["target_error"] = *target;
    log_config(cfg);

    cx<double> sd = parse_complex(*s_text);
    ZetaEvaluator<real128> ev;
    EvalResult<real128> r =
        ev.derivative(cx<real128>(real128(sd.re), real128(sd.im)), *n, real128(*target));
    double re = to_double(r.value.re), im = to_double(r.value.im);
    double eb = to_double(r.error_bound);

    if (out->format == "json") {
      nlohmann::json res;
      res["re"] = re;
      res["im"] = im;
      res["error_bound"] = eb;
      res["terms_used"] = r.terms_used;
      emit(*out, json_artifact(cfg, res));
    } else if (out->format == "csv") {
      emit(*out, csv_of({"re", "im", "error_bound", "terms_used"},
                        {{format_sig(re, out->digits), format_sig(im, out->digits),
                          format_sig(eb, out->digits), std::to_string(r.terms_used)}}));
    } else {
      emit(*out, table_of({{"s", *s_text},
                           {"n", std::to_string(*n)},
                           {"value", format_g17(re) + (im < 0 ? " - " : " + ") +
                                         format_g17(std::abs(im)) + "i"},
                           {"error_bound", format_g17(eb)},
                           {"terms_used", std::to_string(r.terms_used)}}));
    }
  });
}

void setup_coeffs(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "coeffs", "coefficients of the shifted derivative series (cached via ZOMEGA_CACHE_DIR)");
  auto n = std::make_shared<int>(0);
  auto cutoff = std::make_shared<int64_t>(0);
  auto no_cache = std::make_shared<bool>(false);
  auto out = std::make_shared<OutputOpts>();
  cmd->add_option("--n", *n, "derivative order")->check(CLI::Range(0, 8))->capture_default_str();
  cmd->add_option("--cutoff", *cutoff, "series length")->required()->check(CLI::PositiveNumber);
  cmd->add_flag("--no-cache", *no_cache, "skip the coefficient cache even if configured");
  add_output_flags(cmd, *out);

  cmd->callback([=]() {
    nlohmann::json cfg;
    cfg["subcommand"] = "coeffs";
    cfg["n"] = *n;
    cfg["cutoff"] = *cutoff;
    cfg["use_cache"] = !*no_cache;
    log_config(cfg);

    DirichletSeries s = zeta_family_series(*n, *cutoff, !*no_cache);
    const char* mode = s.mode() == SeriesMode::exact     ? "exact"
                       : s.mode() == SeriesMode::integer ? "integer"
                                                         : "wide";

    if (out->format == "json") {
      nlohmann::json res;
      res["mode"] = mode;
      nlohmann::json arr = nlohmann::json::array();
      for (int64_t m = 1; m <= s.cutoff(); ++m) arr.push_back(coeff_to_string(s, m));
      res["coefficients"] = arr;
      emit(*out, json_artifact(cfg, res));
    } else if (out->format == "csv") {
      // coefficients print in their lossless text form regardless of --digits
      std::vector<std::vector<std::string>> rows;
      for (int64_t m = 1; m <= s.cutoff(); ++m)
        rows.push_back({std::to_string(m), coeff_to_string(s, m)});
      emit(*out, csv_of({"index", "coefficient"}, rows));
    } else {
      std::vector<std::pair<std::string, std::string>> rows{{"mode", mode}};
      for (int64_t m = 1; m <= s.cutoff(); ++m)
        rows.push_back({std::to_string(m), coeff_to_string(s, m)});
      emit(*out, table_of(rows));
    }
  });
}

void setup_conjugate(CLI::App& app) {
  auto* cmd = app.add_subcommand("conjugate", "Legendre conjugate of a growth function");
  auto gf = std::make_shared<GrowthFlags>();
  auto y = std::make_shared<double>(0);
  auto y_max = std::make_shared<double>(0);
  auto y_points = std::make_shared<int>(50);
  auto out = std::make_shared<OutputOpts>();
  add_growth_flags(cmd, *gf);
  cmd->add_option("--y", *y, "slope to conjugate at")->required();
  auto* ymax_opt = cmd->add_option("--y-max", *y_max, "sweep linearly from --y to this value");
  cmd->add_option("--y-points", *y_points, "points in the sweep")
      ->check(CLI::Range(2, 100000))
      ->capture_default_str();
  add_output_flags(cmd, *out);

  cmd->callback([=, ymax_count = ymax_opt]() {
    bool sweep = ymax_count->count() > 0;
    nlohmann::json cfg;
    cfg["subcommand"] = "conjugate";
    cfg["growth"] = growth_config(*gf);
    cfg["y"] = *y;
    if (sweep) {
      cfg["y_max"] = *y_max;
      cfg["y_points"] = *y_points;
    }
    log_config(cfg);

    GrowthFunction g = make_growth(*gf);
    std::vector<double> ys;
    if (sweep) {
      if (!(*y_max > *y)) throw ContractError("--y-max must exceed --y");
      for (int i = 0; i < *y_points; ++i)
        ys.push_back(*y + (*y_max - *y) * double(i) / double(*y_points - 1));
    } else {
      ys.push_back(*y);
    }

    std::vector<ConjugateResult> cs;
    for (double yi : ys) cs.push_back(conjugate(g, yi));

    if (out->format == "json") {
      nlohmann::json res;
      nlohmann::json arr = nlohmann::json::array();
      for (const ConjugateResult& c : cs) {
        nlohmann::json p;
        p["y"] = c.y;
        p["value"] = c.value;
        p["argmax_x"] = c.argmax_x;
        arr.push_back(p);
      }
      res["points"] = arr;
      emit(*out, json_artifact(cfg, res));
    } else if (out->format == "csv") {
      std::vector<std::vector<std::string>> rows;
      for (const ConjugateResult& c : cs)
        rows.push_back({format_sig(c.y, out->digits), format_sig(c.value, out->digits),
                        format_sig(c.argmax_x, out->digits)});
      emit(*out, csv_of({"y", "value", "argmax_x"}, rows));
    } else {
      std::vector<std::pair<std::string, std::string>> rows;
      for (const ConjugateResult& c : cs)
        rows.push_back({format_g17(c.y),
                        format_g17(c.value) + "  (argmax x = " + format_g17(c.argmax_x) + ")"});
      emit(*out, table_of(rows));
    }
  });
}

void setup_mf_eval(CLI::App& app) {
  auto* cmd =
      app.add_subcommand("mf-eval", "evaluate the entire majorant series against its bound");
  auto gf = std::make_shared<GrowthFlags>();
  auto z_text = std::make_shared<std::string>();
  auto rel_tol = std::make_shared<double>(1e-12);
  auto out = std::make_shared<OutputOpts>();
  add_growth_flags(cmd, *gf);
  cmd->add_option("--z", *z_text, "evaluation point, e.g. 5 or 3+4i")->required();
  cmd->add_option("--rel-tol", *rel_tol, "series tolerance relative to the envelope bound")
      ->capture_default_str();
  add_output_flags(cmd, *out);

  cmd->callback([=]() {
    nlohmann::json cfg;
    cfg["subcommand"] = "mf-eval";
    cfg["growth"] = growth_config(*gf);
    cfg["z"] = *z_text;
    cfg["rel_tol"] = *rel_tol;
    log_config(cfg);

    GrowthFunction g = make_growth(*gf);
    cx<double> zd = parse_complex(*z_text);
    // the sum can reach e^20000 and beyond, so the tolerance has to scale
    // with the envelope; exp stays representable in the wide type
    real128 tol = exp(real128(mf_log_bound(g, std::hypot(zd.re, zd.im)))) * real128(*rel_tol);
    cx<real128> v = mf_eval(g, cx<real128>(real128(zd.re), real128(zd.im)), tol);
    real128 av = sqrt(v.re * v.re + v.im * v.im);
    double abs_z = std::hypot(zd.re, zd.im);
    double log_bound = mf_log_bound(g, abs_z);
    bool has_log = av > 0;
    double log_abs = has_log ? to_double(log(av)) : 0;
    bool ok = !has_log || log_abs <= log_bound + 1e-9;
    bool fits = std::isfinite(to_double(av));

    if (out->format == "json") {
      nlohmann::json res;
      // the linear-scale values overflow double around e^709; json has no
      // inf, so report only the log scale in that regime
      if (fits) {
        res["re"] = to_double(v.re);
        res["im"] = to_double(v.im);
        res["abs"] = to_double(av);
      } else {
        res["overflows_double"] = true;
      }
      if (has_log) res["log_abs"] = log_abs;
      res["log_bound"] = log_bound;
      res["bound_satisfied"] = ok;
      emit(*out, json_artifact(cfg, res));
    } else if (out->format == "csv") {
      emit(*out, csv_of({"re", "im", "abs", "log_abs", "log_bound", "bound_satisfied"},
                        {{format_sig(to_double(v.re), out->digits),
                          format_sig(to_double(v.im), out->digits),
                          format_sig(to_double(av), out->digits),
                          has_log ? format_sig(log_abs, out->digits) : "",
                          format_sig(log_bound, out->digits), ok ? "true" : "false"}}));
    } else {
      emit(*out, table_of({{"z", *z_text},
                           {"value", format_g17(to_double(v.re)) + " + " +
                                         format_g17(to_double(v.im)) + "i"},
                           {"abs", format_g17(to_double(av))},
                           {"log_abs", has_log ? format_g17(log_abs) : "-inf"},
                           {"log_bound", format_g17(log_bound)},
                           {"bound_satisfied", ok ? "yes" : "no"}}));
    }
  });
}

void setup_perron(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "perron-check", "compare the smoothed coefficient sum against its contour integral");
  auto series = std::make_shared<std::string>("ones");
  auto series_csv = std::make_shared<std::string>();
  auto cutoff = std::make_shared<int64_t>(0);
  auto x = std::make_shared<double>(0);
  auto b = std::make_shared<double>(2);
  auto T = std::make_shared<double>(1e4);
  auto step = std::make_shared<double>(1.0);
  auto rel_tol = std::make_shared<double>(1e-9);
  auto workers = std::make_shared<int>(1);
  auto out = std::make_shared<OutputOpts>();
  cmd->add_option("--series", *series, "built-in series")
      ->check(CLI::IsMember({"ones", "delta"}))
      ->capture_default_str();
  auto* csv_opt =
      cmd->add_option("--series-csv", *series_csv, "load the series from an index,coefficient csv");
  cmd->add_option("--cutoff", *cutoff, "series length (default max(100, 2x))")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--x", *x, "smoothing endpoint")->required();
  cmd->add_option("--b", *b, "abscissa of the vertical contour")->capture_default_str();
  cmd->add_option("--T", *T, "truncation height")->capture_default_str();
  cmd->add_option("--quadrature-step", *step, "top panel width scale")->capture_default_str();
  cmd->add_option("--rel-tol", *rel_tol, "relative quadrature tolerance")->capture_default_str();
  cmd->add_option("--workers", *workers, "quadrature worker threads")->capture_default_str();
  add_output_flags(cmd, *out);

  cmd->callback([=, csv_given = csv_opt]() {
    bool from_csv = csv_given->count() > 0;
    int64_t X = *cutoff > 0 ? *cutoff : std::max<int64_t>(100, int64_t(std::ceil(2 * *x)));
    nlohmann::json cfg;
    cfg["subcommand"] = "perron-check";
    if (from_csv)
      cfg["series_csv"] = *series_csv;
    else
      cfg["series"] = *series;
    if (!from_csv) cfg["cutoff"] = X;
    cfg["x"] = *x;
    cfg["b"] = *b;
    cfg["T"] = *T;
    cfg["quadrature_step"] = *step;
    cfg["rel_tol"] = *rel_tol;
    cfg["workers"] = *workers;
    log_config(cfg);

    DirichletSeries s = [&]() {
      if (from_csv) return import_csv(*series_csv, SeriesMode::exact);
      if (*series == "ones") return DirichletSeries::ones(X, SeriesMode::exact);
      std::vector<rational> c(size_t(X), rational(0));
      c[0] = 1;
      return DirichletSeries::from_rationals(std::move(c));
    }();

    PerronCheckConfig pc;
    pc.b = *b;
    pc.x = *x;
    pc.T = *T;
    pc.quadrature_step = *step;
    pc.rel_tol = *rel_tol;
    pc.workers = *workers;
    PerronReport rep = perron_truncated(s, pc);

    if (out->format == "json") {
      nlohmann::json res;
      res["lhs"] = rep.lhs;
      res["main_integral"] = rep.main_integral;
      res["residual"] = rep.residual;
      res["remainder_budget"] = rep.remainder_budget;
      res["ratio"] = rep.ratio;
      res["panels"] = rep.panels;
      emit(*out, json_artifact(cfg, res));
    } else if (out->format == "csv") {
      emit(*out,
           csv_of({"lhs", "main_integral", "residual", "remainder_budget", "ratio", "panels"},
                  {{format_sig(rep.lhs, out->digits), format_sig(rep.main_integral, out->digits),
                    format_sig(rep.residual, out->digits),
                    format_sig(rep.remainder_budget, out->digits),
                    format_sig(rep.ratio, out->digits), std::to_string(rep.panels)}}));
    } else {
      emit(*out, table_of({{"lhs", format_g17(rep.lhs)},
                           {"main_integral", format_g17(rep.main_integral)},
                           {"residual", format_g17(rep.residual)},
                           {"remainder_budget", format_g17(rep.remainder_budget)},
                           {"ratio", format_g17(rep.ratio)},
                           {"panels", std::to_string(rep.panels)},
                           {"within_budget", rep.ratio <= 1.0 ? "yes" : "no"}}));
    }
  });
}

void setup_lower_bound(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "lower-bound", "primorial coefficient lower bound against the measured supremum");
  auto x = std::make_shared<double>(0);
  auto case_no = std::make_shared<int>(0);
  auto eps = std::make_shared<double>(1.0);
  auto delta = std::make_shared<double>(0.25);
  auto A = std::make_shared<double>(2.0);
  auto alpha = std::make_shared<double>(0.5);
  auto order = std::make_shared<int>(0);
  auto cutoff = std::make_shared<int64_t>(0);
  auto n_max = std::make_shared<int64_t>(64);
  auto no_cache = std::make_shared<bool>(false);
  auto out = std::make_shared<OutputOpts>();
  cmd->add_option("--x", *x, "scale; the series is truncated at this cutoff")->required();
  cmd->add_option("--case", *case_no, "growth case, 1 to 4")
      ->required()
      ->check(CLI::Range(1, 4));
  cmd->add_option("--eps", *eps, "case 1 epsilon")->capture_default_str();
  cmd->add_option("--delta", *delta, "case 1 delta")->capture_default_str();
  cmd->add_option("--A", *A, "case 3 exponent")->capture_default_str();
  cmd->add_option("--alpha", *alpha, "case 4 exponent")->capture_default_str();
  cmd->add_option("--n", *order, "derivative order of the base series")
      ->check(CLI::Range(0, 8))
      ->capture_default_str();
  cmd->add_option("--cutoff", *cutoff, "override the coefficient cutoff (default floor(x))")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--depth", *n_max, "composition terms; coefficients converge from below")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_flag("--no-cache", *no_cache, "skip the coefficient cache");
  add_output_flags(cmd, *out);

  cmd->callback([=]() {
    int64_t X = *cutoff > 0 ? *cutoff : int64_t(std::floor(*x));
    nlohmann::json cfg;
    cfg["subcommand"] = "lower-bound";
    cfg["x"] = *x;
    cfg["case"] = *case_no;
    switch (*case_no) {
      case 1:
        cfg["eps"] = *eps;
        cfg["delta"] = *delta;
        break;
      case 3: cfg["A"] = *A; break;
      case 4: cfg["alpha"] = *alpha; break;
      default: break;
    }
    cfg["n"] = *order;
    cfg["cutoff"] = X;
    cfg["depth"] = *n_max;
    log_config(cfg);

    GrowthCase gc;
    GrowthFunction g = [&]() {
      switch (*case_no) {
        case 1: gc = GrowthCase::case1; return GrowthFunction::case1_z(*eps, *delta);
        case 2: gc = GrowthCase::case2; return GrowthFunction::case2_z();
        case 3: gc = GrowthCase::case3; return GrowthFunction::case3_z(*A);
        default: gc = GrowthCase::case4; return GrowthFunction::case4_z(*alpha);
      }
    }();
    GrowthCaseParams params;
    params.eps = *eps;
    params.delta = *delta;
    params.A = *A;
    params.alpha = *alpha;

    OptimalK ok = optimal_k_clamped(*x, gc, params);
    double fstar_k = conjugate(g, double(ok.k)).value;
    double bound = primorial_lower_bound(*x, ok.k, g);

    // partial composition: the certified tail bound cannot fire at feasible
    // depth for the slowly conjugating cases, but every term is nonnegative,
    // so the measured sup only grows with depth and "bound <= sup" is safe
    // to conclude from the truncation
    DirichletSeries base = zeta_family_series(*order, X, !*no_cache);
    DirichletSeries f = compose_mf_partial(base, g, *n_max);
    real256 sup = f.wide(1);
    for (int64_t m = 2; m <= X; ++m)
      if (f.wide(m) > sup) sup = f.wide(m);
    double log_sup = to_double(log(sup));
    bool holds = bound <= log_sup;

    if (out->format == "json") {
      nlohmann::json res;
      res["k"] = ok.k;
      res["k_raw"] = ok.raw;
      res["k_clamped"] = ok.clamped;
      res["fstar_k"] = fstar_k;
      res["lower_bound"] = bound;
      res["log_sup"] = log_sup;
      res["holds"] = holds;
      emit(*out, json_artifact(cfg, res));
    } else if (out->format == "csv") {
      emit(*out, csv_of({"k", "k_clamped", "fstar_k", "lower_bound", "log_sup", "holds"},
                        {{std::to_string(ok.k), ok.clamped ? "true" : "false",
                          format_sig(fstar_k, out->digits), format_sig(bound, out->digits),
                          format_sig(log_sup, out->digits), holds ? "true" : "false"}}));
    } else {
      emit(*out,
           table_of({{"k", std::to_string(ok.k) + (ok.clamped ? "  (clamped)" : "")},
                     {"fstar_k", format_g17(fstar_k)},
                     {"lower_bound", format_g17(bound)},
                     {"log_sup", format_g17(log_sup)},
                     {"verdict", holds ? "lower_bound <= log_sup: holds"
                                       : "lower_bound <= log_sup: not established "
                                         "at this depth"}}));
    }
  });
}

void setup_upper_bound(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "upper-bound", "coefficient growth upper bound from a boundary abscissa curve");
  auto x = std::make_shared<double>(0);
  auto sigma_const = std::make_shared<double>(0);
  auto gf = std::make_shared<GrowthFlags>();
  auto out = std::make_shared<OutputOpts>();
  cmd->add_option("--x", *x, "scale the bound is evaluated at")->required();
  auto* sc_opt = cmd->add_option(
      "--sigma-const", *sigma_const,
      "use a constant abscissa; default is the curve 1 - 2 log log t / log t");
  add_growth_flags(cmd, *gf);
  add_output_flags(cmd, *out);

  cmd->callback([=, sc = sc_opt]() {
    bool use_const = sc->count() > 0;
    nlohmann::json cfg;
    cfg["subcommand"] = "upper-bound";
    cfg["x"] = *x;
    cfg["sigma"] = use_const ? "const" : "canonical";
    if (use_const) cfg["sigma_const"] = *sigma_const;
    cfg["growth"] = growth_config(*gf);
    log_config(cfg);

    GrowthFunction g = make_growth(*gf);
    std::function<double(double)> sig;
    if (use_const) {
      double c = *sigma_const;
      sig = [c](double) { return c; };
    } else {
      sig = [](double t) {
        double L = std::log(t);
        return 1.0 - 2.0 * std::log(L) / L;
      };
    }
    double bound = coefficient_upper_bound(sig, g, *x);

    if (out->format == "json") {
      nlohmann::json res;
      res["bound"] = bound;
      res["sigma_at_x"] = sig(*x);
      emit(*out, json_artifact(cfg, res));
    } else if (out->format == "csv") {
      emit(*out, csv_of({"x", "sigma_at_x", "bound"},
                        {{format_sig(*x, out->digits), format_sig(sig(*x), out->digits),
                          format_sig(bound, out->digits)}}));
    } else {
      emit(*out, table_of({{"x", format_g17(*x)},
                           {"sigma_at_x", format_g17(sig(*x))},
                           {"bound", format_g17(bound)}}));
    }
  });
}

void setup_scan(CLI::App& app) {
  auto* cmd = app.add_subcommand("scan", "grid-scan a region for large derivative values");
  auto preset = std::make_shared<std::string>();
  auto case_name = std::make_shared<std::string>("zaitsev");
  auto eps = std::make_shared<double>(0.0);
  auto delta = std::make_shared<double>(0.25);
  auto A = std::make_shared<double>(2.0);
  auto alpha = std::make_shared<double>(0.5);
  auto o1 = std::make_shared<double>(0.0);
  auto n = std::make_shared<int>(0);
  auto t0 = std::make_shared<double>(100.0);
  auto T = std::make_shared<double>(1e5);
  auto t_points = std::make_shared<int>(33);
  auto sigma_points = std::make_shared<int>(17);
  auto spacing = std::make_shared<std::string>("log");
  auto target = std::make_shared<double>(1e-8);
  auto workers = std::make_shared<int>(1);
  auto ckpt = std::make_shared<std::string>();
  auto ckpt_every = std::make_shared<int64_t>(0);
  auto out = std::make_shared<OutputOpts>();

  auto* preset_opt =
      cmd->add_option("--preset", *preset, "start from a named preset region")
          ->check(CLI::IsMember({"zaitsev", "case1", "case2", "case3", "case4"}));
  auto* case_opt = cmd->add_option("--case", *case_name, "region case when not using a preset")
                       ->check(CLI::IsMember({"zaitsev", "case1", "case2", "case3", "case4"}))
                       ->excludes(preset_opt);
  auto* eps_opt = cmd->add_option("--eps", *eps, "zaitsev/case1 epsilon")->capture_default_str();
  auto* delta_opt = cmd->add_option("--delta", *delta, "case1 delta")->capture_default_str();
  auto* A_opt = cmd->add_option("--A", *A, "case3 exponent")->capture_default_str();
  auto* alpha_opt = cmd->add_option("--alpha", *alpha, "case4 exponent")->capture_default_str();
  auto* o1_opt =
      cmd->add_option("--o1", *o1, "coefficient of the vanishing boundary correction")
          ->capture_default_str();
  auto* n_opt =
      cmd->add_option("--n", *n, "derivative order")->check(CLI::Range(0, 8))->capture_default_str();
  auto* t0_opt = cmd->add_option("--t0", *t0, "lower height")->capture_default_str();
  cmd->add_option("--T", *T, "upper height")->capture_default_str();
  cmd->add_option("--t-points", *t_points, "grid points along t")->capture_default_str();
  cmd->add_option("--sigma-points", *sigma_points, "grid points along sigma")
      ->capture_default_str();
  cmd->add_option("--spacing", *spacing, "t axis spacing")
      ->check(CLI::IsMember({"log", "linear"}))
      ->capture_default_str();
  cmd->add_option("--target-error", *target, "per-cell evaluation error bound")
      ->capture_default_str();
  cmd->add_option("--workers", *workers, "worker threads")->capture_default_str();
  cmd->add_option("--checkpoint", *ckpt, "checkpoint file for resumable runs");
  cmd->add_option("--checkpoint-every", *ckpt_every, "cells between checkpoint writes")
      ->capture_default_str();
  add_output_flags(cmd, *out);

  cmd->callback([=]() {
    RegionSpec spec;
    if (preset_opt->count() > 0) {
      spec = preset_region(*preset, *T, *n);
    } else {
      const std::string& c = *case_name;
      spec.scan_case = c == "zaitsev"  ? ScanCase::zaitsev
                       : c == "case1" ? ScanCase::case1
                       : c == "case2" ? ScanCase::case2
                       : c == "case3" ? ScanCase::case3
                                      : ScanCase::case4;
      spec.T = *T;
    }
    // explicit flags override the preset
    if (eps_opt->count() > 0 || case_opt->count() > 0) spec.eps = *eps;
    if (delta_opt->count() > 0 || case_opt->count() > 0) spec.delta = *delta;
    if (A_opt->count() > 0 || case_opt->count() > 0) spec.A = *A;
    if (alpha_opt->count() > 0 || case_opt->count() > 0) spec.alpha = *alpha;
    if (o1_opt->count() > 0) spec.o1 = *o1;
    if (n_opt->count() > 0) spec.n = *n;
    if (t0_opt->count() > 0) spec.t0 = *t0;
    spec.grid.t_points = *t_points;
    spec.grid.sigma_points = *sigma_points;
    spec.grid.spacing = *spacing == "log" ? GridSpacing::log : GridSpacing::linear;
    spec.validate();

    nlohmann::json cfg = spec.to_json();
    cfg["subcommand"] = "scan";
    cfg["target_error"] = *target;
    log_config(cfg);
    std::clog << "scan spec hash " << hex_u64(spec_hash(spec, *target)) << "\n";

    ScanOptions so;
    so.workers = *workers;
    so.checkpoint_path = *ckpt;
    so.checkpoint_every = *ckpt_every;
    ScanReport rep = run_scan(spec, *target, so);
    std::clog << "scan elapsed " << rep.elapsed_seconds << "s, " << rep.cells_evaluated
              << " cells\n";

    if (out->format == "json") {
      emit(*out, report_json(rep));
    } else if (out->format == "csv") {
      std::vector<std::vector<std::string>> rows;
      for (const BandMax& m : rep.per_band) {
        if (!m.evaluated) continue;
        rows.push_back({format_sig(m.t, out->digits), format_sig(m.sigma, out->digits),
                        format_sig(m.ratio, out->digits)});
      }
      emit(*out, csv_of({"t", "sigma", "ratio"}, rows));
    } else {
      emit(*out, table_of({{"complete", rep.complete ? "yes" : "no"},
                           {"cells_evaluated", std::to_string(rep.cells_evaluated)},
                           {"sup_ratio", format_g17(rep.sup_ratio)},
                           {"sup_ratio_deflated", format_g17(rep.sup_ratio_deflated)},
                           {"argmax_t", format_g17(rep.argmax_t)},
                           {"argmax_sigma", format_g17(rep.argmax_sigma)},
                           {"boundary_at_argmax",
                            format_g17(sigma_boundary(spec, rep.argmax_t))}}));
    }
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale numerical checks of large-value machinery for zeta derivatives"};
  app.require_subcommand(1);
  app.fallthrough();  // lets --config appear after the subcommand name
  app.set_config("--config", "", "read flags from a TOML or JSON file");
  app.config_formatter(std::make_shared<SniffingConfig>());

  setup_zeta(app);
  setup_coeffs(app);
  setup_conjugate(app);
  setup_mf_eval(app);
  setup_perron(app);
  setup_lower_bound(app);
  setup_upper_bound(app);
  setup_scan(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);  // prints the message
    return 2;     // bad flags are contract violations
  } catch (const ContractError& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
