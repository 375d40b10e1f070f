#include "boussinesq/cli_runner.hpp"

#include "boussinesq/experiments.hpp"
#include "boussinesq/oscillatory.hpp"
#include "boussinesq/parallel.hpp"
#include "boussinesq/randomization.hpp"
#include "boussinesq/spectral.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

namespace boussinesq::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : sep) + p;
  return out;
}

json exponent_json(double v) { return std::isinf(v) ? json("inf") : json(v); }

double exponent_value(const json& v) {
  if (v.is_string() && v.get<std::string>() == "inf") return kInf;
  return v.get<double>();
}

template <typename T>
std::vector<T> list_of(const json& v) {
  return v.get<std::vector<T>>();
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"expsum", "kernel", "strichartz", "maximal",
                                              "converge", "randomize", "duality", "all"};
  return names;
}

json default_config() {
  return json{
      {"seeds", {{"omega", 1}, {"omega_tilde", 2}}},
      {"threads", 0},
      {"expsum", {{"N", {64, 256, 1024}}, {"t_samples", 32}, {"x_samples", 257}, {"max_spread", 4.0}}},
      {"kernel",
       {{"t", {0.01, 0.1, 1.0}},
        {"x_min", 0.05},
        {"x_max", 1.0},
        {"x_samples", 64},
        {"s", 0.5},
        {"max_spread", 4.0},
        {"halving_x", {0.05, 0.5, 1.0}},
        {"halving_tolerance", 1e-6},
        {"windowed_k", {0, 1, 2, 3, 4, 5, 6}},
        {"windowed_t", {0.0, 0.01, 0.1}},
        {"windowed_x_samples", 16}}},
      {"strichartz",
       {{"p", 4.0},
        {"q", 2.0},
        {"beta", 4.0 / 3.0},
        {"N", {64, 128, 256, 512, 1024}},
        {"rank", 8},
        {"systems", 20},
        {"t_samples", 64},
        {"x_points_per_mode", 2},
        {"lambda_scale", 1.0},
        {"recipe", "random"},
        {"bound_mode", true},
        {"max_spread", 4.0},
        {"slope_tolerance", 0.05},
        {"counterexample", true},
        {"counterexample_t_samples", 8},
        {"maximal_space_beta", 2.0}}},
      {"maximal",
       {{"beta", 1.5},
        {"ranks", {1, 2, 4, 8, 16}},
        {"systems", 4},
        {"grid_points", 1024},
        {"k_max", 64},
        {"t_samples", 257},
        {"interval", {0.0, 1.0}},
        {"max_spread", 4.0},
        {"homogeneity_tolerance", 1e-10}}},
      {"converge",
       {{"geometry", "line"},
        {"rank", 4},
        {"grid_points", 1024},
        {"k_max", 64},
        {"m_min", 2},
        {"m_max", 12},
        {"max_ratio", 0.01},
        {"monotone_tolerance", 0.05}}},
      {"randomize",
       {{"geometries", {"line", "torus", "ball"}},
        {"rank", 4},
        {"r", 2.0},
        {"samples", 1000},
        {"variates", "gaussian"},
        {"m_min", 2},
        {"m_max", 12},
        {"max_ratio", 0.1},
        {"monotone_tolerance", 0.05},
        {"line_points", 1024},
        {"line_k_max", 64},
        {"torus_points", 64},
        {"torus_k_max", 4},
        {"ball_points", 256},
        {"ball_modes", 4},
        {"khinchin_samples", 10000},
        {"khinchin_tolerance", 0.05}}},
      {"duality",
       {{"grid_points", 64},
        {"N", 15},
        {"t_samples", 32},
        {"batch", 32},
        {"rank", 4},
        {"p", 4.0},
        {"q", 2.0},
        {"beta", 4.0 / 3.0},
        {"pairing_tolerance", 1e-10},
        {"schatten_tolerance", 1e-8}}},
  };
}

ConfigError::ConfigError(std::vector<std::string> diagnostics)
    : std::runtime_error(join(diagnostics, "\n")), diagnostics_(std::move(diagnostics)) {}

namespace {

/// 1-based line of the first `"key"` in text, or 0.
int locate_key(const std::string& text, const std::string& key) {
  const auto pos = text.find('"' + key + '"');
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

void overlay(json& base, const json& user, const std::string& path, const std::string& text,
             const std::string& source, std::vector<std::string>& diags) {
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string name = path.empty() ? it.key() : path + "." + it.key();
    const int line = locate_key(text, it.key());
    const std::string where = source + (line > 0 ? ":" + std::to_string(line) : "") + ": ";
    if (!base.contains(it.key())) {
      diags.push_back(where + "unknown field '" + name + "'");
      continue;
    }
    json& target = base[it.key()];
    if (target.is_object()) {
      if (!it->is_object()) {
        diags.push_back(where + "field '" + name + "' must be an object");
      } else {
        overlay(target, *it, name, text, source, diags);
      }
    } else {
      target = *it;
    }
  }
}

}  // namespace

json load_config(const std::optional<fs::path>& path) {
  json config = default_config();
  if (!path) return config;
  std::ifstream in(*path);
  if (!in) throw ConfigError({"cannot open config file '" + path->string() + "'"});
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  json user;
  try {
    user = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto byte = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const auto head = text.substr(0, byte);
    const auto line = 1 + std::count(head.begin(), head.end(), '\n');
    const auto nl = head.rfind('\n');
    const auto column = nl == std::string::npos ? byte + 1 : byte - nl;
    throw ConfigError({path->string() + ":" + std::to_string(line) + ":" + std::to_string(column) +
                       ": parse error: " + e.what()});
  }
  if (!user.is_object()) throw ConfigError({path->string() + ": top level must be a JSON object"});
  std::vector<std::string> diags;
  overlay(config, user, "", text, path->string(), diags);
  if (!diags.empty()) throw ConfigError(diags);
  return config;
}

void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError({"override '" + assignment + "' must have the form key=value"});
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json* node = &config;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!node->is_object() || !node->contains(part)) throw ConfigError({"override: unknown field '" + key + "'"});
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  if (node->is_object()) throw ConfigError({"override: field '" + key + "' is a section"});
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  *node = std::move(value);
}

namespace {

class Checker {
 public:
  Checker(const json& cfg, std::vector<std::string>& out) : cfg_(cfg), out_(out) {}

  const json* get(const std::string& section, const std::string& key) {
    if (!cfg_.contains(section) || !cfg_[section].is_object()) {
      fail(section, "section '" + section + "' is missing");
      return nullptr;
    }
    const json& s = cfg_[section];
    if (!s.contains(key)) {
      fail(section, "field '" + section + "." + key + "' is missing");
      return nullptr;
    }
    return &s[key];
  }

  bool integer(const std::string& sec, const std::string& key, long min) {
    const json* v = get(sec, key);
    if (!v) return false;
    if (!v->is_number_integer()) return fail(sec, "field '" + sec + "." + key + "' must be an integer");
    if (v->get<long>() < min) return fail(sec, key + " must be ≥ " + std::to_string(min));
    return true;
  }

  bool number(const std::string& sec, const std::string& key, double lo, bool strict) {
    const json* v = get(sec, key);
    if (!v) return false;
    if (!v->is_number()) return fail(sec, "field '" + sec + "." + key + "' must be a number");
    const double x = v->get<double>();
    if (strict ? !(x > lo) : !(x >= lo)) {
      return fail(sec, key + " must be " + (strict ? "> " : "≥ ") + format_double(lo));
    }
    return true;
  }

  bool exponent(const std::string& sec, const std::string& key) {
    const json* v = get(sec, key);
    if (!v) return false;
    if (v->is_string() && v->get<std::string>() == "inf") return true;
    if (!v->is_number()) return fail(sec, "field '" + sec + "." + key + "' must be a number or \"inf\"");
    if (!(v->get<double>() >= 1.0)) return fail(sec, key + " must lie in [1, inf]");
    return true;
  }

  bool integer_list(const std::string& sec, const std::string& key, long min, const std::string& below,
                    bool allow_empty = false) {
    const json* v = get(sec, key);
    if (!v) return false;
    if (!v->is_array() || (!allow_empty && v->empty())) {
      return fail(sec, "field '" + sec + "." + key + "' must be a" + (allow_empty ? "" : " non-empty") + " list");
    }
    for (const auto& e : *v) {
      if (!e.is_number_integer()) return fail(sec, "field '" + sec + "." + key + "' must hold integers");
    }
    for (const auto& e : *v) {
      if (e.get<long>() < min) return fail(sec, below);
    }
    return true;
  }

  bool number_list(const std::string& sec, const std::string& key, bool allow_empty) {
    const json* v = get(sec, key);
    if (!v) return false;
    if (!v->is_array() || (!allow_empty && v->empty())) {
      return fail(sec, "field '" + sec + "." + key + "' must be a" + (allow_empty ? "" : " non-empty") + " list");
    }
    for (const auto& e : *v) {
      if (!e.is_number()) return fail(sec, "field '" + sec + "." + key + "' must hold numbers");
    }
    return true;
  }

  bool boolean(const std::string& sec, const std::string& key) {
    const json* v = get(sec, key);
    if (!v) return false;
    if (!v->is_boolean()) return fail(sec, "field '" + sec + "." + key + "' must be true or false");
    return true;
  }

  bool choice(const std::string& sec, const std::string& key, const std::vector<std::string>& allowed) {
    const json* v = get(sec, key);
    if (!v) return false;
    if (!v->is_string() || std::find(allowed.begin(), allowed.end(), v->get<std::string>()) == allowed.end()) {
      return fail(sec, "field '" + sec + "." + key + "' must be one of " + join(allowed, ", "));
    }
    return true;
  }

  bool fail(const std::string& sec, const std::string& message) {
    const bool qualified = message.rfind("field ", 0) == 0 || message.rfind("section ", 0) == 0;
    out_.push_back(qualified ? message : sec + ": " + message);
    return false;
  }

  void add(const std::string& sec, const std::vector<std::string>& messages) {
    for (const auto& m : messages) out_.push_back(sec + ": " + m);
  }

 private:
  const json& cfg_;
  std::vector<std::string>& out_;
};

void validate_seeds(const json& cfg, std::vector<std::string>& out) {
  if (!cfg.contains("seeds") || !cfg["seeds"].is_object()) {
    out.emplace_back("section 'seeds' is missing");
    return;
  }
  for (const char* key : {"omega", "omega_tilde"}) {
    const json& s = cfg["seeds"];
    if (!s.contains(key) || !s[key].is_number_integer() || s[key].get<long double>() < 0) {
      out.push_back(std::string("field 'seeds.") + key + "' must be a non-negative integer");
    }
  }
  if (!cfg.contains("threads") || !cfg["threads"].is_number_integer() || cfg["threads"].get<long>() < 0) {
    out.emplace_back("field 'threads' must be a non-negative integer");
  }
}

ExponentTriple triple_from(const json& s) {
  return {exponent_value(s["p"]), exponent_value(s["q"]), exponent_value(s["beta"])};
}

}  // namespace

std::vector<std::string> validate_config(const json& cfg) {
  std::vector<std::string> out;
  if (!cfg.is_object()) return {"config must be a JSON object"};
  validate_seeds(cfg, out);
  Checker c(cfg, out);

  c.integer_list("expsum", "N", 1, "N must be ≥ 1");
  c.integer("expsum", "t_samples", 1);
  c.integer("expsum", "x_samples", 2);
  c.number("expsum", "max_spread", 1.0, false);

  if (c.number_list("kernel", "t", false)) {
    for (const auto& t : cfg["kernel"]["t"]) {
      if (!(std::abs(t.get<double>()) > 0.0 && std::abs(t.get<double>()) <= 1.0)) {
        c.fail("kernel", "t values must satisfy 0 < |t| ≤ 1");
        break;
      }
    }
  }
  const bool xmin = c.number("kernel", "x_min", 0.0, true);
  if (c.number("kernel", "x_max", 0.0, true) && xmin &&
      !(cfg["kernel"]["x_max"].get<double>() > cfg["kernel"]["x_min"].get<double>())) {
    c.fail("kernel", "x_max must exceed x_min");
  }
  c.integer("kernel", "x_samples", 2);
  if (c.number("kernel", "s", 0.0, false) && !(cfg["kernel"]["s"].get<double>() < 1.0)) {
    c.fail("kernel", "s must be < 1");
  }
  c.number("kernel", "max_spread", 1.0, false);
  c.number_list("kernel", "halving_x", true);
  c.number("kernel", "halving_tolerance", 0.0, true);
  c.integer_list("kernel", "windowed_k", 0, "windowed_k must be ≥ 0", true);
  c.number_list("kernel", "windowed_t", false);
  c.integer("kernel", "windowed_x_samples", 2);

  bool strichartz_ok = c.exponent("strichartz", "p");
  strichartz_ok &= c.exponent("strichartz", "q");
  strichartz_ok &= c.exponent("strichartz", "beta");
  strichartz_ok &= c.integer_list("strichartz", "N", 1, "N must be ≥ 1");
  strichartz_ok &= c.integer("strichartz", "rank", 1);
  strichartz_ok &= c.integer("strichartz", "systems", 1);
  strichartz_ok &= c.integer("strichartz", "t_samples", 1);
  strichartz_ok &= c.integer("strichartz", "x_points_per_mode", 1);
  strichartz_ok &= c.number("strichartz", "lambda_scale", 0.0, false);
  strichartz_ok &= c.choice("strichartz", "recipe", {"random", "counterexample", "single_mode"});
  strichartz_ok &= c.boolean("strichartz", "bound_mode");
  c.number("strichartz", "max_spread", 1.0, false);
  c.number("strichartz", "slope_tolerance", 0.0, true);
  c.boolean("strichartz", "counterexample");
  c.integer("strichartz", "counterexample_t_samples", 1);
  if (c.exponent("strichartz", "maximal_space_beta") && strichartz_ok &&
      cfg["strichartz"]["bound_mode"].get<bool>() &&
      exponent_value(cfg["strichartz"]["maximal_space_beta"]) > 2.0) {
    c.fail("strichartz", "maximal_space_beta exceeds 2");
  }
  if (strichartz_ok) {
    const json& s = cfg["strichartz"];
    ExperimentConfig ec;
    ec.exponents = triple_from(s);
    ec.N_list = list_of<int>(s["N"]);
    ec.rank = s["rank"].get<int>();
    ec.recipe = recipe_from_string(s["recipe"].get<std::string>());
    ec.bound_mode = s["bound_mode"].get<bool>();
    auto v = ec.violations();
    v.erase(std::remove(v.begin(), v.end(), "N must be ≥ 1"), v.end());
    c.add("strichartz", v);
  }

  if (c.number("maximal", "beta", 1.0, false) && !(cfg["maximal"]["beta"].get<double>() < 2.0)) {
    c.fail("maximal", "β must be < 2 for the maximal-in-time estimate");
  }
  const bool ranks_ok = c.integer_list("maximal", "ranks", 1, "rank must be ≥ 1");
  c.integer("maximal", "systems", 1);
  const bool mk = c.integer("maximal", "k_max", 1);
  if (c.integer("maximal", "grid_points", 4) && mk &&
      2 * cfg["maximal"]["k_max"].get<long>() + 1 > cfg["maximal"]["grid_points"].get<long>()) {
    c.fail("maximal", "k_max exceeds the grid's Nyquist range");
  }
  if (mk && ranks_ok) {
    for (const auto& r : cfg["maximal"]["ranks"]) {
      if (r.get<long>() > 2 * cfg["maximal"]["k_max"].get<long>()) {
        c.fail("maximal", "rank exceeds the number of band modes");
        break;
      }
    }
  }
  c.integer("maximal", "t_samples", 2);
  if (c.number_list("maximal", "interval", false)) {
    const auto iv = list_of<double>(cfg["maximal"]["interval"]);
    if (iv.size() != 2 || iv[0] != 0.0 || iv[1] != 1.0) c.fail("maximal", "interval is fixed to [0, 1]");
  }
  c.number("maximal", "max_spread", 1.0, false);
  c.number("maximal", "homogeneity_tolerance", 0.0, true);

  c.choice("converge", "geometry", {"line", "torus"});
  const bool cr = c.integer("converge", "rank", 1);
  const bool ck = c.integer("converge", "k_max", 1);
  if (c.integer("converge", "grid_points", 4) && ck &&
      2 * cfg["converge"]["k_max"].get<long>() + 1 > cfg["converge"]["grid_points"].get<long>()) {
    c.fail("converge", "k_max exceeds the grid's Nyquist range");
  }
  if (cr && ck && cfg["converge"]["rank"].get<long>() > 2 * cfg["converge"]["k_max"].get<long>() + 1) {
    c.fail("converge", "rank exceeds the number of band modes");
  }
  const bool m1 = c.integer("converge", "m_min", 0);
  if (c.integer("converge", "m_max", 0) && m1 &&
      !(cfg["converge"]["m_max"].get<long>() > cfg["converge"]["m_min"].get<long>())) {
    c.fail("converge", "m_max must exceed m_min");
  }
  c.number("converge", "max_ratio", 0.0, true);
  c.number("converge", "monotone_tolerance", 0.0, false);

  if (const json* g = c.get("randomize", "geometries")) {
    if (!g->is_array() || g->empty()) {
      c.fail("randomize", "field 'randomize.geometries' must be a non-empty list");
    } else {
      for (const auto& e : *g) {
        if (!e.is_string() || (e != "line" && e != "torus" && e != "ball")) {
          c.fail("randomize", "field 'randomize.geometries' must hold line, torus or ball");
          break;
        }
      }
    }
  }
  const bool rr = c.integer("randomize", "rank", 1);
  if (c.number("randomize", "r", 2.0, false) && !std::isfinite(cfg["randomize"]["r"].get<double>())) {
    c.fail("randomize", "r must be finite");
  }
  c.integer("randomize", "samples", 1);
  c.choice("randomize", "variates", {"gaussian", "rademacher"});
  const bool r1 = c.integer("randomize", "m_min", 0);
  if (c.integer("randomize", "m_max", 0) && r1 &&
      !(cfg["randomize"]["m_max"].get<long>() > cfg["randomize"]["m_min"].get<long>())) {
    c.fail("randomize", "m_max must exceed m_min");
  }
  c.number("randomize", "max_ratio", 0.0, true);
  c.number("randomize", "monotone_tolerance", 0.0, false);
  for (const char* geo : {"line", "torus"}) {
    const std::string pts = std::string(geo) + "_points";
    const std::string band = std::string(geo) + "_k_max";
    const bool b = c.integer("randomize", band, 0);
    if (c.integer("randomize", pts, 4) && b) {
      const long k = cfg["randomize"][band].get<long>();
      if (2 * k + 1 > cfg["randomize"][pts].get<long>()) c.fail("randomize", band + " exceeds the grid's Nyquist range");
      if (rr && cfg["randomize"]["rank"].get<long>() > 2 * k + 1) {
        c.fail("randomize", "rank exceeds the number of " + std::string(geo) + " band modes");
      }
    }
  }
  const bool bm = c.integer("randomize", "ball_modes", 1);
  if (c.integer("randomize", "ball_points", 2) && bm) {
    if (cfg["randomize"]["ball_modes"].get<long>() >= cfg["randomize"]["ball_points"].get<long>()) {
      c.fail("randomize", "ball_modes must be below ball_points");
    }
    if (rr && cfg["randomize"]["rank"].get<long>() > cfg["randomize"]["ball_modes"].get<long>()) {
      c.fail("randomize", "rank exceeds ball_modes");
    }
  }
  c.integer("randomize", "khinchin_samples", 1);
  c.number("randomize", "khinchin_tolerance", 0.0, true);

  const bool dg = c.integer("duality", "grid_points", 4);
  const bool dn = c.integer("duality", "N", 1);
  const bool dt = c.integer("duality", "t_samples", 1);
  if (dg && dn && 2 * cfg["duality"]["N"].get<long>() + 1 > cfg["duality"]["grid_points"].get<long>()) {
    c.fail("duality", "N beyond Nyquist for the duality grid");
  }
  if (dg && dt && cfg["duality"]["grid_points"].get<long>() * cfg["duality"]["t_samples"].get<long>() > (1L << 16)) {
    c.fail("duality", "grid too large for SVD budget");
  }
  c.integer("duality", "batch", 1);
  const bool drk = c.integer("duality", "rank", 1);
  if (drk && dn && cfg["duality"]["rank"].get<long>() > 2 * cfg["duality"]["N"].get<long>() + 1) {
    c.fail("duality", "rank exceeds 2N+1");
  }
  bool dex = c.exponent("duality", "p");
  dex &= c.exponent("duality", "q");
  dex &= c.exponent("duality", "beta");
  if (dex) {
    const ExponentTriple e = triple_from(cfg["duality"]);
    if (std::isinf(e.p) || std::isinf(e.q)) c.fail("duality", "duality check needs finite p and q");
    c.add("duality", admissibility_violations(e));
  }
  c.number("duality", "pairing_tolerance", 0.0, true);
  c.number("duality", "schatten_tolerance", 0.0, true);
  return out;
}

json RunManifest::to_json() const {
  return json{{"experiment", experiment},
              {"config_path", config_path},
              {"out_dir", out_dir},
              {"seeds", {{"omega", seeds.omega}, {"omega_tilde", seeds.omega_tilde}}},
              {"tool_version", tool_version},
              {"duration_seconds", duration_seconds},
              {"files", files}};
}

namespace {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Collects one experiment's outputs.
class Experiment {
 public:
  Experiment(std::string name, const json& config, const fs::path& out_dir, const RandomSeedPair& seeds)
      : name_(std::move(name)), config_(config), out_dir_(out_dir), seeds_(seeds) {}

  const json& section() const { return config_[name_]; }
  const RandomSeedPair& seeds() const { return seeds_; }
  json& results() { return results_; }

  void check(const std::string& name, bool passed, const std::string& detail) {
    checks_.push_back({name, passed, detail});
  }

  void csv(const std::string& file, CsvTable table) {
    table.add_comment("seed_omega", std::to_string(seeds_.omega));
    table.add_comment("seed_omega_tilde", std::to_string(seeds_.omega_tilde));
    std::ofstream out(out_dir_ / file, std::ios::binary);
    table.write(out);
    if (!out) throw std::runtime_error("cannot write " + (out_dir_ / file).string());
    files_.push_back(file);
  }

  bool passed() const {
    return std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.passed; });
  }

  /// Writes <name>.json and returns the file names produced.
  std::vector<std::string> finish(std::ostream& out, std::ostream& err) {
    json checks = json::array();
    for (const auto& c : checks_) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    const std::string report = name_ + ".json";
    files_.push_back(report);
    json doc{{"experiment", name_},
             {"tool_version", kToolVersion},
             {"config", section()},
             {"seeds", {{"omega", seeds_.omega}, {"omega_tilde", seeds_.omega_tilde}}},
             {"results", results_},
             {"checks", checks},
             {"passed", passed()},
             {"files", files_}};
    std::ofstream file(out_dir_ / report, std::ios::binary);
    file << doc.dump(2) << "\n";
    if (!file) throw std::runtime_error("cannot write " + (out_dir_ / report).string());
    for (const auto& c : checks_) {
      if (!c.passed) err << "check failed: " << name_ << "." << c.name << " (" << c.detail << ")\n";
    }
    out << name_ << ": " << (passed() ? "PASS" : "FAIL") << "\n";
    return files_;
  }

 private:
  std::string name_;
  const json& config_;
  fs::path out_dir_;
  RandomSeedPair seeds_;
  json results_ = json::object();
  std::vector<Check> checks_;
  std::vector<std::string> files_;
};

std::string compare(double value, const char* op, double limit) {
  return format_double(value) + " " + op + " " + format_double(limit);
}

std::vector<double> with_zero(std::vector<double> t) {
  t.push_back(0.0);
  return t;
}

/// Each entry at most (1 + tol) times its predecessor; zero rows are skipped.
bool monotone(const std::vector<double>& values, double tol) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[i - 1] * (1.0 + tol)) return false;
  }
  return true;
}

void run_expsum(Experiment& ex) {
  const json& s = ex.section();
  const auto Ns = list_of<int>(s["N"]);
  const int nt = s["t_samples"].get<int>();
  const Eigen::ArrayXd x = Eigen::ArrayXd::LinSpaced(s["x_samples"].get<int>(), -1.0, 1.0);
  const ExpSumScan scan = exp_sum_decay_scan(
      Ns, [nt](int N) { return log_spaced_times(1.0 / (double(N) * N), 1.0 / N, nt); }, x);
  json slices = json::array();
  for (const auto& [N, sup] : scan.full.slice_max()) slices.push_back({{"N", N}, {"sup", sup}});
  const double spread = scan.full.slice_spread();
  ex.results() = {{"bound", scan.full.bound_expression},
                  {"slices", slices},
                  {"spread", spread},
                  {"positive_spread", scan.positive.slice_spread()},
                  {"negative_spread", scan.negative.slice_spread()}};
  const double limit = s["max_spread"].get<double>();
  ex.check("decay_spread", std::isfinite(spread) && spread <= limit, compare(spread, "<=", limit));
  ex.csv("expsum.csv", scan.full.to_csv());
}

void run_kernel(Experiment& ex) {
  const json& s = ex.section();
  const auto ts = list_of<double>(s["t"]);
  OscillatoryOptions opts;
  opts.weight_exponent = s["s"].get<double>();
  const Eigen::ArrayXd x =
      Eigen::ArrayXd::LinSpaced(s["x_samples"].get<int>(), s["x_min"].get<double>(), s["x_max"].get<double>());
  const DecayScanReport report = kernel_decay_scan(x, ts, opts);
  json slices = json::array();
  bool finite = true;
  for (const auto& [t, sup] : report.slice_max()) {
    slices.push_back({{"t", t}, {"sup", sup}});
    finite = finite && std::isfinite(sup);
  }
  const double spread = report.slice_spread();
  double halving = 0.0;
  for (double t : ts) {
    for (double hx : list_of<double>(s["halving_x"])) halving = std::max(halving, osc_integral_step_halving(hx, t, opts));
  }
  ex.results() = {{"bound", report.bound_expression}, {"slices", slices}, {"spread", spread}, {"step_halving", halving}};
  const double limit = s["max_spread"].get<double>();
  ex.check("sup_finite", finite, finite ? "all slices finite" : "non-finite slice");
  ex.check("decay_spread", finite && spread <= limit, compare(spread, "<=", limit));
  const double tol = s["halving_tolerance"].get<double>();
  ex.check("step_halving", halving <= tol, compare(halving, "<=", tol));
  ex.csv("kernel.csv", report.to_csv());

  const auto ks = list_of<int>(s["windowed_k"]);
  if (!ks.empty()) {
    const DecayScanReport w = windowed_kernel_scan(ks, s["windowed_x_samples"].get<int>(), list_of<double>(s["windowed_t"]));
    const double wspread = w.slice_spread();
    ex.results()["windowed_spread"] = wspread;
    ex.check("windowed_spread", std::isfinite(wspread) && wspread <= limit, compare(wspread, "<=", limit));
    ex.csv("kernel_windowed.csv", w.to_csv());
  }
}

void run_strichartz(Experiment& ex) {
  const json& s = ex.section();
  ExperimentConfig ec;
  ec.exponents = triple_from(s);
  ec.N_list = list_of<int>(s["N"]);
  ec.rank = s["rank"].get<int>();
  ec.systems = s["systems"].get<int>();
  ec.t_samples = s["t_samples"].get<int>();
  ec.x_points_per_mode = s["x_points_per_mode"].get<int>();
  ec.lambda_scale = s["lambda_scale"].get<double>();
  ec.recipe = recipe_from_string(s["recipe"].get<std::string>());
  ec.bound_mode = s["bound_mode"].get<bool>();
  ec.seeds = ex.seeds();
  const double tol = s["slope_tolerance"].get<double>();
  const double limit = s["max_spread"].get<double>();
  const ExponentTriple& e = ec.exponents;

  const StrichartzScan scan = strichartz_scaling_torus(ec);
  ex.results()["scaling"] = {{"lhs", scan.lhs.values},
                             {"ratios", scan.ratios},
                             {"lhs_slope", scan.lhs.slope},
                             {"lhs_residual", scan.lhs.residual},
                             {"claimed", scan.lhs.claimed},
                             {"ratio_spread", scan.ratio_spread()}};
  ex.csv("strichartz.csv", scan.to_csv());
  if (ec.recipe == SystemRecipe::Counterexample) {
    ex.check("lhs_slope", std::abs(scan.lhs.slope - 1.0) <= tol, "slope " + format_double(scan.lhs.slope));
  } else if (ec.bound_mode) {
    ex.check("lhs_slope", scan.lhs.slope <= 1.0 / e.p + tol, compare(scan.lhs.slope, "<=", 1.0 / e.p + tol));
    ex.check("ratio_spread", scan.ratio_spread() <= limit, compare(scan.ratio_spread(), "<=", limit));
  }

  if (s["counterexample"].get<bool>()) {
    const int cts = s["counterexample_t_samples"].get<int>();
    const CounterexampleScan cx = counterexample_scan(ec.N_list, e.p, e.q, e.beta, cts);
    double dev = 0.0;
    for (const auto& r : cx.records) dev = std::max(dev, r.modulus_deviation);
    ex.results()["counterexample"] = {{"lhs_slope", cx.lhs.slope},
                                      {"ratio_slope", cx.ratio.slope},
                                      {"ratio_claimed", cx.ratio.claimed},
                                      {"modulus_deviation", dev}};
    ex.check("counterexample_lhs_slope", std::abs(cx.lhs.slope - 1.0) <= tol,
             "slope " + format_double(cx.lhs.slope) + " vs 1");
    ex.check("counterexample_ratio_slope", std::abs(cx.ratio.slope - cx.ratio.claimed) <= tol,
             "slope " + format_double(cx.ratio.slope) + " vs " + format_double(cx.ratio.claimed));
    ex.check("counterexample_modulus", dev <= 1e-12, compare(dev, "<=", 1e-12));
    ex.csv("strichartz_counterexample.csv", cx.to_csv());

    const double mb = exponent_value(s["maximal_space_beta"]);
    const CounterexampleScan ms = maximal_space_scaling(ec.N_list, mb, !ec.bound_mode, cts);
    ex.results()["maximal_space"] = {{"beta", exponent_json(mb)},
                                     {"lhs_slope", ms.lhs.slope},
                                     {"ratio_slope", ms.ratio.slope},
                                     {"ratio_claimed", ms.ratio.claimed}};
    ex.check("maximal_space_ratio_slope", std::abs(ms.ratio.slope - ms.ratio.claimed) <= tol,
             "slope " + format_double(ms.ratio.slope) + " vs " + format_double(ms.ratio.claimed));
    ex.csv("strichartz_maximal_space.csv", ms.to_csv());
  }
}

void run_maximal(Experiment& ex) {
  const json& s = ex.section();
  MaximalScanConfig mc;
  mc.ranks = list_of<int>(s["ranks"]);
  mc.systems = s["systems"].get<int>();
  mc.beta = s["beta"].get<double>();
  mc.grid_points = s["grid_points"].get<int>();
  mc.k_max = s["k_max"].get<int>();
  mc.t_samples = s["t_samples"].get<int>();
  mc.seeds = ex.seeds();
  const MaximalRankScan scan = maximal_rank_scan(mc);

  const Grid1D grid = Grid1D::line(mc.grid_points);
  const int rank = std::min(4, 2 * mc.k_max);
  const CounterRng g1 = CounterRng(mc.seeds.omega).substream(0x484f4d);
  const CounterRng g2 = CounterRng(mc.seeds.omega_tilde).substream(0x484f4d);
  const CompactOperatorRep op = random_lifted_operator(grid, 1, mc.k_max, rank, scan.s, 1.0, g1, g2);
  const CompactOperatorRep scaled(op.eigenvalues() * 10.0, op.system());
  const double base = maximal_in_time_ratio(op, mc.beta, mc.t_samples);
  const double homog = std::abs(maximal_in_time_ratio(scaled, mc.beta, mc.t_samples) - base) / base;

  ex.results() = {{"interval", {0.0, 1.0}},
                  {"s", scan.s},
                  {"ranks", scan.ranks},
                  {"ratios", scan.ratios},
                  {"spread", scan.spread()},
                  {"homogeneity_error", homog}};
  const double limit = s["max_spread"].get<double>();
  ex.check("rank_spread", scan.spread() <= limit, compare(scan.spread(), "<=", limit));
  const double htol = s["homogeneity_tolerance"].get<double>();
  ex.check("homogeneity", homog <= htol, compare(homog, "<=", htol));
  ex.csv("maximal.csv", scan.to_csv());
}

void run_converge(Experiment& ex) {
  const json& s = ex.section();
  const int n = s["grid_points"].get<int>();
  const Grid1D grid = s["geometry"] == "line" ? Grid1D::line(n) : Grid1D::torus(n);
  const CompactOperatorRep op = random_operator(grid, s["k_max"].get<int>(), s["rank"].get<int>(), ex.seeds());
  const auto rows =
      pointwise_convergence_scan(op, with_zero(dyadic_times(s["m_min"].get<int>(), s["m_max"].get<int>())));
  std::vector<double> dev;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) dev.push_back(rows[i].deviation);
  const double ratio = dev.front() > 0.0 ? dev.back() / dev.front() : kInf;
  ex.results() = {{"deviations", dev}, {"ratio", ratio}, {"zero_time_deviation", rows.back().deviation}};
  const double limit = s["max_ratio"].get<double>();
  ex.check("decay_ratio", ratio <= limit, compare(ratio, "<=", limit));
  ex.check("monotone", monotone(dev, s["monotone_tolerance"].get<double>()), "within tolerance");
  ex.check("zero_time", rows.back().deviation == 0.0, "deviation at t=0 is " + format_double(rows.back().deviation));
  ex.csv("converge.csv", convergence_csv(rows));
}

void run_randomize(Experiment& ex) {
  const json& s = ex.section();
  const VariateKind kind = variate_from_string(s["variates"].get<std::string>());
  const RandomSeedPair seeds = ex.seeds();

  Eigen::ArrayXd a(16);
  for (int k = 0; k < a.size(); ++k) a(k) = 1.0 / (k + 1);
  const int kn = s["khinchin_samples"].get<int>();
  const CounterRng krng = CounterRng(seeds.omega, VariateKind::Gaussian).substream(0x4b48);
  const double k2 = khinchin_ratio(a, 2.0, kn, krng);
  const double k4 = khinchin_ratio(a, 4.0, kn, krng);
  const double ktol = s["khinchin_tolerance"].get<double>();
  ex.results()["khinchin"] = {{"r2", k2}, {"r4", k4}, {"r4_expected", std::pow(3.0, 0.25)}};
  ex.check("khinchin_r2", std::abs(k2 - 1.0) <= ktol, "ratio " + format_double(k2));
  ex.check("khinchin_r4", std::abs(k4 - std::pow(3.0, 0.25)) <= ktol, "ratio " + format_double(k4));

  const auto ts = with_zero(dyadic_times(s["m_min"].get<int>(), s["m_max"].get<int>()));
  const double limit = s["max_ratio"].get<double>();
  const double mtol = s["monotone_tolerance"].get<double>();
  const int rank = s["rank"].get<int>();
  for (const auto& geo : list_of<std::string>(s["geometries"])) {
    Grid1D grid = Grid1D::torus(4);
    int band = 0;
    double xi_max = 0.0;
    if (geo == "line") {
      grid = Grid1D::line(s["line_points"].get<int>());
      band = s["line_k_max"].get<int>();
      xi_max = kTwoPi * band / grid.period();
    } else if (geo == "torus") {
      grid = Grid1D::torus(s["torus_points"].get<int>());
      band = s["torus_k_max"].get<int>();
      xi_max = band;
    } else {
      grid = Grid1D::ball_radial(s["ball_points"].get<int>());
      band = s["ball_modes"].get<int>();
      xi_max = band * kPi;
    }
    const double small_t = 1.0 / boussinesq_symbol(xi_max);
    const CompactOperatorRep op = random_operator(grid, band, rank, seeds);
    const ContinuityTable table =
        stochastic_continuity_experiment(op, ts, s["r"].get<double>(), s["samples"].get<int>(), seeds, kind);
    std::vector<double> point;
    std::vector<double> l2;
    std::vector<double> point_small;
    std::vector<double> l2_small;
    for (std::size_t i = 0; i + 1 < table.rows.size(); ++i) {
      point.push_back(table.rows[i].point_norm);
      l2.push_back(table.rows[i].l2_norm);
      if (table.rows[i].t <= small_t) {
        point_small.push_back(table.rows[i].point_norm);
        l2_small.push_back(table.rows[i].l2_norm);
      }
    }
    const auto& last = table.rows.back();
    const double pr = point.front() > 0.0 ? point.back() / point.front() : kInf;
    const double lr = l2.front() > 0.0 ? l2.back() / l2.front() : kInf;
    ex.results()[geo] = {{"x0", table.x0},           {"point", point},       {"l2", l2},
                         {"point_ratio", pr},         {"l2_ratio", lr},       {"monotone_below_t", small_t}};
    ex.check(geo + "_zero_time", last.point_norm == 0.0 && last.l2_norm == 0.0, "F(0) must vanish exactly");
    ex.check(geo + "_point_ratio", pr <= limit, compare(pr, "<=", limit));
    ex.check(geo + "_l2_ratio", lr <= limit, compare(lr, "<=", limit));
    ex.check(geo + "_monotone", monotone(point_small, mtol) && monotone(l2_small, mtol),
             "t ≤ 1/φ_max = " + format_double(small_t));
    ex.csv("randomize_" + geo + ".csv", table.to_csv());
  }
}

void run_duality(Experiment& ex) {
  const json& s = ex.section();
  DualityConfig dc;
  dc.grid_points = s["grid_points"].get<int>();
  dc.N = s["N"].get<int>();
  dc.t_samples = s["t_samples"].get<int>();
  dc.batch = s["batch"].get<int>();
  dc.rank = s["rank"].get<int>();
  dc.exponents = triple_from(s);
  dc.seeds = ex.seeds();
  const DualityRecord rec = duality_consistency_check(dc);

  const Grid1D grid = Grid1D::torus(dc.grid_points);
  const SpaceTimeField<double> zero(uniform_times(0.0, kTwoPi, dc.t_samples), kTwoPi / dc.t_samples, grid,
                                    Eigen::MatrixXd::Zero(dc.t_samples, dc.grid_points));
  const double zero_dual = dual_ratio(zero, dc.N, dc.exponents.p, dc.exponents.q, dc.exponents.beta);

  ex.results() = {{"primal", rec.primal},
                  {"dual", rec.dual},
                  {"random_dual_max", *std::max_element(rec.random_dual.begin(), rec.random_dual.end())},
                  {"pairing_error", rec.max_pairing_error},
                  {"schatten_kernel_error", rec.schatten_kernel_error},
                  {"zero_weight_dual", zero_dual},
                  {"holds", rec.holds}};
  ex.check("consistency", rec.holds, compare(rec.primal, "<=", rec.dual));
  const double ptol = s["pairing_tolerance"].get<double>();
  ex.check("pairing", rec.max_pairing_error <= ptol, compare(rec.max_pairing_error, "<=", ptol));
  const double stol = s["schatten_tolerance"].get<double>();
  ex.check("schatten_kernel", rec.schatten_kernel_error <= stol, compare(rec.schatten_kernel_error, "<=", stol));
  ex.check("zero_weight", zero_dual == 0.0, "dual side at W = 0 is " + format_double(zero_dual));
  ex.csv("duality.csv", rec.to_csv());
}

const std::map<std::string, std::function<void(Experiment&)>>& experiments() {
  static const std::map<std::string, std::function<void(Experiment&)>> table{
      {"expsum", run_expsum},     {"kernel", run_kernel},       {"strichartz", run_strichartz},
      {"maximal", run_maximal},   {"converge", run_converge},   {"randomize", run_randomize},
      {"duality", run_duality}};
  return table;
}

}  // namespace

int run(const RunOptions& options, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const auto& names = subcommands();
  if (std::find(names.begin(), names.end(), options.subcommand) == names.end()) {
    err << "config error: unknown subcommand '" << options.subcommand << "' (expected " << join(names, ", ") << ")\n";
    return kExitBadConfig;
  }

  json config;
  try {
    config = load_config(options.config_path);
    for (const auto& o : options.overrides) apply_override(config, o);
    if (options.N_list) {
      config["expsum"]["N"] = *options.N_list;
      config["strichartz"]["N"] = *options.N_list;
    }
    if (options.seed) config["seeds"]["omega"] = *options.seed;
    if (options.seed2) config["seeds"]["omega_tilde"] = *options.seed2;
    if (options.threads) config["threads"] = *options.threads;
  } catch (const ConfigError& e) {
    for (const auto& d : e.diagnostics()) err << "config error: " << d << "\n";
    return kExitBadConfig;
  }
  const auto problems = validate_config(config);
  if (!problems.empty()) {
    for (const auto& p : problems) err << "config error: " << p << "\n";
    return kExitBadConfig;
  }

  const RandomSeedPair seeds{config["seeds"]["omega"].get<std::uint64_t>(),
                             config["seeds"]["omega_tilde"].get<std::uint64_t>()};
  if (const int threads = config["threads"].get<int>(); threads > 0) set_thread_count(threads);

  std::error_code ec;
  fs::create_directories(options.out_dir, ec);
  if (ec) {
    err << "config error: cannot create output directory '" << options.out_dir.string() << "': " << ec.message() << "\n";
    return kExitBadConfig;
  }

  std::vector<std::string> selected;
  if (options.subcommand == "all") {
    selected = {"expsum", "kernel", "strichartz", "maximal", "converge", "randomize", "duality"};
  } else {
    selected = {options.subcommand};
  }

  RunManifest manifest;
  manifest.experiment = options.subcommand;
  manifest.config_path = options.config_path ? options.config_path->string() : "";
  manifest.out_dir = options.out_dir.string();
  manifest.seeds = seeds;
  bool all_passed = true;
  for (const auto& name : selected) {
    Experiment ex(name, config, options.out_dir, seeds);
    try {
      experiments().at(name)(ex);
    } catch (const std::invalid_argument& e) {
      err << "config error: " << name << ": " << e.what() << "\n";
      return kExitBadConfig;
    } catch (const std::exception& e) {
      err << "error: " << name << ": " << e.what() << "\n";
      return kExitCheckFailed;
    }
    const auto files = ex.finish(out, err);
    manifest.files.insert(manifest.files.end(), files.begin(), files.end());
    all_passed = all_passed && ex.passed();
  }
  manifest.files.emplace_back("manifest.json");
  manifest.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ofstream mf(options.out_dir / "manifest.json", std::ios::binary);
  mf << manifest.to_json().dump(2) << "\n";
  return all_passed ? kExitPass : kExitCheckFailed;
}

}  // namespace boussinesq::cli
