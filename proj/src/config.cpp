#include "sandwich/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace sandwich {

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::OpenLoop: return "open-loop";
    case RunMode::Nominal: return "nominal";
    case RunMode::Adaptive: return "adaptive";
  }
  return "?";
}

RunMode run_mode_from_string(const std::string& s) {
  if (s == "open-loop" || s == "openloop") return RunMode::OpenLoop;
  if (s == "nominal") return RunMode::Nominal;
  if (s == "adaptive") return RunMode::Adaptive;
  throw std::invalid_argument("unknown mode '" + s + "' (open-loop|nominal|adaptive)");
}

Eigen::VectorXd ProfileSpec::evaluate(int nx) const {
  Eigen::VectorXd out(nx + 1);
  if (samples.size() > 0) {
    if (samples.size() < 2) throw std::invalid_argument("profile table needs >= 2 samples");
    const Eigen::Index ns = samples.size();
    for (int i = 0; i <= nx; ++i) {
      const double pos = static_cast<double>(i) / nx * static_cast<double>(ns - 1);
      const Eigen::Index k = std::min(static_cast<Eigen::Index>(pos), ns - 2);
      const double t = pos - static_cast<double>(k);
      out(i) = (1.0 - t) * samples(k) + t * samples(k + 1);
    }
    return out;
  }
  for (int i = 0; i <= nx; ++i) {
    const double x = static_cast<double>(i) / nx;
    if (shape == "zero")
      out(i) = 0.0;
    else if (shape == "sin")
      out(i) = amp * std::sin(freq * M_PI * x);
    else if (shape == "cos")
      out(i) = amp * std::cos(freq * M_PI * x);
    else
      throw std::invalid_argument("unknown profile shape '" + shape + "'");
  }
  return out;
}

PlantState ScenarioConfig::initial_state() const {
  PlantState s;
  s.t = 0.0;
  s.z = initial.z.evaluate(grid.nx);
  s.w = initial.w.evaluate(grid.nx);
  s.X = initial.X0;
  s.Y = initial.Y0;
  return s;
}

namespace {

struct Value {
  enum class Kind { Number, String, Bool, Array } kind = Kind::Number;
  double num = 0.0;
  std::string str;
  bool flag = false;
  std::vector<double> arr;
  int line = 0;
  bool used = false;
};

using Table = std::map<std::string, std::map<std::string, Value>>;

[[noreturn]] void fail(const std::string& path, int line, const std::string& msg) {
  std::ostringstream os;
  os << path << ":" << line << ": " << msg;
  throw std::runtime_error(os.str());
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_number(const std::string& path, int line, const std::string& tok) {
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    fail(path, line, "expected a number, got '" + tok + "'");
  }
  if (pos != tok.size()) fail(path, line, "trailing characters in number '" + tok + "'");
  return v;
}

Value parse_value(const std::string& path, int line, const std::string& raw) {
  Value v;
  v.line = line;
  const std::string s = trim(raw);
  if (s.empty()) fail(path, line, "missing value");
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') fail(path, line, "unterminated string");
    v.kind = Value::Kind::String;
    v.str = s.substr(1, s.size() - 2);
  } else if (s == "true" || s == "false") {
    v.kind = Value::Kind::Bool;
    v.flag = (s == "true");
  } else if (s.front() == '[') {
    if (s.back() != ']') fail(path, line, "unterminated array");
    v.kind = Value::Kind::Array;
    std::string body = s.substr(1, s.size() - 2);
    std::stringstream ss(body);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = trim(tok);
      if (tok.empty()) fail(path, line, "empty array element");
      v.arr.push_back(parse_number(path, line, tok));
    }
  } else {
    v.kind = Value::Kind::Number;
    v.num = parse_number(path, line, s);
  }
  return v;
}

Table parse_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  Table table;
  std::string section;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    // strip comments outside strings
    std::string s;
    bool in_str = false;
    for (char c : raw) {
      if (c == '"') in_str = !in_str;
      if (c == '#' && !in_str) break;
      s += c;
    }
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[' && s.back() == ']' && s.find('=') == std::string::npos) {
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) fail(path, line, "empty section name");
      table[section];
      continue;
    }
    const size_t eq = s.find('=');
    if (eq == std::string::npos) fail(path, line, "expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) fail(path, line, "empty key");
    if (section.empty()) fail(path, line, "key outside of any [section]");
    if (table[section].count(key)) fail(path, line, "duplicate key '" + key + "'");
    table[section][key] = parse_value(path, line, s.substr(eq + 1));
  }
  return table;
}

class Reader {
 public:
  Reader(const std::string& path, Table& table) : path_(path), table_(table) {}

  bool has(const std::string& sec, const std::string& key) {
    auto it = table_.find(sec);
    return it != table_.end() && it->second.count(key) > 0;
  }
  Value& get(const std::string& sec, const std::string& key) {
    Value& v = table_[sec][key];
    v.used = true;
    return v;
  }
  double number(const std::string& sec, const std::string& key, double fallback) {
    if (!has(sec, key)) return fallback;
    Value& v = get(sec, key);
    if (v.kind != Value::Kind::Number) fail(path_, v.line, "'" + key + "' must be a number");
    return v.num;
  }
  double required_number(const std::string& sec, const std::string& key) {
    if (!has(sec, key))
      throw std::runtime_error(path_ + ": missing required key '" + sec + "." + key + "'");
    return number(sec, key, 0.0);
  }
  int integer(const std::string& sec, const std::string& key, int fallback) {
    const double v = number(sec, key, fallback);
    if (v != std::floor(v)) {
      throw std::runtime_error(path_ + ": '" + sec + "." + key + "' must be an integer");
    }
    return static_cast<int>(v);
  }
  std::string str(const std::string& sec, const std::string& key, const std::string& fallback) {
    if (!has(sec, key)) return fallback;
    Value& v = get(sec, key);
    if (v.kind != Value::Kind::String) fail(path_, v.line, "'" + key + "' must be a string");
    return v.str;
  }
  Eigen::VectorXd array(const std::string& sec, const std::string& key,
                        const Eigen::VectorXd& fallback) {
    if (!has(sec, key)) return fallback;
    Value& v = get(sec, key);
    if (v.kind != Value::Kind::Array) fail(path_, v.line, "'" + key + "' must be an array");
    return Eigen::Map<const Eigen::VectorXd>(v.arr.data(),
                                             static_cast<Eigen::Index>(v.arr.size()));
  }
  Eigen::VectorXd required_array(const std::string& sec, const std::string& key) {
    if (!has(sec, key))
      throw std::runtime_error(path_ + ": missing required key '" + sec + "." + key + "'");
    return array(sec, key, Eigen::VectorXd());
  }

  void check_unused(const std::vector<std::string>& known_sections) {
    for (auto& [sec, kv] : table_) {
      bool known = false;
      for (const auto& k : known_sections) known = known || (k == sec);
      for (auto& [key, v] : kv) {
        if (!known) fail(path_, v.line, "unknown section '" + sec + "'");
        if (!v.used) fail(path_, v.line, "unknown key '" + sec + "." + key + "'");
      }
    }
  }

 private:
  const std::string& path_;
  Table& table_;
};

}  // namespace

ScenarioConfig parse_config(const std::string& path) {
  Table table = parse_table(path);
  Reader r(path, table);
  ScenarioConfig cfg;

  // [plant]
  cfg.plant.q1 = r.required_number("plant", "q1");
  cfg.plant.q2 = r.required_number("plant", "q2");
  cfg.plant.d1 = r.required_number("plant", "d1");
  cfg.plant.d2 = r.required_number("plant", "d2");
  cfg.plant.p = r.number("plant", "p", 1.0);
  cfg.plant.b = r.required_number("plant", "b");
  cfg.plant.l = r.required_array("plant", "l");
  cfg.plant.n = static_cast<int>(cfg.plant.l.size());
  cfg.plant.M = r.array("plant", "M", Eigen::VectorXd::Zero(cfg.plant.n));
  cfg.plant.qbar = r.required_array("plant", "qbar");
  cfg.plant.m = static_cast<int>(cfg.plant.qbar.size());
  set_nonlinearity_preset(cfg.plant, r.str("plant", "f_preset", "zero"));
  {
    const Eigen::VectorXd bd1 = r.array("plant", "box_d1", Eigen::Vector2d(cfg.plant.d1, cfg.plant.d1));
    const Eigen::VectorXd bd2 = r.array("plant", "box_d2", Eigen::Vector2d(cfg.plant.d2, cfg.plant.d2));
    const Eigen::VectorXd bb = r.array("plant", "box_b", Eigen::Vector2d(cfg.plant.b, cfg.plant.b));
    if (bd1.size() != 2 || bd2.size() != 2 || bb.size() != 2)
      throw std::runtime_error(path + ": box_* entries must be [lo, hi]");
    cfg.plant.theta_box = {bd1(0), bd1(1), bd2(0), bd2(1), bb(0), bb(1)};
  }

  // [initial]
  auto profile = [&](const std::string& prefix) {
    ProfileSpec ps;
    ps.shape = r.str("initial", prefix + "_shape", "zero");
    ps.amp = r.number("initial", prefix + "_amp", 1.0);
    ps.freq = r.number("initial", prefix + "_freq", 1.0);
    ps.samples = r.array("initial", prefix + "_samples", Eigen::VectorXd());
    return ps;
  };
  cfg.initial.w = profile("w");
  cfg.initial.z = profile("z");
  cfg.initial.X0 = r.array("initial", "x0", Eigen::VectorXd::Zero(cfg.plant.m));
  cfg.initial.Y0 = r.array("initial", "y0", Eigen::VectorXd::Zero(cfg.plant.n));
  {
    const Eigen::VectorXd th = r.array("initial", "theta0",
                                       Eigen::Vector3d(cfg.plant.d1, cfg.plant.d2, cfg.plant.b));
    if (th.size() != 3) throw std::runtime_error(path + ": theta0 must be [d1, d2, b]");
    cfg.initial.theta0 = {th(0), th(1), th(2)};
  }
  if (cfg.initial.X0.size() != cfg.plant.m)
    throw std::runtime_error(path + ": x0 length must equal the qbar length (m)");
  if (cfg.initial.Y0.size() != cfg.plant.n)
    throw std::runtime_error(path + ": y0 length must equal the l length (n)");

  // [grid]
  cfg.grid.nx = r.integer("grid", "nx", 100);
  cfg.grid.dt = r.number("grid", "dt", 1e-3);
  if (cfg.grid.nx < 4) throw std::runtime_error(path + ": grid.nx must be >= 4");
  if (!(cfg.grid.dt > 0.0)) throw std::runtime_error(path + ": grid.dt must be positive");
  if (cfg.grid.dt * std::max(cfg.plant.q1, cfg.plant.q2) > cfg.grid.dx() + 1e-15)
    throw std::runtime_error(path + ": CFL violated: dt*max(q1,q2) must be <= 1/nx");

  // [run]
  cfg.mode = run_mode_from_string(r.str("run", "mode", "nominal"));
  cfg.horizon = r.number("run", "horizon", 20.0);
  cfg.out_dir = r.str("run", "out_dir", "out");
  cfg.seed = static_cast<unsigned>(r.integer("run", "seed", 0));
  cfg.snapshot_every = r.integer("run", "snapshot_every", 50);
  cfg.diag_stride = r.integer("run", "diag_stride", 10);
  if (!(cfg.horizon > 0.0)) throw std::runtime_error(path + ": run.horizon must be positive");

  // [gains]
  cfg.gains.kappas = r.required_array("gains", "kappas");
  cfg.gains.cs = r.required_array("gains", "cs");
  cfg.gains.cbar = r.number("gains", "cbar", cfg.gains.cs.size() > 0
                                                 ? cfg.gains.cs(cfg.gains.cs.size() - 1)
                                                 : 1.0);
  if (cfg.mode != RunMode::OpenLoop) cfg.gains.check(cfg.plant.n, cfg.plant.m);

  // [identifier]
  cfg.schedule.T = r.number("identifier", "T", 1.5);
  cfg.schedule.Ntilde = r.integer("identifier", "Ntilde", 10);
  cfg.nbar_count = r.integer("identifier", "Nbar", 1);
  cfg.estimator.pitch = r.number("identifier", "pitch", 0.2);
  cfg.estimator.eps_D = r.number("identifier", "eps_D", 1e-4);
  cfg.estimator.rank_tol = r.number("identifier", "rank_tol", 1e-8);
  cfg.estimator.hold_rel = r.number("identifier", "hold_rel", 0.05);
  cfg.estimator.q4_threshold = r.number("identifier", "q4_threshold", 1e-12);

  // [filter]
  cfg.excitation.eps_prop = r.number("filter", "eps_prop", 1e-6);
  cfg.excitation.eps_abs = r.number("filter", "eps_abs", 1e-9);
  cfg.excitation.eps_exc = r.number("filter", "eps_exc", 0.1);

  // [kernels]
  cfg.kernel_refine = r.integer("kernels", "refine", 4);
  if (cfg.kernel_refine < 1) throw std::runtime_error(path + ": kernels.refine must be >= 1");

  r.check_unused({"plant", "initial", "grid", "run", "gains", "identifier", "filter", "kernels"});
  cfg.plant.check();
  return cfg;
}

}  // namespace sandwich
