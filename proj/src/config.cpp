#include "ldp/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ldp {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_list(const std::string& v) {
  std::vector<double> out;
  std::istringstream in(v);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    cell = trim(cell);
    if (cell.empty()) continue;
    size_t pos = 0;
    double x = std::stod(cell, &pos);
    if (pos != cell.size()) throw ParameterError("bad number: " + cell);
    out.push_back(x);
  }
  return out;
}

}  // namespace

bool RunConfig::has(const std::string& s, const std::string& k) const {
  auto it = sections.find(s);
  return it != sections.end() && it->second.count(k) > 0;
}

std::string RunConfig::get_str(const std::string& s, const std::string& k,
                               const std::string& dflt) const {
  auto it = sections.find(s);
  if (it == sections.end()) return dflt;
  auto jt = it->second.find(k);
  return jt == it->second.end() ? dflt : jt->second;
}

double RunConfig::get_num(const std::string& s, const std::string& k, double dflt) const {
  if (!has(s, k)) return dflt;
  return std::stod(get_str(s, k, ""));
}

long RunConfig::get_int(const std::string& s, const std::string& k, long dflt) const {
  if (!has(s, k)) return dflt;
  return std::stol(get_str(s, k, ""));
}

bool RunConfig::get_bool(const std::string& s, const std::string& k, bool dflt) const {
  if (!has(s, k)) return dflt;
  std::string v = get_str(s, k, "");
  return v == "true" || v == "1" || v == "yes" || v == "on";
}

std::vector<double> RunConfig::get_list(const std::string& s, const std::string& k) const {
  return parse_list(get_str(s, k, ""));
}

void RunConfig::set(const std::string& s, const std::string& k, const std::string& v) {
  sections[s][k] = v;
}

namespace {

void check_num(const RunConfig& cfg, std::vector<ConfigError>& errors, const std::string& s,
               const std::string& k, double lo, double hi, bool integer = false) {
  if (!cfg.has(s, k)) return;
  std::string v = cfg.get_str(s, k, "");
  double x;
  try {
    size_t pos = 0;
    x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
  } catch (...) {
    errors.push_back({s + "." + k, "not a number: '" + v + "'"});
    return;
  }
  if (x < lo || x > hi) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "value %g outside [%g, %g]", x, lo, hi);
    errors.push_back({s + "." + k, buf});
  }
  if (integer && x != std::floor(x)) errors.push_back({s + "." + k, "must be an integer"});
}

void check_choice(const RunConfig& cfg, std::vector<ConfigError>& errors, const std::string& s,
                  const std::string& k, const std::vector<std::string>& choices) {
  if (!cfg.has(s, k)) return;
  std::string v = cfg.get_str(s, k, "");
  if (std::find(choices.begin(), choices.end(), v) == choices.end()) {
    std::string opts;
    for (const auto& c : choices) opts += (opts.empty() ? "" : " | ") + c;
    errors.push_back({s + "." + k, "unknown value '" + v + "' (expected " + opts + ")"});
  }
}

void check_list(const RunConfig& cfg, std::vector<ConfigError>& errors, const std::string& s,
                const std::string& k, double lo) {
  if (!cfg.has(s, k)) return;
  try {
    auto xs = cfg.get_list(s, k);
    for (double x : xs)
      if (x < lo) {
        errors.push_back({s + "." + k, "list entries must be >= " + std::to_string(lo)});
        return;
      }
  } catch (...) {
    errors.push_back({s + "." + k, "not a comma-separated number list"});
  }
}

void check_file_ref(const RunConfig& cfg, std::vector<ConfigError>& errors, const std::string& s,
                    const std::string& k) {
  if (!cfg.has(s, k)) return;
  std::filesystem::path p(cfg.get_str(s, k, ""));
  if (p.is_relative() && !cfg.base_dir.empty()) p = std::filesystem::path(cfg.base_dir) / p;
  if (!std::filesystem::exists(p))
    errors.push_back({s + "." + k, "referenced file does not exist: " + p.string()});
}

void validate(const RunConfig& cfg, std::vector<ConfigError>& errors) {
  if (!cfg.has_section("model")) {
    errors.push_back({"model", "missing required section"});
  } else {
    check_choice(cfg, errors, "model", "name", {"heat", "burgers", "p_laplacian", "allen_cahn"});
    if (!cfg.has("model", "name")) errors.push_back({"model.name", "missing required key"});
    check_num(cfg, errors, "model", "nu", 0.0, 1e6);
    check_num(cfg, errors, "model", "p", 2.0, 16.0);
    check_num(cfg, errors, "model", "n_modes", 1, 4096, true);
    check_choice(cfg, errors, "model", "basis", {"dirichlet_sine", "periodic_fourier"});
  }
  check_choice(cfg, errors, "diffusion", "kind", {"additive", "diagonal_multiplicative"});
  check_num(cfg, errors, "diffusion", "sigma_scale", 0.0, 1e6);
  check_num(cfg, errors, "diffusion", "sigma_decay", 0.0, 16.0);
  check_num(cfg, errors, "diffusion", "clip", 1e-12, 1e6);
  check_list(cfg, errors, "diffusion", "sigma", -1e300);

  check_choice(cfg, errors, "jump", "kind", {"finite", "interval", "none"});
  check_list(cfg, errors, "jump", "marks", -1e300);
  check_list(cfg, errors, "jump", "masses", 0.0);
  check_num(cfg, errors, "jump", "density", 1e-12, 1e12);
  check_num(cfg, errors, "jump", "amp", -1e6, 1e6);
  check_choice(cfg, errors, "jump", "amp_kind", {"linear", "constant"});
  check_choice(cfg, errors, "jump", "sat", {"saturated", "unit"});
  check_num(cfg, errors, "jump", "s_max", 1e-12, 1e6);
  check_num(cfg, errors, "jump", "direction_mode", 1, 4096, true);
  if (cfg.has("jump", "marks") && cfg.has("jump", "masses")) {
    try {
      if (cfg.get_list("jump", "marks").size() != cfg.get_list("jump", "masses").size())
        errors.push_back({"jump.masses", "marks and masses must have equal length"});
    } catch (...) {
    }
  }

  check_num(cfg, errors, "grid", "t_final", 1e-12, 1e6);
  check_num(cfg, errors, "grid", "steps", 1, 1 << 24, true);

  check_num(cfg, errors, "noise", "eps", 1e-300, 1e6);
  check_num(cfg, errors, "noise", "paths", 1, 1e9, true);
  check_num(cfg, errors, "noise", "seed", 0, 9e18, true);

  check_file_ref(cfg, errors, "control", "f_file");
  check_file_ref(cfg, errors, "control", "g_file");

  check_choice(cfg, errors, "target", "kind",
               {"terminal_point", "terminal_halfspace", "full_path"});
  check_num(cfg, errors, "target", "tol", 1e-300, 1e6);
  check_num(cfg, errors, "target", "mode", 1, 4096, true);

  check_num(cfg, errors, "rate", "mu0", 1e-12, 1e12);
  check_num(cfg, errors, "rate", "mu_factor", 1.0, 1e6);
  check_num(cfg, errors, "rate", "rounds", 1, 64, true);
  check_num(cfg, errors, "rate", "max_iter", 1, 100000, true);
  check_num(cfg, errors, "rate", "restarts", 1, 64, true);

  check_list(cfg, errors, "condition2", "eps_list", 1e-300);
  check_list(cfg, errors, "ldp", "eps_list", 1e-300);
  check_num(cfg, errors, "ldp", "rate_value", 0.0, 1e12);
}

}  // namespace

ParseResult parse_config_text(const std::string& text, const std::string& base_dir) {
  ParseResult result;
  result.config.source_text = text;
  result.config.base_dir = base_dir;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        result.errors.push_back({"line " + std::to_string(lineno), "unterminated section header"});
        continue;
      }
      section = trim(t.substr(1, t.size() - 2));
      result.config.sections[section];
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos) {
      result.errors.push_back({"line " + std::to_string(lineno), "expected key = value"});
      continue;
    }
    if (section.empty()) {
      result.errors.push_back({"line " + std::to_string(lineno), "key outside any section"});
      continue;
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    result.config.sections[section][key] = value;
  }
  validate(result.config, result.errors);
  return result;
}

ParseResult parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ParseResult r;
    r.errors.push_back({path, "cannot open config file"});
    return r;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), std::filesystem::path(path).parent_path().string());
}

std::shared_ptr<const Basis> build_basis(const RunConfig& cfg) {
  std::string kind = cfg.get_str("model", "basis", "dirichlet_sine");
  int n = static_cast<int>(cfg.get_int("model", "n_modes", 64));
  return make_basis(kind == "periodic_fourier" ? BasisKind::PeriodicFourier
                                               : BasisKind::DirichletSine,
                    n);
}

ModelSpec build_model(const RunConfig& cfg) {
  auto basis = build_basis(cfg);
  ModelNoiseOptions noise;
  std::string dk = cfg.get_str("diffusion", "kind", "additive");
  noise.diffusion =
      dk == "diagonal_multiplicative" ? DiffusionKind::DiagonalMultiplicative : DiffusionKind::Additive;
  noise.sigma_scale = cfg.get_num("diffusion", "sigma_scale", 0.3);
  noise.sigma_decay = cfg.get_num("diffusion", "sigma_decay", 1.0);
  if (cfg.has("diffusion", "sigma")) noise.sigma_explicit = cfg.get_list("diffusion", "sigma");
  noise.clip_bound = cfg.get_num("diffusion", "clip", 1.0);

  std::string jk = cfg.get_str("jump", "kind", "finite");
  if (jk == "none") {
    noise.with_jumps = false;
  } else {
    noise.with_jumps = true;
    if (jk == "interval") {
      noise.jump_measure = JumpMeasureSpec::interval(cfg.get_num("jump", "a", 0.0),
                                                     cfg.get_num("jump", "b", 1.0),
                                                     cfg.get_num("jump", "density", 1.0));
    } else if (cfg.has("jump", "marks")) {
      noise.jump_measure =
          JumpMeasureSpec::finite(cfg.get_list("jump", "marks"), cfg.get_list("jump", "masses"));
    }
    noise.jump.amp_kind = cfg.get_str("jump", "amp_kind", "linear") == "constant"
                              ? JumpAmpKind::Constant
                              : JumpAmpKind::Linear;
    noise.jump.amp0 = cfg.get_num("jump", "amp", 0.2);
    noise.jump.sat =
        cfg.get_str("jump", "sat", "saturated") == "unit" ? JumpSatKind::Unit : JumpSatKind::Saturated;
    noise.jump.s_max = cfg.get_num("jump", "s_max", 2.0);
    noise.jump.direction_mode = static_cast<int>(cfg.get_int("jump", "direction_mode", 1)) - 1;
  }

  std::string name = cfg.get_str("model", "name", "heat");
  double nu = cfg.get_num("model", "nu", 0.1);
  if (name == "burgers") return make_burgers_model(basis, nu, noise);
  if (name == "p_laplacian")
    return make_p_laplacian_model(basis, cfg.get_num("model", "p", 4.0), noise);
  if (name == "allen_cahn") return make_allen_cahn_model(basis, nu, noise);
  return make_heat_model(basis, nu, noise);
}

TimeGrid build_grid(const RunConfig& cfg) {
  return TimeGrid(cfg.get_num("grid", "t_final", 1.0),
                  static_cast<int>(cfg.get_int("grid", "steps", 4096)));
}

GalerkinState build_x0(const RunConfig& cfg, std::shared_ptr<const Basis> basis) {
  if (cfg.has("init", "coeffs")) {
    auto c = cfg.get_list("init", "coeffs");
    c.resize(basis->n_modes(), 0.0);
    return make_state(basis, std::move(c));
  }
  int mode = static_cast<int>(cfg.get_int("init", "mode", 1)) - 1;
  double amp = cfg.get_num("init", "amplitude", cfg.has_section("init") ? 1.0 : 0.0);
  if (mode < 0 || mode >= basis->n_modes())
    throw ParameterError("init.mode out of range");
  return unit_mode(basis, mode, amp);
}

ControlPair build_control(const RunConfig& cfg, const ModelSpec& model, const TimeGrid& grid) {
  ControlPair c = null_control(grid, model.n_modes(), model.jump_control_dims());
  auto resolve = [&](const std::string& name) {
    std::filesystem::path p(name);
    if (p.is_relative() && !cfg.base_dir.empty())
      p = std::filesystem::path(cfg.base_dir) / p;
    return p.string();
  };
  if (cfg.has("control", "f_file")) {
    std::ifstream in(resolve(cfg.get_str("control", "f_file", "")));
    std::ostringstream buf;
    buf << in.rdbuf();
    c.f = matrix_from_csv(buf.str());
    if (c.f.rows != grid.steps || c.f.cols != model.n_modes())
      throw ParameterError("control.f_file: matrix shape does not match grid/modes");
  } else if (cfg.has("control", "f_const_value")) {
    int mode = static_cast<int>(cfg.get_int("control", "f_const_mode", 1)) - 1;
    double v = cfg.get_num("control", "f_const_value", 0.0);
    if (mode < 0 || mode >= model.n_modes()) throw ParameterError("control.f_const_mode out of range");
    for (int m = 0; m < grid.steps; ++m) c.f(m, mode) = v;
  }
  if (cfg.has("control", "g_file")) {
    std::ifstream in(resolve(cfg.get_str("control", "g_file", "")));
    std::ostringstream buf;
    buf << in.rdbuf();
    c.g = matrix_from_csv(buf.str());
    if (c.g.rows != grid.steps || c.g.cols != model.jump_control_dims())
      throw ParameterError("control.g_file: matrix shape does not match grid/marks");
  } else if (cfg.has("control", "g_const_value")) {
    double v = cfg.get_num("control", "g_const_value", 1.0);
    for (double& x : c.g.data) x = v;
  }
  return c;
}

TargetSpec build_target(const RunConfig& cfg, int n_modes) {
  std::string kind = cfg.get_str("target", "kind", "terminal_halfspace");
  double tol = cfg.get_num("target", "tol", 1e-3);
  if (kind == "terminal_point") {
    auto p = cfg.get_list("target", "point");
    p.resize(n_modes, 0.0);
    return TargetSpec::terminal_point(std::move(p), tol);
  }
  int mode = static_cast<int>(cfg.get_int("target", "mode", 1)) - 1;
  if (mode < 0 || mode >= n_modes) throw ParameterError("target.mode out of range");
  std::vector<double> dir(n_modes, 0.0);
  dir[mode] = 1.0;
  auto t = TargetSpec::terminal_halfspace(std::move(dir), cfg.get_num("target", "level", 1.0));
  t.tol = tol;
  return t;
}

std::string matrix_csv(const Matrix& m) {
  std::ostringstream out;
  char buf[32];
  for (int r = 0; r < m.rows; ++r) {
    for (int c = 0; c < m.cols; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(r, c));
      out << buf << (c + 1 < m.cols ? "," : "");
    }
    out << "\n";
  }
  return out.str();
}

Matrix matrix_from_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty()) continue;
    rows.push_back(parse_list(t));
    if (rows.size() > 1 && rows.back().size() != rows.front().size())
      throw ParameterError("matrix_from_csv: ragged rows");
  }
  Matrix m(static_cast<int>(rows.size()), rows.empty() ? 0 : static_cast<int>(rows.front().size()));
  for (int r = 0; r < m.rows; ++r)
    for (int c = 0; c < m.cols; ++c) m(r, c) = rows[r][c];
  return m;
}

}  // namespace ldp
