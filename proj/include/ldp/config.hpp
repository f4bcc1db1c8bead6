#pragma once

#include <map>
#include <string>
#include <vector>

#include "ldp/models.hpp"
#include "ldp/rate.hpp"
#include "ldp/skeleton.hpp"

namespace ldp {

struct ConfigError {
  std::string location;  // "section.key"
  std::string message;
};

/// Parsed key=value sections of a run configuration.
struct RunConfig {
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::string source_text;
  std::string base_dir;

  bool has_section(const std::string& s) const { return sections.count(s) > 0; }
  bool has(const std::string& s, const std::string& k) const;
  std::string get_str(const std::string& s, const std::string& k, const std::string& dflt) const;
  double get_num(const std::string& s, const std::string& k, double dflt) const;
  long get_int(const std::string& s, const std::string& k, long dflt) const;
  bool get_bool(const std::string& s, const std::string& k, bool dflt) const;
  std::vector<double> get_list(const std::string& s, const std::string& k) const;
  void set(const std::string& s, const std::string& k, const std::string& v);
};

struct ParseResult {
  RunConfig config;
  std::vector<ConfigError> errors;
  bool ok() const { return errors.empty(); }
};

/// Reads and validates a config file; collects every error, not just the first.
ParseResult parse_config(const std::string& path);
ParseResult parse_config_text(const std::string& text, const std::string& base_dir);

std::shared_ptr<const Basis> build_basis(const RunConfig& cfg);
ModelSpec build_model(const RunConfig& cfg);
TimeGrid build_grid(const RunConfig& cfg);
GalerkinState build_x0(const RunConfig& cfg, std::shared_ptr<const Basis> basis);
ControlPair build_control(const RunConfig& cfg, const ModelSpec& model, const TimeGrid& grid);
TargetSpec build_target(const RunConfig& cfg, int n_modes);

/// Control matrix CSV round-trip (one row per time cell).
std::string matrix_csv(const Matrix& m);
Matrix matrix_from_csv(const std::string& csv);

}  // namespace ldp
