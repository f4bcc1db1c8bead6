#include "ldp/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ldp/config.hpp"
#include "ldp/experiments.hpp"
#include "ldp/spde.hpp"
#include "ldp/util.hpp"

namespace ldp {

namespace {

constexpr const char* kVersion = "0.1.0";

namespace fs = std::filesystem;
using nlohmann::json;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  int threads = 0;
  long paths_override = -1;
  double seed_override = -1.0;
  std::vector<double> eps_override;
  bool dump_paths = false;
};

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot write " + path.string());
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_manifest(const CommonArgs& args, const RunConfig& cfg, const std::string& command) {
  std::ostringstream m;
  m << "tool=ldpkit " << kVersion << "\n";
  m << "command=" << command << "\n";
  m << "config=" << args.config_path << "\n";
  m << "config_hash=" << fnv1a_hex(cfg.source_text) << "\n";
  for (const char* key : {"f_file", "g_file"}) {
    if (cfg.has("control", key)) {
      fs::path p(cfg.get_str("control", key, ""));
      if (p.is_relative() && !cfg.base_dir.empty()) p = fs::path(cfg.base_dir) / p;
      m << "input." << key << "=" << p.string() << ":" << fnv1a_hex(read_file(p)) << "\n";
    }
  }
  write_file(fs::path(args.out_dir) / "manifest.txt", m.str());
}

int load_config(const CommonArgs& args, RunConfig& cfg) {
  ParseResult parsed = parse_config(args.config_path);
  if (!parsed.ok()) {
    for (const auto& e : parsed.errors)
      std::cerr << "config error at " << e.location << ": " << e.message << "\n";
    return 2;
  }
  cfg = std::move(parsed.config);
  return 0;
}

SimParams sim_params_from(const CommonArgs& args, const RunConfig& cfg, const TimeGrid& grid) {
  SimParams p;
  p.grid = grid;
  p.eps = cfg.get_num("noise", "eps", 1e-2);
  p.n_paths = static_cast<int>(cfg.get_int("noise", "paths", 100));
  p.seed = static_cast<uint64_t>(cfg.get_int("noise", "seed", 1));
  p.threads = args.threads;
  if (args.paths_override > 0) p.n_paths = static_cast<int>(args.paths_override);
  if (args.seed_override >= 0.0) p.seed = static_cast<uint64_t>(args.seed_override);
  return p;
}

MinimizeOptions rate_options(const RunConfig& cfg, const CommonArgs& args) {
  MinimizeOptions opts;
  opts.mu0 = cfg.get_num("rate", "mu0", 10.0);
  opts.mu_factor = cfg.get_num("rate", "mu_factor", 10.0);
  opts.outer_rounds = static_cast<int>(cfg.get_int("rate", "rounds", 5));
  opts.max_inner_iterations = static_cast<int>(cfg.get_int("rate", "max_iter", 120));
  opts.initializations = static_cast<int>(cfg.get_int("rate", "restarts", 3));
  opts.optimize_jump_control = cfg.get_bool("rate", "optimize_g", true);
  opts.seed = static_cast<uint64_t>(cfg.get_int("noise", "seed", 2024));
  opts.threads = args.threads;
  return opts;
}

json prob_to_json(const ProbEstimate& e) {
  json j;
  j["probability"] = e.probability;
  j["ci_lower"] = e.ci_lower;
  j["ci_upper"] = e.ci_upper;
  j["hits"] = e.hits;
  j["n_paths"] = e.n_paths;
  j["blowups"] = e.blowups;
  if (e.weighted) {
    j["std_error"] = e.std_error;
    j["mean_weight"] = e.mean_weight;
    j["per_sample_variance"] = e.per_sample_variance;
    j["unreliable"] = e.unreliable;
  }
  if (!e.note.empty()) j["note"] = e.note;
  return j;
}

int cmd_skeleton(const CommonArgs& args) {
  RunConfig cfg;
  if (int rc = load_config(args, cfg)) return rc;
  ModelSpec model = build_model(cfg);
  TimeGrid grid = build_grid(cfg);
  GalerkinState x0 = build_x0(cfg, model.basis);
  ControlPair control = build_control(cfg, model, grid);

  Trajectory traj = solve_skeleton(model, control, x0, grid);
  EnergyAudit audit = energy_audit(traj, model, control, grid);

  write_file(fs::path(args.out_dir) / "trajectory.csv", trajectory_csv(traj));
  json j;
  j["lhs"] = audit.lhs;
  j["rhs"] = audit.rhs;
  j["sup_h_sq"] = audit.sup_h_sq;
  j["v_integral"] = audit.v_integral;
  j["pass"] = audit.pass;
  write_file(fs::path(args.out_dir) / "audit.json", j.dump(2) + "\n");
  write_manifest(args, cfg, "skeleton");
  std::cout << "skeleton: " << traj.n_nodes() << " nodes, terminal |Y|_H = "
            << norm(traj.terminal(), NormKind::H) << ", audit " << (audit.pass ? "pass" : "FAIL")
            << "\n";
  return 0;
}

int cmd_simulate(const CommonArgs& args) {
  RunConfig cfg;
  if (int rc = load_config(args, cfg)) return rc;
  ModelSpec model = build_model(cfg);
  TimeGrid grid = build_grid(cfg);
  GalerkinState x0 = build_x0(cfg, model.basis);
  ControlPair control = build_control(cfg, model, grid);
  SimParams params = sim_params_from(args, cfg, grid);

  PathEnsemble ens = simulate_controlled_spde(model, params, control, x0);
  MomentEstimate m2 = moment_estimate(ens, 2.0, model.beta);

  json j;
  j["eps"] = params.eps;
  j["n_paths"] = params.n_paths;
  j["seed"] = params.seed;
  j["blowups"] = ens.blowup_count();
  j["total_jumps"] = ens.total_jumps();
  j["mean_jumps_per_path"] = params.n_paths > 0
                                 ? static_cast<double>(ens.total_jumps()) / params.n_paths
                                 : 0.0;
  j["sup_moment_p2"] = m2.sup_moment;
  j["sup_moment_p2_stderr"] = m2.sup_stderr;
  j["v_integral_moment_p2"] = m2.v_moment;
  j["v_integral_moment_p2_stderr"] = m2.v_stderr;
  write_file(fs::path(args.out_dir) / "ensemble.json", j.dump(2) + "\n");
  if (args.dump_paths) {
    for (size_t i = 0; i < ens.paths.size(); ++i) {
      char name[64];
      std::snprintf(name, sizeof(name), "paths/path_%05zu.csv", i);
      write_file(fs::path(args.out_dir) / name, trajectory_csv(ens.paths[i].traj));
    }
  }
  write_manifest(args, cfg, "simulate");
  std::cout << "simulate: " << params.n_paths << " paths at eps=" << params.eps << ", "
            << ens.blowup_count() << " blowups\n";
  return 0;
}

int cmd_rate(const CommonArgs& args) {
  RunConfig cfg;
  if (int rc = load_config(args, cfg)) return rc;
  ModelSpec model = build_model(cfg);
  TimeGrid grid = build_grid(cfg);
  GalerkinState x0 = build_x0(cfg, model.basis);
  TargetSpec target = build_target(cfg, model.n_modes());
  MinimizeOptions opts = rate_options(cfg, args);

  RateEstimate est = minimize_rate(model, target, x0, grid, opts);

  json j;
  j["value"] = est.value;
  j["constraint_residual"] = est.constraint_residual;
  j["iterations"] = est.iterations;
  j["converged"] = est.converged;
  j["likely_infeasible"] = est.likely_infeasible;
  write_file(fs::path(args.out_dir) / "rate.json", j.dump(2) + "\n");
  write_file(fs::path(args.out_dir) / "minimizer_f.csv", matrix_csv(est.minimizer.f));
  if (est.minimizer.g.cols > 0)
    write_file(fs::path(args.out_dir) / "minimizer_g.csv", matrix_csv(est.minimizer.g));
  write_manifest(args, cfg, "rate");
  std::cout << "rate: value=" << est.value << " residual=" << est.constraint_residual
            << (est.converged ? " (converged)" : " (NOT converged)")
            << (est.likely_infeasible ? " [I likely infinite]" : "") << "\n";
  return 0;
}

int cmd_check_hypotheses(const CommonArgs& args) {
  RunConfig cfg;
  if (int rc = load_config(args, cfg)) return rc;
  ModelSpec model = build_model(cfg);
  int n_samples = static_cast<int>(cfg.get_int("hypotheses", "samples", 1000));
  double radius = cfg.get_num("hypotheses", "radius", 5.0);
  uint64_t seed = static_cast<uint64_t>(cfg.get_int("noise", "seed", 1));
  if (args.seed_override >= 0.0) seed = static_cast<uint64_t>(args.seed_override);

  HypothesisReport rep = check_hypotheses(model, n_samples, radius, seed);
  json j;
  j["model"] = model.name;
  j["samples"] = n_samples;
  j["radius"] = radius;
  for (const auto& [key, e] : rep.entries) {
    j["hypotheses"][key] = {
        {"checked", e.checked}, {"worst_margin", e.worst_margin}, {"violations", e.violations}};
  }
  j["total_violations"] = rep.total_violations();
  write_file(fs::path(args.out_dir) / "hypotheses.json", j.dump(2) + "\n");
  write_manifest(args, cfg, "check-hypotheses");
  std::cout << "check-hypotheses: " << model.name << " -> " << rep.total_violations()
            << " violations\n";
  return 0;
}

int cmd_condition2(const CommonArgs& args) {
  RunConfig cfg;
  if (int rc = load_config(args, cfg)) return rc;
  ModelSpec model = build_model(cfg);
  TimeGrid grid = build_grid(cfg);
  GalerkinState x0 = build_x0(cfg, model.basis);
  ControlPair q = build_control(cfg, model, grid);
  SimParams params = sim_params_from(args, cfg, grid);

  std::vector<double> eps_list =
      args.eps_override.empty() ? cfg.get_list("condition2", "eps_list") : args.eps_override;
  if (eps_list.empty()) eps_list = {1e-2, 1e-3, 1e-4};
  std::vector<ControlPair> q_eps(eps_list.size(), q);

  auto rows = condition2_experiment(model, eps_list, q_eps, q, x0, grid, params.n_paths,
                                    params.seed, args.threads);
  std::ostringstream csv;
  csv << "eps,mean_sq_sup_err,std_err,blowups\n";
  json j = json::array();
  char buf[32];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g", r.eps);
    csv << buf << ",";
    std::snprintf(buf, sizeof(buf), "%.17g", r.mean_sq_sup_err);
    csv << buf << ",";
    std::snprintf(buf, sizeof(buf), "%.17g", r.std_err);
    csv << buf << "," << r.blowups << "\n";
    j.push_back({{"eps", r.eps},
                 {"mean_sq_sup_err", r.mean_sq_sup_err},
                 {"std_err", r.std_err},
                 {"blowups", r.blowups}});
  }
  write_file(fs::path(args.out_dir) / "condition2.csv", csv.str());
  write_file(fs::path(args.out_dir) / "condition2.json", j.dump(2) + "\n");
  write_manifest(args, cfg, "condition2");
  std::cout << "condition2: " << rows.size() << " eps levels\n";
  return 0;
}

int cmd_ldp(const CommonArgs& args) {
  RunConfig cfg;
  if (int rc = load_config(args, cfg)) return rc;
  ModelSpec model = build_model(cfg);
  TimeGrid grid = build_grid(cfg);
  GalerkinState x0 = build_x0(cfg, model.basis);
  TargetSpec event = build_target(cfg, model.n_modes());
  SimParams params = sim_params_from(args, cfg, grid);

  std::vector<double> eps_list =
      args.eps_override.empty() ? cfg.get_list("ldp", "eps_list") : args.eps_override;
  if (eps_list.empty()) eps_list = {0.25, 0.125, 0.0625};

  bool tilted = cfg.get_bool("ldp", "tilted", false);
  double rate_value = cfg.get_num("ldp", "rate_value", -1.0);
  ControlPair tilt;
  bool have_tilt = false;
  if (rate_value < 0.0 || tilted) {
    RateEstimate est = minimize_rate(model, event, x0, grid, rate_options(cfg, args));
    if (rate_value < 0.0) rate_value = est.value;
    tilt = est.minimizer;
    have_tilt = true;
  }

  LdpReport rep = ldp_slope_study(model, event, eps_list, params.n_paths, rate_value, params.seed,
                                  x0, grid, tilted && have_tilt ? &tilt : nullptr, args.threads);

  json j;
  j["eps_list"] = rep.eps_list;
  j["slope"] = rep.slope;
  j["rate_value"] = rep.rate_value;
  j["relative_gap"] = rep.relative_gap;
  j["eps_ln_p"] = rep.eps_ln_p;
  j["tilted"] = tilted;
  j["warnings"] = rep.warnings;
  for (const auto& e : rep.estimates) j["estimates"].push_back(prob_to_json(e));
  write_file(fs::path(args.out_dir) / "ldp.json", j.dump(2) + "\n");

  std::ostringstream csv;
  csv << "eps,ln_p,ci_lower,ci_upper\n";
  char buf[32];
  for (size_t i = 0; i < rep.eps_list.size(); ++i) {
    const auto& e = rep.estimates[i];
    std::snprintf(buf, sizeof(buf), "%.17g", rep.eps_list[i]);
    csv << buf << ",";
    std::snprintf(buf, sizeof(buf), "%.17g", e.probability > 0 ? std::log(e.probability) : 0.0);
    csv << buf << ",";
    std::snprintf(buf, sizeof(buf), "%.17g", e.ci_lower);
    csv << buf << ",";
    std::snprintf(buf, sizeof(buf), "%.17g", e.ci_upper);
    csv << buf << "\n";
  }
  write_file(fs::path(args.out_dir) / "slope.csv", csv.str());
  write_manifest(args, cfg, "ldp");
  std::cout << "ldp: slope=" << rep.slope << " rate=" << rep.rate_value
            << " relative_gap=" << rep.relative_gap << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Small-noise SPDE large-deviation toolkit"};
  app.require_subcommand(1);

  CommonArgs common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "config file")->required();
    sub->add_option("--out", common.out_dir, "output directory");
    sub->add_option("--threads", common.threads, "worker threads (0 = hardware)");
    sub->add_option("--paths", common.paths_override, "override noise.paths");
    sub->add_option("--seed", common.seed_override, "override noise.seed");
    sub->add_option("--eps", common.eps_override, "override eps list")->delimiter(',');
  };

  CLI::App* c_sim = app.add_subcommand("simulate", "simulate the small-noise equation");
  c_sim->add_flag("--dump-paths", common.dump_paths, "write per-path CSV files");
  CLI::App* c_skel = app.add_subcommand("skeleton", "solve the deterministic controlled equation");
  CLI::App* c_rate = app.add_subcommand("rate", "minimize the action for a target");
  CLI::App* c_hyp = app.add_subcommand("check-hypotheses", "sample the model contracts");
  CLI::App* c_c2 = app.add_subcommand("condition2", "small-noise convergence study");
  CLI::App* c_ldp = app.add_subcommand("ldp", "rare-event slope study");
  for (CLI::App* sub : {c_sim, c_skel, c_rate, c_hyp, c_c2, c_ldp}) add_common(sub);

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (c_sim->parsed()) return cmd_simulate(common);
    if (c_skel->parsed()) return cmd_skeleton(common);
    if (c_rate->parsed()) return cmd_rate(common);
    if (c_hyp->parsed()) return cmd_check_hypotheses(common);
    if (c_c2->parsed()) return cmd_condition2(common);
    if (c_ldp->parsed()) return cmd_ldp(common);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace ldp
