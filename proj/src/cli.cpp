#include "msmbias/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "msmbias/api.hpp"
#include "msmbias/format.hpp"
#include "msmbias/json_io.hpp"

namespace msmbias::cli {

namespace {

using io::json;

enum class Format { table, json, csv };

const std::map<std::string, Format> kFormats{
    {"table", Format::table}, {"json", Format::json}, {"csv", Format::csv}};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void add_param_flags(CLI::App* cmd, LatentParams& p) {
  cmd->add_option("--lambda", p.lambda, "P(L = 1)")->required();
  cmd->add_option("--pi0", p.pi0, "P(A = 1 | L = 0)")->required();
  cmd->add_option("--pi1", p.pi1, "P(A = 1 | L = 1)")->required();
  cmd->add_option("--p0", p.p0, "P(L* = 1 | L = 0), one minus specificity")->required();
  cmd->add_option("--p1", p.p1, "P(L* = 1 | L = 1), sensitivity")->required();
  cmd->add_option("--gamma", p.gamma, "effect of L on Y")->required();
  cmd->add_option("--alpha", p.alpha, "outcome intercept")->capture_default_str();
  cmd->add_option("--beta", p.beta, "true ATE")->capture_default_str();
  cmd->add_option("--sigma", p.sigma, "outcome noise SD")->capture_default_str();
}

void add_format_flag(CLI::App* cmd, Format& format) {
  cmd->add_option("--format", format, "output format: table, json or csv")
      ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));
}

void print_pairs(std::ostream& out, Format format,
                 const std::vector<std::pair<std::string, double>>& rows) {
  if (format == Format::csv) {
    for (std::size_t i = 0; i < rows.size(); ++i) out << (i ? "," : "") << rows[i].first;
    out << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i)
      out << (i ? "," : "") << format_double(rows[i].second);
    out << '\n';
    return;
  }
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.first.size());
  for (const auto& r : rows) {
    out << std::left << std::setw(static_cast<int>(width + 2)) << r.first
        << format_double(r.second) << '\n';
  }
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write '" + path + "'");
  f << content;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string fixed(double x, int digits) {
  if (!std::isfinite(x)) return "nan";
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << x;
  return s.str();
}

void print_simulation_table(std::ostream& out, const SimulationReport& report) {
  out << std::left << std::setw(5) << "est" << std::setw(10) << "scenario" << std::setw(7)
      << "n" << std::setw(9) << "formula" << std::setw(17) << "bias" << std::setw(17) << "mse"
      << std::setw(17) << "coverage" << std::setw(17) << "empSE" << std::setw(17) << "modelSE"
      << "failed\n";
  for (const auto& r : report.rows) {
    auto cell = [](const Measure& m) { return fixed(m.value, 3) + " (" + fixed(m.mcse, 3) + ")"; };
    out << std::left << std::setw(5) << to_string(r.estimator) << std::setw(10) << r.scenario_id
        << std::setw(7) << r.n << std::setw(9)
        << (r.bias_formula ? fixed(*r.bias_formula, 3) : std::string("-")) << std::setw(17)
        << cell(r.bias) << std::setw(17) << cell(r.mse) << std::setw(17) << cell(r.coverage)
        << std::setw(17) << cell(r.emp_se) << std::setw(17) << cell(r.model_se) << r.failed
        << '\n';
  }
  for (const auto& w : report.warnings) out << "warning: " << w << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bias analysis for a misclassified binary confounder: conditional outcome "
               "models versus IPW-fitted marginal structural models"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  // bias
  LatentParams bias_params;
  Format bias_format = Format::table;
  auto* bias_cmd = app.add_subcommand("bias", "closed-form bias of both ATE estimators");
  add_param_flags(bias_cmd, bias_params);
  add_format_flag(bias_cmd, bias_format);

  // curve
  LatentParams curve_params;
  std::string sweep;
  double from = 0.0, to = 1.0;
  int points = 101;
  std::vector<double> grid;
  Format curve_format = Format::csv;
  auto* curve_cmd = app.add_subcommand("curve", "bias along a one-parameter sweep");
  add_param_flags(curve_cmd, curve_params);
  curve_cmd->add_option("--sweep", sweep, "lambda, pi0, pi1, p0, p1 or gamma")->required();
  curve_cmd->add_option("--from", from, "first grid value")->capture_default_str();
  curve_cmd->add_option("--to", to, "last grid value")->capture_default_str();
  curve_cmd->add_option("--points", points, "number of grid points")->capture_default_str();
  curve_cmd->add_option("--grid", grid, "explicit grid values (overrides from/to/points)")
      ->delimiter(',');
  add_format_flag(curve_cmd, curve_format);

  // simulate
  std::vector<std::string> scenario_ids;
  std::string scenario_file;
  std::optional<int> sim_n, sim_reps, sim_setting;
  std::optional<std::uint64_t> sim_seed;
  unsigned sim_workers = 0;
  std::string sim_adjustment = "Lstar";
  std::string sim_prefix;
  Format sim_format = Format::table;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo simulation study");
  sim_cmd->add_option("--scenario", scenario_ids, "scenario id(s); default: whole catalog");
  sim_cmd->add_option("--scenario-file", scenario_file, "key/value scenario catalog")
      ->check(CLI::ExistingFile);
  sim_cmd->add_option("--n", sim_n, "sample size override");
  sim_cmd->add_option("--reps", sim_reps, "replication count override");
  sim_cmd->add_option("--seed", sim_seed, "master seed override");
  sim_cmd->add_option("--setting", sim_setting, "1: A depends on L*, 2: A depends on L")
      ->check(CLI::IsMember({1, 2}));
  sim_cmd->add_option("--workers", sim_workers, "worker threads (0 = all cores)");
  sim_cmd->add_option("--adjustment", sim_adjustment, "adjustment variable")
      ->check(CLI::IsMember({"L", "Lstar"}));
  sim_cmd->add_option("--out-prefix", sim_prefix, "write <prefix>.csv and <prefix>.json");
  add_format_flag(sim_cmd, sim_format);

  // sensitivity
  std::string sens_config;
  std::optional<std::uint64_t> sens_seed;
  std::optional<int> sens_draws;
  std::optional<double> sens_ate;
  std::string sens_prefix;
  Format sens_format = Format::table;
  auto* sens_cmd = app.add_subcommand("sensitivity", "bias distribution over assumed "
                                                     "sensitivity/specificity ranges");
  sens_cmd->add_option("--config", sens_config, "sensitivity config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  sens_cmd->add_option("--seed", sens_seed, "seed override");
  sens_cmd->add_option("--draws", sens_draws, "draw count override");
  sens_cmd->add_option("--ate", sens_ate, "observed ATE to shift by the MSM bias summaries");
  sens_cmd->add_option("--out-prefix", sens_prefix,
                       "write <prefix>.json and <prefix>_draws.csv");
  add_format_flag(sens_cmd, sens_format);

  // invert
  io::InvertRequest inv;
  Format inv_format = Format::table;
  auto* inv_cmd = app.add_subcommand("invert", "latent (lambda, pi0, pi1) from observables");
  inv_cmd->add_option("--ell", inv.obs.ell, "P(L* = 1)")->required();
  inv_cmd->add_option("--omega", inv.obs.omega, "P(A = 1)")->required();
  inv_cmd->add_option("--pistar0", inv.obs.pi_star0, "P(A = 1 | L* = 0)")->required();
  inv_cmd->add_option("--pistar1", inv.obs.pi_star1, "P(A = 1 | L* = 1)")->required();
  inv_cmd->add_option("--p0", inv.p0, "assumed one minus specificity")->required();
  inv_cmd->add_option("--p1", inv.p1, "assumed sensitivity")->required();
  inv_cmd->add_option("--omega-tolerance", inv.omega_tolerance,
                      "tolerated |omega - implied omega|")
      ->capture_default_str();
  add_format_flag(inv_cmd, inv_format);

  // serve
  api::ApiConfig serve_cfg = api::config_from_env();
  auto* serve_cmd = app.add_subcommand("serve", "HTTP JSON service for the explorer UI");
  serve_cmd->add_option("--host", serve_cfg.host)->capture_default_str();
  serve_cmd->add_option("--port", serve_cfg.port)->capture_default_str();
  serve_cmd->add_option("--static-dir", serve_cfg.static_dir, "UI bundle served under /");
  serve_cmd->add_option("--max-draws", serve_cfg.max_draws)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    if (const auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front()) {
      err << "run '" << app.get_name() << " " << sub->get_name() << " --help' for usage\n";
    }
    return kUsageError;
  }

  try {
    if (*bias_cmd) {
      const json j = io::bias_response(bias_params);
      if (bias_format == Format::json) {
        out << j.dump(2) << '\n';
      } else {
        const auto& o = j["observables"];
        print_pairs(out, bias_format,
                    {{"bias_cm", j["bias_cm"]},
                     {"bias_msm", j["bias_msm"]},
                     {"ell", o["ell"]},
                     {"omega", o["omega"]},
                     {"pi_star0", o["pi_star0"]},
                     {"pi_star1", o["pi_star1"]}});
      }
    } else if (*curve_cmd) {
      io::CurveRequest req;
      req.params = curve_params;
      req.parameter = parse_sweep_parameter(sweep);
      req.grid = grid.empty() ? linear_grid(from, to, points) : grid;
      const json j = io::curve_response(req);
      if (curve_format == Format::json) {
        out << j.dump(2) << '\n';
      } else {
        out << "x,bias_cm,bias_msm,undefined_reason\n";
        for (const auto& p : j["points"]) {
          auto num = [](const json& v) {
            return v.is_null() ? std::string() : format_double(v.get<double>());
          };
          out << format_double(p["x"].get<double>()) << ',' << num(p["bias_cm"]) << ','
              << num(p["bias_msm"]) << ','
              << (p["undefined_reason"].is_null() ? "" : p["undefined_reason"].get<std::string>())
              << '\n';
        }
      }
    } else if (*sim_cmd) {
      std::vector<Scenario> catalog =
          scenario_file.empty() ? builtin_scenarios() : load_scenarios(scenario_file);
      std::vector<Scenario> selected;
      if (scenario_ids.empty()) {
        selected = catalog;
      } else {
        for (const auto& id : scenario_ids) selected.push_back(find_scenario(catalog, id));
      }
      RunOptions options;
      options.workers = sim_workers;
      options.adjustment = sim_adjustment == "L" ? Adjustment::l : Adjustment::lstar;
      SimulationReport report;
      for (Scenario s : selected) {
        if (sim_n) s.n = *sim_n;
        if (sim_reps) s.reps = *sim_reps;
        if (sim_seed) s.seed = *sim_seed;
        if (sim_setting) s.setting = static_cast<TreatmentSetting>(*sim_setting);
        merge(report, run_scenario(s, options));
      }
      if (!sim_prefix.empty()) {
        std::ostringstream csv;
        write_report_csv(csv, report);
        write_file(sim_prefix + ".csv", csv.str());
        write_file(sim_prefix + ".json", io::to_json(report).dump(2) + "\n");
      }
      if (sim_format == Format::json) {
        out << io::to_json(report).dump(2) << '\n';
      } else if (sim_format == Format::csv) {
        write_report_csv(out, report);
      } else {
        print_simulation_table(out, report);
      }
    } else if (*sens_cmd) {
      json config_json;
      try {
        config_json = json::parse(read_file(sens_config));
      } catch (const json::parse_error& e) {
        throw UsageError("config '" + sens_config + "' is not valid JSON: " + e.what());
      }
      SensitivityConfig cfg = io::sensitivity_config_from_json(config_json);
      if (sens_seed) cfg.seed = *sens_seed;
      if (sens_draws) cfg.draws = *sens_draws;
      const SensitivityReport report = run_sensitivity(cfg);
      json j = io::sensitivity_response(cfg, report);
      if (sens_ate) {
        const AdjustedEstimate adj = adjusted_estimate(*sens_ate, report);
        j["adjusted"] = {{"ate_hat", adj.ate_hat},
                         {"mean_adjusted", adj.mean_adjusted},
                         {"median_adjusted", adj.median_adjusted},
                         {"low", adj.low},
                         {"high", adj.high}};
      }
      if (!sens_prefix.empty()) {
        write_file(sens_prefix + ".json", j.dump(2) + "\n");
        std::ostringstream csv;
        io::write_draws_csv(csv, report);
        write_file(sens_prefix + "_draws.csv", csv.str());
      }
      if (sens_format == Format::json) {
        out << j.dump(2) << '\n';
      } else if (sens_format == Format::csv) {
        io::write_draws_csv(out, report);
      } else {
        std::vector<std::pair<std::string, double>> rows{
            {"feasible", static_cast<double>(report.feasible)},
            {"infeasible", static_cast<double>(report.infeasible)},
            {"msm_mean", report.msm.mean},
            {"msm_median", report.msm.median},
            {"msm_q1", report.msm.q1},
            {"msm_q3", report.msm.q3},
            {"cm_mean", report.cm.mean},
            {"cm_median", report.cm.median},
            {"cm_q1", report.cm.q1},
            {"cm_q3", report.cm.q3}};
        if (sens_ate) {
          const AdjustedEstimate adj = adjusted_estimate(*sens_ate, report);
          rows.push_back({"ate_hat", adj.ate_hat});
          rows.push_back({"ate_mean_adjusted", adj.mean_adjusted});
          rows.push_back({"ate_median_adjusted", adj.median_adjusted});
          rows.push_back({"ate_adjusted_low", adj.low});
          rows.push_back({"ate_adjusted_high", adj.high});
        }
        print_pairs(out, Format::table, rows);
      }
    } else if (*inv_cmd) {
      const json j = io::invert_response(inv);
      if (inv_format == Format::json) {
        out << j.dump(2) << '\n';
      } else {
        print_pairs(out, inv_format,
                    {{"lambda", j["lambda"]}, {"pi0", j["pi0"]}, {"pi1", j["pi1"]}});
      }
    } else if (*serve_cmd) {
      api::Server server(serve_cfg);
      const int port = server.bind();
      err << "msmbias: serving on http://" << serve_cfg.host << ":" << port << '\n';
      server.listen();
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const DomainError& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return e.code() == ErrorCode::parse ? kUsageError : kDomainError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kOk;
}

}  // namespace msmbias::cli
