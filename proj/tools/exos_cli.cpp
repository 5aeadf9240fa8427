#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "exos/boundary.hpp"
#include "exos/closed_form.hpp"
#include "exos/model.hpp"
#include "exos/model_free.hpp"
#include "exos/policy_eval.hpp"
#include "exos/policy_iter.hpp"
#include "exos/simulator.hpp"

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitAssumption = 3;
constexpr int kExitNumerical = 4;

constexpr const char* kSchemaVersion = "1.0";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AssumptionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key))
    throw ConfigError("missing config key: " + where + "." + key);
  return obj.at(key);
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback) {
  if (obj.is_object() && obj.contains(key)) return obj.at(key).get<T>();
  return fallback;
}

struct Loaded {
  exos::ModelParams params;
  exos::ProfitModel profit = exos::ProfitModel::power(1.0, 0.5);
  exos::GridSpec grid;
  double delta_y = 0.02;
  exos::PathConfig path_cfg;
  std::size_t M = 20;
  json run;  // free-form run block
};

Loaded load_config(const std::string& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  json cfg;
  try {
    cfg = json::parse(is);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  Loaded out;
  const json model = require(cfg, "model", "");
  out.params.mu = require(model, "mu", "model").get<double>();
  out.params.sigma = require(model, "sigma", "model").get<double>();
  out.params.rho = require(model, "rho", "model").get<double>();
  out.params.kappa = require(model, "kappa", "model").get<double>();
  out.params.lambda = require(model, "lambda", "model").get<double>();
  const json profit = get_or(model, "profit", json::object());
  out.profit = exos::ProfitModel::power(get_or(profit, "power_c", 1.0),
                                        get_or(profit, "power_theta", 0.5));
  const json grid = get_or(cfg, "grid", json::object());
  out.grid.delta_x = get_or(grid, "delta_x", 0.02);
  out.grid.x_bar = get_or(grid, "x_bar", 5.0);
  out.delta_y = get_or(grid, "delta_y", 0.02);
  const json sim = get_or(cfg, "sim", json::object());
  out.path_cfg.dt = get_or(sim, "dt", 0.01);
  out.path_cfg.horizon = get_or(sim, "horizon", 30.0);
  out.path_cfg.seed = get_or<std::uint64_t>(sim, "seed", 0);
  out.M = get_or<std::size_t>(sim, "M", 20);
  const std::string mode = get_or<std::string>(sim, "mode", "common_random_numbers");
  if (mode == "common_random_numbers")
    out.path_cfg.mode = exos::SimMode::common_random_numbers;
  else if (mode == "independent")
    out.path_cfg.mode = exos::SimMode::independent;
  else
    throw ConfigError("sim.mode must be 'independent' or 'common_random_numbers'");
  if (seed_override) out.path_cfg.seed = *seed_override;
  out.run = get_or(cfg, "run", json::object());

  const auto report = exos::validate(out.params, out.profit);
  if (!report.ok()) throw ConfigError("invalid model block: " + report.violations.front());
  return out;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot open for writing: " + p.string());
  os << text;
}

void write_summary(const fs::path& dir, json summary) {
  json out;
  out["schema_version"] = kSchemaVersion;
  for (auto& [k, v] : summary.items()) out[k] = v;
  write_text(dir / "summary.json", out.dump(2) + "\n");
}

exos::GridBoundary make_init(const Loaded& cfg) {
  const std::string init = get_or<std::string>(cfg.run, "init", "exponential");
  if (init == "exponential")
    return exos::init_exponential(cfg.params, cfg.profit,
                                  get_or(cfg.run, "zeta", 0.75), cfg.grid);
  if (init == "linear") return exos::init_linear(cfg.params, cfg.profit, cfg.grid);
  if (init == "file")
    return exos::read_boundary_csv(
        require(cfg.run, "init_file", "run").get<std::string>());
  throw ConfigError("run.init must be 'exponential', 'linear' or 'file'");
}

std::string boundary_csv(const exos::GridBoundary& g) {
  std::ostringstream os;
  exos::write_boundary_csv(os, g);
  return os.str();
}

int cmd_closed_form(const Loaded& cfg, const fs::path& out) {
  exos::ClosedFormSolution sol(cfg.params, cfg.profit);
  const auto xs = cfg.grid.knots();
  {
    std::ostringstream os;
    os << "x,g\n" << std::setprecision(17);
    for (double x : xs) os << x << ',' << sol.g_lambda(x) << '\n';
    write_text(out / "g_lambda.csv", os.str());
  }
  {
    std::ostringstream os;
    os << "x,y,v\n" << std::setprecision(17);
    const auto n = static_cast<int>(std::llround(1.0 / cfg.delta_y));
    for (double x : xs) {
      if (x <= 0.0) continue;
      for (int j = 0; j <= n; ++j)
        os << x << ',' << j * cfg.delta_y << ','
           << sol.value(x, std::min(1.0, j * cfg.delta_y)) << '\n';
    }
    write_text(out / "value_surface.csv", os.str());
  }
  write_summary(out, {{"alpha_minus", sol.roots().alpha_minus},
                      {"alpha_plus", sol.roots().alpha_plus},
                      {"y_floor", sol.y_floor()},
                      {"b_star", sol.b_star()},
                      {"x_hat", sol.x_hat()}});
  return kExitOk;
}

json conditions_json(const exos::ConditionRecord& rec) {
  return {{"a", rec.a},
          {"b", rec.b},
          {"c", rec.c},
          {"d", rec.d},
          {"slope_variation", rec.slope_variation}};
}

int cmd_pi(const Loaded& cfg, const fs::path& out) {
  const auto g0 = make_init(cfg);
  const auto init_report = exos::validate_initial(g0, cfg.params, cfg.profit);
  if (!init_report.ok())
    throw AssumptionError("initial boundary fails: " + init_report.violations.front());
  exos::ClosedFormSolution sol(cfg.params, cfg.profit);
  std::vector<double> truth_vals;
  for (double x : g0.knots()) truth_vals.push_back(sol.g_lambda(x));
  const exos::GridBoundary truth = g0.with_values(std::move(truth_vals));
  exos::PiOptions opts;
  opts.max_iters = get_or(cfg.run, "K", 30);
  opts.tol = get_or(cfg.run, "tol", 1e-6);
  const auto trace = exos::run_pi(g0, cfg.params, cfg.profit, opts, truth);
  for (std::size_t k = 0; k < trace.iterates.size(); ++k)
    write_text(out / ("boundary_" + std::to_string(k) + ".csv"),
               boundary_csv(trace.iterates[k]));
  {
    std::ostringstream os;
    exos::write_trace_csv(os, trace);
    write_text(out / "trace.csv", os.str());
  }
  json conds = json::array();
  for (const auto& rec : trace.conditions) conds.push_back(conditions_json(rec));
  write_summary(out, {{"iterations", trace.l1_steps.size()},
                      {"final_l1_to_truth", trace.l1_to_truth.back()},
                      {"final_l1_step", trace.l1_steps.back()},
                      {"conditions", conds}});
  return kExitOk;
}

int cmd_spi(const Loaded& cfg, const fs::path& out) {
  const auto g0 = make_init(cfg);
  const auto init_report = exos::validate_initial(g0, cfg.params, cfg.profit);
  if (!init_report.ok())
    throw AssumptionError("initial boundary fails: " + init_report.violations.front());
  exos::ClosedFormSolution sol(cfg.params, cfg.profit);
  std::vector<double> truth_vals;
  for (double x : g0.knots()) truth_vals.push_back(sol.g_lambda(x));
  const exos::GridBoundary truth = g0.with_values(std::move(truth_vals));
  exos::SpiConfig scfg;
  scfg.delta_x = cfg.grid.delta_x;
  scfg.delta_y = cfg.delta_y;
  scfg.x_bar = cfg.grid.x_bar;
  scfg.M = cfg.M;
  scfg.K = get_or(cfg.run, "K", 30);
  scfg.path_cfg = cfg.path_cfg;
  exos::Simulator sim(cfg.params, cfg.profit, cfg.path_cfg);
  const auto trace = exos::run_spi(g0, scfg, &sim, sol.y_floor(), truth);
  for (std::size_t k = 0; k < trace.iterates.size(); ++k)
    write_text(out / ("boundary_" + std::to_string(k) + ".csv"),
               boundary_csv(trace.iterates[k]));
  {
    std::ostringstream os;
    os << "iter,l1_to_truth,l1_step,sup_step,seconds\n" << std::setprecision(17);
    for (std::size_t k = 0; k < trace.l1_steps.size(); ++k)
      os << k << ',' << trace.l1_to_truth[k] << ',' << trace.l1_steps[k] << ','
         << trace.sup_steps[k] << ',' << trace.seconds[k] << '\n';
    write_text(out / "trace.csv", os.str());
  }
  write_summary(out, {{"iterations", trace.l1_steps.size()},
                      {"final_l1_to_truth", trace.l1_to_truth.back()},
                      {"final_l1_step", trace.l1_steps.back()},
                      {"seed", cfg.path_cfg.seed}});
  return kExitOk;
}

int cmd_sweep(const Loaded& cfg, const fs::path& out) {
  const json jlam = require(cfg.run, "lambdas", "run");
  std::vector<double> lambdas = jlam.get<std::vector<double>>();
  if (lambdas.empty()) throw ConfigError("run.lambdas must be nonempty");
  std::vector<double> ys = get_or(cfg.run, "ys", std::vector<double>{1.0});
  std::ostringstream os;
  os << "lambda,y,b_lambda,b_star,gap\n" << std::setprecision(17);
  json rows = json::array();
  for (double y : ys) {
    const auto sweep = exos::vanishing_sweep(cfg.params, cfg.profit, lambdas, y);
    for (const auto& row : sweep.rows)
      os << row.lambda << ',' << y << ',' << row.b_lambda_y << ',' << sweep.b_star
         << ',' << row.gap << '\n';
  }
  write_text(out / "sweep.csv", os.str());
  write_summary(out, {{"b_star", exos::classical_boundary(cfg.params, cfg.profit)}});
  return kExitOk;
}

int cmd_learn_floor(const Loaded& cfg, const fs::path& out) {
  exos::ZeroOrderConfig zcfg;
  zcfg.y0 = get_or(cfg.run, "y0", 0.5);
  zcfg.c0 = get_or(cfg.run, "c0", 0.1);
  zcfg.eta = get_or(cfg.run, "eta", 0.05);
  zcfg.max_iters = get_or(cfg.run, "max_iters", 500);
  zcfg.M_inner = get_or<std::size_t>(cfg.run, "M_inner", 256);
  exos::FloorResult res;
  if (get_or(cfg.run, "noiseless", false)) {
    const double lr = cfg.params.lambda / cfg.params.rho;
    const double kappa = cfg.params.kappa;
    auto analytic = [lr, kappa](double y) {
      return (y > 0.0) ? -kappa * y - lr * y * std::log(y) : 0.0;
    };
    res = exos::learn_y_floor(zcfg, analytic);
  } else {
    exos::Simulator sim(cfg.params, cfg.profit, cfg.path_cfg);
    res = exos::learn_y_floor(zcfg, sim);
  }
  std::ostringstream os;
  os << "i,y_i,estimate,eps_i\n" << std::setprecision(17);
  for (const auto& s : res.trace)
    os << s.i << ',' << s.y << ',' << s.estimate << ',' << s.eps << '\n';
  write_text(out / "floor_trace.csv", os.str());
  write_summary(out, {{"y_floor_learned", res.y_final},
                      {"y_floor_analytic",
                       std::exp(-(1.0 + cfg.params.kappa * cfg.params.rho /
                                            cfg.params.lambda))},
                      {"aborted", res.aborted}});
  if (res.aborted) {
    std::cerr << "learn-floor: divergence guard tripped; trace written\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_hjb_check(const Loaded& cfg, const fs::path& out) {
  exos::ClosedFormSolution sol(cfg.params, cfg.profit);
  const double h = get_or(cfg.run, "h", 1e-3);
  std::vector<double> xs, ys;
  for (double x = 0.05; x <= cfg.grid.x_bar + 1e-12; x += 0.05) xs.push_back(x);
  const auto n = static_cast<int>(std::llround(1.0 / cfg.delta_y));
  for (int j = 0; j <= n; ++j) ys.push_back(j * cfg.delta_y);
  const auto stats = exos::hjb_residual(
      [&sol](double x, double y) { return sol.value(x, y); }, cfg.params,
      cfg.profit, [&sol](double x) { return sol.g_lambda(x); }, xs, ys, h, 2 * h);
  write_summary(out, {{"max_abs_continuation", stats.max_abs_continuation},
                      {"max_stopping", stats.max_stopping},
                      {"n_continuation", stats.n_continuation},
                      {"n_stopping", stats.n_stopping},
                      {"h", h}});
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy-regularized optimal stopping: solvers and learners"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  int threads = 0;
  app.add_option("--config", config_path, "JSON config file")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "seed override for stochastic commands");
  app.add_option("--threads", threads, "worker threads (0 = auto); results unaffected");

  const std::vector<std::pair<std::string, int (*)(const Loaded&, const fs::path&)>>
      commands = {{"closed-form", cmd_closed_form}, {"pi", cmd_pi},
                  {"spi", cmd_spi},                 {"sweep", cmd_sweep},
                  {"learn-floor", cmd_learn_floor}, {"hjb-check", cmd_hjb_check}};
  for (const auto& [name, fn] : commands) app.add_subcommand(name)->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    const Loaded cfg = load_config(config_path, seed);
    const fs::path out(out_dir);
    fs::create_directories(out);
    for (const auto& [name, fn] : commands)
      if (app.got_subcommand(name)) return fn(cfg, out);
    std::cerr << "unknown command\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const AssumptionError& e) {
    std::cerr << "assumption violation: " << e.what() << '\n';
    return kExitAssumption;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}
