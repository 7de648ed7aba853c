#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lpm/errors.hpp"
#include "lpm/filter.hpp"
#include "lpm/io.hpp"
#include "lpm/mle.hpp"
#include "lpm/session.hpp"
#include "lpm/simulate.hpp"
#include "lpm/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

lpm::ModelParams parse_theta(const std::string& csv, double sigma_bar2, double eps) {
  lpm::ModelParams p;
  double a = 0.0, b = 0.0, s2 = 0.0;
  if (std::sscanf(csv.c_str(), "%lf,%lf,%lf", &a, &b, &s2) != 3)
    throw std::invalid_argument("--theta expects 'alpha,beta,sigma2', got '" + csv + "'");
  p.alpha = a;
  p.beta = b;
  p.sigma2 = s2;
  p.sigma_bar2 = sigma_bar2;
  p.eps = eps;
  p.validate();
  return p;
}

lpm::AxisSpec parse_axis(const std::string& spec, const char* flag) {
  lpm::AxisSpec a;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%d", &a.min, &a.max, &a.n) != 3)
    throw std::invalid_argument(std::string(flag) + " expects 'min:max:n', got '" + spec + "'");
  return a;
}

std::ostream& open_or_stdout(std::ofstream& file, const std::string& path) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw lpm::DataError("cannot open '" + path + "' for writing");
  return file;
}

int cmd_simulate(const std::string& theta, double sigma_bar2, double eps, double horizon,
                 double dt_sim, double dt_obs, std::uint64_t seed, const std::string& x0,
                 const std::string& out) {
  lpm::SimConfig cfg;
  cfg.params = parse_theta(theta, sigma_bar2, eps);
  cfg.horizon_T = horizon;
  cfg.dt_sim = dt_sim;
  cfg.dt_obs = dt_obs;
  cfg.seed = seed;
  if (x0 == "uniform") {
    cfg.x0 = 100.0;
    cfg.x0_uniform_in_cell = true;
  } else {
    try {
      cfg.x0 = std::stod(x0);
    } catch (const std::exception&) {
      throw std::invalid_argument("--x0 expects a number or 'uniform', got '" + x0 + "'");
    }
  }

  const lpm::MarketPath path = lpm::simulate_path(cfg);
  lpm::ConfigMap echo;
  echo.emplace_back("command", "simulate");
  echo.emplace_back("theta", theta);
  echo.emplace_back("sigma_bar2", lpm::format_double(sigma_bar2));
  echo.emplace_back("eps", lpm::format_double(eps));
  echo.emplace_back("T", lpm::format_double(horizon));
  echo.emplace_back("dt_sim", lpm::format_double(dt_sim));
  echo.emplace_back("dt_obs", lpm::format_double(dt_obs));
  echo.emplace_back("seed", std::to_string(seed));
  echo.emplace_back("x0", x0);
  lpm::write_dataset(path, out, echo);
  std::cout << "wrote " << path.size() << " observations to " << out << "\n";
  return kExitOk;
}

int cmd_estimate(lpm::SessionConfig cfg, const std::string& grid_alpha2,
                 const std::string& grid_sigma2) {
  if (!grid_alpha2.empty()) cfg.alpha2_axis = parse_axis(grid_alpha2, "--grid-alpha2");
  if (!grid_sigma2.empty()) cfg.sigma2_axis = parse_axis(grid_sigma2, "--grid-sigma2");

  cfg.echo.emplace_back("command", "estimate");
  cfg.echo.emplace_back("input", cfg.input);
  cfg.echo.emplace_back("step", lpm::format_double(cfg.resample_step));
  cfg.echo.emplace_back("gap_threshold", lpm::format_double(cfg.gap_threshold));
  cfg.echo.emplace_back("m_blocks_flag", std::to_string(cfg.m_blocks));
  cfg.echo.emplace_back("cells", std::to_string(cfg.filter_cells));
  cfg.echo.emplace_back("threads", std::to_string(cfg.n_workers));

  const lpm::EstimationResult r = lpm::run_estimate(cfg);
  std::cout << "sigma_bar2_hat = " << lpm::format_double(r.sigma_bar2_hat) << "\n"
            << "Sigma_hat      = " << lpm::format_double(r.Sigma_hat) << " (m_blocks "
            << r.m_blocks << ")\n"
            << "alpha2_hat     = " << lpm::format_double(r.alpha2_hat) << "\n"
            << "beta_hat       = " << lpm::format_double(r.beta_hat) << "\n"
            << "sigma2_hat     = " << lpm::format_double(r.sigma2_hat) << "\n"
            << "eps_hat        = " << lpm::format_double(r.eps_hat)
            << (r.eps_clamped ? " (clamped)" : "") << "\n"
            << "candidates     = " << r.surface.size() << " retained, " << r.excluded
            << " excluded, " << r.ties.size() << " tie(s)\n"
            << "runtime        = " << lpm::format_double(r.runtime_seconds) << " s, "
            << r.kernel_builds << " kernel builds, " << r.filter_steps << " filter steps, "
            << r.workers << " workers\n";
  if (!cfg.output.empty()) std::cout << "result written to " << cfg.output << "\n";
  return kExitOk;
}

int cmd_filter(const std::string& input, const std::string& theta, double sigma_bar2,
               double eps, int cells, bool strang, double step, const std::string& out,
               int dump_every, const std::string& dump_out) {
  const lpm::ModelParams p = parse_theta(theta, sigma_bar2, eps);
  const lpm::TickFile ticks = lpm::load_ticks(input);
  const lpm::MarketPath path = lpm::resample(ticks, step);

  std::ofstream dump_file;
  lpm::FilterOptions opts;
  opts.strang = strang;
  if (dump_every > 0) {
    if (dump_out.empty())
      throw std::invalid_argument("--dump-every needs --dump-out for the snapshots");
    dump_file.open(dump_out);
    if (!dump_file) throw lpm::DataError("cannot open '" + dump_out + "' for writing");
    opts.snapshot_every = dump_every;
    opts.on_snapshot = [&dump_file](const lpm::FilterState& s) {
      dump_file << lpm::format_double(s.t) << ',' << lpm::format_double(s.y);
      for (double u : s.u) dump_file << ',' << lpm::format_double(u);
      dump_file << '\n';
    };
  }

  const lpm::FilterRun run = lpm::run_filter(path, p, lpm::FilterGrid{cells}, opts);

  std::ofstream file;
  std::ostream& os = open_or_stdout(file, out);
  os << "step,time,conditional_mu,log_increment,log_normalizer\n";
  for (std::size_t i = 0; i < run.mu.size(); ++i)
    os << i << ',' << lpm::format_double(path.times[i]) << ','
       << lpm::format_double(run.mu[i]) << ',' << lpm::format_double(run.log_increments[i])
       << ',' << lpm::format_double(run.log_normalizers[i]) << "\n";
  os.flush();
  return kExitOk;
}

int cmd_verify(bool full, std::uint64_t seed) {
  const std::vector<lpm::VerifyCheck> checks = lpm::run_verification(full, seed);
  bool all_pass = true;
  for (const auto& c : checks) {
    all_pass = all_pass && c.pass;
    std::cout << (c.pass ? "[ OK ] " : "[FAIL] ") << c.name
              << " measured=" << lpm::format_double(c.measured)
              << " bound=" << lpm::format_double(c.bound)
              << (c.detail.empty() ? "" : " (" + c.detail + ")") << "\n";
  }
  std::cout << (all_pass ? "verification passed" : "verification FAILED") << " ("
            << checks.size() << " checks)\n";
  if (!all_pass) throw lpm::NumericalError("verification battery failed");
  return kExitOk;
}

int cmd_surface(const std::string& input, double at_alpha2, double at_sigma2,
                const std::string& out) {
  const lpm::EstimationResult r = lpm::load_result(input);
  if (r.surface.empty()) throw lpm::DataError("result '" + input + "' has no surface rows");

  const double a2 = std::isnan(at_alpha2) ? r.alpha2_hat : at_alpha2;
  const double s2 = std::isnan(at_sigma2) ? r.sigma2_hat : at_sigma2;
  // snap to the nearest stored axis values
  double best_a2 = r.surface.front().alpha2, best_s2 = r.surface.front().sigma2;
  for (const auto& row : r.surface) {
    if (std::abs(row.alpha2 - a2) < std::abs(best_a2 - a2)) best_a2 = row.alpha2;
    if (std::abs(row.sigma2 - s2) < std::abs(best_s2 - s2)) best_s2 = row.sigma2;
  }

  std::ofstream file;
  std::ostream& os = open_or_stdout(file, out);
  os << "# slice alpha2=" << lpm::format_double(best_a2) << "\n";
  os << "sigma2,beta,loglik\n";
  for (const auto& row : r.surface)
    if (row.alpha2 == best_a2)
      os << lpm::format_double(row.sigma2) << ',' << lpm::format_double(row.beta) << ','
         << lpm::format_double(row.loglik) << "\n";
  os << "# slice sigma2=" << lpm::format_double(best_s2) << "\n";
  os << "alpha2,beta,loglik\n";
  for (const auto& row : r.surface)
    if (row.sigma2 == best_s2)
      os << lpm::format_double(row.alpha2) << ',' << lpm::format_double(row.beta) << ','
         << lpm::format_double(row.loglik) << "\n";
  os.flush();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"latent price model toolkit: simulate, estimate, filter, verify, surface"};
  app.require_subcommand(1);
  app.set_config("--config")->description("key=value file overlaying the flags");

  // simulate
  auto* sim = app.add_subcommand("simulate", "simulate a market path and write a dataset");
  std::string sim_theta, sim_x0 = "100.5", sim_out;
  double sim_sb2 = 1.0, sim_eps = 0.0, sim_T = 100.0, sim_dt_sim = 0.01, sim_dt_obs = 1.0;
  std::uint64_t sim_seed = 0;
  sim->add_option("--theta", sim_theta, "alpha,beta,sigma2")->required();
  sim->add_option("--sigma-bar2", sim_sb2, "order flow variance rate")->required();
  sim->add_option("--eps", sim_eps, "spread widening half-width");
  sim->add_option("--T", sim_T, "horizon in seconds")->required();
  sim->add_option("--dt-sim", sim_dt_sim, "simulation step");
  sim->add_option("--dt-obs", sim_dt_obs, "observation step");
  sim->add_option("--seed", sim_seed, "random seed");
  sim->add_option("--x0", sim_x0, "initial latent price, or 'uniform'");
  sim->add_option("--out", sim_out, "output dataset path")->required();

  // estimate
  auto* est = app.add_subcommand("estimate", "run the full estimation pipeline");
  lpm::SessionConfig est_cfg;
  std::string est_grid_a2, est_grid_s2;
  est->add_option("--input", est_cfg.input, "tick data file")->required();
  est->add_option("--out", est_cfg.output, "result artifact path");
  est->add_option("--step", est_cfg.resample_step, "resampling step in seconds");
  est->add_option("--gap-threshold", est_cfg.gap_threshold, "tick gap flag threshold");
  est->add_option("--m-blocks", est_cfg.m_blocks, "block count override (0: floor(sqrt(T)))");
  est->add_option("--grid-alpha2", est_grid_a2, "alpha^2 axis min:max:n");
  est->add_option("--grid-sigma2", est_grid_s2, "sigma^2 axis min:max:n");
  est->add_option("--cells", est_cfg.filter_cells, "filter grid cells");
  est->add_option("--threads", est_cfg.n_workers, "worker contexts");

  // filter
  auto* fil = app.add_subcommand("filter", "run the filter at a fixed parameter point");
  std::string fil_input, fil_theta, fil_out, fil_dump_out;
  double fil_sb2 = 1.0, fil_eps = 0.0, fil_step = 1.0;
  int fil_cells = 100, fil_dump_every = 0;
  bool fil_strang = false;
  fil->add_option("--input", fil_input, "tick data file")->required();
  fil->add_option("--theta", fil_theta, "alpha,beta,sigma2")->required();
  fil->add_option("--sigma-bar2", fil_sb2, "order flow variance rate")->required();
  fil->add_option("--eps", fil_eps, "spread widening half-width");
  fil->add_option("--step", fil_step, "resampling step in seconds");
  fil->add_option("--cells", fil_cells, "filter grid cells");
  fil->add_flag("--strang", fil_strang, "symmetrized splitting");
  fil->add_option("--out", fil_out, "per-step output (default stdout)");
  fil->add_option("--dump-every", fil_dump_every, "density snapshot cadence (0: off)");
  fil->add_option("--dump-out", fil_dump_out, "density snapshot file");

  // verify
  auto* ver = app.add_subcommand("verify", "run the numerical cross-validation battery");
  bool ver_full = false;
  std::uint64_t ver_seed = 20240901;
  ver->add_flag("--full", ver_full, "acceptance-scale Monte Carlo sizes");
  ver->add_option("--seed", ver_seed, "random seed");

  // surface
  auto* sur = app.add_subcommand("surface", "re-emit slices of a saved likelihood surface");
  std::string sur_input, sur_out;
  double sur_a2 = std::nan(""), sur_s2 = std::nan("");
  sur->add_option("--input", sur_input, "result artifact")->required();
  sur->add_option("--at-alpha2", sur_a2, "slice location (default: the argmax)");
  sur->add_option("--at-sigma2", sur_s2, "slice location (default: the argmax)");
  sur->add_option("--out", sur_out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
    if (sim->parsed())
      return cmd_simulate(sim_theta, sim_sb2, sim_eps, sim_T, sim_dt_sim, sim_dt_obs, sim_seed,
                          sim_x0, sim_out);
    if (est->parsed()) return cmd_estimate(est_cfg, est_grid_a2, est_grid_s2);
    if (fil->parsed())
      return cmd_filter(fil_input, fil_theta, fil_sb2, fil_eps, fil_cells, fil_strang,
                        fil_step, fil_out, fil_dump_every, fil_dump_out);
    if (ver->parsed()) return cmd_verify(ver_full, ver_seed);
    if (sur->parsed()) return cmd_surface(sur_input, sur_a2, sur_s2, sur_out);
    std::cerr << "error: usage: no subcommand selected\n";
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    std::cerr << "error: usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const lpm::DataError& e) {
    std::cerr << "error: data: " << e.what() << "\n";
    return kExitData;
  } catch (const lpm::NumericalError& e) {
    std::cerr << "error: numerical: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: numerical: " << e.what() << "\n";
    return kExitNumerical;
  }
}
