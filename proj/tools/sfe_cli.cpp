// Command-line front end: catalog runs, single solves, heat runs, eigenvalue
// scans, and convergence studies with CSV/JSON artifacts.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <omp.h>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sfe/cases.hpp"
#include "sfe/elliptic_solver.hpp"
#include "sfe/evolution.hpp"
#include "sfe/extension.hpp"

namespace {

sfe::Json load_config(const std::string& path) {
  if (path.empty()) return sfe::Json::object();
  return sfe::read_json(path);
}

// Per-case override table: config[<case id>] may set N, k, shifts, tau, seed.
sfe::CaseRequest make_request(const std::string& id, const sfe::Json& cfg,
                              std::optional<std::uint64_t> cli_seed) {
  sfe::CaseRequest req;
  req.id = id;
  if (cfg.contains(id)) {
    const sfe::Json& t = cfg.at(id);
    if (t.contains("N")) req.N = t.at("N").get<std::vector<int>>();
    if (t.contains("k")) req.k = t.at("k").get<std::vector<int>>();
    if (t.contains("shifts"))
      req.shifts = t.at("shifts").get<std::vector<double>>();
    if (t.contains("tau")) req.tau = t.at("tau").get<double>();
    if (t.contains("seed")) req.seed = t.at("seed").get<std::uint64_t>();
  }
  if (cli_seed) req.seed = *cli_seed;
  return req;
}

void print_record(const sfe::CaseResult& res) {
  if (res.is_eig) {
    std::printf("%-18s  %10s %14s %14s %5s %10s %10s\n", res.eig.case_id.c_str(),
                "shift", "lambda", "lambda*|Omega|", "iters", "final_dn", "conv");
    for (const sfe::EigRow& row : res.eig.merged)
      std::printf("%-18s  %10.4f %14.8f %14.6f %5d %10.2e %10s\n", "",
                  row.sigma, row.lambda, row.lambda_scaled, row.iterations,
                  row.final_dev, row.converged ? "yes" : "no");
    return;
  }
  std::printf("%-22s  %2s %5s %5s %5s %12s %8s\n", res.conv.case_id.c_str(),
              "k", "N", "n_b", "J", "error_inf", "rate");
  for (const sfe::ConvergenceRow& row : res.conv.rows)
    std::printf("%-22s  %2d %5d %5d %5d %12.4e %8.3f\n", "", row.k, row.N,
                row.n_b, row.J, row.error_inf, row.rate);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral elliptic/parabolic solver on embedded domains via "
               "smooth forcing extension"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed_value = 0;
  int threads = 0;
  app.add_option("--config", config_path, "JSON config with per-case overrides");
  app.add_option("--out", out_dir, "output directory for artifacts");
  auto* seed_opt = app.add_option("--seed", seed_value, "RNG seed override");
  app.add_option("--threads", threads, "OpenMP thread count (0 = default)");

  auto* cmd_list = app.add_subcommand("list-cases", "print the case catalog");

  std::vector<std::string> case_ids;
  auto* cmd_converge =
      app.add_subcommand("converge", "run catalog convergence studies");
  cmd_converge->add_option("--case", case_ids,
                           "case ids (default: all non-eig cases)");

  std::string one_case;
  int arg_N = 0, arg_k = 0;
  auto* cmd_solve = app.add_subcommand("solve", "single elliptic solve");
  cmd_solve->add_option("--case", one_case, "poisson_* case id")->required();
  cmd_solve->add_option("--N", arg_N, "grid size (default: case largest)");
  cmd_solve->add_option("--k", arg_k, "extension regularity");

  std::string heat_case = "heat_1d";
  double arg_dt = 0.0, arg_T = 0.0;
  auto* cmd_heat = app.add_subcommand("heat", "single heat run with trace");
  cmd_heat->add_option("--case", heat_case, "heat_1d or heat_2d");
  cmd_heat->add_option("--N", arg_N, "grid size");
  cmd_heat->add_option("--k", arg_k, "extension regularity");
  cmd_heat->add_option("--dt", arg_dt, "time step override");
  cmd_heat->add_option("--T", arg_T, "final time override");

  std::string eig_case;
  std::vector<double> arg_shifts;
  double arg_tau = 0.0;
  auto* cmd_eigs = app.add_subcommand("eigs", "inverse power eigenvalue scan");
  cmd_eigs->add_option("--case", eig_case, "eigs_* case id")->required();
  cmd_eigs->add_option("--shift", arg_shifts, "shift list override");
  cmd_eigs->add_option("--tau", arg_tau, "stopping tolerance override");
  cmd_eigs->add_option("--N", arg_N, "grid size override");

  int ext_k = 1, ext_N = 4096;
  auto* cmd_extend = app.add_subcommand("extend", "standalone 1D continuation");
  cmd_extend->add_option("--k", ext_k, "regularity of the continuation");
  cmd_extend->add_option("--N", ext_N, "grid size for the sampled extension");

  // Let global flags (--out, --config, ...) appear after the subcommand.
  for (CLI::App* sc : {cmd_list, cmd_converge, cmd_solve, cmd_heat, cmd_eigs,
                       cmd_extend})
    sc->fallthrough();

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) omp_set_num_threads(threads);
  const std::optional<std::uint64_t> cli_seed =
      seed_opt->count() ? std::optional<std::uint64_t>(seed_value) : std::nullopt;

  try {
    const sfe::Json cfg = load_config(config_path);

    if (*cmd_list) {
      for (const std::string& id : sfe::catalog_ids()) std::printf("%s\n", id.c_str());
      return 0;
    }

    if (*cmd_converge) {
      std::vector<std::string> ids = case_ids;
      if (ids.empty() && cfg.contains("cases"))
        ids = cfg.at("cases").get<std::vector<std::string>>();
      if (ids.empty())
        for (const std::string& id : sfe::catalog_ids())
          if (!sfe::is_eig_case(id)) ids.push_back(id);
      for (const std::string& id : ids) {
        const sfe::CaseResult res =
            sfe::run_case(make_request(id, cfg, cli_seed));
        sfe::emit(res, out_dir);
        print_record(res);
      }
      return 0;
    }

    if (*cmd_solve) {
      const bool two_d = one_case.rfind("poisson_2d", 0) == 0;
      const int N = cmd_solve->count("--N") ? arg_N : (two_d ? 64 : 256);
      const int k = cmd_solve->count("--k") ? arg_k : 0;
      const sfe::SingleSolve res = sfe::solve_catalog_case(one_case, N, k);
      std::filesystem::create_directories(out_dir);
      sfe::write_field_binary(
          (std::filesystem::path(out_dir) / (one_case + "_u.bin")).string(),
          res.sol.u_e.grid, res.sol.u_e.values);
      std::printf("%s N=%d k=%d n_b=%d J=%d rows=%ld cols=%ld rank=%ld "
                  "residual=%.3e",
                  one_case.c_str(), N, k, res.n_b, res.sol.diag.J,
                  static_cast<long>(res.sol.diag.rows),
                  static_cast<long>(res.sol.diag.cols),
                  static_cast<long>(res.sol.diag.rank), res.sol.diag.residual);
      if (res.error_inf >= 0.0)
        std::printf(" error_inf=%.6e", res.error_inf);
      std::printf("\n");
      return 0;
    }

    if (*cmd_heat) {
      sfe::CaseRequest req = make_request(heat_case, cfg, cli_seed);
      if (cmd_heat->count("--N")) req.N = {arg_N};
      if (cmd_heat->count("--k")) req.k = {arg_k};
      // Single-grid trace run on the largest requested grid.
      const int N = req.N.empty() ? (heat_case == "heat_1d" ? 512 : 128)
                                  : req.N.back();
      const int k = req.k.empty() ? 0 : req.k.front();
      const sfe::HeatProblem prob = sfe::heat_case_problem(heat_case);
      sfe::StepperConfig scfg = sfe::heat_case_stepper(heat_case, N, k);
      if (arg_dt > 0.0) scfg.dt = arg_dt;
      if (arg_T > 0.0) scfg.T = arg_T;
      const sfe::HeatRunResult res = sfe::run_heat(prob, N, scfg);

      std::filesystem::create_directories(out_dir);
      std::vector<std::vector<std::string>> rows;
      for (const sfe::StepTrace& tr : res.trace)
        rows.push_back({std::to_string(tr.step), sfe::format_sci(tr.t),
                        sfe::format_sci(tr.error), sfe::format_sci(tr.field_max)});
      const std::string path =
          (std::filesystem::path(out_dir) / (heat_case + "_trace.csv")).string();
      sfe::write_csv(path, {"step", "t", "error_inf", "field_max"}, rows);
      sfe::write_field_binary(
          (std::filesystem::path(out_dir) / (heat_case + "_final.bin")).string(),
          res.grid, res.u_final);
      std::printf("%s N=%d k=%d steps=%zu blew_up=%d final_error=%.6e\n",
                  heat_case.c_str(), N, k, res.trace.size() - 1,
                  res.blew_up ? 1 : 0, res.final_error);
      return res.blew_up ? 1 : 0;
    }

    if (*cmd_eigs) {
      sfe::CaseRequest req = make_request(eig_case, cfg, cli_seed);
      if (!arg_shifts.empty()) req.shifts = arg_shifts;
      if (cmd_eigs->count("--tau")) req.tau = arg_tau;
      if (cmd_eigs->count("--N")) req.N = {arg_N};
      const sfe::CaseResult res = sfe::run_case(req);
      sfe::emit(res, out_dir);
      print_record(res);
      return 0;
    }

    if (*cmd_extend) {
      const sfe::Domain dom = sfe::catalog_domain("extension_1d");
      const auto fd = [](int l, double x) {
        double fact = 1.0;
        for (int i = 2; i <= l; ++i) fact *= i;
        if (l % 2) fact = -fact;
        return fact / std::pow(x - 1.0, l + 1);
      };
      const sfe::Continuation cont = sfe::extend_function(fd, dom, ext_k);
      const sfe::Grid g{1, ext_N};
      const sfe::GridMasks masks = dom.grid_masks(g);
      const sfe::RealField h = sfe::reconstruct_extension(g, cont.basis, cont.coeffs);
      sfe::RealField f(g.size(), 0.0);
      for (int i = 0; i < g.N; ++i)
        if (masks.in_omega(i)) f[i] = fd(0, g.coord(i));
      const sfe::RealField fe = sfe::composite_forcing(masks, f, h);
      const sfe::DecayFit fit = sfe::spectrum_decay(g, sfe::to_coefficients(g, fe));

      std::filesystem::create_directories(out_dir);
      sfe::write_field_binary(
          (std::filesystem::path(out_dir) / "extension_1d.bin").string(), g, fe);
      std::printf("extension_1d k=%d N=%d J=%d decay_slope=%.3f jmax=%d\n",
                  ext_k, ext_N, cont.basis.J, fit.slope, fit.jmax);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
