#pragma once

// Problem-case catalog behind the CLI and the convergence studies: fixed
// forcings, exact solutions, domains, and refinement schedules, plus the
// artifact emitter.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sfe/convergence.hpp"
#include "sfe/eigensolver.hpp"
#include "sfe/evolution.hpp"
#include "sfe/io.hpp"

namespace sfe {

struct CaseRequest {
  std::string id;
  std::vector<int> N;          // empty = catalog default; ascending powers of 2
  std::vector<int> k;          // empty = catalog default
  std::vector<double> shifts;  // eig cases only; empty = catalog default
  double tau = 1e-8;
  std::uint64_t seed = 20240803;
};

struct ConvergenceRow {
  int k = 0;
  int N = 0;
  int n_b = 0;
  int J = 0;
  double error_inf = 0.0;
  double rate = 0.0;  // fitted slope of this row's k-group (NaN if saturated)
};

struct ConvergenceRecord {
  std::string case_id;
  std::string reference;  // exact | manufactured | finest-grid | none
  std::vector<ConvergenceRow> rows;
  std::map<int, RateFit> fit_by_k;
};

struct EigRow {
  double sigma = 0.0;
  double lambda = 0.0;
  double lambda_scaled = 0.0;  // lambda * |Omega|
  int iterations = 0;
  double final_dev = 0.0;
  double residual = 0.0;
  bool converged = false;
};

struct EigRecord {
  std::string case_id;
  double measure = 0.0;
  std::vector<EigRow> rows;    // one per input shift, input order
  std::vector<EigRow> merged;  // deduplicated, ascending in lambda
};

struct CaseResult {
  bool is_eig = false;
  ConvergenceRecord conv;
  EigRecord eig;
  Json metadata;
};

std::vector<std::string> catalog_ids();
bool is_eig_case(const std::string& id);
Domain catalog_domain(const std::string& id);

// Fixed heat fixtures behind heat_1d / heat_2d (forcing, boundary data,
// start scheme, time-step rule).
HeatProblem heat_case_problem(const std::string& id);
StepperConfig heat_case_stepper(const std::string& id, int N, int k);

// One elliptic solve of a poisson_* case; error_inf = -1 when the case has
// no pointwise reference (disc complement against its own finest grid).
struct SingleSolve {
  Solution sol;
  int n_b = 0;
  double error_inf = -1.0;
};
SingleSolve solve_catalog_case(const std::string& id, int N, int k);

CaseResult run_case(const CaseRequest& req);

// Writes <case>.csv, a gnuplot-friendly <case>_long.dat, <case>_meta.json,
// and for eig cases <case>_merged.csv, into out_dir (created if missing).
void emit(const CaseResult& result, const std::string& out_dir);

// Log-binned decay slope of |c_j|, j = 1..N/2-1, over the top half-decade
// of resolved modes (|c_j| > 1e-13 max|c|): 6 log-spaced bins, bin value =
// max magnitude, least-squares slope of log(mag) vs log(j).
struct DecayFit {
  double slope = 0.0;
  double top_bin_mag = 0.0;
  int jmax = 0;
};
DecayFit spectrum_decay(const Grid& g, const Spectrum& c);

}  // namespace sfe
