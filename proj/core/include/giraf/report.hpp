#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace giraf {

/// Diagnostics of one outer iteration of an iterative solver.
struct IterationRecord
{
  int iteration = 0;
  /// Smoothed penalty plus data term at the iterate entering this iteration.
  double objective = 0.0;
  /// Unsmoothed Schatten penalty at the iterate entering this iteration.
  double penalty = 0.0;
  /// ||P x - b||^2 after the iteration.
  double data_fit = 0.0;
  double eps = 0.0;
  double spectrum_min = 0.0;
  double spectrum_max = 0.0;
  /// Weighted least-squares surrogate before and after the linear solve (IRLS only).
  double surrogate_before = 0.0;
  double surrogate_after = 0.0;
  int cg_iterations = 0;
  double cg_residual = 0.0;
  bool cg_converged = true;
  double relative_change = 0.0;
  std::optional<double> mse;
  std::optional<double> snr_db;
  double gram_s = 0.0;
  /// Eigen-decomposition (IRLS) or SVD (SVT).
  double decomp_s = 0.0;
  double mask_s = 0.0;
  double solve_s = 0.0;
  double total_s = 0.0;
};

struct SolverReport
{
  std::string solver;
  std::vector<IterationRecord> iterations;
  bool converged = false;
  double total_s = 0.0;
  std::optional<double> final_mse;
  std::optional<double> final_snr_db;
  std::vector<std::string> warnings;
};

void to_json(nlohmann::json &j, IterationRecord const &r);
void to_json(nlohmann::json &j, SolverReport const &r);

/// One JSON object per iteration, followed by a summary line with "summary": true.
void write_jsonl(std::ostream &os, SolverReport const &r);
/// Per-iteration CSV with a header row.
void write_csv(std::ostream &os, SolverReport const &r);

} // namespace giraf
