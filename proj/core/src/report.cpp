#include "giraf/report.hpp"

#include <iomanip>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace giraf {

namespace {

nlohmann::json optional_json(std::optional<double> const &v)
{
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

} // namespace

void to_json(nlohmann::json &j, IterationRecord const &r)
{
  j = {{"iteration", r.iteration},
       {"objective", r.objective},
       {"penalty", r.penalty},
       {"data_fit", r.data_fit},
       {"eps", r.eps},
       {"spectrum_min", r.spectrum_min},
       {"spectrum_max", r.spectrum_max},
       {"surrogate_before", r.surrogate_before},
       {"surrogate_after", r.surrogate_after},
       {"cg_iterations", r.cg_iterations},
       {"cg_residual", r.cg_residual},
       {"cg_converged", r.cg_converged},
       {"relative_change", r.relative_change},
       {"mse", optional_json(r.mse)},
       {"snr_db", optional_json(r.snr_db)},
       {"gram_s", r.gram_s},
       {"decomp_s", r.decomp_s},
       {"mask_s", r.mask_s},
       {"solve_s", r.solve_s},
       {"total_s", r.total_s}};
}

void to_json(nlohmann::json &j, SolverReport const &r)
{
  j = {{"solver", r.solver},
       {"iterations", r.iterations.size()},
       {"converged", r.converged},
       {"total_s", r.total_s},
       {"final_mse", optional_json(r.final_mse)},
       {"final_snr_db", optional_json(r.final_snr_db)},
       {"warnings", r.warnings}};
}

void write_jsonl(std::ostream &os, SolverReport const &r)
{
  for (auto const &it : r.iterations) {
    nlohmann::json j = it;
    j["solver"] = r.solver;
    os << j.dump() << '\n';
  }
  nlohmann::json s = r;
  s["summary"] = true;
  os << s.dump() << '\n';
}

void write_csv(std::ostream &os, SolverReport const &r)
{
  os << "solver,iteration,objective,penalty,data_fit,eps,spectrum_min,spectrum_max,cg_iterations,cg_residual,"
        "relative_change,mse,snr_db,gram_s,decomp_s,mask_s,solve_s,total_s\n";
  os << std::setprecision(10);
  auto opt = [](std::optional<double> const &v) {
    std::ostringstream ss;
    if (v) {
      ss << std::setprecision(10) << *v;
    }
    return ss.str();
  };
  for (auto const &it : r.iterations) {
    os << r.solver << ',' << it.iteration << ',' << it.objective << ',' << it.penalty << ',' << it.data_fit << ','
       << it.eps << ',' << it.spectrum_min << ',' << it.spectrum_max << ',' << it.cg_iterations << ','
       << it.cg_residual << ',' << it.relative_change << ',' << opt(it.mse) << ',' << opt(it.snr_db) << ','
       << it.gram_s << ',' << it.decomp_s << ',' << it.mask_s << ',' << it.solve_s << ',' << it.total_s << '\n';
  }
}

} // namespace giraf
