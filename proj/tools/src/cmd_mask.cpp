#include <memory>

#include "commands.hpp"
#include "common.hpp"
#include "giraf/phantom.hpp"

namespace giraf::cli {

namespace {

struct MaskArgs
{
  std::string grid = "65x65";
  std::string scheme = "uniform";
  double accel = 2.0;
  std::size_t count = 0;
  std::uint64_t seed = 1;
  std::string out = "mask";
};

void run(MaskArgs const &a, json const &config)
{
  auto const gamma = rect_from(a.grid);
  auto const scheme = mask_scheme_from_string(a.scheme);
  auto const mask = a.count > 0 ? make_mask_count(gamma, scheme, a.count, a.seed)
                                : make_mask(gamma, scheme, a.accel, a.seed);
  auto const dir = prepare_output_dir(a.out);
  json m = mask;
  write_json(dir / "mask.json", m);
  json results;
  results["samples"] = mask.theta.size();
  results["acceleration"] = static_cast<double>(gamma.size()) / static_cast<double>(mask.theta.size());
  write_manifest(dir, "mask", config, {{"mask", "mask.json"}}, results);
}

} // namespace

void add_mask_command(CLI::App &app)
{
  auto *cmd = app.add_subcommand("mask", "Draw a k-space sampling mask");
  auto args = std::make_shared<MaskArgs>();
  auto opts = std::make_shared<Options>(cmd);
  opts->add("--grid", args->grid, "Coefficient grid WxH");
  opts->add("--scheme", args->scheme, "uniform or variable_density")
    ->check(CLI::IsMember({"uniform", "variable_density", "vd"}));
  opts->add("--accel", args->accel, "Acceleration |gamma| / |theta|")->check(CLI::Range(1.0, 1e9));
  opts->add("--count", args->count, "Explicit sample count (overrides --accel when > 0)");
  opts->add("--seed", args->seed, "Random seed");
  opts->add("--out", args->out, "Output directory");
  cmd->callback([args, opts] {
    opts->resolve();
    run(*args, opts->to_json());
  });
}

} // namespace giraf::cli
