#include <memory>

#include "commands.hpp"
#include "common.hpp"
#include "giraf/image_io.hpp"
#include "giraf/kspace.hpp"
#include "giraf/phantom.hpp"

namespace giraf::cli {

namespace {

struct PhantomArgs
{
  std::string grid = "65x65";
  std::string lambda0 = "3x3";
  std::string kind = "edge";
  std::uint64_t seed = 1;
  int oversample = 8;
  double a_pos = 1.0;
  double a_neg = 0.25;
  std::string out = "phantom";
};

void run(PhantomArgs const &a, json const &config)
{
  auto const gamma = rect_from(a.grid);
  auto const l0 = parse_extents(a.lambda0);
  CounterRng rng(a.seed);
  EdgePolynomial edge;
  KSpaceArray x;
  if (a.kind == "edge") {
    edge = random_edge(IndexSet2D::rect(l0), rng);
    x = phantom_fourier({edge, a.a_pos, a.a_neg, a.oversample}, gamma);
  } else if (a.kind == "separable") {
    auto const sep = random_separable_edge(l0[0], l0[1], rng);
    edge = sep.edge();
    x = separable_phantom_fourier(sep, a.a_pos, a.a_neg, gamma);
  } else {
    throw std::invalid_argument("--kind must be edge or separable");
  }
  auto const dir = prepare_output_dir(a.out);
  write_kspace(dir / "kspace.bin", x);
  write_pgm16(dir / "image.pgm", image_magnitude(x), x.grid());
  json e = edge;
  write_json(dir / "edge.json", e);
  json results;
  results["positive_fraction"] = positive_fraction(rasterize_mu(edge, x.grid()));
  write_manifest(dir, "phantom", config, {{"kspace", "kspace.bin"}, {"image", "image.pgm"}, {"edge", "edge.json"}},
                 results);
}

} // namespace

void add_phantom_command(CLI::App &app)
{
  auto *cmd = app.add_subcommand("phantom", "Generate a two-region phantom and its Fourier coefficients");
  auto args = std::make_shared<PhantomArgs>();
  auto opts = std::make_shared<Options>(cmd);
  opts->add("--grid", args->grid, "Coefficient grid WxH");
  opts->add("--lambda0", args->lambda0, "Edge polynomial support WxH (odd extents)");
  opts->add("--kind", args->kind, "edge (quadrature) or separable (closed form)")
    ->check(CLI::IsMember({"edge", "separable"}));
  opts->add("--seed", args->seed, "Random seed");
  opts->add("--oversample", args->oversample, "Quadrature oversampling factor")->check(CLI::PositiveNumber);
  opts->add("--a-pos", args->a_pos, "Intensity where mu0 > 0");
  opts->add("--a-neg", args->a_neg, "Intensity where mu0 <= 0");
  opts->add("--out", args->out, "Output directory");
  cmd->callback([args, opts] {
    opts->resolve();
    run(*args, opts->to_json());
  });
}

} // namespace giraf::cli
