#include <fstream>
#include <iostream>
#include <memory>

#include "commands.hpp"
#include "common.hpp"
#include "giraf/analysis.hpp"

namespace giraf::cli {

namespace {

struct RankArgs
{
  int seeds = 5;
  std::uint64_t first_seed = 1;
  std::string grid = "65x65";
  std::string lambda0 = "3x3";
  std::string filter = "5x5";
  int oversample = 8;
  double tol = 1e-2;
  std::string out = "validate_rank";
};

void run_rank(RankArgs const &a, json const &config)
{
  auto const gamma = rect_from(a.grid);
  auto const l0 = rect_from(a.lambda0);
  auto const l1 = rect_from(a.filter);
  if (!rank_formula_applies(gamma, l1, l0)) {
    throw std::invalid_argument("grid, filter and lambda0 do not satisfy the rank formula's size conditions");
  }
  auto const cfg = LiftingConfig::make(gamma, l1, {WeightingKind::gradient});
  auto const expected = static_cast<int>(prop1_rank(l1, l0));
  auto const dir = prepare_output_dir(a.out);
  std::ofstream os(dir / "rank.csv");
  os << "seed,rank,expected,agree,residual\n";
  int agree = 0;
  double worst = 0.0;
  for (int i = 0; i < a.seeds; ++i) {
    std::uint64_t const seed = a.first_seed + static_cast<std::uint64_t>(i);
    CounterRng rng(seed);
    auto const x = phantom_fourier({random_edge(l0, rng), 1.0, 0.25, a.oversample}, gamma);
    auto const s = singular_values(lift_dense(x, cfg));
    int const r = numerical_rank(s, a.tol);
    double const residual = expected < s.size() ? s[expected] / s[0] : 0.0;
    agree += r == expected;
    worst = std::max(worst, residual);
    os << seed << ',' << r << ',' << expected << ',' << (r == expected) << ',' << residual << '\n';
  }
  write_manifest(dir, "validate rank", config, {{"table", "rank.csv"}},
                 {{"agreements", agree}, {"seeds", a.seeds}, {"expected_rank", expected}, {"worst_residual", worst}});
  std::cout << agree << "/" << a.seeds << " rank agreements (expected " << expected << "), worst sigma_"
            << expected + 1 << "/sigma_1 " << worst << "\n";
  if (agree != a.seeds) {
    throw InvariantFailure("numerical rank differs from the predicted rank");
  }
}

struct PhaseArgs
{
  std::string grid = "33x33";
  std::string lambda0 = "3x3";
  std::string filter = "5x5";
  std::vector<std::size_t> counts;
  int trials = 20;
  std::uint64_t seed = 1;
  std::uint64_t phantom_seed = 3;
  double p = 0.0;
  std::string op = "exact";
  int max_iter = 40;
  double success_tol = 1e-3;
  int threads = 0;
  std::string out = "validate_phase";
};

void run_phase(PhaseArgs const &a, json const &config)
{
  auto const gamma = rect_from(a.grid);
  auto const l0 = parse_extents(a.lambda0);
  auto const l1 = rect_from(a.filter);
  CounterRng rng(a.phantom_seed);
  auto const sep = random_separable_edge(l0[0], l0[1], rng);
  auto const truth = separable_phantom_fourier(sep, 1.0, 0.25, gamma);
  auto const lifting = LiftingConfig::make(gamma, l1, {WeightingKind::gradient});
  PhaseConfig pc;
  pc.sample_counts = a.counts;
  if (pc.sample_counts.empty()) {
    std::size_t const n = gamma.size();
    auto const rank = static_cast<std::size_t>(prop1_rank(l1, IndexSet2D::rect(l0)));
    pc.sample_counts = {rank / 2, n / 8, n / 4, 3 * n / 8, n / 2, n};
  }
  pc.trials = a.trials;
  pc.seed = a.seed;
  pc.success_tol = a.success_tol;
  pc.solver.p = a.p;
  pc.solver.op = operator_mode_from_string(a.op);
  pc.solver.max_outer = a.max_iter;
  pc.solver.convergence_tol = 1e-10;
  pc.solver.cg_tol = 1e-10;
  pc.threads = a.threads > 0 ? a.threads : default_threads();
  auto const t = phase_transition(truth, lifting, pc);
  auto const dir = prepare_output_dir(a.out);
  {
    std::ofstream os(dir / "phase.csv");
    write_phase_csv(os, t);
  }
  json levels = json::array();
  for (auto const &l : t.levels) {
    levels.push_back({{"samples", l.samples},
                      {"successes", l.successes},
                      {"trials", l.trials},
                      {"fraction", l.fraction},
                      {"wilson_lo", l.interval.lo},
                      {"wilson_hi", l.interval.hi}});
    std::cout << l.samples << " samples: " << l.successes << "/" << l.trials << "\n";
  }
  json e = sep.edge();
  write_manifest(dir, "validate phase", config, {{"table", "phase.csv"}},
                 {{"levels", levels}, {"monotone", t.monotone}, {"edge", e}});
  if (!t.monotone) {
    throw InvariantFailure("success fraction is not monotone in the sample count");
  }
}

struct LemmaArgs
{
  std::string grid = "33x33";
  std::string lambda0 = "3x3";
  std::string filter = "5x5";
  int points = 40;
  std::uint64_t seed = 5;
  std::uint64_t point_seed = 9;
  std::string out = "validate_lemmas";
};

void run_lemmas(LemmaArgs const &a, json const &config)
{
  auto const gamma = rect_from(a.grid);
  auto const l0 = parse_extents(a.lambda0);
  CounterRng rng(a.seed);
  auto const sep = random_separable_edge(l0[0], l0[1], rng);
  auto const f = separable_phantom_fourier(sep, 1.0, 0.25, gamma);
  auto const r = subspace_lemma_check(f, sep.edge(), rect_from(a.filter), a.points, a.point_seed);
  auto const dir = prepare_output_dir(a.out);
  json j;
  j["rank"] = r.rank;
  j["numerical_rank"] = r.numerical_rank;
  j["contrast"] = r.contrast;
  j["selected"] = r.selected;
  j["column_rank"] = r.column_rank;
  j["max_column_residual"] = r.max_column_residual;
  j["on_residuals"] = r.on_residuals;
  j["off_residuals"] = r.off_residuals;
  write_json(dir / "lemmas.json", j);
  write_manifest(dir, "validate lemmas", config, {{"residuals", "lemmas.json"}},
                 {{"contrast", r.contrast}, {"selected", r.selected}, {"rank", r.rank}});
  std::cout << "residual contrast " << r.contrast << ", selected " << r.selected << " of rank " << r.rank
            << ", column rank " << r.column_rank << "\n";
  if (!(r.contrast > 1e2) || r.selected != r.rank || r.column_rank != r.rank) {
    throw InvariantFailure("subspace checks failed");
  }
}

struct RhoArgs
{
  std::string lambda0 = "3x3";
  std::string filter = "5x5";
  std::uint64_t seed = 2;
  int raster = 256;
  int restarts = 32;
  std::uint64_t search_seed = 1;
  std::string out = "validate_rho";
};

void run_rho(RhoArgs const &a, json const &config)
{
  CounterRng rng(a.seed);
  auto const edge = random_edge(rect_from(a.lambda0), rng);
  Rho1Budget budget;
  budget.raster = a.raster;
  budget.restarts = a.restarts;
  budget.seed = a.search_seed;
  auto const inc = incoherence(edge, rect_from(a.filter), budget);
  auto const r2 = rho2(edge, rect_from(a.filter));
  auto const dir = prepare_output_dir(a.out);
  json j;
  j["rho2"] = inc.rho2;
  j["lambda_min"] = r2.lambda_min;
  j["grad_l1"] = r2.grad_l1;
  j["rho1_estimate"] = inc.rho1_search.rho1;
  j["rho1_lower"] = inc.rho1_lower;
  j["sigma_min"] = inc.rho1_search.sigma_min;
  j["candidates"] = inc.rho1_search.candidates;
  j["edge"] = edge;
  write_json(dir / "rho.json", j);
  write_manifest(dir, "validate rho", config, {{"values", "rho.json"}},
                 {{"rho1_estimate", inc.rho1_search.rho1}, {"rho2", inc.rho2}});
  std::cout << "rho1 estimate " << inc.rho1_search.rho1 << ", rho2 " << inc.rho2 << "\n";
  if (!(r2.lambda_min > 0.0) || !std::isfinite(inc.rho2)) {
    throw InvariantFailure("rho2 is not finite");
  }
}

template <class Args, class Fn>
void add_suite(CLI::App *parent, std::string const &name, std::string const &help,
               std::function<void(Options &, Args &)> bind, Fn run)
{
  auto *cmd = parent->add_subcommand(name, help);
  auto args = std::make_shared<Args>();
  auto opts = std::make_shared<Options>(cmd);
  bind(*opts, *args);
  cmd->callback([args, opts, run] {
    opts->resolve();
    run(*args, opts->to_json());
  });
}

} // namespace

void add_validate_command(CLI::App &app)
{
  auto *cmd = app.add_subcommand("validate", "Run a theory validation suite");
  cmd->require_subcommand(1);
  add_suite<RankArgs>(
    cmd, "rank", "Numerical rank of lifted phantoms against the predicted rank",
    [](Options &o, RankArgs &a) {
      o.add("--seeds", a.seeds, "Number of random edge polynomials");
      o.add("--first-seed", a.first_seed, "First seed");
      o.add("--grid", a.grid, "Coefficient grid WxH");
      o.add("--lambda0", a.lambda0, "Edge polynomial support WxH");
      o.add("--filter", a.filter, "Filter support WxH");
      o.add("--oversample", a.oversample, "Quadrature oversampling factor");
      o.add("--tol", a.tol, "Rank tolerance relative to sigma_1");
      o.add("--out", a.out, "Output directory");
    },
    run_rank);
  add_suite<PhaseArgs>(
    cmd, "phase", "Monte-Carlo exact-recovery table over sample counts",
    [](Options &o, PhaseArgs &a) {
      o.add("--grid", a.grid, "Coefficient grid WxH");
      o.add("--lambda0", a.lambda0, "Separable edge support WxH");
      o.add("--filter", a.filter, "Filter support WxH");
      o.add("--counts", a.counts, "Sample counts, comma separated (default: spread up to full sampling)")
        ->delimiter(',');
      o.add("--trials", a.trials, "Trials per sample count");
      o.add("--seed", a.seed, "Seed of the mask draws");
      o.add("--phantom-seed", a.phantom_seed, "Seed of the phantom");
      o.add("--p", a.p, "Schatten exponent");
      o.add("--operator", a.op, "exact or approx");
      o.add("--max-iter", a.max_iter, "GIRAF iterations per trial");
      o.add("--success-tol", a.success_tol, "Relative error counted as exact recovery");
      o.add("--threads", a.threads, "Worker threads (0: GIRAF_THREADS or 1)");
      o.add("--out", a.out, "Output directory");
    },
    run_phase);
  add_suite<LemmaArgs>(
    cmd, "lemmas", "Row- and column-space checks for Dirichlet translates on the edge set",
    [](Options &o, LemmaArgs &a) {
      o.add("--grid", a.grid, "Coefficient grid WxH");
      o.add("--lambda0", a.lambda0, "Separable edge support WxH");
      o.add("--filter", a.filter, "Filter support WxH");
      o.add("--points", a.points, "Points sampled on and off the edge set");
      o.add("--seed", a.seed, "Phantom seed");
      o.add("--point-seed", a.point_seed, "Seed of the point sampling");
      o.add("--out", a.out, "Output directory");
    },
    run_lemmas);
  add_suite<RhoArgs>(
    cmd, "rho", "Incoherence estimates of a random edge polynomial",
    [](Options &o, RhoArgs &a) {
      o.add("--lambda0", a.lambda0, "Edge polynomial support WxH");
      o.add("--filter", a.filter, "Filter support WxH");
      o.add("--seed", a.seed, "Edge polynomial seed");
      o.add("--raster", a.raster, "Zero-set raster size");
      o.add("--restarts", a.restarts, "Random restarts of the point search");
      o.add("--search-seed", a.search_seed, "Seed of the point search");
      o.add("--out", a.out, "Output directory");
    },
    run_rho);
}

} // namespace giraf::cli
