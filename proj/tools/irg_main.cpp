// Command-line tool: analytic constants, graph sampling, component and
// degree statistics, killed-tree sampling, the embedding pipeline trace,
// and the batch experiment runner.
//
// Exit codes: 0 success, 2 usage/config error, 3 numeric/calibration failure.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "irg/brw.hpp"
#include "irg/common.hpp"
#include "irg/estimation.hpp"
#include "irg/experiments.hpp"
#include "irg/exploration.hpp"
#include "irg/graph.hpp"
#include "irg/model.hpp"
#include "irg/projection.hpp"
#include "irg/rng.hpp"

namespace {

using namespace irg;

// Writes rendered text to a file (binary mode, so CSV line endings survive
// untouched) or to standard output when path is empty.
void emit_text(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw UsageError("cannot open output file: " + path);
  file << text;
  if (!file) throw UsageError("failed while writing output file: " + path);
}

void emit_table(const Table& table, const std::string& format,
                const std::string& path) {
  std::ostringstream buf;
  if (format == "csv") {
    write_csv(buf, table);
  } else {
    write_json(buf, table);
  }
  emit_text(buf.str(), path);
}

std::string regime_name(Regime regime) {
  return regime == Regime::subcritical ? "subcritical"
                                       : "critical-or-supercritical";
}

void cmd_constants(double gamma, double beta, const std::string& format,
                   const std::string& path) {
  const ModelParams params = validate_params(gamma, beta);
  const DerivedConstants d = derive_constants(params);
  Table t;
  t.experiment = "constants";
  t.columns = {"gamma", "beta",  "beta_c", "rho_minus",
               "rho_plus", "t_star", "tau",   "regime"};
  t.rows.push_back({cell(gamma), cell(beta), cell(d.beta_c),
                    d.rho_minus ? cell(*d.rho_minus) : "",
                    d.rho_plus ? cell(*d.rho_plus) : "",
                    d.t_star ? cell(*d.t_star) : "", cell(d.tau),
                    regime_name(d.regime)});
  t.params.emplace_back("version", kVersion);
  emit_table(t, format, path);
}

GraphSample sample_by_name(const ModelParams& params, std::int64_t n,
                           std::uint64_t seed, const std::string& sampler) {
  if (sampler == "naive") return sample_graph_naive(params, n, seed);
  return sample_graph_fast(params, n, seed);
}

void cmd_graph(double gamma, double beta, std::int64_t n, std::uint64_t seed,
               const std::string& sampler, const std::string& path) {
  const ModelParams params = validate_params(gamma, beta);
  const GraphSample g = sample_by_name(params, n, seed, sampler);
  std::ostringstream buf;
  write_edge_list(buf, g);
  emit_text(buf.str(), path);
}

void cmd_components(double gamma, double beta, std::int64_t n,
                    std::uint64_t seed, const std::string& sampler,
                    const std::string& format, const std::string& path) {
  const ModelParams params = validate_params(gamma, beta);
  const GraphSample g = sample_by_name(params, n, seed, sampler);
  const ComponentStats comps = connected_components(g);
  const DegreeStats degrees = degree_stats(g);
  Table t;
  t.experiment = "components";
  t.columns = {"n",        "gamma",      "beta",       "seed",
               "sampler",  "edges",      "components", "largest",
               "second_largest", "max_degree"};
  const std::int64_t second =
      comps.component_sizes.size() > 1 ? comps.component_sizes[1] : 0;
  t.rows.push_back({cell(n), cell(gamma), cell(beta), cell(seed), g.sampler_id,
                    cell(static_cast<std::int64_t>(g.edges.size())),
                    cell(static_cast<std::int64_t>(comps.component_sizes.size())),
                    cell(comps.largest), cell(second),
                    cell(degrees.max_degree)});
  t.params.emplace_back("version", kVersion);
  emit_table(t, format, path);
}

void cmd_brw(double gamma, double beta, double start, double a, double d,
             std::uint64_t seed, const std::string& path) {
  const Intensity intensity = make_intensity(gamma, beta);
  if (!(a >= 0.0)) throw UsageError("brw: a must be nonnegative");
  if (!(d > 0.0)) throw UsageError("brw: d must be positive");
  const double log_a =
      a == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(a);
  const double log_d = std::log(d);
  Rng rng(seed);
  const KilledTree tree =
      sample_killed_tree(intensity, start, log_a, log_d, TreeCaps{}, rng);
  std::ostringstream buf;
  buf << "# start=" << format_double(start)
      << " log_a=" << format_double(log_a)
      << " log_d=" << format_double(log_d) << " gamma=" << format_double(gamma)
      << " beta=" << format_double(beta) << " seed=" << seed
      << " particles=" << tree.particles.size()
      << " truncated=" << (tree.truncated ? 1 : 0) << "\n";
  write_tree(buf, tree);
  emit_text(buf.str(), path);
}

struct ExploreArgs {
  double gamma = 0.25;
  double beta = 0.124;
  double tilde_beta = 0.12;
  double u = 0.0009765625;  // 2^-10
  double b = 3.0 / 64.0;
  double epsilon = 0.35;
  double a = 12.0;
  double rho = 0.37;
  double u0 = 3.0 / 64.0;
  std::int64_t rounds = 4;
  std::int64_t d_init = 1;
  std::int64_t n = std::int64_t{1} << 45;
  std::int64_t o_n = 32;
  std::int64_t witness_bins = 16;
  std::int64_t witness_replicas = 3000;
  std::uint64_t seed = 1;
};

void cmd_explore(const ExploreArgs& args, const std::string& path) {
  const ModelParams params = validate_params(args.gamma, args.beta);
  ExplorationConfig ec;
  ec.gamma = args.gamma;
  ec.tilde_beta = args.tilde_beta;
  ec.u = args.u;
  ec.b = args.b;
  ec.epsilon = args.epsilon;
  ec.a = args.a;
  ec.rho = args.rho;
  ec.m = args.n;
  EmbedConfig cfg;
  cfg.explore = ec;
  cfg.u0 = args.u0;
  cfg.rounds = args.rounds;
  cfg.d_init = args.d_init;
  Rng witness_rng(derive_seed(args.seed, "explore.witness", 0));
  cfg.witness = estimate_witness_table(ec, args.witness_bins,
                                       args.witness_replicas, witness_rng);
  Rng rng(derive_seed(args.seed, "explore.run", 0));
  const EmbedResult res = embed_gw(params, cfg, args.n, args.o_n, rng);

  nlohmann::ordered_json doc;
  doc["version"] = kVersion;
  nlohmann::ordered_json p;
  p["gamma"] = args.gamma;
  p["beta"] = args.beta;
  p["tilde_beta"] = args.tilde_beta;
  p["u"] = args.u;
  p["b"] = args.b;
  p["epsilon"] = args.epsilon;
  p["a"] = args.a;
  p["rho"] = args.rho;
  p["u0"] = args.u0;
  p["rounds"] = args.rounds;
  p["d_init"] = args.d_init;
  p["n"] = args.n;
  p["o_n"] = args.o_n;
  p["witness_bins"] = args.witness_bins;
  p["witness_replicas"] = args.witness_replicas;
  p["rng_streams"] = "one deterministic stream per run seed";
  doc["parameters"] = p;
  doc["seed"] = args.seed;
  nlohmann::ordered_json witness;
  witness["pos_lo"] = cfg.witness.pos_lo;
  witness["pos_hi"] = cfg.witness.pos_hi;
  nlohmann::ordered_json probs = nlohmann::ordered_json::array();
  for (const auto& bin : cfg.witness.bins) probs.push_back(bin.prob);
  witness["bin_probs"] = probs;
  doc["witness"] = witness;
  nlohmann::ordered_json rounds = nlohmann::ordered_json::array();
  for (const EmbedRound& round : res.rounds) {
    nlohmann::ordered_json r;
    r["m"] = round.m;
    r["seed"] = args.seed;
    r["targets"] = round.targets;
    nlohmann::ordered_json flags = nlohmann::ordered_json::array();
    for (const auto f : round.success_flags) flags.push_back(f != 0);
    r["success_flags"] = flags;
    nlohmann::ordered_json reasons = nlohmann::ordered_json::array();
    for (const FailureReason reason : round.failure_reasons) {
      reasons.push_back(to_string(reason));
    }
    r["failure_reasons"] = reasons;
    r["y_sizes"] = round.y_sizes;
    r["x_sizes"] = round.x_sizes;
    r["dropped_targets"] = round.dropped_targets;
    rounds.push_back(r);
  }
  doc["rounds"] = rounds;
  doc["generation_sizes"] = res.generation_sizes;
  doc["survived"] = res.survived;
  doc["component_lower_bound"] = res.component_lower_bound;
  doc["mean_offspring"] = res.mean_offspring;
  doc["offspring_count"] = success_threshold(ec);
  emit_text(doc.dump(2) + "\n", path);
}

void cmd_experiment(const std::string& config_path, bool seed_set,
                    std::uint64_t seed, int workers,
                    const std::string& out_override,
                    const std::string& format_override) {
  std::ifstream file(config_path);
  if (!file) throw UsageError("cannot open config file: " + config_path);
  std::ostringstream text;
  text << file.rdbuf();
  ExperimentConfig cfg = parse_experiment_config(text.str());
  if (seed_set) cfg.master_seed = seed;
  if (!out_override.empty()) cfg.path = out_override;
  if (!format_override.empty()) cfg.format = format_override;

  const Table table = run_experiment(cfg, workers);
  emit_table(table, cfg.format, cfg.path);
  std::cerr << "experiment " << cfg.name << ": " << table.rows.size()
            << " rows, " << table.failed_replicas << " failed replicas";
  if (!cfg.path.empty()) std::cerr << ", wrote " << cfg.path;
  std::cerr << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inhomogeneous random graph and killed branching random walk "
               "experiments"};
  app.require_subcommand(1);

  // constants
  double gamma = 0.25;
  double beta = 0.1;
  std::string format = "csv";
  std::string out_path;
  auto* constants = app.add_subcommand(
      "constants", "Analytic constants (beta_c, rho_-, rho_+, t*, tau)");
  constants->add_option("--gamma", gamma, "kernel exponent in (0, 1)")
      ->required();
  constants->add_option("--beta", beta, "kernel coefficient > 0")->required();
  constants->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  constants->add_option("--out", out_path, "output path (default stdout)");
  constants->callback(
      [&] { cmd_constants(gamma, beta, format, out_path); });

  // graph
  double g_gamma = 0.25;
  double g_beta = 0.1;
  std::int64_t g_n = 1024;
  std::uint64_t g_seed = 1;
  std::string g_sampler = "fast";
  std::string g_out;
  auto* graph = app.add_subcommand("graph", "Sample a graph; edge-list output");
  graph->add_option("--gamma", g_gamma, "kernel exponent")->required();
  graph->add_option("--beta", g_beta, "kernel coefficient")->required();
  graph->add_option("--n", g_n, "vertex count")->required();
  graph->add_option("--seed", g_seed, "sampling seed");
  graph->add_option("--sampler", g_sampler, "fast or naive")
      ->check(CLI::IsMember({"fast", "naive"}));
  graph->add_option("--out", g_out, "output path (default stdout)");
  graph->callback(
      [&] { cmd_graph(g_gamma, g_beta, g_n, g_seed, g_sampler, g_out); });

  // components
  double c_gamma = 0.25;
  double c_beta = 0.1;
  std::int64_t c_n = 1024;
  std::uint64_t c_seed = 1;
  std::string c_sampler = "fast";
  std::string c_format = "csv";
  std::string c_out;
  auto* components = app.add_subcommand(
      "components", "Sample a graph and report component/degree statistics");
  components->add_option("--gamma", c_gamma, "kernel exponent")->required();
  components->add_option("--beta", c_beta, "kernel coefficient")->required();
  components->add_option("--n", c_n, "vertex count")->required();
  components->add_option("--seed", c_seed, "sampling seed");
  components->add_option("--sampler", c_sampler, "fast or naive")
      ->check(CLI::IsMember({"fast", "naive"}));
  components->add_option("--format", c_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  components->add_option("--out", c_out, "output path (default stdout)");
  components->callback([&] {
    cmd_components(c_gamma, c_beta, c_n, c_seed, c_sampler, c_format, c_out);
  });

  // brw
  double b_gamma = 0.25;
  double b_beta = 0.1;
  double b_start = -1.0;
  double b_a = 0.0;
  double b_d = 1.0;
  std::uint64_t b_seed = 1;
  std::string b_out;
  auto* brw = app.add_subcommand(
      "brw", "Sample a killed tree T_{a,d}(start); particle list output");
  brw->add_option("--gamma", b_gamma, "intensity exponent in (0, 1/2)")
      ->required();
  brw->add_option("--beta", b_beta, "intensity coefficient > 0")->required();
  brw->add_option("--start", b_start, "root position (log a, log d]")
      ->required();
  brw->add_option("--a", b_a, "lower barrier multiplier (0 for none)");
  brw->add_option("--d", b_d, "upper barrier multiplier > 0");
  brw->add_option("--seed", b_seed, "sampling seed");
  brw->add_option("--out", b_out, "output path (default stdout)");
  brw->callback(
      [&] { cmd_brw(b_gamma, b_beta, b_start, b_a, b_d, b_seed, b_out); });

  // explore
  ExploreArgs e;
  std::string e_out;
  auto* explore = app.add_subcommand(
      "explore", "Run the embedding pipeline and emit its JSON trace");
  explore->add_option("--gamma", e.gamma, "kernel exponent");
  explore->add_option("--beta", e.beta, "graph kernel coefficient");
  explore->add_option("--tilde-beta", e.tilde_beta,
                      "exploration walk coefficient (below beta)");
  explore->add_option("--u", e.u, "window fraction");
  explore->add_option("--b", e.b, "collection window fraction");
  explore->add_option("--epsilon", e.epsilon, "thinning probability");
  explore->add_option("--a", e.a, "overflow constant");
  explore->add_option("--rho", e.rho, "threshold exponent");
  explore->add_option("--u0", e.u0, "calibrated window-fraction bound");
  explore->add_option("--rounds", e.rounds, "embedding rounds");
  explore->add_option("--d-init", e.d_init, "seed target count");
  explore->add_option("--n", e.n, "top scale (graph size)");
  explore->add_option("--o-n", e.o_n, "seed vertex");
  explore->add_option("--witness-bins", e.witness_bins,
                      "witness table bin count");
  explore->add_option("--witness-replicas", e.witness_replicas,
                      "witness table replicas per bin");
  explore->add_option("--seed", e.seed, "run seed");
  explore->add_option("--out", e_out, "output path (default stdout)");
  explore->callback([&] { cmd_explore(e, e_out); });

  // experiment
  std::string x_config;
  std::uint64_t x_seed = 0;
  int x_workers = 1;
  std::string x_out;
  std::string x_format;
  auto* experiment = app.add_subcommand(
      "experiment", "Run a named experiment from a JSON config");
  experiment->add_option("--config", x_config, "config file path")
      ->required();
  auto* seed_opt = experiment->add_option(
      "--seed", x_seed, "master seed (overrides the config)");
  experiment->add_option("--workers", x_workers, "worker thread count")
      ->check(CLI::PositiveNumber);
  experiment->add_option("--out", x_out, "output path (overrides the config)");
  experiment
      ->add_option("--format", x_format, "csv or json (overrides the config)")
      ->check(CLI::IsMember({"csv", "json"}));
  experiment->callback([&] {
    cmd_experiment(x_config, seed_opt->count() > 0, x_seed, x_workers, x_out,
                   x_format);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const NumericError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 3;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 3;
  }
  return 0;
}
