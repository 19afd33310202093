// Experiment drivers and table serialization; see experiments.hpp.
#include "irg/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <string>

#include "irg/brw.hpp"
#include "irg/common.hpp"
#include "irg/estimation.hpp"
#include "irg/exploration.hpp"
#include "irg/graph.hpp"
#include "irg/model.hpp"
#include "irg/rng.hpp"

namespace irg {

namespace {

using nlohmann::json;

void require_cfg(bool cond, const std::string& msg) {
  if (!cond) throw UsageError("config: " + msg);
}

std::string csv_quote(const std::string& cell) {
  if (cell.find_first_of(",\"\r\n") == std::string::npos) return cell;
  std::string quoted = "\"";
  for (const char c : cell) {
    if (c == '"') quoted += "\"\"";
    else quoted += c;
  }
  quoted += '"';
  return quoted;
}

// --- strict config access -------------------------------------------------

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    require_cfg(known, "unknown key \"" + item.key() + "\" in " + where);
  }
}

const json& section(const json& doc, const char* key) {
  require_cfg(doc.contains(key),
              std::string("missing required section \"") + key + "\"");
  const json& s = doc.at(key);
  require_cfg(s.is_object(), std::string("\"") + key + "\" must be an object");
  return s;
}

double number_field(const json& obj, const std::string& where,
                    const char* key) {
  require_cfg(obj.contains(key), where + "." + key + " is required");
  const json& v = obj.at(key);
  require_cfg(v.is_number(), where + "." + key + " must be a number");
  return v.get<double>();
}

double param_number(const json& params, const char* key, double fallback) {
  if (!params.contains(key)) return fallback;
  const json& v = params.at(key);
  require_cfg(v.is_number(),
              std::string("experiment.") + key + " must be a number");
  return v.get<double>();
}

std::int64_t param_int(const json& params, const char* key,
                       std::int64_t fallback) {
  if (!params.contains(key)) return fallback;
  const json& v = params.at(key);
  require_cfg(v.is_number_integer() || v.is_number_unsigned(),
              std::string("experiment.") + key + " must be an integer");
  return v.get<std::int64_t>();
}

std::vector<std::int64_t> param_int_array(const json& params, const char* key,
                                          std::vector<std::int64_t> fallback) {
  if (!params.contains(key)) return fallback;
  const json& v = params.at(key);
  require_cfg(v.is_array() && !v.empty(),
              std::string("experiment.") + key + " must be a nonempty array");
  std::vector<std::int64_t> out;
  for (const json& e : v) {
    require_cfg(e.is_number_integer() || e.is_number_unsigned(),
                std::string("experiment.") + key + " entries must be integers");
    out.push_back(e.get<std::int64_t>());
  }
  return out;
}

std::vector<double> param_number_array(const json& params, const char* key,
                                       std::vector<double> fallback) {
  if (!params.contains(key)) return fallback;
  const json& v = params.at(key);
  require_cfg(v.is_array() && !v.empty(),
              std::string("experiment.") + key + " must be a nonempty array");
  std::vector<double> out;
  for (const json& e : v) {
    require_cfg(e.is_number(),
                std::string("experiment.") + key + " entries must be numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

// --- shared plumbing --------------------------------------------------------

void push_common_params(Table& t, const ExperimentConfig& cfg) {
  t.params.emplace_back("experiment", cfg.name);
  t.params.emplace_back("gamma", cell(cfg.gamma));
  t.params.emplace_back("beta", cell(cfg.beta));
  t.params.emplace_back("master_seed", cell(cfg.master_seed));
  t.params.emplace_back("version", kVersion);
}

void finish_params(Table& t) {
  t.params.emplace_back("failed_replicas", cell(t.failed_replicas));
}

struct SampleBatch {
  std::vector<double> values;  // successful replicas only
  std::int64_t failed = 0;
};

template <typename Task>
SampleBatch collect_values(const ExperimentConfig& cfg,
                           const std::string& task_id, std::int64_t replicas,
                           int workers, Task&& task) {
  ReplicaPlan plan{cfg.master_seed, replicas, task_id};
  const auto results = run_replicas(plan, std::forward<Task>(task), workers);
  SampleBatch batch;
  batch.values.reserve(results.size());
  for (const auto& r : results) {
    if (r.ok) batch.values.push_back(r.record);
    else ++batch.failed;
  }
  return batch;
}

// --- experiments ------------------------------------------------------------

// Slope of log(statistic) against log(n): statistic is the largest component
// (target exponent rho_minus) or the maximum degree (target gamma).
Table exp_growth_exponent(const ExperimentConfig& cfg, int workers,
                          bool use_max_degree) {
  const ModelParams params = validate_params(cfg.gamma, cfg.beta);
  const std::vector<std::int64_t> n_grid = param_int_array(
      cfg.params, "n_grid", {1024, 2048, 4096, 8192, 16384, 32768, 65536});
  const std::int64_t replicas = param_int(cfg.params, "replicas", 50);
  require_cfg(replicas >= 0, "experiment.replicas must be nonnegative");
  for (const std::int64_t n : n_grid) {
    require_cfg(n >= 2, "experiment.n_grid entries must be at least 2");
  }

  Table t;
  t.experiment = cfg.name;
  t.columns = {"n",           "replicas",        "failed",
               "mean_log_value", "stderr_log_value", "geo_mean_value",
               "slope",       "slope_stderr"};

  struct RowData {
    std::int64_t n = 0;
    std::int64_t ok = 0;
    std::int64_t failed = 0;
    SummaryStats stats;
  };
  std::vector<RowData> data;
  std::vector<std::pair<std::int64_t, double>> fit_points;
  if (replicas > 0) {
    for (const std::int64_t n : n_grid) {
      const SampleBatch batch = collect_values(
          cfg, cfg.name + ".n=" + std::to_string(n), replicas, workers,
          [&params, n, use_max_degree](std::int64_t, std::uint64_t seed) {
            const GraphSample g = sample_graph_fast(params, n, seed);
            const std::int64_t stat = use_max_degree
                                          ? degree_stats(g).max_degree
                                          : connected_components(g).largest;
            if (stat < 1) {
              throw NumericError("degenerate sample: statistic is zero");
            }
            return std::log(static_cast<double>(stat));
          });
      RowData row;
      row.n = n;
      row.ok = static_cast<std::int64_t>(batch.values.size());
      row.failed = batch.failed;
      t.failed_replicas += batch.failed;
      if (row.ok > 0) {
        row.stats = summarize(batch.values);
        fit_points.emplace_back(n, std::exp(row.stats.mean));
      }
      data.push_back(row);
    }
  }

  std::string slope_cell;
  std::string slope_se_cell;
  if (fit_points.size() >= 3) {
    const ExponentFit fit = fit_exponent(fit_points);
    slope_cell = cell(fit.slope);
    slope_se_cell = cell(fit.stderr_est);
  }
  for (const RowData& row : data) {
    t.rows.push_back({cell(row.n), cell(replicas), cell(row.failed),
                      row.ok > 0 ? cell(row.stats.mean) : "",
                      row.ok > 0 ? cell(row.stats.stderr_est) : "",
                      row.ok > 0 ? cell(std::exp(row.stats.mean)) : "",
                      slope_cell, slope_se_cell});
  }

  push_common_params(t, cfg);
  t.params.emplace_back("statistic",
                        use_max_degree ? "max_degree" : "largest_component");
  if (classify(params) == Regime::subcritical) {
    t.params.emplace_back("rho_minus", cell(rho_pm(params).rho_minus));
  }
  t.params.emplace_back("replicas_per_n", cell(replicas));
  finish_params(t);
  return t;
}

// Hill-estimates of a positive sample with a k-sensitivity sweep.
void hill_sweep_rows(Table& t, const std::vector<double>& positive,
                     std::int64_t requested_k, std::int64_t replicas,
                     std::int64_t failed,
                     const std::vector<std::string>& prefix) {
  const auto count = static_cast<std::int64_t>(positive.size());
  if (count < 3) return;  // nothing estimable; header (or prior rows) stand
  const std::int64_t k0 =
      requested_k > 0 ? requested_k : default_hill_k(count);
  std::set<std::int64_t> grid;
  for (const std::int64_t k : {k0 / 2, k0, 2 * k0}) {
    grid.insert(std::clamp<std::int64_t>(k, 2, count - 1));
  }
  for (const std::int64_t k : grid) {
    std::vector<std::string> row = prefix;
    row.push_back(cell(k));
    row.push_back(cell(hill_estimator(positive, k)));
    row.push_back(k == std::clamp<std::int64_t>(k0, 2, count - 1) ? "1" : "0");
    row.push_back(cell(count));
    row.push_back(cell(replicas));
    row.push_back(cell(failed));
    t.rows.push_back(std::move(row));
  }
}

// Pooled degree samples; Hill estimate of the degree survival exponent
// (target 1/gamma).
Table exp_degree_tail(const ExperimentConfig& cfg, int workers) {
  const ModelParams params = validate_params(cfg.gamma, cfg.beta);
  const std::int64_t n = param_int(cfg.params, "n", std::int64_t{1} << 17);
  const std::int64_t replicas = param_int(cfg.params, "replicas", 20);
  const std::int64_t hill_k = param_int(cfg.params, "hill_k", 0);
  require_cfg(n >= 2, "experiment.n must be at least 2");
  require_cfg(replicas >= 0, "experiment.replicas must be nonnegative");

  Table t;
  t.experiment = cfg.name;
  t.columns = {"k",        "hill_estimate", "is_default_k",
               "pooled_positive", "replicas", "failed"};

  std::vector<double> positive;
  std::int64_t failed = 0;
  if (replicas > 0) {
    ReplicaPlan plan{cfg.master_seed, replicas, "degree-tail"};
    const auto results = run_replicas(
        plan,
        [&params, n](std::int64_t, std::uint64_t seed) {
          const DegreeStats stats =
              degree_stats(sample_graph_fast(params, n, seed));
          std::vector<double> degrees;
          degrees.reserve(stats.degrees.size());
          for (std::size_t v = 1; v < stats.degrees.size(); ++v) {
            if (stats.degrees[v] > 0) {
              degrees.push_back(static_cast<double>(stats.degrees[v]));
            }
          }
          return degrees;
        },
        workers);
    for (const auto& r : results) {
      if (r.ok) positive.insert(positive.end(), r.record.begin(), r.record.end());
      else ++failed;
    }
    t.failed_replicas = failed;
    hill_sweep_rows(t, positive, hill_k, replicas, failed, {});
  }

  push_common_params(t, cfg);
  t.params.emplace_back("n", cell(n));
  t.params.emplace_back("survival_exponent_target", cell(1.0 / cfg.gamma));
  finish_params(t);
  return t;
}

// Scaled in-window counts u^{rho_minus} * count of T_{0,1}(log u) particles
// in (log b, 0], one row per u.
Table exp_killed_brw_scaling(const ExperimentConfig& cfg, int workers) {
  const ModelParams params = validate_params(cfg.gamma, cfg.beta);
  const double rho = rho_pm(params).rho_minus;
  const Intensity intensity = intensity_from(params);
  const std::vector<double> u_grid = param_number_array(
      cfg.params, "u_grid",
      {0.0625, 0.03125, 0.015625, 0.0078125, 0.00390625, 0.001953125});
  const double b = param_number(cfg.params, "b", 0.5);
  const std::int64_t replicas = param_int(cfg.params, "replicas", 10000);
  require_cfg(b > 0.0 && b < 1.0, "experiment.b must lie in (0, 1)");
  require_cfg(replicas >= 0, "experiment.replicas must be nonnegative");
  for (const double u : u_grid) {
    require_cfg(u > 0.0 && u <= 1.0, "experiment.u_grid entries must lie in (0, 1]");
  }

  Table t;
  t.experiment = cfg.name;
  t.columns = {"u",       "replicas",    "failed",        "median_scaled",
               "mean_scaled", "stderr_scaled", "zero_fraction"};
  if (replicas > 0) {
    for (const double u : u_grid) {
      const double scale = std::pow(u, rho);
      const double start = std::log(u);
      const double log_b = std::log(b);
      const SampleBatch batch = collect_values(
          cfg, cfg.name + ".u=" + format_double(u), replicas, workers,
          [&intensity, scale, start, log_b](std::int64_t, std::uint64_t seed) {
            Rng rng(seed);
            const KilledTree tree =
                sample_killed_tree(intensity, start,
                                   -std::numeric_limits<double>::infinity(),
                                   0.0, TreeCaps{}, rng);
            if (tree.truncated) {
              throw NumericError("tree exceeded its growth caps");
            }
            return scale * static_cast<double>(count_I(tree, log_b));
          });
      t.failed_replicas += batch.failed;
      std::vector<std::string> row{cell(u), cell(replicas), cell(batch.failed)};
      if (!batch.values.empty()) {
        const SummaryStats stats = summarize(batch.values);
        std::int64_t zeros = 0;
        for (const double v : batch.values) zeros += (v == 0.0) ? 1 : 0;
        row.push_back(cell(stats.median));
        row.push_back(cell(stats.mean));
        row.push_back(cell(stats.stderr_est));
        row.push_back(cell(static_cast<double>(zeros) /
                           static_cast<double>(batch.values.size())));
      } else {
        row.insert(row.end(), {"", "", "", ""});
      }
      t.rows.push_back(std::move(row));
    }
  }

  push_common_params(t, cfg);
  t.params.emplace_back("b", cell(b));
  t.params.emplace_back("rho_minus", cell(rho));
  finish_params(t);
  return t;
}

// Hill estimate of the survival exponent of u^{rho_minus} * I at fixed u
// (target rho_plus / rho_minus).
Table exp_y_tail(const ExperimentConfig& cfg, int workers) {
  const ModelParams params = validate_params(cfg.gamma, cfg.beta);
  const RhoPair roots = rho_pm(params);
  const Intensity intensity = intensity_from(params);
  const double u = param_number(cfg.params, "u", 0.001953125);
  const double b = param_number(cfg.params, "b", 0.5);
  const std::int64_t replicas = param_int(cfg.params, "replicas", 100000);
  const std::int64_t hill_k = param_int(cfg.params, "hill_k", 0);
  require_cfg(u > 0.0 && u <= 1.0, "experiment.u must lie in (0, 1]");
  require_cfg(b > 0.0 && b < 1.0, "experiment.b must lie in (0, 1)");
  require_cfg(replicas >= 0, "experiment.replicas must be nonnegative");

  Table t;
  t.experiment = cfg.name;
  t.columns = {"u",        "k",        "hill_estimate", "is_default_k",
               "positive_count", "replicas", "failed"};
  if (replicas > 0) {
    const double scale = std::pow(u, roots.rho_minus);
    const double start = std::log(u);
    const double log_b = std::log(b);
    const SampleBatch batch = collect_values(
        cfg, "y-tail.samples", replicas, workers,
        [&intensity, scale, start, log_b](std::int64_t, std::uint64_t seed) {
          Rng rng(seed);
          const KilledTree tree = sample_killed_tree(
              intensity, start, -std::numeric_limits<double>::infinity(), 0.0,
              TreeCaps{}, rng);
          if (tree.truncated) {
            throw NumericError("tree exceeded its growth caps");
          }
          return scale * static_cast<double>(count_I(tree, log_b));
        });
    t.failed_replicas = batch.failed;
    std::vector<double> positive;
    for (const double v : batch.values) {
      if (v > 0.0) positive.push_back(v);
    }
    hill_sweep_rows(t, positive, hill_k, replicas, batch.failed, {cell(u)});
  }

  push_common_params(t, cfg);
  t.params.emplace_back("u", cell(u));
  t.params.emplace_back("b", cell(b));
  t.params.emplace_back("rho_minus", cell(roots.rho_minus));
  t.params.emplace_back("tail_exponent_target",
                        cell(roots.rho_plus / roots.rho_minus));
  finish_params(t);
  return t;
}

// Monte Carlo check of the Malthusian identity E[sum_{x in xi} e^{-rho x}] = 1
// and of the truncated first-generation martingale mean.
Table exp_malthusian(const ExperimentConfig& cfg, int workers) {
  const ModelParams params = validate_params(cfg.gamma, cfg.beta);
  const double rho = rho_pm(params).rho_minus;
  const Intensity intensity = intensity_from(params);
  const std::int64_t replicas = param_int(cfg.params, "replicas", 100000);
  const std::int64_t w1_replicas = param_int(cfg.params, "w1_replicas", 10000);
  const double bias = param_number(cfg.params, "bias", 3e-3);
  require_cfg(replicas >= 0 && w1_replicas >= 0,
              "experiment.replicas must be nonnegative");
  require_cfg(bias > 0.0, "experiment.bias must be positive");
  const double cutoff = right_cutoff_for_bias(intensity, rho, bias);

  Table t;
  t.experiment = cfg.name;
  t.columns = {"quantity", "replicas", "failed", "mean",
               "stderr",   "target",   "z"};
  auto add_row = [&t](const char* quantity, std::int64_t reps,
                      const SampleBatch& batch, double target) {
    t.failed_replicas += batch.failed;
    std::vector<std::string> row{quantity, cell(reps), cell(batch.failed)};
    if (batch.values.size() >= 2) {
      const SummaryStats stats = summarize(batch.values);
      row.push_back(cell(stats.mean));
      row.push_back(cell(stats.stderr_est));
      row.push_back(cell(target));
      row.push_back(cell((stats.mean - target) / stats.stderr_est));
    } else {
      row.insert(row.end(), {"", "", cell(target), ""});
    }
    t.rows.push_back(std::move(row));
  };

  if (replicas > 0) {
    const SampleBatch frozen = collect_values(
        cfg, "malthusian.frozen", replicas, workers,
        [&intensity, rho, cutoff](std::int64_t, std::uint64_t seed) {
          Rng rng(seed);
          FrozenCaps caps;
          caps.right_cutoff = cutoff;
          const FrozenDecomposition decomp =
              frozen_decompose(intensity, caps, rng);
          if (decomp.truncated) {
            throw NumericError("decomposition exceeded its caps");
          }
          double sum = 0.0;
          for (const double x : decomp.xi) sum += std::exp(-rho * x);
          return sum;
        });
    add_row("malthusian_sum", replicas, frozen, 1.0);
  }
  if (w1_replicas > 0) {
    const double w1_target = martingale_mean_truncated(intensity, rho, cutoff);
    const SampleBatch w1 = collect_values(
        cfg, "malthusian.martingale", w1_replicas, workers,
        [&intensity, rho, cutoff](std::int64_t, std::uint64_t seed) {
          Rng rng(seed);
          const KilledTree tree =
              sample_brw_truncated(intensity, 0.0, 1, cutoff, TreeCaps{}, rng);
          if (tree.truncated) {
            throw NumericError("walk exceeded its growth caps");
          }
          return martingale_W(tree, 1, rho);
        });
    add_row("martingale_w1", w1_replicas, w1, w1_target);
  }

  push_common_params(t, cfg);
  t.params.emplace_back("rho_minus", cell(rho));
  t.params.emplace_back("bias", cell(bias));
  t.params.emplace_back("right_cutoff", cell(cutoff));
  finish_params(t);
  return t;
}

// Survival frequency of the embedded offspring process against the
// extinction-solver reference.
Table exp_gw_embedding(const ExperimentConfig& cfg, int workers) {
  const ModelParams params = validate_params(cfg.gamma, cfg.beta);
  ExplorationConfig ec;
  ec.gamma = cfg.gamma;
  ec.tilde_beta = param_number(cfg.params, "tilde_beta", 0.12);
  ec.u = param_number(cfg.params, "u", 0.0009765625);
  ec.b = param_number(cfg.params, "b", 3.0 / 64.0);
  ec.epsilon = param_number(cfg.params, "epsilon", 0.35);
  ec.a = param_number(cfg.params, "a", 12.0);
  ec.rho = param_number(cfg.params, "rho", 0.37);
  const std::int64_t n = param_int(cfg.params, "n", std::int64_t{1} << 45);
  ec.m = n;
  EmbedConfig embed;
  embed.explore = ec;
  embed.u0 = param_number(cfg.params, "u0", 3.0 / 64.0);
  embed.rounds = param_int(cfg.params, "rounds", 4);
  embed.d_init = param_int(cfg.params, "d_init", 1);
  const std::int64_t o_n = param_int(cfg.params, "o_n", 32);
  const std::int64_t replicas = param_int(cfg.params, "replicas", 1000);
  const std::int64_t witness_bins = param_int(cfg.params, "witness_bins", 32);
  const std::int64_t witness_replicas =
      param_int(cfg.params, "witness_replicas", 20000);
  require_cfg(replicas >= 0, "experiment.replicas must be nonnegative");

  Rng witness_rng(derive_seed(cfg.master_seed, cfg.name + ".witness", 0));
  embed.witness =
      estimate_witness_table(ec, witness_bins, witness_replicas, witness_rng);

  Table t;
  t.experiment = cfg.name;
  t.columns = {"replicas",       "failed", "survival_freq",
               "survival_stderr", "survival_target", "z",
               "offspring_count", "mean_offspring",  "witness_min"};
  const std::int64_t k_off = success_threshold(ec);
  const double target = 1.0 - gw_extinction_prob(ec.epsilon, k_off);
  if (replicas > 0) {
    const SampleBatch batch = collect_values(
        cfg, cfg.name + ".runs", replicas, workers,
        [&params, &embed, n, o_n](std::int64_t, std::uint64_t seed) {
          Rng rng(seed);
          const EmbedResult res = embed_gw(params, embed, n, o_n, rng);
          return res.survived ? 1.0 : 0.0;
        });
    t.failed_replicas = batch.failed;
    std::vector<std::string> row;
    if (!batch.values.empty()) {
      const auto ok = static_cast<double>(batch.values.size());
      double freq = 0.0;
      for (const double v : batch.values) freq += v;
      freq /= ok;
      const double se = std::sqrt(freq * (1.0 - freq) / ok);
      row = {cell(replicas),
             cell(batch.failed),
             cell(freq),
             cell(se),
             cell(target),
             se > 0.0 ? cell((freq - target) / se) : "",
             cell(k_off),
             cell(ec.epsilon * static_cast<double>(k_off)),
             cell(embed.witness.min_prob())};
    } else {
      row = {cell(replicas), cell(batch.failed), "", "", cell(target), "",
             cell(k_off),    cell(ec.epsilon * static_cast<double>(k_off)),
             cell(embed.witness.min_prob())};
    }
    t.rows.push_back(std::move(row));
  }

  push_common_params(t, cfg);
  t.params.emplace_back("tilde_beta", cell(ec.tilde_beta));
  t.params.emplace_back("u", cell(ec.u));
  t.params.emplace_back("b", cell(ec.b));
  t.params.emplace_back("epsilon", cell(ec.epsilon));
  t.params.emplace_back("a", cell(ec.a));
  t.params.emplace_back("rho", cell(ec.rho));
  t.params.emplace_back("rounds", cell(embed.rounds));
  t.params.emplace_back("n", cell(n));
  t.params.emplace_back("o_n", cell(o_n));
  t.params.emplace_back("d_init", cell(embed.d_init));
  t.params.emplace_back("u0", cell(embed.u0));
  t.params.emplace_back("witness_bins", cell(witness_bins));
  t.params.emplace_back("witness_replicas", cell(witness_replicas));
  finish_params(t);
  return t;
}

// Escape and progeny-tail frequencies of the dominating walk against the
// n^{-rho_plus + epsilon} bound (exponents from tilde_beta's own roots).
Table exp_dominating_tail(const ExperimentConfig& cfg, int workers) {
  const ModelParams params = validate_params(cfg.gamma, cfg.beta);
  const double tilde_beta = param_number(cfg.params, "tilde_beta", 0.11);
  const std::int64_t n = param_int(cfg.params, "n", std::int64_t{1} << 16);
  const double epsilon = param_number(cfg.params, "epsilon", 0.1);
  const std::int64_t replicas = param_int(cfg.params, "replicas", 100000);
  require_cfg(replicas >= 0, "experiment.replicas must be nonnegative");
  const ModelParams tilde_params = validate_params(cfg.gamma, tilde_beta);
  const RhoPair roots = rho_pm(tilde_params);
  const double threshold =
      std::pow(static_cast<double>(n), roots.rho_minus + epsilon);
  const double bound =
      std::pow(static_cast<double>(n), -roots.rho_plus + epsilon);

  Table t;
  t.experiment = cfg.name;
  t.columns = {"quantity", "replicas", "failed",        "freq",
               "stderr",   "bound",    "bound_plus_3se", "within_bound"};
  if (replicas > 0) {
    // One replica yields both indicators; run once and split.
    ReplicaPlan plan{cfg.master_seed, replicas, "dominating-tail"};
    struct Indicators {
      double escape = 0.0;
      double big = 0.0;
    };
    const auto results = run_replicas(
        plan,
        [&params, tilde_beta, n, epsilon, threshold](std::int64_t,
                                                     std::uint64_t seed) {
          Rng rng(seed);
          const DominatingTreeResult res =
              dominating_tree_sim(params, tilde_beta, n, epsilon, rng);
          if (res.truncated) {
            throw NumericError("tree exceeded its growth caps");
          }
          Indicators ind;
          ind.escape = res.escape ? 1.0 : 0.0;
          ind.big = static_cast<double>(res.progeny) >= threshold ? 1.0 : 0.0;
          return ind;
        },
        workers);
    std::int64_t ok = 0;
    double escape_sum = 0.0;
    double big_sum = 0.0;
    for (const auto& r : results) {
      if (!r.ok) {
        ++t.failed_replicas;
        continue;
      }
      ++ok;
      escape_sum += r.record.escape;
      big_sum += r.record.big;
    }
    auto add_row = [&](const char* quantity, double sum) {
      std::vector<std::string> row{quantity, cell(replicas),
                                   cell(t.failed_replicas)};
      if (ok > 0) {
        const double freq = sum / static_cast<double>(ok);
        const double se =
            std::sqrt(freq * (1.0 - freq) / static_cast<double>(ok));
        row.push_back(cell(freq));
        row.push_back(cell(se));
        row.push_back(cell(bound));
        row.push_back(cell(bound + 3.0 * se));
        row.push_back(freq <= bound + 3.0 * se ? "1" : "0");
      } else {
        row.insert(row.end(), {"", "", cell(bound), "", ""});
      }
      t.rows.push_back(std::move(row));
    };
    add_row("escape", escape_sum);
    add_row("progeny_tail", big_sum);
  }

  push_common_params(t, cfg);
  t.params.emplace_back("tilde_beta", cell(tilde_beta));
  t.params.emplace_back("n", cell(n));
  t.params.emplace_back("epsilon", cell(epsilon));
  t.params.emplace_back("tilde_rho_minus", cell(roots.rho_minus));
  t.params.emplace_back("tilde_rho_plus", cell(roots.rho_plus));
  t.params.emplace_back("progeny_threshold", cell(threshold));
  finish_params(t);
  return t;
}

const std::map<std::string, std::vector<const char*>>& allowed_experiment_keys() {
  static const std::map<std::string, std::vector<const char*>> kAllowed = {
      {"largest-component-exponent", {"name", "n_grid", "replicas"}},
      {"max-degree-exponent", {"name", "n_grid", "replicas"}},
      {"degree-tail", {"name", "n", "replicas", "hill_k"}},
      {"killed-brw-scaling", {"name", "u_grid", "b", "replicas"}},
      {"y-tail", {"name", "u", "b", "replicas", "hill_k"}},
      {"malthusian", {"name", "replicas", "w1_replicas", "bias"}},
      {"gw-embedding",
       {"name", "tilde_beta", "u", "b", "epsilon", "a", "rho", "rounds", "n",
        "o_n", "d_init", "u0", "replicas", "witness_bins",
        "witness_replicas"}},
      {"dominating-tail", {"name", "tilde_beta", "n", "epsilon", "replicas"}},
  };
  return kAllowed;
}

}  // namespace

std::string cell(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string cell(std::int64_t value) { return std::to_string(value); }

std::string cell(std::uint64_t value) { return std::to_string(value); }

void write_csv(std::ostream& out, const Table& table) {
  std::string header;
  for (const std::string& col : table.columns) {
    if (!header.empty()) header += ',';
    header += csv_quote(col);
  }
  for (const auto& [key, value] : table.params) {
    (void)value;
    if (!header.empty()) header += ',';
    header += csv_quote(key);
  }
  out << header << "\r\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw NumericError("write_csv: row width does not match the header");
    }
    std::string line;
    for (const std::string& c : row) {
      if (!line.empty()) line += ',';
      line += csv_quote(c);
    }
    for (const auto& [key, value] : table.params) {
      (void)key;
      if (!line.empty()) line += ',';
      line += csv_quote(value);
    }
    out << line << "\r\n";
  }
}

void write_json(std::ostream& out, const Table& table) {
  nlohmann::ordered_json doc;
  doc["experiment"] = table.experiment;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [key, value] : table.params) params[key] = value;
  doc["parameters"] = params;
  doc["columns"] = table.columns;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw NumericError("write_json: row width does not match the header");
    }
    rows.push_back(row);
  }
  doc["rows"] = rows;
  out << doc.dump(2) << "\n";
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> kNames = {
      "largest-component-exponent",
      "max-degree-exponent",
      "degree-tail",
      "killed-brw-scaling",
      "y-tail",
      "malthusian",
      "gw-embedding",
      "dominating-tail",
  };
  return kNames;
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("config: not valid JSON: ") + e.what());
  }
  require_cfg(doc.is_object(), "top level must be an object");
  check_keys(doc, "top level", {"model", "experiment", "seeds", "output"});

  ExperimentConfig cfg;
  const json& model = section(doc, "model");
  check_keys(model, "model", {"gamma", "beta"});
  cfg.gamma = number_field(model, "model", "gamma");
  cfg.beta = number_field(model, "model", "beta");

  const json& experiment = section(doc, "experiment");
  require_cfg(experiment.contains("name") && experiment.at("name").is_string(),
              "experiment.name must be a string");
  cfg.name = experiment.at("name").get<std::string>();
  const auto& allowed = allowed_experiment_keys();
  const auto it = allowed.find(cfg.name);
  if (it == allowed.end()) {
    std::string names;
    for (const std::string& name : experiment_names()) {
      if (!names.empty()) names += ", ";
      names += name;
    }
    throw UsageError("config: unknown experiment \"" + cfg.name +
                     "\" (known: " + names + ")");
  }
  for (const auto& item : experiment.items()) {
    bool known = false;
    for (const char* key : it->second) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    require_cfg(known, "unknown key \"" + item.key() + "\" in experiment \"" +
                           cfg.name + "\"");
  }
  cfg.params = experiment;
  cfg.params.erase("name");

  const json& seeds = section(doc, "seeds");
  check_keys(seeds, "seeds", {"master_seed"});
  require_cfg(seeds.contains("master_seed"), "seeds.master_seed is required");
  const json& seed = seeds.at("master_seed");
  require_cfg(seed.is_number_unsigned() ||
                  (seed.is_number_integer() && seed.get<std::int64_t>() >= 0),
              "seeds.master_seed must be a nonnegative integer");
  cfg.master_seed = seed.get<std::uint64_t>();

  if (doc.contains("output")) {
    const json& output = doc.at("output");
    require_cfg(output.is_object(), "\"output\" must be an object");
    check_keys(output, "output", {"format", "path"});
    if (output.contains("format")) {
      require_cfg(output.at("format").is_string(),
                  "output.format must be a string");
      cfg.format = output.at("format").get<std::string>();
      require_cfg(cfg.format == "csv" || cfg.format == "json",
                  "output.format must be \"csv\" or \"json\"");
    }
    if (output.contains("path")) {
      require_cfg(output.at("path").is_string(),
                  "output.path must be a string");
      cfg.path = output.at("path").get<std::string>();
    }
  }
  return cfg;
}

Table run_experiment(const ExperimentConfig& config, int workers) {
  if (workers < 1) {
    throw UsageError("run_experiment: workers must be at least 1");
  }
  if (config.name == "largest-component-exponent") {
    return exp_growth_exponent(config, workers, false);
  }
  if (config.name == "max-degree-exponent") {
    return exp_growth_exponent(config, workers, true);
  }
  if (config.name == "degree-tail") return exp_degree_tail(config, workers);
  if (config.name == "killed-brw-scaling") {
    return exp_killed_brw_scaling(config, workers);
  }
  if (config.name == "y-tail") return exp_y_tail(config, workers);
  if (config.name == "malthusian") return exp_malthusian(config, workers);
  if (config.name == "gw-embedding") return exp_gw_embedding(config, workers);
  if (config.name == "dominating-tail") {
    return exp_dominating_tail(config, workers);
  }
  throw UsageError("run_experiment: unknown experiment \"" + config.name +
                   "\"");
}

}  // namespace irg
