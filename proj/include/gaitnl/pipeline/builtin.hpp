#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "gaitnl/entropy/approximate_entropy.hpp"
#include "gaitnl/entropy/multiscale.hpp"
#include "gaitnl/entropy/permutation_entropy.hpp"
#include "gaitnl/entropy/sample_entropy.hpp"
#include "gaitnl/entropy/symbolic_entropy.hpp"
#include "gaitnl/fractal/dfa.hpp"
#include "gaitnl/lyapunov/rosenstein.hpp"
#include "gaitnl/lyapunov/wolf.hpp"
#include "gaitnl/pipeline/registry.hpp"
#include "gaitnl/pipeline/resolution.hpp"
#include "gaitnl/rqa/measures.hpp"
#include "gaitnl/rqa/recurrence_plot.hpp"
#include "gaitnl/statespace/ami.hpp"
#include "gaitnl/statespace/embedding.hpp"
#include "gaitnl/statespace/fnn.hpp"

namespace gaitnl::pipeline {

namespace builtin {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline EntropyParams entropy_params(const ParamValues& p) { return {p.count("m"), p.real("r")}; }

inline EmbeddingParams embedding_params(const ParamValues& p) { return {p.count("tau"), p.count("dim")}; }

inline std::vector<double> as_doubles(std::span<const std::size_t> v) { return {v.begin(), v.end()}; }

inline std::vector<double> with_nan(std::span<const std::optional<double>> v) {
  std::vector<double> out;
  for (const auto& e : v) out.push_back(e.value_or(kNaN));
  return out;
}

inline std::optional<double> sample_rate(const TaskContext& ctx) {
  if (auto fs = ctx.params.optional_real("sample_rate_hz")) return fs;
  return ctx.series.sample_rate_hz();
}

inline AlgorithmOutput run_dfa(const TaskContext& ctx) {
  DfaOptions opts;
  opts.detrend_order = ctx.params.count("order");
  const auto& boxes = ctx.params.text("boxes");
  if (boxes != kAuto) {
    std::size_t start = 0;
    while (start <= boxes.size()) {
      const auto end = std::min(boxes.find(',', start), boxes.size());
      ParamValues one;
      one.set("box", boxes.substr(start, end - start));
      opts.box_sizes.push_back(one.count("box"));
      start = end + 1;
    }
  }
  const auto r = dfa(ctx.series.samples(), opts);
  AlgorithmOutput out;
  out.outputs.put("alpha", r.alpha);
  out.outputs.put("intercept", r.intercept);
  out.outputs.put("fit_r2", r.fit_r2);
  out.outputs.put_list<std::size_t>("box_sizes", r.box_sizes);
  out.outputs.put_list<double>("fluctuations", r.fluctuations);
  Chart c;
  c.x_label = "box_size";
  c.x = as_doubles(r.box_sizes);
  c.series.push_back({"fluctuation", r.fluctuations});
  c.log_x = c.log_y = true;
  c.fit = std::make_pair(r.alpha, r.intercept);
  out.chart = std::move(c);
  return out;
}

inline AlgorithmOutput run_ami(const TaskContext& ctx) {
  const auto x = ctx.series.samples();
  const std::size_t max_lag = ctx.params.optional_count("max_lag").value_or(auto_ami_max_lag(x.size()));
  const auto curve = ami(x, max_lag, ctx.params.count("bins"));
  AlgorithmOutput out;
  out.outputs.put("selected_lag", curve.selected_lag);
  out.outputs.put("minimum_found", curve.minimum_found);
  out.outputs.put_list<double>("ami_nats", curve.values);
  Chart c;
  c.x_label = "lag";
  c.x = as_doubles(curve.lags);
  c.series.push_back({"ami_nats", curve.values});
  out.chart = std::move(c);
  return out;
}

inline AlgorithmOutput run_fnn(const TaskContext& ctx) {
  FnnOptions opts;
  opts.max_dim = ctx.params.count("max_dim");
  opts.r_tol = ctx.params.real("r_tol");
  opts.a_tol = ctx.params.real("a_tol");
  opts.drop_threshold = ctx.params.real("threshold");
  const auto curve = fnn(ctx.series.samples(), ctx.params.count("tau"), opts);
  AlgorithmOutput out;
  out.outputs.put("selected_dim", curve.selected_dim);
  out.outputs.put("converged", curve.converged);
  out.outputs.put_list<double>("fnn_fractions", curve.fractions);
  Chart c;
  c.x_label = "dim";
  c.x = as_doubles(curve.dims);
  c.series.push_back({"fnn_fraction", curve.fractions});
  out.chart = std::move(c);
  return out;
}

inline AlgorithmOutput run_sampen(const TaskContext& ctx) {
  AlgorithmOutput out;
  out.outputs.put("sample_entropy", sample_entropy(ctx.series.samples(), entropy_params(ctx.params)));
  return out;
}

inline AlgorithmOutput run_apen(const TaskContext& ctx) {
  AlgorithmOutput out;
  out.outputs.put("approximate_entropy", approximate_entropy(ctx.series.samples(), entropy_params(ctx.params)));
  return out;
}

inline AlgorithmOutput run_xapen(const TaskContext& ctx) {
  const auto partner = select_column(ctx.dataset, ctx.params.text("partner"), ctx.select);
  AlgorithmOutput out;
  out.outputs.put("cross_approximate_entropy",
                  cross_approximate_entropy(ctx.series.samples(), partner.samples(), entropy_params(ctx.params)));
  return out;
}

inline AlgorithmOutput run_permutation(const TaskContext& ctx) {
  const auto r = permutation_entropy(ctx.series.samples(), ctx.params.count("order"), ctx.params.count("delay"));
  AlgorithmOutput out;
  out.outputs.put("permutation_entropy_nats", r.raw_nats);
  out.outputs.put("permutation_entropy_normalized", r.normalized);
  return out;
}

inline AlgorithmOutput run_symbolic(const TaskContext& ctx) {
  SymbolicOptions opts;
  opts.threshold = ctx.params.optional_real("threshold");
  opts.word_length = ctx.params.count("word_length");
  const auto r = symbolic_entropy(ctx.series.samples(), opts);
  AlgorithmOutput out;
  out.outputs.put("symbolic_entropy_normalized", r.normalized);
  out.outputs.put("shannon_nats", r.shannon_nats);
  out.outputs.put("corrected_nats", r.corrected_nats);
  out.outputs.put("observed_words", r.observed_words);
  return out;
}

inline AlgorithmOutput run_multiscale(const TaskContext& ctx) {
  const auto x = ctx.series.samples();
  const std::size_t max_scale =
      ctx.params.optional_count("max_scale").value_or(std::max<std::size_t>(1, std::min<std::size_t>(10, x.size() / 10)));
  const auto curves = multiscale_entropy_plus(x, entropy_params(ctx.params), max_scale);
  AlgorithmOutput out;
  Chart c;
  c.x_label = "scale";
  for (std::size_t s = 1; s <= max_scale; ++s) c.x.push_back(static_cast<double>(s));
  for (const auto& curve : curves) {
    std::string key(variant_name(curve.variant));
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    out.outputs.put_list(key, std::span<const std::optional<double>>(curve.values));
    c.series.push_back({key, with_nan(curve.values)});
  }
  out.chart = std::move(c);
  return out;
}

inline AlgorithmOutput run_rqa(const TaskContext& ctx) {
  const auto emb = embedding_params(ctx.params);
  require(ctx.series.size() >= (emb.dim - 1) * emb.tau + 1, ErrorCode::SeriesTooShort,
          "series shorter than one embedding window");
  const std::size_t n = embedding_rows(ctx.series.size(), emb);
  const auto estimate = rqa_estimated_bytes(n);
  if (estimate > ctx.memory_budget_bytes) throw MemoryBudgetError(estimate, ctx.memory_budget_bytes);

  const auto points = embed(ctx.series.samples(), emb);
  const Norm norm = parse_norm(ctx.params.text("norm"));
  const std::size_t theiler = ctx.params.count("theiler");
  double radius = 0.0;
  if (auto fixed = ctx.params.optional_real("radius")) {
    radius = *fixed;
  } else {
    radius = radius_from_recurrence(points, ctx.params.real("target_rec"), ctx.params.real("tolerance"), norm, theiler)
                 .radius;
  }
  RecurrenceOptions ro;
  ro.norm = norm;
  ro.theiler_window = theiler;
  ro.memory_budget_bytes = ctx.memory_budget_bytes;
  auto rp = std::make_shared<RecurrencePlot>(recurrence_plot(points, radius, ro));
  const auto m = rqa_measures(*rp, ctx.params.count("l_min"), ctx.params.count("v_min"));

  AlgorithmOutput out;
  out.outputs.put("radius", radius);
  out.outputs.put("n_points", n);
  out.outputs.put("recurrence_rate_pct", m.recurrence_rate_pct);
  out.outputs.put("determinism_pct", m.determinism_pct);
  out.outputs.put("max_diagonal_line", m.max_diagonal_line);
  out.outputs.put("mean_diagonal_line", m.mean_diagonal_line);
  out.outputs.put("diagonal_entropy_nats", m.diagonal_line_entropy_nats);
  out.outputs.put("laminarity_pct", m.laminarity_pct);
  out.outputs.put("trapping_time", m.trapping_time);
  out.outputs.put("max_vertical_line", m.max_vertical_line);
  out.outputs.put("weighted_recurrence_entropy", m.weighted_recurrence_entropy);
  out.outputs.put("recurrent_cells", static_cast<std::size_t>(m.recurrent_cells));
  out.outputs.put("storage_bytes", static_cast<std::size_t>(rp->storage_bytes()));
  out.recurrence_plot = std::move(rp);
  return out;
}

inline AlgorithmOutput run_rosenstein(const TaskContext& ctx) {
  RosensteinOptions opts;
  opts.embedding = embedding_params(ctx.params);
  opts.mean_period = ctx.params.optional_real("mean_period");
  opts.sample_rate_hz = sample_rate(ctx);
  const auto x = ctx.series.samples();
  if (auto steps = ctx.params.optional_count("max_steps")) {
    opts.max_steps = *steps;
  } else {
    // Cover the orbital window (10 mean periods), keeping 100 reference points.
    const double period = opts.mean_period.value_or(mean_period(x));
    opts.mean_period = period;
    const std::size_t rows = x.size() >= (opts.embedding.dim - 1) * opts.embedding.tau + 1
                                 ? embedding_rows(x.size(), opts.embedding)
                                 : 0;
    require(rows > 101, ErrorCode::SeriesTooShort, "too few embedded points for a divergence curve");
    const auto want = static_cast<std::size_t>(std::ceil(10.0 * std::max(1.0, period)));
    opts.max_steps = std::clamp<std::size_t>(want, 1, std::min<std::size_t>(rows - 100, 1000));
  }
  const auto r = lye_rosenstein(x, opts);
  AlgorithmOutput out;
  out.outputs.put("short_exp", r.short_exp);
  out.outputs.put("local_exp", r.local_exp);
  out.outputs.put("long_exp", r.long_exp);
  out.outputs.put("orbital_exp", r.orbital_exp);
  out.outputs.put("mean_period", r.mean_period);
  out.outputs.put("max_steps", opts.max_steps);
  std::vector<std::size_t> windows;
  for (const auto& w : r.fit_windows) {
    windows.push_back(w.first);
    windows.push_back(w.last);
  }
  out.outputs.put_list<std::size_t>("fit_windows", windows);
  out.outputs.put("units", opts.sample_rate_hz ? "per_second" : "per_sample");
  Chart c;
  c.x_label = "step";
  for (std::size_t k = 0; k < r.divergence.size(); ++k) c.x.push_back(static_cast<double>(k));
  c.series.push_back({"mean_log_divergence", r.divergence});
  out.chart = std::move(c);
  return out;
}

inline AlgorithmOutput run_wolf(const TaskContext& ctx) {
  WolfOptions opts;
  opts.embedding = embedding_params(ctx.params);
  opts.evolve_steps = ctx.params.count("evolve_steps");
  opts.scale_min = ctx.params.optional_real("scale_min");
  opts.scale_max = ctx.params.optional_real("scale_max");
  opts.exclusion = ctx.params.optional_real("exclusion");
  opts.sample_rate_hz = sample_rate(ctx);
  const auto r = lye_wolf(ctx.series.samples(), opts);
  AlgorithmOutput out;
  out.outputs.put("largest_exponent", r.largest_exponent);
  out.outputs.put("replacements", r.replacements);
  out.outputs.put("evolution_steps", r.evolution_steps);
  out.outputs.put("units", opts.sample_rate_hz ? "per_second" : "per_sample");
  return out;
}

inline const ParamSpec kTau{"tau", "auto", "delay in samples (auto: first AMI minimum)"};
inline const ParamSpec kDim{"dim", "auto", "embedding dimension (auto: FNN)"};
inline const ParamSpec kM{"m", "2", "template length"};
inline const ParamSpec kR{"r", "0.2", "tolerance as a fraction of the standard deviation"};
inline const ParamSpec kRate{"sample_rate_hz", "none", "report exponents per second"};

}  // namespace builtin

/// The standard algorithm catalogue.
inline Registry builtin_registry() {
  using namespace builtin;
  Registry reg;
  reg.add({"dfa", "detrended fluctuation analysis",
           {{"order", "1", "detrending polynomial order"},
            {"boxes", "auto", "comma-separated box sizes (auto: 16 log-spaced, 8..N/9)"}},
           run_dfa});
  reg.add({"ami", "average mutual information against lag",
           {{"max_lag", "auto", "largest lag (auto: min(100, N/2-1))"}, {"bins", "16", "histogram bins per axis"}},
           run_ami});
  reg.add({"fnn", "false nearest neighbour fraction against dimension",
           {kTau,
            {"max_dim", "10", "largest dimension tested"},
            {"r_tol", "15", "distance-ratio tolerance"},
            {"a_tol", "2", "absolute tolerance in standard deviations"},
            {"threshold", "0.01", "fraction below which a dimension is accepted"}},
           run_fnn});
  reg.add({"ent_samp", "sample entropy", {kM, kR}, run_sampen});
  reg.add({"ent_ap", "approximate entropy", {kM, kR}, run_apen});
  reg.add({"ent_xap", "cross approximate entropy against a partner column",
           {{"partner", "", "name of the second column"}, kM, kR},
           run_xapen,
           false});
  reg.add({"ent_permu", "permutation entropy",
           {{"order", "3", "pattern length (2..7)"}, {"delay", "1", "pattern delay"}},
           run_permutation});
  reg.add({"ent_symbolic", "symbolic (binary word) entropy",
           {{"threshold", "auto", "binarisation threshold (auto: median)"}, {"word_length", "3", "bits per word"}},
           run_symbolic});
  reg.add({"ent_ms_plus", "multiscale entropy: RCMSE, CMSE, MSE, MSFE, GMSE",
           {kM, kR, {"max_scale", "auto", "largest scale (auto: min(10, N/10))"}},
           run_multiscale});
  reg.add({"rqa", "recurrence quantification analysis",
           {kTau,
            kDim,
            {"radius", "auto", "recurrence radius (auto: searched from target_rec)"},
            {"target_rec", "2.5", "target recurrence rate in percent"},
            {"tolerance", "0.1", "allowed deviation from target_rec in percentage points"},
            {"norm", "euclidean", "euclidean, chebyshev or manhattan"},
            {"theiler", "0", "Theiler window"},
            {"l_min", "2", "minimum diagonal line length"},
            {"v_min", "2", "minimum vertical line length"}},
           run_rqa});
  reg.add({"lye_r", "Rosenstein divergence curve and exponents",
           {kTau,
            kDim,
            {"mean_period", "auto", "temporal exclusion (auto: spectral mean period)"},
            {"max_steps", "auto", "divergence steps (auto: 10 mean periods, at most 1000)"},
            kRate},
           run_rosenstein});
  reg.add({"lye_w", "Wolf largest Lyapunov exponent",
           {kTau,
            kDim,
            {"evolve_steps", "3", "samples per evolution step"},
            {"scale_min", "auto", "smallest replacement distance (auto: 1% of extent)"},
            {"scale_max", "auto", "replacement trigger distance (auto: 10% of extent)"},
            {"exclusion", "auto", "temporal exclusion (auto: mean period)"},
            kRate},
           run_wolf});
  return reg;
}

}  // namespace gaitnl::pipeline
