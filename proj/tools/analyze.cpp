#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "gaitnl/pipeline/allocation_hooks.hpp"
#include "gaitnl/pipeline/batch.hpp"
#include "gaitnl/pipeline/builtin.hpp"

namespace {

namespace pl = gaitnl::pipeline;

constexpr int kBatchError = 2;

std::vector<pl::AlgorithmRequest> build_requests(const pl::Registry& registry, const std::vector<std::string>& names,
                                                 const std::vector<std::string>& params) {
  std::vector<std::string> selected;
  for (const auto& n : names) {
    if (n == "all") {
      for (const auto& a : registry.names_for_all()) selected.push_back(a);
    } else {
      selected.push_back(n);
    }
  }
  std::vector<pl::AlgorithmRequest> requests;
  for (const auto& n : selected) {
    registry.at(n);
    bool seen = false;
    for (const auto& r : requests) seen = seen || r.name == n;
    if (!seen) requests.push_back({n, {}});
  }
  for (const auto& p : params) {
    const auto dot = p.find('.');
    const auto eq = p.find('=');
    if (dot == std::string::npos || eq == std::string::npos || dot > eq || dot == 0 || eq == dot + 1) {
      gaitnl::fail(gaitnl::ErrorCode::InvalidArgument, "--param expects <algo>.<key>=<value>, got '" + p + "'");
    }
    const auto algo = p.substr(0, dot);
    registry.at(algo);
    bool applied = false;
    for (auto& r : requests) {
      if (r.name == algo) {
        r.overrides[p.substr(dot + 1, eq - dot - 1)] = p.substr(eq + 1);
        applied = true;
      }
    }
    if (!applied) gaitnl::fail(gaitnl::ErrorCode::InvalidArgument, "--param for unselected algorithm '" + algo + "'");
  }
  return requests;
}

std::size_t default_workers() {
  if (const char* env = std::getenv("GAITNL_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring GAITNL_WORKERS=" << env << "\n";
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear time-series analysis over CSV/Parquet gait datasets"};
  std::vector<std::string> data;
  std::string attributes;
  std::vector<std::string> algorithms;
  std::vector<std::string> params;
  std::size_t workers = default_workers();
  std::uint64_t budget = gaitnl::memory::default_memory_budget();
  std::string out_dir = "results";
  bool plots = false;
  bool list = false;
  bool drop_nan = false;

  app.add_option("--data", data, "input CSV or Parquet files")->check(CLI::ExistingFile);
  app.add_option("--attributes", attributes, "attribute list file, one column name per line");
  app.add_option("--algorithms", algorithms, "comma-separated algorithm names, or 'all'")->delimiter(',');
  app.add_option("--param", params, "parameter override <algo>.<key>=<value> (repeatable)");
  app.add_option("--workers", workers, "worker threads (default: GAITNL_WORKERS or core count)")
      ->check(CLI::PositiveNumber);
  app.add_option("--memory-budget", budget, "memory budget in bytes for a single task (default: 75% of RAM)")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--plots", plots, "write SVG/CSV/PGM plot artifacts");
  app.add_flag("--list-algorithms", list, "list registered algorithms and their parameters");
  app.add_flag("--drop-leading-trailing-nan", drop_nan, "trim non-finite cells at the ends of each column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kBatchError;
  }

  const auto registry = pl::builtin_registry();
  if (list) {
    std::cout << registry.listing();
    return 0;
  }
  if (data.empty() || attributes.empty() || algorithms.empty()) {
    std::cerr << "error: --data, --attributes and --algorithms are required\n";
    return kBatchError;
  }

  try {
    pl::BatchJob job;
    for (const auto& d : data) job.dataset_paths.emplace_back(d);
    job.attribute_list_path = attributes;
    job.algorithms = build_requests(registry, algorithms, params);
    job.workers = workers;
    job.memory_budget_bytes = budget;
    job.output_dir = out_dir;
    job.emit_plots = plots;
    job.select.drop_leading_trailing_nan = drop_nan;

    const auto summary = pl::run_batch(job, registry);
    std::cout << "tasks: " << summary.tasks_ok << " ok, " << summary.tasks_skipped << " skipped, "
              << summary.tasks_failed << " failed\n";
    for (const auto& p : summary.report_paths) std::cout << "wrote " << p.string() << "\n";
    return summary.exit_code();
  } catch (const gaitnl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBatchError;
  }
}
