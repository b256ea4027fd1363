#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "gaitnl/core/error.hpp"
#include "gaitnl/io/csv.hpp"
#include "gaitnl/io/dataset.hpp"
#include "gaitnl/pipeline/memory_accounting.hpp"
#include "gaitnl/pipeline/plots.hpp"
#include "gaitnl/pipeline/registry.hpp"
#include "gaitnl/pipeline/resolution.hpp"

namespace gaitnl::pipeline {

struct AlgorithmRequest {
  std::string name;
  std::map<std::string, std::string> overrides;
};

struct BatchJob {
  std::vector<std::filesystem::path> dataset_paths;
  std::filesystem::path attribute_list_path;
  /// Used instead of reading attribute_list_path when set.
  std::optional<AttributeList> attributes;
  std::vector<AlgorithmRequest> algorithms;
  std::size_t workers = 1;
  std::uint64_t memory_budget_bytes = memory::default_memory_budget();
  std::filesystem::path output_dir = "results";
  bool emit_plots = false;
  SelectOptions select;
};

enum class TaskStatus { Ok, Skipped, Failed };

inline std::string_view status_name(TaskStatus s) {
  switch (s) {
    case TaskStatus::Ok: return "ok";
    case TaskStatus::Skipped: return "skipped";
    case TaskStatus::Failed: return "failed";
  }
  return "failed";
}

struct TaskResult {
  std::string file;
  std::string column;
  std::string algorithm;
  std::map<std::string, std::string> parameters;
  std::map<std::string, std::string> outputs;
  TaskStatus status = TaskStatus::Ok;
  std::string reason;  // error name when not Ok
  std::map<std::string, std::string> reason_keys;
  std::string detail;
  double wall_time_s = 0.0;
  std::uint64_t peak_memory_bytes = 0;
  std::vector<std::filesystem::path> artifacts;
  bool plot_failed = false;
};

struct BatchSummary {
  std::size_t tasks_ok = 0;
  std::size_t tasks_skipped = 0;
  std::size_t tasks_failed = 0;
  std::vector<std::filesystem::path> report_paths;
  std::vector<TaskResult> tasks;

  int exit_code() const { return tasks_failed ? 1 : 0; }
};

/// Errors that mean "this input cannot be analysed" rather than "the
/// analysis broke"; such tasks are Skipped.
inline bool is_skip_reason(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnreadableFile:
    case ErrorCode::UnknownFormat:
    case ErrorCode::EmptyDataset:
    case ErrorCode::MissingColumn:
    case ErrorCode::NonNumericColumn:
    case ErrorCode::SeriesTooShort:
    case ErrorCode::DegenerateSeries:
    case ErrorCode::LengthMismatch:
    case ErrorCode::MemoryBudgetExceeded:
    case ErrorCode::AutoResolutionFailed:
      return true;
    default:
      return false;
  }
}

namespace batch_detail {

inline std::string record_value(const std::string& v) {
  const bool plain = !v.empty() && v.find_first_of(" \t\"=\n\r") == std::string::npos;
  if (plain) return v;
  std::string out = "\"";
  for (char ch : v) {
    if (ch == '"' || ch == '\\') out += '\\';
    if (ch == '\n') out += "\\n";
    else if (ch == '\r') out += "\\r";
    else out += ch;
  }
  return out + "\"";
}

inline void set_error(TaskResult& r, const Error& e) {
  r.status = is_skip_reason(e.code()) ? TaskStatus::Skipped : TaskStatus::Failed;
  r.reason = std::string(e.name());
  r.detail = e.detail();
  if (const auto* auto_err = dynamic_cast<const AutoResolutionError*>(&e)) {
    r.reason_keys["parameter"] = auto_err->parameter();
    r.reason_keys["cause"] = std::string(error_name(auto_err->cause()));
  }
}

inline std::string join_pairs(const std::map<std::string, std::string>& m) {
  std::string out;
  for (const auto& [k, v] : m) {
    if (!out.empty()) out += ';';
    out += k + "=" + v;
  }
  return out;
}

inline std::filesystem::path checked_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec && !std::filesystem::is_directory(dir)) {
    fail(ErrorCode::OutputDirUnwritable, dir.string() + ": " + ec.message());
  }
  const auto probe = dir / ".gaitnl_write_probe";
  {
    std::ofstream out(probe);
    if (!out || !(out << "x")) fail(ErrorCode::OutputDirUnwritable, dir.string() + " is not writable");
  }
  std::filesystem::remove(probe, ec);
  return dir;
}

}  // namespace batch_detail

/// One result-file line: fixed prefix, then sorted key=value pairs.
inline std::string format_record(const TaskResult& r) {
  std::map<std::string, std::string> keys;
  if (r.status != TaskStatus::Ok) {
    keys["reason"] = r.reason;
    for (const auto& [k, v] : r.reason_keys) keys[k] = v;
  }
  for (const auto& [k, v] : r.parameters) keys["param." + k] = v;
  for (const auto& [k, v] : r.outputs) keys[k] = v;
  if (r.plot_failed) keys["plot"] = "failed";
  std::string line = "file=" + batch_detail::record_value(r.file) + " column=" + batch_detail::record_value(r.column) +
                     " status=" + std::string(status_name(r.status));
  for (const auto& [k, v] : keys) line += " " + k + "=" + batch_detail::record_value(v);
  return line;
}

/// Expands files x attributes x algorithms into tasks, runs them on a worker
/// pool and writes, under output_dir:
///   <algorithm>_results.txt   one record per task, in task order
///   results_summary.csv       one row per task, with timing and memory
///   resource_report.txt       per-algorithm mean time and memory
/// plus plot artifacts when enabled. Throws before any task runs when the
/// job itself is invalid, and NoRunnableTasks (after writing the outputs)
/// when every task was skipped.
inline BatchSummary run_batch(const BatchJob& job, const Registry& registry, std::ostream* notify = &std::cerr) {
  require(!job.algorithms.empty(), ErrorCode::InvalidArgument, "no algorithms selected");
  require(job.workers >= 1, ErrorCode::InvalidArgument, "workers must be >= 1");
  require(!job.dataset_paths.empty(), ErrorCode::InvalidArgument, "no dataset paths");
  std::vector<const AlgorithmSpec*> specs;
  for (const auto& req : job.algorithms) {
    const auto& spec = registry.at(req.name);
    validate_overrides(spec, req.overrides);
    for (const auto* s : specs) {
      require(s->name != spec.name, ErrorCode::InvalidArgument, "algorithm listed twice: " + spec.name);
    }
    specs.push_back(&spec);
  }
  const AttributeList attrs = job.attributes ? *job.attributes : read_attribute_list(job.attribute_list_path);
  const auto out_dir = batch_detail::checked_output_dir(job.output_dir);

  struct FileEntry {
    std::string key;   // file name used in records
    std::string stem;  // plot prefix
    std::optional<Dataset> dataset;
    std::optional<Error> load_error;
    std::vector<ColumnSelection> columns;
  };
  std::vector<FileEntry> files;
  for (const auto& path : job.dataset_paths) {
    FileEntry f;
    f.key = path.filename().string();
    f.stem = path.stem().string();
    try {
      f.dataset.emplace(load_dataset(path));
      f.columns = select_columns(*f.dataset, attrs, job.select);
    } catch (const Error& e) {
      f.load_error = e;
    }
    files.push_back(std::move(f));
  }

  struct Task {
    std::size_t file, column, algorithm;
  };
  std::vector<Task> tasks;
  for (std::size_t f = 0; f < files.size(); ++f) {
    for (std::size_t c = 0; c < attrs.size(); ++c) {
      for (std::size_t a = 0; a < specs.size(); ++a) tasks.push_back({f, c, a});
    }
  }

  ParameterCache cache;
  const auto execute = [&](const Task& t) {
    const auto& file = files[t.file];
    const auto& spec = *specs[t.algorithm];
    TaskResult r;
    r.file = file.key;
    r.column = attrs.names()[t.column];
    r.algorithm = spec.name;
    try {
      if (file.load_error) throw *file.load_error;
      const auto& sel = file.columns[t.column];
      if (const auto* err = std::get_if<Error>(&sel)) throw *err;
      const auto& series = std::get<TimeSeries>(sel);
      const auto params =
          resolve_parameters(spec, series, job.algorithms[t.algorithm].overrides, cache, std::to_string(t.file));
      r.parameters = params.all();
      AlgorithmOutput output;
      {
        memory::PeakScope scope;
        const auto start = std::chrono::steady_clock::now();
        output = spec.run(TaskContext{series, *file.dataset, params, job.memory_budget_bytes, job.select});
        r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        r.peak_memory_bytes = scope.peak_bytes();
      }
      r.outputs = output.outputs.all();
      if (job.emit_plots) {
        try {
          r.artifacts = emit_plots(out_dir, file.stem, r.column, spec.name, output);
        } catch (const Error& e) {
          r.plot_failed = true;
          r.detail = std::string(e.what());
        }
      }
    } catch (const Error& e) {
      batch_detail::set_error(r, e);
    } catch (const std::bad_alloc&) {
      r.status = TaskStatus::Failed;
      r.reason = "OutOfMemory";
      r.detail = "allocation failed";
    } catch (const std::exception& e) {
      r.status = TaskStatus::Failed;
      r.reason = "InternalError";
      r.detail = e.what();
    }
    return r;
  };

  std::vector<std::ofstream> result_files;
  BatchSummary summary;
  for (const auto* spec : specs) {
    const auto path = out_dir / (spec->name + "_results.txt");
    result_files.emplace_back(path, std::ios::binary | std::ios::trunc);
    if (!result_files.back()) fail(ErrorCode::OutputDirUnwritable, "cannot create " + path.string());
    summary.report_paths.push_back(path);
  }

  std::vector<std::optional<TaskResult>> slots(tasks.size());
  std::mutex slot_mutex;
  std::condition_variable slot_ready;
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  const std::size_t n_workers = std::min(job.workers, std::max<std::size_t>(1, tasks.size()));
  for (std::size_t w = 0; w < n_workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < tasks.size(); i = next++) {
        auto result = execute(tasks[i]);
        {
          std::lock_guard lock(slot_mutex);
          slots[i] = std::move(result);
        }
        slot_ready.notify_all();
      }
    });
  }

  // Single writer, task-index order.
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    TaskResult r;
    {
      std::unique_lock lock(slot_mutex);
      slot_ready.wait(lock, [&] { return slots[i].has_value(); });
      r = std::move(*slots[i]);
      slots[i].reset();
    }
    result_files[tasks[i].algorithm] << format_record(r) << '\n';
    switch (r.status) {
      case TaskStatus::Ok: ++summary.tasks_ok; break;
      case TaskStatus::Skipped: ++summary.tasks_skipped; break;
      case TaskStatus::Failed: ++summary.tasks_failed; break;
    }
    if (notify && (r.status != TaskStatus::Ok || r.plot_failed)) {
      *notify << (r.status == TaskStatus::Failed ? "error: " : "warning: ") << r.file << " / " << r.column << " / "
              << r.algorithm << ": " << (r.status == TaskStatus::Ok ? "plot failed" : std::string(status_name(r.status)))
              << " (" << (r.reason.empty() ? "PlotWriteFailed" : r.reason) << ": " << r.detail << ")\n";
    }
    summary.tasks.push_back(std::move(r));
  }
  pool.clear();
  for (auto& f : result_files) f.close();

  {
    const auto path = out_dir / "results_summary.csv";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << "file,column,algorithm,status,reason,wall_time_s,peak_memory_bytes,parameters,outputs,detail\n";
    for (const auto& r : summary.tasks) {
      out << io::quote_field(r.file) << ',' << io::quote_field(r.column) << ',' << r.algorithm << ','
          << status_name(r.status) << ',' << r.reason << ',' << io::format_double(r.wall_time_s) << ','
          << r.peak_memory_bytes << ',' << io::quote_field(batch_detail::join_pairs(r.parameters)) << ','
          << io::quote_field(batch_detail::join_pairs(r.outputs)) << ',' << io::quote_field(r.detail) << '\n';
    }
    summary.report_paths.push_back(path);
  }

  {
    const auto path = out_dir / "resource_report.txt";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    char line[256];
    std::snprintf(line, sizeof line, "%-14s %5s %8s %7s %16s %20s %20s\n", "algorithm", "ok", "skipped", "failed",
                  "mean_time_s", "mean_peak_bytes", "max_peak_bytes");
    out << "# per-task wall time around the algorithm call; peak heap from allocation accounting"
        << (memory::hooks_installed ? "" : " (accounting not linked: memory reads 0)") << "\n";
    out << "# workers=" << n_workers << " memory_budget_bytes=" << job.memory_budget_bytes << "\n";
    out << line;
    for (std::size_t a = 0; a < specs.size(); ++a) {
      std::size_t ok = 0, skipped = 0, failed = 0;
      double time_sum = 0.0, mem_sum = 0.0;
      std::uint64_t mem_max = 0;
      for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (tasks[i].algorithm != a) continue;
        const auto& r = summary.tasks[i];
        if (r.status == TaskStatus::Skipped) ++skipped;
        if (r.status == TaskStatus::Failed) ++failed;
        if (r.status != TaskStatus::Ok) continue;
        ++ok;
        time_sum += r.wall_time_s;
        mem_sum += static_cast<double>(r.peak_memory_bytes);
        mem_max = std::max(mem_max, r.peak_memory_bytes);
      }
      const double denom = ok ? static_cast<double>(ok) : 1.0;
      std::snprintf(line, sizeof line, "%-14s %5zu %8zu %7zu %16.6f %20.0f %20llu\n", specs[a]->name.c_str(), ok,
                    skipped, failed, time_sum / denom, mem_sum / denom, static_cast<unsigned long long>(mem_max));
      out << line;
    }
    summary.report_paths.push_back(path);
  }

  if (summary.tasks_ok + summary.tasks_failed == 0) {
    fail(ErrorCode::NoRunnableTasks, "all " + std::to_string(tasks.size()) + " tasks were skipped");
  }
  return summary;
}

}  // namespace gaitnl::pipeline
