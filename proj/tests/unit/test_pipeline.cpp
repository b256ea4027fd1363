#include <fstream>
#include <sstream>

#include "dfa_oracle.hpp"
#include "dynamics.hpp"
#include "gaitnl/io/csv.hpp"
#include "gaitnl/pipeline/batch.hpp"
#include "gaitnl/pipeline/builtin.hpp"
#include "gaitnl/rqa/export.hpp"
#include "helpers.hpp"

using namespace gaitnl;
using namespace gaitnl::pipeline;
namespace fs = std::filesystem;

namespace {

void write_columns(const fs::path& path, const std::vector<std::pair<std::string, std::vector<double>>>& cols) {
  std::ofstream out(path);
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c].first;
  out << "\n";
  for (std::size_t i = 0; i < cols[0].second.size(); ++i) {
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << io::format_double(cols[c].second[i]);
    out << "\n";
  }
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string line; std::getline(ss, line);) out.push_back(line);
  return out;
}

fs::path three_column_file(const fs::path& dir) {
  const auto path = dir / "walk.csv";
  write_columns(path, {{"a", oracle::gaussian_noise(600, 1)},
                       {"b", oracle::sinusoid(600, 31.0)},
                       {"c", oracle::logistic(600)}});
  return path;
}

BatchJob job_for(const fs::path& data, const fs::path& out, std::vector<std::string> attrs,
                 std::vector<AlgorithmRequest> algos) {
  BatchJob job;
  job.dataset_paths = {data};
  job.attributes = AttributeList(std::move(attrs));
  job.algorithms = std::move(algos);
  job.output_dir = out;
  return job;
}

// A single {"k", "v"} pair of literals would pick the map's iterator-range
// constructor, so one-entry overrides go through std::string.
std::map<std::string, std::string> one(const std::string& key, const std::string& value) { return {{key, value}}; }

const Registry& builtins() {
  static const Registry r = builtin_registry();
  return r;
}

AlgorithmSpec dummy(const std::string& name) {
  return {name, "test", {{"k", "1", ""}}, [](const TaskContext&) { return AlgorithmOutput{}; }};
}

}  // namespace

TEST(Registry, DuplicateNamesRejected) {
  Registry r;
  r.add(dummy("x"));
  EXPECT_ERROR_CODE(r.add(dummy("x")), ErrorCode::DuplicateAlgorithmName);
  EXPECT_ERROR_CODE(r.at("y"), ErrorCode::UnknownAlgorithm);
  EXPECT_EQ(r.find("y"), nullptr);
}

TEST(Registry, CustomAlgorithmAppearsInListing) {
  Registry r;
  r.add({"my_metric", "a custom measure", {{"gain", "2", "multiplier"}}, [](const TaskContext&) { return AlgorithmOutput{}; }});
  EXPECT_NE(r.listing().find("my_metric"), std::string::npos);
  EXPECT_NE(r.listing().find("gain=2"), std::string::npos);
}

TEST(Registry, BuiltinsListedWithParameters) {
  const auto& reg = builtins();
  for (const char* name : {"dfa", "ami", "fnn", "ent_samp", "ent_ap", "ent_xap", "ent_permu", "ent_symbolic",
                           "ent_ms_plus", "rqa", "lye_r", "lye_w"}) {
    EXPECT_NE(reg.find(name), nullptr) << name;
  }
  const auto listing = reg.listing();
  EXPECT_NE(listing.find("target_rec=2.5"), std::string::npos);
  EXPECT_NE(listing.find("partner=<required>"), std::string::npos);
  const auto all = reg.names_for_all();
  EXPECT_EQ(std::count(all.begin(), all.end(), "ent_xap"), 0);
  EXPECT_EQ(all.size(), 11u);
}

TEST(Resolution, OverridesBeatDefaultsAndUnknownKeysFail) {
  const auto& spec = builtins().at("ent_samp");
  const TimeSeries s("x", oracle::gaussian_noise(300, 1));
  ParameterCache cache;
  const auto p = resolve_parameters(spec, s, one("r", "0.25"), cache, "f");
  EXPECT_EQ(p.text("r"), "0.25");
  EXPECT_EQ(p.text("m"), "2");
  EXPECT_ERROR_CODE(resolve_parameters(spec, s, one("radius", "1"), cache, "f"), ErrorCode::InvalidArgument);
}

TEST(Resolution, AutoTauAndDimAreDerivedAndCached) {
  const auto& spec = builtins().at("lye_r");
  const TimeSeries s("x", oracle::lorenz_x(10000));
  ParameterCache cache;
  const auto a = resolve_parameters(spec, s, {}, cache, "f");
  const auto b = resolve_parameters(spec, s, {}, cache, "f");
  EXPECT_EQ(a.all(), b.all());
  EXPECT_EQ(a.count("tau"), derive_tau(s));
  EXPECT_EQ(a.count("dim"), 3u);
  const auto tau_only = resolve_parameters(spec, s, one("tau", "7"), cache, "f");
  EXPECT_EQ(tau_only.count("tau"), 7u);
  EXPECT_EQ(tau_only.count("dim"), derive_dim(s, 7));
  const auto fixed = resolve_parameters(spec, s, {{"tau", "7"}, {"dim", "4"}}, cache, "f");
  EXPECT_EQ(fixed.count("tau"), 7u);
  EXPECT_EQ(fixed.count("dim"), 4u);
}

TEST(Resolution, ConstantSeriesFailsAutoTau) {
  const auto& spec = builtins().at("rqa");
  const TimeSeries s("flat", std::vector<double>(500, 1.0));
  ParameterCache cache;
  try {
    resolve_parameters(spec, s, {}, cache, "f");
    FAIL() << "expected AutoResolutionFailed";
  } catch (const AutoResolutionError& e) {
    EXPECT_EQ(e.code(), ErrorCode::AutoResolutionFailed);
    EXPECT_EQ(e.parameter(), "tau");
    EXPECT_EQ(e.cause(), ErrorCode::DegenerateSeries);
  }
}

TEST(Batch, OneFileThreeColumnsTwoAlgorithms) {
  const auto dir = testing_util::scratch_dir("batch_basic");
  const auto data = three_column_file(dir);
  std::ostringstream notes;
  const auto s = run_batch(job_for(data, dir / "out", {"a", "b", "c"}, {{"dfa", {}}, {"ent_samp", {}}}),
                           builtin_registry(), &notes);
  EXPECT_EQ(s.tasks_ok, 6u);
  EXPECT_EQ(s.exit_code(), 0);
  EXPECT_TRUE(notes.str().empty());
  for (const char* algo : {"dfa", "ent_samp"}) {
    const auto recs = lines(slurp(dir / "out" / (std::string(algo) + "_results.txt")));
    ASSERT_EQ(recs.size(), 3u);
    EXPECT_EQ(recs[0].rfind("file=walk.csv column=a status=ok ", 0), 0u) << recs[0];
    EXPECT_EQ(recs[2].rfind("file=walk.csv column=c status=ok ", 0), 0u);
  }
  const auto summary = lines(slurp(dir / "out" / "results_summary.csv"));
  ASSERT_EQ(summary.size(), 7u);
  EXPECT_EQ(summary[0], "file,column,algorithm,status,reason,wall_time_s,peak_memory_bytes,parameters,outputs,detail");
  EXPECT_TRUE(fs::exists(dir / "out" / "resource_report.txt"));

  // The recorded value equals the library result.
  const auto recs = lines(slurp(dir / "out" / "ent_samp_results.txt"));
  const auto expected = sample_entropy(oracle::gaussian_noise(600, 1));
  EXPECT_NE(recs[0].find("sample_entropy=" + io::format_double(*expected)), std::string::npos) << recs[0];
}

TEST(Batch, SkipsBadColumnsButRunsTheRest) {
  const auto dir = testing_util::scratch_dir("batch_skip");
  const auto data = dir / "mixed.csv";
  {
    std::ofstream out(data);
    out << "good,label,flat\n";
    const auto x = oracle::gaussian_noise(300, 9);
    for (std::size_t i = 0; i < x.size(); ++i) out << io::format_double(x[i]) << ",t" << i << ",2\n";
  }
  std::ostringstream notes;
  const auto s = run_batch(job_for(data, dir / "out", {"good", "label", "missing", "flat"}, {{"ami", {}}}),
                           builtin_registry(), &notes);
  EXPECT_EQ(s.tasks_ok, 1u);
  EXPECT_EQ(s.tasks_skipped, 3u);
  EXPECT_EQ(s.tasks_failed, 0u);
  EXPECT_EQ(s.exit_code(), 0);
  EXPECT_EQ(s.tasks[1].reason, "NonNumericColumn");
  EXPECT_EQ(s.tasks[2].reason, "MissingColumn");
  EXPECT_EQ(s.tasks[3].reason, "DegenerateSeries");
  EXPECT_NE(notes.str().find("missing"), std::string::npos);
  const auto recs = lines(slurp(dir / "out" / "ami_results.txt"));
  ASSERT_EQ(recs.size(), 4u);
  EXPECT_EQ(recs[2].rfind("file=mixed.csv column=missing status=skipped", 0), 0u);
  EXPECT_NE(recs[2].find("reason=MissingColumn"), std::string::npos);
}

TEST(Batch, AutoResolutionFailureRecordsParameterAndCause) {
  const auto dir = testing_util::scratch_dir("batch_auto");
  const auto data = dir / "d.csv";
  write_columns(data, {{"flat", std::vector<double>(3000, 3.0)}, {"ok", oracle::lorenz_x(3000)}});
  const auto s = run_batch(job_for(data, dir / "out", {"flat", "ok"}, {{"lye_w", one("tau", "auto")}}),
                           builtin_registry(), nullptr);
  EXPECT_EQ(s.tasks[0].status, TaskStatus::Skipped);
  EXPECT_EQ(s.tasks[1].status, TaskStatus::Ok);
  const auto recs = lines(slurp(dir / "out" / "lye_w_results.txt"));
  EXPECT_NE(recs[0].find("reason=AutoResolutionFailed"), std::string::npos);
  EXPECT_NE(recs[0].find("parameter=tau"), std::string::npos);
  EXPECT_NE(recs[0].find("cause=DegenerateSeries"), std::string::npos);
}

TEST(Batch, AllSkippedThrowsAfterWriting) {
  const auto dir = testing_util::scratch_dir("batch_none");
  const auto data = three_column_file(dir);
  EXPECT_ERROR_CODE(run_batch(job_for(data, dir / "out", {"nope"}, {{"dfa", {}}}), builtin_registry(), nullptr),
                    ErrorCode::NoRunnableTasks);
  EXPECT_TRUE(fs::exists(dir / "out" / "dfa_results.txt"));
  EXPECT_TRUE(fs::exists(dir / "out" / "results_summary.csv"));
}

TEST(Batch, JobLevelErrors) {
  const auto dir = testing_util::scratch_dir("batch_errors");
  const auto data = three_column_file(dir);
  EXPECT_ERROR_CODE(run_batch(job_for(data, dir / "o", {"a"}, {{"bogus", {}}}), builtin_registry(), nullptr),
                    ErrorCode::UnknownAlgorithm);
  EXPECT_ERROR_CODE(run_batch(job_for(data, dir / "o", {"a"}, {{"dfa", one("nope", "1")}}), builtin_registry(), nullptr),
                    ErrorCode::InvalidArgument);
  {
    std::ofstream blocker(dir / "file_not_dir");
    blocker << "x";
  }
  EXPECT_ERROR_CODE(run_batch(job_for(data, dir / "file_not_dir" / "sub", {"a"}, {{"dfa", {}}}), builtin_registry(), nullptr),
                    ErrorCode::OutputDirUnwritable);
}

TEST(Batch, FailedTaskSetsExitCode) {
  const auto dir = testing_util::scratch_dir("batch_fail");
  const auto data = three_column_file(dir);
  const auto s = run_batch(job_for(data, dir / "out", {"a", "b"}, {{"dfa", one("order", "0")}}), builtin_registry(), nullptr);
  EXPECT_EQ(s.tasks_failed, 2u);
  EXPECT_EQ(s.exit_code(), 1);
  EXPECT_EQ(s.tasks[0].reason, "InvalidArgument");
}

TEST(Batch, PlotsMatchResults) {
  const auto dir = testing_util::scratch_dir("batch_plots");
  const auto data = dir / "p.csv";
  const auto x = oracle::gaussian_noise(510, 4);
  write_columns(data, {{"x", x}});
  auto job = job_for(data, dir / "out", {"x"}, {{"dfa", {}}, {"rqa", {{"tau", "2"}, {"dim", "6"}}}});
  job.emit_plots = true;
  const auto s = run_batch(job, builtin_registry(), nullptr);
  ASSERT_EQ(s.tasks_ok, 2u);

  const auto r = dfa(x);
  std::string expected = "box_size,fluctuation\n";
  for (std::size_t k = 0; k < r.box_sizes.size(); ++k) {
    expected += io::format_double(static_cast<double>(r.box_sizes[k])) + "," + io::format_double(r.fluctuations[k]) + "\n";
  }
  EXPECT_EQ(slurp(dir / "out" / "p__x__dfa.csv"), expected);
  EXPECT_NE(slurp(dir / "out" / "p__x__dfa.svg").find("<svg"), std::string::npos);

  const auto pgm = slurp(dir / "out" / "p__x__rqa.pgm");
  EXPECT_EQ(pgm.rfind("P4\n500 500\n", 0), 0u);
  EXPECT_EQ(pgm.size(), std::string("P4\n500 500\n").size() + 500u * 63u);
  std::uint64_t ones = 0;
  for (std::size_t k = std::string("P4\n500 500\n").size(); k < pgm.size(); ++k) {
    ones += static_cast<std::uint64_t>(std::popcount(static_cast<unsigned char>(pgm[k])));
  }
  const auto& outputs = s.tasks[1].outputs;
  EXPECT_EQ(ones, std::stoull(outputs.at("recurrent_cells")) + 500u);  // plus the line of identity
}

TEST(Batch, PlotsOffWritesNoArtifacts) {
  const auto dir = testing_util::scratch_dir("batch_noplots");
  const auto data = three_column_file(dir);
  run_batch(job_for(data, dir / "out", {"a"}, {{"dfa", {}}}), builtin_registry(), nullptr);
  for (const auto& e : fs::directory_iterator(dir / "out")) {
    const auto ext = e.path().extension();
    EXPECT_TRUE(ext != ".svg" && ext != ".pgm") << e.path();
  }
}

TEST(Batch, ResultsIndependentOfWorkerCount) {
  const auto dir = testing_util::scratch_dir("batch_workers");
  const auto data = three_column_file(dir);
  std::vector<std::string> baseline;
  for (std::size_t workers : {1, 3}) {
    auto job = job_for(data, dir / ("w" + std::to_string(workers)), {"a", "b", "c"},
                       {{"ent_permu", {}}, {"ami", {}}, {"lye_w", {}}});
    job.workers = workers;
    run_batch(job, builtin_registry(), nullptr);
    std::vector<std::string> files;
    for (const char* a : {"ent_permu", "ami", "lye_w"}) files.push_back(slurp(job.output_dir / (std::string(a) + "_results.txt")));
    if (baseline.empty()) baseline = files;
    else EXPECT_EQ(files, baseline);
  }
}

TEST(Records, QuotingAndOrdering) {
  TaskResult r;
  r.file = "my file.csv";
  r.column = "knee";
  r.algorithm = "x";
  r.status = TaskStatus::Failed;
  r.reason = "InvalidArgument";
  r.parameters = {{"z", "1"}, {"a", "x=y"}};
  r.outputs = one("b", "say \"hi\"");
  EXPECT_EQ(format_record(r),
            "file=\"my file.csv\" column=knee status=failed b=\"say \\\"hi\\\"\" param.a=\"x=y\" param.z=1 "
            "reason=InvalidArgument");
}
