#include "armkin/eval.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "oracle.hpp"

using namespace armkin;

namespace {
const RobotModel model = RobotModel::standard();
const ShellSpec shell = ShellSpec::from_model(model);
}  // namespace

TEST_CASE("summarize: single accepted record") {
  SampleRecord rec;
  rec.status = SampleStatus::accepted;
  rec.error = {0.01, 0.02, 0.03, 0.004};
  const EvalReport rep = summarize({rec});
  CHECK(rep.accepted_count == 1);
  CHECK(rep.dx.mean == 0.01);
  CHECK(rep.dz.mean == 0.03);
  CHECK(rep.dx.stddev() == 0.0);
  CHECK(rep.drot.stddev() == 0.0);
}

TEST_CASE("summarize: two-point sample statistics") {
  SampleRecord a, b;
  a.status = b.status = SampleStatus::accepted;
  a.error = {0.01, 0, 0, 0};
  b.error = {0.03, 0, 0, 0};
  const EvalReport rep = summarize({a, b});
  CHECK(std::abs(rep.dx.mean - 0.02) < 1e-15);
  CHECK(std::abs(rep.dx.stddev() - 0.014142135623730951) < 1e-15);
}

TEST_CASE("summarize: all records rejected gives null statistics") {
  SampleRecord rec;
  rec.status = SampleStatus::no_d3_in_range;
  const EvalReport rep = summarize({rec, rec, rec});
  CHECK(rep.accepted_count == 0);
  CHECK(rep.total_samples == 3);
  CHECK(std::isnan(rep.dx.stddev()));
  CHECK(rep.status_counts[static_cast<size_t>(
            SampleStatus::no_d3_in_range)] == 3);
  // renders without crashing, with nan statistics
  CHECK(rep.body().find("mean_dx_m = ") != std::string::npos);
}

TEST_CASE("round-trip targets are all accepted with vanishing errors") {
  // FK-generated targets instead of free sampling: acceptance is total and
  // the reconstruction errors sit at machine precision.
  oracle::Rand rnd(77);
  std::vector<SampleRecord> records;
  IkOptions tight;  // defaults: tau_c = 1e-8, slack = 1e-9
  for (int i = 0; i < 2000; ++i) {
    JointVector q = rnd.joints(model);
    if (std::abs(q.theta4) < 0.05) q.theta4 = q.theta4 < 0 ? -0.05 : 0.05;
    SampleRecord rec;
    rec.target.pose = forward_kinematics(model, q);
    const IkResult r = solve(model, rec.target.pose, tight);
    REQUIRE(succeeded(r));
    const Pose rebuilt = forward_kinematics(model, solution(r).joints);
    const Vec3 pe =
        position_error(rec.target.pose.translation, rebuilt.translation);
    rec.status = SampleStatus::accepted;
    rec.error = {pe.x(), pe.y(), pe.z(),
                 rotation_geodesic(rec.target.pose.rotation,
                                   rebuilt.rotation)};
    records.push_back(rec);
  }
  const EvalReport rep = summarize(records);
  CHECK(rep.accepted_count == rep.total_samples);
  CHECK(rep.dx.mean < 1e-9);
  CHECK(rep.dy.mean < 1e-9);
  CHECK(rep.dz.mean < 1e-9);
  CHECK(rep.drot.mean < 1e-9);
}

TEST_CASE("run_evaluation: statistics independent of the worker count") {
  EvalOptions opts;
  opts.samples = 20000;
  opts.seed = 42;
  opts.workers = 1;
  const EvalReport a = run_evaluation(model, shell, opts);
  opts.workers = 2;
  const EvalReport b = run_evaluation(model, shell, opts);
  opts.workers = 3;
  const EvalReport c = run_evaluation(model, shell, opts);
  CHECK(a.body() == b.body());
  CHECK(a.body() == c.body());
  CHECK(a.accepted_count == b.accepted_count);
  CHECK(a.dx.mean == b.dx.mean);
  CHECK(a.drot.m2 == b.drot.m2);
  // render() differs only in the comment lines
  CHECK(a.render() != b.render());
}

TEST_CASE("run_evaluation: status counts partition the samples") {
  EvalOptions opts;
  opts.samples = 20000;
  opts.seed = 5;
  const EvalReport rep = run_evaluation(model, shell, opts);
  std::uint64_t total = 0;
  for (auto c : rep.status_counts) total += c;
  CHECK(total == rep.total_samples);
  CHECK(rep.accepted_count == rep.status_counts[0]);
  CHECK(rep.accepted_count > 0);
  // loose-tolerance acceptance stays a small fraction on free 6-DoF samples
  CHECK(rep.acceptance_fraction() < 0.5);
}

TEST_CASE("run_evaluation: accepted errors respect the tolerance gate") {
  EvalOptions opts;
  opts.samples = 20000;
  opts.seed = 11;
  opts.constraint_tol = 0.05;
  const EvalReport rep = run_evaluation(model, shell, opts);
  CHECK(rep.dx.max <= opts.constraint_tol + 1e-12);
  CHECK(rep.dy.max <= opts.constraint_tol + 1e-12);
  CHECK(rep.dz.max <= opts.constraint_tol + 1e-12);
  CHECK(rep.drot.max <= opts.constraint_tol + 1e-12);
}

TEST_CASE("run_evaluation: per-sample CSV is ordered and deterministic") {
  EvalOptions opts;
  opts.samples = 3000;
  opts.seed = 9;
  opts.workers = 1;
  std::ostringstream csv1, csv2;
  run_evaluation(model, shell, opts, &csv1);
  opts.workers = 2;
  run_evaluation(model, shell, opts, &csv2);
  CHECK(csv1.str() == csv2.str());

  std::istringstream in(csv1.str());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == std::string(kSampleCsvHeader).substr(
                    0, std::string(kSampleCsvHeader).size() - 1));
  std::uint64_t rows = 0;
  std::uint64_t accepted = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 15);
    if (line.find(",accepted,") != std::string::npos) ++accepted;
  }
  CHECK(rows == opts.samples);
  CHECK(accepted > 0);
}

TEST_CASE("run_evaluation: single-sample run") {
  EvalOptions opts;
  opts.samples = 1;
  opts.seed = 3;
  opts.workers = 8;  // clamped to the single chunk
  std::ostringstream csv;
  const EvalReport rep = run_evaluation(model, shell, opts, &csv);
  CHECK(rep.total_samples == 1);
  CHECK(rep.workers_used == 1);
  std::uint64_t total = 0;
  for (auto c : rep.status_counts) total += c;
  CHECK(total == 1);
  const std::string text = csv.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
}

TEST_CASE("report body echoes the configuration") {
  EvalOptions opts;
  opts.samples = 512;
  opts.seed = 1234;
  opts.constraint_tol = 0.01;
  opts.d3_slack = 0.003;
  const EvalReport rep = run_evaluation(model, shell, opts);
  const std::string body = rep.body();
  CHECK(body.find("samples = 512") != std::string::npos);
  CHECK(body.find("seed = 1234") != std::string::npos);
  CHECK(body.find("constraint_tol = 0.01") != std::string::npos);
  CHECK(body.find("d3_slack = 0.003") != std::string::npos);
  CHECK(body.find("r2z_tol = 0.01") != std::string::npos);  // defaults to tau_c
  CHECK(body.find("# workers") == std::string::npos);
}
