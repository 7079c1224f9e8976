#pragma once

#include "armkin/fk.hpp"
#include "armkin/ik.hpp"
#include "armkin/metrics.hpp"
#include "armkin/model.hpp"
#include "armkin/sampling.hpp"

#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace armkin {

/// Outcome class of one evaluated sample.
enum class SampleStatus {
  accepted = 0,
  theta1_undefined,
  theta2_out_of_range,
  theta5_out_of_range,
  no_d3_in_range,
  constraint_violated,
  triangle_degenerate,
  pose_residual_rejected,  ///< solved, but reconstruction off by more than the tolerance
};
inline constexpr int kSampleStatusCount = 8;

inline const char* to_string(SampleStatus s) {
  switch (s) {
    case SampleStatus::accepted: return "accepted";
    case SampleStatus::theta1_undefined: return "theta1_undefined";
    case SampleStatus::theta2_out_of_range: return "theta2_out_of_range";
    case SampleStatus::theta5_out_of_range: return "theta5_out_of_range";
    case SampleStatus::no_d3_in_range: return "no_d3_in_range";
    case SampleStatus::constraint_violated: return "constraint_violated";
    case SampleStatus::triangle_degenerate: return "triangle_degenerate";
    case SampleStatus::pose_residual_rejected: return "pose_residual_rejected";
  }
  return "unknown";
}

inline SampleStatus to_sample_status(IkError e) {
  switch (e) {
    case IkError::theta1_undefined: return SampleStatus::theta1_undefined;
    case IkError::theta2_out_of_range: return SampleStatus::theta2_out_of_range;
    case IkError::theta5_out_of_range: return SampleStatus::theta5_out_of_range;
    case IkError::no_d3_in_range: return SampleStatus::no_d3_in_range;
    case IkError::constraint_violated: return SampleStatus::constraint_violated;
    case IkError::triangle_degenerate: return SampleStatus::triangle_degenerate;
  }
  return SampleStatus::constraint_violated;
}

/// One evaluated target; joints and error are meaningful when accepted.
struct SampleRecord {
  SampledPose target;
  SampleStatus status = SampleStatus::accepted;
  JointVector joints;
  PoseError error;
};

struct EvalOptions {
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 0;
  double constraint_tol = 0.05;  ///< acceptance tolerance tau_c
  double d3_slack = 0.02;        ///< widening of the prismatic range (m)
  /// Branch threshold on |R2z|; defaults to constraint_tol when unset.
  std::optional<double> r2z_tol;
  int workers = 0;  ///< 0 = hardware concurrency

  double effective_r2z_tol() const {
    return r2z_tol ? *r2z_tol : constraint_tol;
  }
  IkOptions ik_options() const {
    IkOptions o;
    o.r2z_epsilon = effective_r2z_tol();
    o.constraint_tol = constraint_tol;
    o.d3_slack = d3_slack;
    return o;
  }
};

/// Streaming mean/variance/max accumulator (Welford; Chan merge).
struct RunningStats {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  double max = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
    if (x > max) max = x;
  }
  void merge(const RunningStats& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
    const double d = o.mean - mean;
    mean += d * nb / (na + nb);
    m2 += o.m2 + d * d * na * nb / (na + nb);
    n += o.n;
    if (o.max > max) max = o.max;
  }
  /// Sample standard deviation (n-1); 0 for a single value, NaN when empty.
  double stddev() const {
    if (n == 0) return std::numeric_limits<double>::quiet_NaN();
    if (n == 1) return 0.0;
    return std::sqrt(m2 / static_cast<double>(n - 1));
  }
};

struct EvalReport {
  std::uint64_t total_samples = 0;
  std::uint64_t accepted_count = 0;
  std::array<std::uint64_t, kSampleStatusCount> status_counts{};
  RunningStats dx, dy, dz, drot;
  EvalOptions options;
  ShellSpec shell;
  int workers_used = 1;
  double wall_clock_s = 0.0;

  double acceptance_fraction() const {
    return total_samples == 0
               ? 0.0
               : static_cast<double>(accepted_count) /
                     static_cast<double>(total_samples);
  }

  /**
   * Deterministic report body: key = value lines, 17 significant digits.
   * Excludes worker count and wall clock so the body is byte-identical
   * across worker layouts; render() appends those as comment lines.
   */
  std::string body() const {
    std::ostringstream os;
    auto put = [&os](const char* key, double v) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      os << key << " = " << buf << "\n";
    };
    os << "samples = " << total_samples << "\n";
    os << "seed = " << options.seed << "\n";
    put("constraint_tol", options.constraint_tol);
    put("r2z_tol", options.effective_r2z_tol());
    put("d3_slack", options.d3_slack);
    put("shell_center_z", shell.center.z());
    put("shell_r_inner", shell.r_inner);
    put("shell_r_outer", shell.r_outer);
    os << "euler_convention = intrinsic-zyx\n";
    os << "acceptance_rule = solve-ok and pose residual within "
          "constraint_tol\n";
    os << "accepted = " << accepted_count << "\n";
    put("acceptance_fraction", acceptance_fraction());
    for (int s = 1; s < kSampleStatusCount; ++s) {
      os << "rejected_" << to_string(static_cast<SampleStatus>(s)) << " = "
         << status_counts[static_cast<size_t>(s)] << "\n";
    }
    put("mean_dx_m", dx.mean);
    put("std_dx_m", dx.stddev());
    put("mean_dy_m", dy.mean);
    put("std_dy_m", dy.stddev());
    put("mean_dz_m", dz.mean);
    put("std_dz_m", dz.stddev());
    put("mean_drot_rad", drot.mean);
    put("std_drot_rad", drot.stddev());
    return os.str();
  }

  std::string render() const {
    std::ostringstream os;
    os << body();
    os << "# workers = " << workers_used << "\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", wall_clock_s);
    os << "# wall_clock_s = " << buf << "\n";
    return os.str();
  }
};

namespace detail {

/// Evaluates one indexed sample: draw, solve, gate, measure.
inline SampleRecord evaluate_sample(const RobotModel& model,
                                    const ShellSpec& shell,
                                    const EvalOptions& opts,
                                    const IkOptions& ik_opts,
                                    std::uint64_t index) {
  SampleRecord rec;
  SplitMix64 rng = sample_stream(opts.seed, index);
  rec.target = sample_pose(rng, shell);
  IkResult res = armkin::solve(model, rec.target.pose, ik_opts);
  if (!succeeded(res)) {
    rec.status = to_sample_status(failure(res).reason);
    rec.joints = failure(res).partial;
    return rec;
  }
  const IkSolution& sol = solution(res);
  rec.joints = sol.joints;
  // tau_c also caps the reconstruction residual of accepted poses; the
  // identity residuals vanish on every solved candidate and cannot gate.
  if (sol.position_residual > opts.constraint_tol ||
      sol.rotation_residual > opts.constraint_tol) {
    rec.status = SampleStatus::pose_residual_rejected;
    return rec;
  }
  const Pose rebuilt = forward_kinematics(model, sol.joints);
  const Vec3 pe =
      position_error(rec.target.pose.translation, rebuilt.translation);
  rec.status = SampleStatus::accepted;
  rec.error = {pe.x(), pe.y(), pe.z(), sol.rotation_residual};
  return rec;
}

inline void append_csv_row(std::string& out, const SampleRecord& rec) {
  char buf[512];
  auto num = [](char* b, size_t cap, double v) {
    std::snprintf(b, cap, "%.17g", v);
  };
  char px[32], py[32], pz[32], yw[32], pt[32], rl[32];
  num(px, 32, rec.target.pose.translation.x());
  num(py, 32, rec.target.pose.translation.y());
  num(pz, 32, rec.target.pose.translation.z());
  num(yw, 32, rec.target.yaw);
  num(pt, 32, rec.target.pitch);
  num(rl, 32, rec.target.roll);
  if (rec.status == SampleStatus::accepted) {
    char t1[32], t2[32], d3[32], t4[32], t5[32], dx[32], dy[32], dz[32],
        dr[32];
    num(t1, 32, rec.joints.theta1);
    num(t2, 32, rec.joints.theta2);
    num(d3, 32, rec.joints.d3);
    num(t4, 32, rec.joints.theta4);
    num(t5, 32, rec.joints.theta5);
    num(dx, 32, rec.error.dx);
    num(dy, 32, rec.error.dy);
    num(dz, 32, rec.error.dz);
    num(dr, 32, rec.error.drot);
    std::snprintf(buf, sizeof(buf),
                  "%s,%s,%s,%s,%s,%s,accepted,%s,%s,%s,%s,%s,%s,%s,%s,%s\n",
                  px, py, pz, yw, pt, rl, t1, t2, d3, t4, t5, dx, dy, dz, dr);
  } else {
    std::snprintf(buf, sizeof(buf), "%s,%s,%s,%s,%s,%s,%s,,,,,,,,,\n", px, py,
                  pz, yw, pt, rl, to_string(rec.status));
  }
  out += buf;
}

struct ChunkStats {
  std::array<std::uint64_t, kSampleStatusCount> status_counts{};
  RunningStats dx, dy, dz, drot;
};

/// Writes chunk strings to a stream in chunk order while workers complete
/// them out of order; holds only the out-of-order window in memory.
class OrderedCsvWriter {
 public:
  explicit OrderedCsvWriter(std::ostream& out) : out_(out) {}

  void submit(std::uint64_t chunk, std::string&& text) {
    std::lock_guard<std::mutex> lock(mutex_);
    pending_.emplace(chunk, std::move(text));
    while (true) {
      auto it = pending_.find(next_);
      if (it == pending_.end()) break;
      out_ << it->second;
      pending_.erase(it);
      ++next_;
    }
  }

 private:
  std::ostream& out_;
  std::mutex mutex_;
  std::map<std::uint64_t, std::string> pending_;
  std::uint64_t next_ = 0;
};

}  // namespace detail

inline constexpr const char* kSampleCsvHeader =
    "px,py,pz,yaw,pitch,roll,status,theta1,theta2,d3,theta4,theta5,dx,dy,dz,"
    "drot\n";

/**
 * @brief Runs the Monte-Carlo pose-reconstruction study.
 *
 * Samples are keyed by index, processed in fixed 4096-sample chunks, and the
 * per-chunk statistics are merged in chunk order, so the resulting report
 * body is byte-identical for any worker count. Acceptance means: the
 * analytical solve succeeded AND the reconstructed pose sits within
 * constraint_tol of the target (position in meters, rotation in radians).
 * Error statistics cover accepted samples only.
 *
 * When csv is non-null, one row per sample (accepted or not) is written in
 * sample order under kSampleCsvHeader.
 */
inline EvalReport run_evaluation(const RobotModel& model,
                                 const ShellSpec& shell,
                                 const EvalOptions& opts,
                                 std::ostream* csv = nullptr) {
  const auto t0 = std::chrono::steady_clock::now();
  const IkOptions ik_opts = opts.ik_options();
  constexpr std::uint64_t kChunk = 4096;
  const std::uint64_t n = opts.samples;
  const std::uint64_t n_chunks = (n + kChunk - 1) / kChunk;

  int workers = opts.workers > 0
                    ? opts.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  if (static_cast<std::uint64_t>(workers) > n_chunks && n_chunks > 0)
    workers = static_cast<int>(n_chunks);

  std::vector<detail::ChunkStats> chunks(n_chunks);
  std::atomic<std::uint64_t> next_chunk{0};
  std::optional<detail::OrderedCsvWriter> csv_writer;
  if (csv != nullptr) {
    *csv << kSampleCsvHeader;
    csv_writer.emplace(*csv);
  }

  auto worker_fn = [&]() {
    std::string rows;
    for (;;) {
      const std::uint64_t c = next_chunk.fetch_add(1);
      if (c >= n_chunks) return;
      detail::ChunkStats& cs = chunks[c];
      const std::uint64_t lo = c * kChunk;
      const std::uint64_t hi = std::min(n, lo + kChunk);
      rows.clear();
      for (std::uint64_t i = lo; i < hi; ++i) {
        const SampleRecord rec =
            detail::evaluate_sample(model, shell, opts, ik_opts, i);
        ++cs.status_counts[static_cast<size_t>(rec.status)];
        if (rec.status == SampleStatus::accepted) {
          cs.dx.add(rec.error.dx);
          cs.dy.add(rec.error.dy);
          cs.dz.add(rec.error.dz);
          cs.drot.add(rec.error.drot);
        }
        if (csv_writer) detail::append_csv_row(rows, rec);
      }
      if (csv_writer) csv_writer->submit(c, std::move(rows));
    }
  };

  if (workers == 1) {
    worker_fn();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker_fn);
    for (auto& t : pool) t.join();
  }

  EvalReport report;
  report.total_samples = n;
  report.options = opts;
  report.shell = shell;
  report.workers_used = workers;
  for (const auto& cs : chunks) {
    for (int s = 0; s < kSampleStatusCount; ++s)
      report.status_counts[static_cast<size_t>(s)] +=
          cs.status_counts[static_cast<size_t>(s)];
    report.dx.merge(cs.dx);
    report.dy.merge(cs.dy);
    report.dz.merge(cs.dz);
    report.drot.merge(cs.drot);
  }
  report.accepted_count = report.status_counts[0];
  report.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return report;
}

/// Aggregates a batch of already-evaluated records into a report.
inline EvalReport summarize(const std::vector<SampleRecord>& records,
                            const EvalOptions& opts = {},
                            const ShellSpec& shell = {}) {
  EvalReport report;
  report.total_samples = records.size();
  report.options = opts;
  report.shell = shell;
  for (const auto& rec : records) {
    ++report.status_counts[static_cast<size_t>(rec.status)];
    if (rec.status == SampleStatus::accepted) {
      report.dx.add(rec.error.dx);
      report.dy.add(rec.error.dy);
      report.dz.add(rec.error.dz);
      report.drot.add(rec.error.drot);
    }
  }
  report.accepted_count = report.status_counts[0];
  return report;
}

}  // namespace armkin
