#pragma once

// File outputs: trace/regret CSVs, run summaries, partition snapshots.
// Every file is written atomically (temp + rename) and floats are printed
// with round-trip precision, so identical configs reproduce identical bytes.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "blin/analysis.hpp"
#include "blin/engine.hpp"

namespace blin {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path dir = path.parent_path();
  if (!dir.empty()) fs::create_directories(dir);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

inline std::string cube_index_string(const StandardCube& c) {
  std::string s;
  for (std::size_t a = 0; a < c.index.size(); ++a) {
    if (a) s += ':';
    s += std::to_string(c.index[a]);
  }
  return s;
}

/// Columns: t, batch, cube_depth, cube_index, arm0..arm{d-1}, reward,
/// cumulative_regret. The zooming baseline logs every pull as its own batch.
inline std::string trace_csv(const RunTrace& trace, const RewardInstance& inst) {
  const bool per_pull_batches = trace.algorithm == "zooming";
  std::vector<double> regret = cumulative_regret(trace, inst);
  std::string out = "t,batch,cube_depth,cube_index";
  for (int a = 0; a < trace.dim; ++a) out += ",arm" + std::to_string(a);
  out += ",reward,cumulative_regret\n";
  for (std::int64_t t = 0; t < trace.total_pulls(); ++t) {
    const auto& cube = trace.cube_of_pull(t);
    out += std::to_string(t + 1);
    out += ',';
    out += std::to_string(per_pull_batches ? t + 1 : trace.batches[trace.pull_batch[t]].number);
    out += ',';
    out += std::to_string(cube.depth);
    out += ',';
    out += cube_index_string(cube);
    for (int a = 0; a < trace.dim; ++a) {
      out += ',';
      out += fmt_double(trace.arms[t * trace.dim + a]);
    }
    out += ',';
    out += fmt_double(trace.rewards[t]);
    out += ',';
    out += fmt_double(regret[t]);
    out += '\n';
  }
  return out;
}

inline std::string regret_csv(const std::vector<double>& series) {
  std::string out = "t,regret\n";
  for (std::size_t t = 0; t < series.size(); ++t) {
    out += std::to_string(t + 1);
    out += ',';
    out += fmt_double(series[t]);
    out += '\n';
  }
  return out;
}

inline json summary_json(const RunTrace& trace, const RewardInstance& inst) {
  json s;
  s["config"] = {{"algorithm", trace.algorithm},
                 {"env", inst.descriptor()},
                 {"T", trace.horizon},
                 {"d", trace.dim},
                 {"seed", trace.seed},
                 {"noise_sigma", trace.noise_sigma},
                 {"arm_policy",
                  trace.arm_policy == ArmPolicy::CubeCenter ? "cube-center" : "uniform-in-cube"}};
  s["rounds_used"] = trace.rounds_used;
  s["final_regret"] = final_regret(trace, inst);
  s["total_pulls"] = trace.total_pulls();
  if (trace.algorithm == "zooming") {
    s["note"] = "per-pull feedback baseline: every pull is its own batch (B = T)";
    s["arms_activated"] = trace.batches.empty() ? 0 : trace.batches[0].active.size();
    return s;
  }
  s["grid"] = trace.grid;
  s["commits_for_decisions"] = trace.commits_for_decisions;
  s["final_handoff"] = trace.final_handoff;
  s["cleanup_pulls"] = trace.cleanup_pulls;
  s["round_counting"] =
      "rounds_used counts the realized grid points t_1..t_B: one per full-batch commit "
      "plus the final handoff at t = T that delivers truncated-batch and cleanup rewards";
  int started = 0;
  json batches = json::array();
  for (const auto& rec : trace.batches) {
    if (rec.role == BatchRecord::Role::Batch) ++started;
    batches.push_back({{"batch", rec.number},
                       {"role", rec.role == BatchRecord::Role::Batch ? "batch" : "cleanup"},
                       {"edge", rec.edge},
                       {"samples_per_cube", rec.samples_per_cube},
                       {"active_cubes", rec.active.size()},
                       {"eliminated", rec.eliminated_slots.size()},
                       {"committed", rec.committed},
                       {"commit_time", rec.commit_time}});
  }
  s["batches"] = batches;
  s["batches_started"] = started;
  return s;
}

// ---------------------------------------------------------------------------
// Partition snapshots (d = 2 only)

/// One SVG per committed batch m: survivors of m white, cubes eliminated in
/// m dark gray, cubes eliminated in earlier batches light gray. The drawn
/// rectangles always tile [0,1]^2.
struct SvgRect {
  StandardCube cube;
  std::string fill;
};

inline std::string render_partition_svg(const std::vector<SvgRect>& rects) {
  const double S = 1024.0;
  std::string out =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1024\" height=\"1024\" "
      "viewBox=\"0 0 1024 1024\">\n";
  for (const auto& r : rects) {
    double e = r.cube.edge() * S;
    double x = r.cube.lower(0) * S;
    double y = (1.0 - r.cube.upper(1)) * S;  // flip so larger x2 is up
    out += "<rect x=\"" + fmt_double(x) + "\" y=\"" + fmt_double(y) + "\" width=\"" +
           fmt_double(e) + "\" height=\"" + fmt_double(e) + "\" fill=\"" + r.fill +
           "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

inline std::vector<SvgRect> partition_snapshot(const RunTrace& trace, int batch_number) {
  std::vector<SvgRect> rects;
  for (const auto& rec : trace.batches) {
    if (rec.role != BatchRecord::Role::Batch || !rec.committed) continue;
    if (rec.number > batch_number) break;
    if (rec.number == batch_number) {
      std::vector<bool> gone(rec.active.size(), false);
      for (int s : rec.eliminated_slots) gone[s] = true;
      for (std::size_t s = 0; s < rec.active.size(); ++s)
        rects.push_back({rec.active[s], gone[s] ? "#8c8c8c" : "#ffffff"});
    } else {
      for (int s : rec.eliminated_slots) rects.push_back({rec.active[s], "#d9d9d9"});
    }
  }
  return rects;
}

inline std::vector<std::string> write_partition_svgs(const std::filesystem::path& dir,
                                                     const RunTrace& trace) {
  std::vector<std::string> files;
  if (trace.dim != 2) return files;
  for (const auto& rec : trace.batches) {
    if (rec.role != BatchRecord::Role::Batch || !rec.committed) continue;
    std::string name = "partition_batch_" + std::to_string(rec.number) + ".svg";
    atomic_write(dir / name, render_partition_svg(partition_snapshot(trace, rec.number)));
    files.push_back(name);
  }
  return files;
}

}  // namespace blin
