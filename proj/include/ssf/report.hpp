#pragma once

// Batch runs: config ingestion and validation, task execution, JSON and
// CSV artifacts, invariant tables and plot data.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "ssf/potential.hpp"
#include "ssf/trace_lab.hpp"

namespace ssf {

using OrderedJson = nlohmann::ordered_json;

enum class TaskKind { invariants, ssf, identities, heat, resolvent, birman_krein, levinson, check_all };

const char* to_string(TaskKind kind) noexcept;

struct TaskConfig {
  TaskKind kind = TaskKind::check_all;
  OrderedJson params;  // validated, with defaults filled in
};

struct RunConfig {
  PotentialSpec potential;
  std::vector<TaskConfig> tasks;
  std::string output_directory = "ssf-lab-output";
  bool write_json = true;
  bool write_csv = true;
  std::string sha256;  // of the config text as read
};

/// Parses and validates a config document; schema violations raise a usage error.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

std::string sha256_hex(const std::string& data);

/// Output directory after applying the SSF_LAB_OUTPUT_ROOT override.
std::filesystem::path resolve_output_directory(const std::string& configured);

struct TaskResult {
  TaskKind kind = TaskKind::check_all;
  bool pass = false;
  OrderedJson report;
  std::vector<std::filesystem::path> files;
};

struct RunResult {
  std::vector<TaskResult> tasks;
  std::filesystem::path directory;
  int exit_status = 0;  // 0 all pass, 1 some check failed
};

/// Executes the tasks (symbolic tables, then scattering curves, then
/// identities) and writes one JSON report per task plus CSV curves.
RunResult run(const RunConfig& config, bool write_files = true);

/// Canonical text dump of g_0..g_N and X_0..X_min(N,3) for dimension d.
std::string invariant_tables_text(int dim, int max_n);

/// Fixed-precision number for reports (12 significant digits; null if not finite).
OrderedJson report_number(double x);
OrderedJson to_json(const IdentityReport& r);

enum class PlotKind { ssf, log_det, phase_shifts, residuals, heat };
PlotKind parse_plot_kind(const std::string& name);

/// RFC 4180 CSV with a header row naming units.
std::string plot_data_csv(PlotKind kind, const RunConfig& config);

}  // namespace ssf
