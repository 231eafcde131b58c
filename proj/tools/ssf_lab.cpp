// ssf-lab: batch front end. Exit status 0 when every check passes, 1 when
// a check fails or a numerical task errors out, 2 on usage errors.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "ssf/errors.hpp"
#include "ssf/report.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kUsage = 2;

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) ssf::fail(ssf::ErrorKind::usage, "cannot write " + path.string());
  out << text;
}

int run_command(const std::string& config_path, bool quiet) {
  ssf::RunConfig cfg = ssf::load_run_config(config_path);
  ssf::RunResult result = ssf::run(cfg);
  if (!quiet) {
    for (std::size_t i = 0; i < result.tasks.size(); ++i) {
      const auto& t = result.tasks[i];
      fmt::print("{:02d} {:<13} {}\n", i, ssf::to_string(t.kind), t.pass ? "PASS" : "FAIL");
    }
    fmt::print("reports in {}\n", result.directory.string());
  }
  return result.exit_status;
}

int tables_command(int dim, int max_n, const std::string& output) {
  std::string text = ssf::invariant_tables_text(dim, max_n);
  if (output.empty()) {
    std::cout << text;
  } else {
    fs::path path = ssf::resolve_output_directory(output);
    write_file(path, text);
    fmt::print("wrote {}\n", path.string());
  }
  return 0;
}

int plot_command(const std::string& kind_name, const std::string& config_path, const std::string& output) {
  ssf::PlotKind kind = ssf::parse_plot_kind(kind_name);
  ssf::RunConfig cfg = ssf::load_run_config(config_path);
  std::string csv = ssf::plot_data_csv(kind, cfg);
  fs::path path = output.empty() ? ssf::resolve_output_directory(cfg.output_directory) / ("plot_" + kind_name + ".csv")
                                 : ssf::resolve_output_directory(output);
  write_file(path, csv);
  fmt::print("wrote {}\n", path.string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral shift function laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Execute the tasks of a config file and write reports");
  run->add_option("config", config_path, "JSON config")->required();
  run->add_flag("-q,--quiet", quiet, "Print nothing on success");

  int dim = 1, max_n = 4;
  std::string tables_out;
  auto* tables = app.add_subcommand("tables", "Print canonical heat-invariant and Taylor-operator tables");
  tables->add_option("--dim", dim, "Dimension")->check(CLI::Range(1, 3));
  tables->add_option("--max-n", max_n, "Highest order")->check(CLI::Range(0, 5));
  tables->add_option("-o,--output", tables_out, "Write to this file instead of stdout");

  std::string plot_kind, plot_config, plot_out;
  auto* plot = app.add_subcommand("plot", "Write plot data (CSV) for a config");
  plot->add_option("kind", plot_kind, "ssf | log_det | phase_shifts | residuals | heat")->required();
  plot->add_option("config", plot_config, "JSON config")->required();
  plot->add_option("-o,--output", plot_out, "Output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*run) return run_command(config_path, quiet);
    if (*tables) return tables_command(dim, max_n, tables_out);
    if (*plot) return plot_command(plot_kind, plot_config, plot_out);
  } catch (const ssf::Error& e) {
    std::cerr << "ssf-lab: " << ssf::to_string(e.kind()) << " error: " << e.what() << "\n";
    return e.kind() == ssf::ErrorKind::usage ? kUsage : 1;
  } catch (const std::exception& e) {
    std::cerr << "ssf-lab: " << e.what() << "\n";
    return 1;
  }
  return kUsage;
}
