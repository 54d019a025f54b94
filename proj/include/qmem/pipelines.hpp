#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qmem/config.hpp"
#include "qmem/csv.hpp"
#include "qmem/kernels.hpp"

namespace qmem {

/// A named group of output tables with the diagnostics of the run that
/// produced them.
struct FigureDataset {
  std::string name;
  std::vector<Table> tables;
  nlohmann::ordered_json diagnostics = nlohmann::ordered_json::object();
};

/// Inputs of one CLI invocation. `config_bytes` is hashed into every
/// sidecar; overrides are recorded next to the hash.
struct RunContext {
  ExperimentConfig config;
  std::string config_bytes;
  std::string config_source = "<config>";
  std::optional<std::uint64_t> seed_override;
  std::optional<std::uint64_t> trials_override;
  ExecutionPolicy policy = ExecutionPolicy::Parallel;
  bool verbose = false;

  static RunContext from_text(const std::string& text, const std::string& source = "<config>");
  static RunContext from_file(const std::filesystem::path& path);
  /// Config with the seed and trial overrides applied.
  ExperimentConfig effective_config() const;
  std::uint64_t seed() const;
};

FigureDataset cmd_spectrum(const RunContext& ctx);
FigureDataset cmd_store(const RunContext& ctx);
FigureDataset cmd_larmor(const RunContext& ctx);
FigureDataset cmd_counting(const RunContext& ctx);

struct WrittenDataset {
  std::string name;
  std::vector<std::filesystem::path> files;  ///< CSVs then the sidecar
};

/// Writes every table as `<out>/<table>.csv` and a `<out>/<dataset>.json`
/// sidecar (config hash, seed, version, wall time, diagnostics).
WrittenDataset write_dataset(const RunContext& ctx, const FigureDataset& ds, const std::filesystem::path& out_dir,
                             double wall_time_s);

/// Runs a single pipeline by name and writes it.
WrittenDataset run_pipeline(const RunContext& ctx, const std::string& name, const std::filesystem::path& out_dir);

/// Runs the configured pipelines in order and writes `manifest.json` last.
/// On failure the manifest lists the completed outputs and the failing
/// pipeline, and the error is rethrown.
std::vector<WrittenDataset> cmd_figures(const RunContext& ctx, const std::filesystem::path& out_dir);

/// Deterministic manifest text (no wall times).
std::string manifest_json(const RunContext& ctx, const std::vector<WrittenDataset>& done,
                          const std::filesystem::path& out_dir, const std::string& failed = "");

}  // namespace qmem
