#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "loadshape/distance.hpp"
#include "loadshape/ingest.hpp"
#include "loadshape/preprocess.hpp"

namespace loadshape {

struct DatasetSpec {
  std::string id;
  std::string source;  // local path or http(s) URL
  SourceDescriptor descriptor;
};

/// Everything one characterization run depends on. Randomness enters only
/// through `seeds`, so a config plus its pinned inputs replays exactly.
struct PipelineConfig {
  std::vector<DatasetSpec> datasets;
  SmoothingConfig smoothing;
  StandardizeScope scope = StandardizeScope::per_row;
  DistanceConfig metric;
  int k_min = 2;
  int k_max = 20;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::filesystem::path output_dir = "out";

  void validate() const;  // std::invalid_argument on bad combinations
};

/// key=value lines, `#` comments, blank lines ignored. Dataset keys group by
/// id: `dataset.<id>.path|format|bucket_width|timezone|compression|strict`;
/// scalar keys: output_dir, alpha, smoothing, scope, metric, gamma, k_min,
/// k_max, seeds (comma-separated). Datasets keep file order.
PipelineConfig read_config(const std::filesystem::path& path);

struct StageStatus {
  std::string stage;
  std::string status;  // ok | failed | skipped
  std::string detail;
};

struct CharacterizeReport {
  std::filesystem::path bundle_dir;
  std::vector<StageStatus> stages;
  long daily_rows = 0;
  long weekly_rows = 0;
  int daily_k = 0;
  int weekly_k = 0;
  std::vector<int> daily_sizes;   // in label order D1.., largest first
  std::vector<int> weekly_sizes;  // in label order W1.., largest first
  double dominant_cell = 0;       // largest frequency-table percentage
};

/// The characterization arm end to end: ingest, aggregate, profile,
/// preprocess, cluster, fit, associate, report. Artifacts land under
/// cfg.output_dir next to a manifest.json pinning input hashes, config
/// values, and seeds. Ingest and aggregation run one thread per dataset;
/// later stages start only after every dataset clears the previous one.
/// A stage failure moves everything produced so far under `failed/` and
/// surfaces as PipelineStageError carrying the stage name.
CharacterizeReport run_characterize(const PipelineConfig& cfg);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace loadshape
