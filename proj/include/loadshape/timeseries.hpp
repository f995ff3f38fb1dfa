#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "loadshape/calendar.hpp"
#include "loadshape/clf.hpp"
#include "loadshape/ingest.hpp"

namespace loadshape {

struct Bin {
  std::int64_t start = 0;  // aligned to bin width
  double count = 0;
};

/// Binned request counts for one dataset. Bin starts are strictly increasing
/// and contiguous at bin_width; interior spans with no observations are
/// materialized as zero-count bins and their starts listed in `gaps`.
struct TimeSeries {
  std::string dataset_id;
  std::int64_t bin_width = cal::kHour;
  std::vector<Bin> bins;
  std::vector<std::int64_t> gaps;
};

/// Accumulates events and summary records into aligned bins. finish() yields
/// the TimeSeries with interior gaps materialized.
class EventBinner {
 public:
  EventBinner(std::string dataset_id, std::int64_t bin_width);

  void add_event(const TraceEvent& ev) { add(ev.timestamp); }
  void add(std::int64_t timestamp);
  /// Throws IncompatibleBucket unless the record's bucket width divides the
  /// bin width.
  void add_summary(const SummaryRecord& rec, std::int64_t bucket_width);

  TimeSeries finish() const;

 private:
  std::string dataset_id_;
  std::int64_t bin_width_;
  std::map<std::int64_t, double> counts_;
};

/// Re-aggregate into coarser bins; new width must be a multiple of the old.
/// A coarse bin is a gap only when every constituent fine bin was one.
TimeSeries rebin(const TimeSeries& ts, std::int64_t new_width);

enum class Granularity { daily, weekly };
enum class Provenance { raw, preprocessed };

constexpr int width_of(Granularity g) { return g == Granularity::daily ? 24 : 7; }
std::string_view to_string(Granularity g);

struct RowInfo {
  std::string dataset;
  std::int64_t origin = 0;  // midnight of the day, or of the week's Monday

  bool operator==(const RowInfo&) const = default;
};

/// Fixed-width matrix of workload rows: one day (24 hourly values) or one
/// Monday-first week (7 daily values) per row, origins strictly increasing
/// within a dataset.
struct WorkloadMatrix {
  std::string id;  // file-naming label; per-row dataset lives in rows
  Granularity granularity = Granularity::daily;
  Provenance provenance = Provenance::raw;
  Eigen::MatrixXd values;      // rows x width_of(granularity)
  std::vector<RowInfo> rows;   // size == values.rows()

  int width() const { return width_of(granularity); }
};

struct MatrixBuild {
  WorkloadMatrix matrix;
  std::vector<std::int64_t> dropped;  // origins of incomplete rows, in order
};

/// One row per calendar day holding its 24 hourly counts. Days missing any
/// hour (leading/trailing truncation; interior zeros count as present) are
/// dropped and itemized. Requires 1h bins.
MatrixBuild to_daily_matrix(const TimeSeries& ts);

/// One row per complete Monday-to-Sunday week. Requires 1d bins.
MatrixBuild to_weekly_matrix(const TimeSeries& ts);

/// Stack matrices of identical granularity and provenance into one.
WorkloadMatrix combine(const std::vector<WorkloadMatrix>& parts);

/// CSV persistence: `# dataset=`, `# granularity=`, `# provenance=` comment
/// lines, then header `dataset,origin,v0..`, one row per line. Values are
/// written shortest-round-trip, so reload is lossless.
void write_matrix_csv(const WorkloadMatrix& m, const std::filesystem::path& path);
WorkloadMatrix read_matrix_csv(const std::filesystem::path& path);

/// TimeSeries persistence: `# dataset=`, `# bin_width=` comments, header
/// `bin_start,count,gap`.
void write_series_csv(const TimeSeries& ts, const std::filesystem::path& path);
TimeSeries read_series_csv(const std::filesystem::path& path);

}  // namespace loadshape
