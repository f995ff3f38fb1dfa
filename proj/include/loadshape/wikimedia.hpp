#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "loadshape/calendar.hpp"

namespace loadshape {

struct FetchConfig {
  std::string base_url = "https://dumps.wikimedia.org/other/pageviews";
  std::string project = "en";  // cache subdirectory label
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};  // doubled per retry
};

struct FetchResult {
  std::vector<std::filesystem::path> files;  // one per hour, in time order
  int downloaded = 0;
  int cached = 0;
};

/// Fetch the hourly pageview aggregate files covering [start, end) into
/// `<cache>/<project>/<yyyy>/<mm>/<dd>/<hh>.gz`. Hours already cached with a
/// complete (nonzero-size, atomically renamed) file are skipped without
/// network traffic. Hours the server reports missing are collected and
/// raised as PartialRange after the rest of the range has been fetched.
FetchResult fetch_wikimedia(const FetchConfig& cfg, std::int64_t start, std::int64_t end,
                            const std::filesystem::path& cache_dir);

}  // namespace loadshape
