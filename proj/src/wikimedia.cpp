#include "loadshape/wikimedia.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "loadshape/errors.hpp"
#include "loadshape/http.hpp"

namespace loadshape {

namespace fs = std::filesystem;

namespace {

struct HourRef {
  int year;
  unsigned month, day, hour;

  std::string remote_path(const std::string& base_path) const {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%s/%04d/%04d-%02u/pageviews-%04d%02u%02u-%02u0000.gz",
                  base_path.c_str(), year, year, month, year, month, day, hour);
    return buf;
  }

  fs::path cache_path(const fs::path& cache_dir, const std::string& project) const {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%04d/%02u/%02u/%02u.gz", year, month, day, hour);
    return cache_dir / project / buf;
  }

  std::string label() const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02u", year, month, day, hour);
    return buf;
  }
};

enum class GetOutcome { ok, missing, failed };

GetOutcome get_with_retries(httplib::Client& client, const std::string& path,
                            const FetchConfig& cfg, std::string& body, int& last_status) {
  auto backoff = cfg.initial_backoff;
  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    auto res = client.Get(path);
    if (!res) {
      last_status = 0;
      continue;
    }
    last_status = res->status;
    if (res->status == 200) {
      body = std::move(res->body);
      return GetOutcome::ok;
    }
    if (res->status == 404) return GetOutcome::missing;
    // retry 5xx and anything else transient-looking
  }
  return GetOutcome::failed;
}

void write_atomic(const fs::path& target, const std::string& body) {
  fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".part";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(body.data(), std::streamsize(body.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace

FetchResult fetch_wikimedia(const FetchConfig& cfg, std::int64_t start, std::int64_t end,
                            const fs::path& cache_dir) {
  if (end < start) throw std::invalid_argument("fetch range end precedes start");

  auto [host, base_path] = http::split_url(cfg.base_url);
  if (base_path == "/") base_path.clear();
  if (!base_path.empty() && base_path.back() == '/') base_path.pop_back();

  httplib::Client client(host);
  client.set_connection_timeout(10);
  client.set_read_timeout(60);
  client.set_follow_location(true);

  FetchResult result;
  std::vector<std::string> missing;

  std::int64_t first = cal::kHour * (start / cal::kHour - (start % cal::kHour < 0));
  for (std::int64_t t = first; t < end; t += cal::kHour) {
    std::chrono::year_month_day ymd{
        std::chrono::sys_days{std::chrono::floor<std::chrono::days>(
            std::chrono::sys_seconds{std::chrono::seconds{t}})}};
    {
      HourRef ref{int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day()),
                  unsigned(cal::hour_of_day(t))};
      fs::path cached = ref.cache_path(cache_dir, cfg.project);

      std::error_code ec;
      auto size = fs::file_size(cached, ec);
      if (!ec && size > 0) {
        ++result.cached;
        result.files.push_back(cached);
        continue;
      }

      std::string body;
      int last_status = 0;
      switch (get_with_retries(client, ref.remote_path(base_path), cfg, body, last_status)) {
        case GetOutcome::ok:
          write_atomic(cached, body);
          ++result.downloaded;
          result.files.push_back(cached);
          break;
        case GetOutcome::missing:
          missing.push_back(ref.label());
          break;
        case GetOutcome::failed:
          throw HttpError(last_status, "giving up on " + ref.label() + " after " +
                                           std::to_string(cfg.max_retries + 1) + " attempts");
      }
    }
  }

  if (!missing.empty()) throw PartialRange(std::move(missing));
  return result;
}

}  // namespace loadshape
