#include <algorithm>
#include <condition_variable>
#include <chrono>
#include <cmath>
#include <deque>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include <json.hpp>

#include "loadshape/clf.hpp"
#include "loadshape/errors.hpp"
#include "loadshape/http.hpp"
#include "loadshape/replay.hpp"

namespace loadshape {

namespace {

using clock = std::chrono::steady_clock;

struct IntervalTally {
  double scheduled = 0;
  long attempted = 0;
  long completed = 0;
  long failed = 0;
  long late = 0;
};

/// Fixed pool of workers with per-thread connections; the queue never holds
/// more than the in-flight cap, the scheduler sheds above it.
class WorkerPool {
 public:
  WorkerPool(const std::string& url, int threads, std::map<std::int64_t, IntervalTally>& tally,
             std::mutex& tally_mu)
      : url_(url), tally_(tally), tally_mu_(tally_mu) {
    for (int i = 0; i < threads; ++i)
      workers_.emplace_back([this] { run(); });
  }

  ~WorkerPool() {
    {
      std::lock_guard lock(mu_);
      done_ = true;
    }
    cv_.notify_all();
    for (auto& w : workers_) w.join();
  }

  /// False when the in-flight cap would be exceeded.
  bool submit(std::int64_t key, clock::time_point scheduled_at, int cap) {
    {
      std::lock_guard lock(mu_);
      if (in_flight_ >= cap) return false;
      ++in_flight_;
      queue_.push_back({key, scheduled_at});
    }
    cv_.notify_one();
    return true;
  }

  void drain() {
    std::unique_lock lock(mu_);
    idle_cv_.wait(lock, [this] { return queue_.empty() && active_ == 0; });
  }

 private:
  struct Task {
    std::int64_t key;
    clock::time_point scheduled_at;
  };

  void run() {
    auto [host, path] = http::split_url(url_);
    httplib::Client client(host);
    client.set_connection_timeout(5);
    client.set_read_timeout(30);
    client.set_keep_alive(true);

    for (;;) {
      Task task;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [this] { return done_ || !queue_.empty(); });
        if (queue_.empty()) {
          if (done_) return;
          continue;
        }
        task = queue_.front();
        queue_.pop_front();
        ++active_;
      }
      bool late = clock::now() - task.scheduled_at > std::chrono::milliseconds(100);
      auto res = client.Get(path);
      {
        std::lock_guard lock(tally_mu_);
        auto& t = tally_[task.key];
        ++t.attempted;
        res ? ++t.completed : ++t.failed;
        if (late) ++t.late;
      }
      {
        std::lock_guard lock(mu_);
        --in_flight_;
        --active_;
        if (queue_.empty() && active_ == 0) idle_cv_.notify_all();
      }
    }
  }

  std::string url_;
  std::map<std::int64_t, IntervalTally>& tally_;
  std::mutex& tally_mu_;
  std::vector<std::thread> workers_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable idle_cv_;
  std::deque<Task> queue_;
  int in_flight_ = 0;
  int active_ = 0;
  bool done_ = false;
};

}  // namespace

ReplayReport replay(const std::vector<double>& events, const ReplayConfig& cfg) {
  if (!(cfg.time_scale > 0)) throw std::invalid_argument("time scale must be positive");
  if (cfg.max_in_flight < 1) throw std::invalid_argument("max in flight must be at least 1");
  if (!std::is_sorted(events.begin(), events.end()))
    throw std::invalid_argument("events must be sorted");

  ReplayReport report;
  if (events.empty()) return report;

  if (!cfg.dry_run) {
    auto [host, path] = http::split_url(cfg.target_url);
    httplib::Client probe(host);
    probe.set_connection_timeout(5);
    if (!probe.Get(path)) throw TargetUnreachable("no response from " + cfg.target_url);
  }

  std::map<std::int64_t, IntervalTally> tally;
  std::mutex tally_mu;
  for (double e : events) tally[std::int64_t(std::floor(e))].scheduled += 1;

  const double t0 = events.front();
  const auto wall0 = clock::now();
  auto fire_time = [&](double t) {
    return wall0 + std::chrono::duration_cast<clock::duration>(
                       std::chrono::duration<double>((t - t0) / cfg.time_scale));
  };

  long shed = 0;
  double max_lag = 0;
  {
    // Pool lives in this scope so destruction joins the workers before the
    // totals are read.
    std::unique_ptr<WorkerPool> pool;
    if (!cfg.dry_run)
      pool = std::make_unique<WorkerPool>(cfg.target_url,
                                          std::min(cfg.max_in_flight, 32), tally, tally_mu);

    for (double e : events) {
      auto at = fire_time(e);
      std::this_thread::sleep_until(at);
      double lag = std::chrono::duration<double>(clock::now() - at).count();
      max_lag = std::max(max_lag, lag);
      std::int64_t key = std::int64_t(std::floor(e));

      if (cfg.dry_run) {
        auto& t = tally[key];
        ++t.attempted;
        ++t.completed;
        if (lag > 0.1) ++t.late;
        continue;
      }
      if (!pool->submit(key, at, cfg.max_in_flight)) {
        std::lock_guard lock(tally_mu);
        auto& t = tally[key];
        ++t.attempted;
        ++t.failed;
        ++shed;
      }
    }
    if (pool) pool->drain();
  }

  report.shed = shed;
  report.max_lag_seconds = max_lag;
  report.clock_overrun = max_lag > 1.0;
  for (const auto& [key, t] : tally) {
    report.intervals.push_back({key, t.scheduled, t.attempted, t.completed, t.failed, t.late});
    report.attempted += t.attempted;
    report.completed += t.completed;
    report.failed += t.failed;
    report.late += t.late;
  }
  return report;
}

void write_clf(const std::vector<double>& events, const ClfTemplate& tpl,
               const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  TraceEvent ev;
  ev.client = tpl.client;
  ev.method = tpl.method;
  ev.path = tpl.path;
  ev.status = tpl.status;
  ev.bytes = tpl.bytes;
  for (double e : events) {
    ev.timestamp = std::int64_t(std::floor(e));
    out << format_clf_line(ev) << "\n";
  }
  if (!out) throw IoError("short write to " + path.string());
}

void write_report_json(const ReplayReport& r, const std::filesystem::path& path) {
  nlohmann::json j;
  j["attempted"] = r.attempted;
  j["completed"] = r.completed;
  j["failed"] = r.failed;
  j["shed"] = r.shed;
  j["late"] = r.late;
  j["clock_overrun"] = r.clock_overrun;
  j["max_lag_seconds"] = r.max_lag_seconds;
  auto arr = nlohmann::json::array();
  for (const auto& iv : r.intervals) {
    double err = iv.target_rate > 0 ? (double(iv.completed) - iv.target_rate) / iv.target_rate : 0;
    arr.push_back({{"start", iv.start},
                   {"target_rate", iv.target_rate},
                   {"attempted", iv.attempted},
                   {"completed", iv.completed},
                   {"failed", iv.failed},
                   {"late", iv.late},
                   {"rate_error", err}});
  }
  j["intervals"] = std::move(arr);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw IoError("short write to " + path.string());
}

}  // namespace loadshape
