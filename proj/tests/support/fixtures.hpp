#pragma once

// Deterministic test inputs: a server-log generator with a diurnal profile,
// Gaussian blob matrices for clustering, and scratch directory helpers. The
// log writer renders lines with its own calendar code so that nothing here
// depends on the parsers under test.

#include <loadshape/rng.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace fixtures {

// -- scratch directories -------------------------------------------------------

/// Fresh empty directory under the system temp root. Unique per call within a
/// process; contents from an earlier run with the same label are wiped.
inline std::filesystem::path scratch_dir(const std::string& label) {
  static int counter = 0;
  auto p = std::filesystem::temp_directory_path() /
           ("loadshape-test-" + label + "-" + std::to_string(++counter));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

// -- calendar rendering (independent of the library) ---------------------------

struct Civil {
  int year;
  unsigned month, day;
};

inline Civil civil_from_days(std::int64_t z) {
  z += 719468;
  std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  unsigned doe = unsigned(z - era * 146097);
  unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  std::int64_t y = std::int64_t(yoe) + era * 400;
  unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  unsigned mp = (5 * doy + 2) / 153;
  unsigned d = doy - (153 * mp + 2) / 5 + 1;
  unsigned m = mp + (mp < 10 ? 3 : -9);
  return {int(y + (m <= 2)), m, d};
}

/// One Common Log Format line for an event at UTC second `t`, rendered in a
/// fixed -0400 local zone so that offset handling is exercised.
inline std::string clf_line(std::int64_t t, const std::string& host, const std::string& path,
                            int status, long bytes) {
  constexpr std::int64_t kOffset = -4 * 3600;
  std::int64_t local = t + kOffset;
  std::int64_t days = local >= 0 ? local / 86400 : (local - 86399) / 86400;
  std::int64_t sod = local - days * 86400;
  Civil c = civil_from_days(days);
  static const char* months[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                 "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s - - [%02u/%s/%d:%02d:%02d:%02d -0400] \"GET %s HTTP/1.0\" %d %ld",
                host.c_str(), c.day, months[c.month - 1], c.year, int(sod / 3600),
                int(sod % 3600 / 60), int(sod % 60), path.c_str(), status, bytes);
  return buf;
}

// -- synthetic server log -------------------------------------------------------

/// Expected hourly request rate: a smooth day shape peaking mid-afternoon,
/// damped on weekends. Depends only on the hour index so regeneration with
/// different edges stays consistent.
inline double diurnal_rate(std::int64_t hour_start) {
  std::int64_t day = hour_start / 86400;
  int hod = int(hour_start % 86400 / 3600);
  int dow = int((day + 4) % 7);  // 1970-01-01 was a Thursday
  double shape = std::sin((hod - 5) * 3.141592653589793 / 19.0);
  double rate = 45.0 + 130.0 * std::max(0.0, shape);
  if (dow == 0 || dow == 6) rate *= 0.55;
  return rate;
}

/// Write a deterministic CLF trace covering [start, start + hours * 3600).
/// Events within an hour are uniformly placed and emitted in time order.
/// Returns the total number of lines written.
inline long write_diurnal_clf(const std::filesystem::path& path, std::int64_t start, int hours,
                              std::uint64_t seed) {
  static const char* hosts[] = {"piweba3y.prodigy.com", "www-relay.pa-x.dec.com",
                                "burger.letters.net",   "ix-or10-06.ix.example.com",
                                "slip1.kias.example",   "gate.tele.example"};
  struct Doc {
    const char* path;
    int status;
    long bytes;
  };
  static const Doc docs[] = {{"/images/logosmall.gif", 200, 786},
                             {"/shuttle/countdown/", 200, 4324},
                             {"/images/launch.jpg", 200, 60341},
                             {"/history/apollo/", 200, 6245},
                             {"/cgi-bin/imagemap/countdown", 302, 98},
                             {"/images/construct.gif", 304, 0},
                             {"/pub/winvn/readme.txt", 404, 0}};

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  long total = 0;
  for (int h = 0; h < hours; ++h) {
    std::int64_t hour_start = start + std::int64_t(h) * 3600;
    auto g = loadshape::rng::engine(seed, std::uint64_t(hour_start));
    std::int64_t n = loadshape::rng::poisson(g, diurnal_rate(hour_start));
    std::vector<int> seconds(static_cast<std::size_t>(n));
    for (auto& s : seconds) s = int(loadshape::rng::uniform_index(g, 3600));
    std::sort(seconds.begin(), seconds.end());
    for (int s : seconds) {
      const auto& host = hosts[loadshape::rng::uniform_index(g, std::size(hosts))];
      const auto& doc = docs[loadshape::rng::uniform_index(g, std::size(docs))];
      out << clf_line(hour_start + s, host, doc.path, doc.status, doc.bytes) << "\n";
      ++total;
    }
  }
  if (!out.flush()) throw std::runtime_error("short write to " + path.string());
  return total;
}

// -- week-long trace for the end-to-end check -----------------------------------

/// UTC midnight of 1995-07-03, a Monday.
constexpr std::int64_t kFixtureWeekStart = 804729600;

/// Path of a CLF trace spanning exactly seven complete days. By default a
/// generated fixture; the LOADSHAPE_NASA_TRACE environment variable points it
/// at a real log instead, from which the window [first midnight at or after
/// the first event, +7 days) is cut. `parse_epoch` maps one raw line to its
/// UTC event second (or -1 to skip) and is supplied by the caller so the cut
/// shares no code with the library.
template <class ParseEpoch>
std::filesystem::path week_trace(const std::filesystem::path& dir, ParseEpoch parse_epoch) {
  const char* real = std::getenv("LOADSHAPE_NASA_TRACE");
  if (real == nullptr || *real == '\0') {
    auto path = dir / "week.clf";
    write_diurnal_clf(path, kFixtureWeekStart, 7 * 24, 1995);
    return path;
  }

  std::ifstream in(real, std::ios::binary);
  if (!in) throw std::runtime_error(std::string("cannot read ") + real);
  std::int64_t first = -1;
  std::string line;
  while (std::getline(in, line)) {
    std::int64_t t = parse_epoch(line);
    if (t >= 0) {
      first = t;
      break;
    }
  }
  if (first < 0) throw std::runtime_error("no parseable events in trace");
  std::int64_t lo = (first / 86400 + (first % 86400 != 0)) * 86400;
  std::int64_t hi = lo + 7 * 86400;

  auto path = dir / "week.clf";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  in.clear();
  in.seekg(0);
  while (std::getline(in, line)) {
    std::int64_t t = parse_epoch(line);
    if (t >= lo && t < hi) out << line << "\n";
  }
  if (!out.flush()) throw std::runtime_error("short write to " + path.string());
  return path;
}

// -- clustering inputs -----------------------------------------------------------

struct Blobs {
  Eigen::MatrixXd rows;
  std::vector<int> labels;
};

/// `k` Gaussian clusters of `per` points each in `dim` dimensions. Centers are
/// drawn uniformly and redrawn until pairwise distances exceed 8 * spread, so
/// the intended labeling is unambiguous.
inline Blobs make_blobs(int k, int per, int dim, double spread, std::uint64_t seed) {
  auto g = loadshape::rng::engine(seed);
  Eigen::MatrixXd centers(k, dim);
  for (int attempt = 0;; ++attempt) {
    if (attempt > 1000) throw std::runtime_error("could not separate blob centers");
    for (int c = 0; c < k; ++c)
      for (int d = 0; d < dim; ++d) centers(c, d) = loadshape::rng::uniform(g, -10.0, 10.0);
    double closest = std::numeric_limits<double>::infinity();
    for (int a = 0; a < k; ++a)
      for (int b = a + 1; b < k; ++b)
        closest = std::min(closest, (centers.row(a) - centers.row(b)).norm());
    if (k < 2 || closest > 8.0 * spread) break;
  }

  Blobs out;
  out.rows.resize(k * per, dim);
  out.labels.resize(std::size_t(k) * std::size_t(per));
  for (int i = 0; i < k * per; ++i) {
    int c = i % k;
    out.labels[std::size_t(i)] = c;
    for (int d = 0; d < dim; ++d)
      out.rows(i, d) = centers(c, d) + loadshape::rng::gaussian(g, 0.0, spread);
  }
  return out;
}

}  // namespace fixtures
