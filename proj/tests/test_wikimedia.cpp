#include <atomic>
#include <filesystem>
#include <string>
#include <thread>

#include "loadshape/calendar.hpp"
#include "loadshape/errors.hpp"
#include "loadshape/http.hpp"
#include "loadshape/wikimedia.hpp"

#include <zlib.h>

#include <doctest.h>

using namespace loadshape;

namespace {

std::string gzip_payload(const std::string& body) {
  // Compress into a memory buffer via zlib's gzip wrapper settings.
  z_stream zs{};
  deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8,
               Z_DEFAULT_STRATEGY);
  std::string out(body.size() + 128, '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(body.data()));
  zs.avail_in = uInt(body.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = uInt(out.size());
  deflate(&zs, Z_FINISH);
  out.resize(out.size() - zs.avail_out);
  deflateEnd(&zs);
  return out;
}

struct TestServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::atomic<int> hits{0};

  explicit TestServer(bool with_gap = false) {
    std::string payload = gzip_payload("en Main_Page 3 0\n");
    server.Get(R"(/pv/(\d{4})/(\d{4}-\d{2})/(pageviews-\d{8}-\d{6}\.gz))",
               [this, payload, with_gap](const httplib::Request& req,
                                         httplib::Response& res) {
                 ++hits;
                 if (with_gap &&
                     req.matches[3] == "pageviews-20070830-140000.gz") {
                   res.status = 404;
                   return;
                 }
                 res.set_content(payload, "application/octet-stream");
               });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }

  ~TestServer() {
    server.stop();
    thread.join();
  }

  std::string base_url() const {
    return "http://127.0.0.1:" + std::to_string(port) + "/pv";
  }
};

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static int n = 0;
    path = std::filesystem::temp_directory_path() /
           ("wm-test-" + std::to_string(::getpid()) + "-" + std::to_string(n++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("fetch downloads every hour in the range and caches them") {
  TestServer srv;
  TempDir cache;
  FetchConfig cfg;
  cfg.base_url = srv.base_url();
  std::int64_t start = cal::civil_to_epoch(2007, 8, 30, 12, 0, 0);
  std::int64_t end = cal::civil_to_epoch(2007, 8, 30, 15, 0, 0);  // exclusive

  auto result = fetch_wikimedia(cfg, start, end, cache.path);
  CHECK(result.downloaded == 3);
  CHECK(result.cached == 0);
  REQUIRE(result.files.size() == 3);
  for (const auto& f : result.files) CHECK(std::filesystem::exists(f));
  CHECK(srv.hits == 3);

  // A second sweep over a warm cache makes no requests at all.
  auto again = fetch_wikimedia(cfg, start, end, cache.path);
  CHECK(again.downloaded == 0);
  CHECK(again.cached == 3);
  CHECK(srv.hits == 3);
}

TEST_CASE("a missing hour surfaces as a partial range after the full sweep") {
  TestServer srv(/*with_gap=*/true);
  TempDir cache;
  FetchConfig cfg;
  cfg.base_url = srv.base_url();
  std::int64_t start = cal::civil_to_epoch(2007, 8, 30, 13, 0, 0);
  std::int64_t end = cal::civil_to_epoch(2007, 8, 30, 16, 0, 0);

  try {
    fetch_wikimedia(cfg, start, end, cache.path);
    FAIL("expected PartialRange");
  } catch (const PartialRange& e) {
    REQUIRE(e.missing().size() == 1);
    CHECK(e.missing()[0].find("2007-08-30T14") != std::string::npos);
  }
  // The other two hours were still fetched before the error was raised.
  CHECK(srv.hits == 3);
}

TEST_CASE("an empty or inverted range is rejected") {
  FetchConfig cfg;
  TempDir cache;
  std::int64_t t = cal::civil_to_epoch(2007, 8, 30, 13, 0, 0);
  CHECK_THROWS_AS(fetch_wikimedia(cfg, t, t - cal::kHour, cache.path),
                  std::invalid_argument);
}
