#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "loadshape/errors.hpp"
#include "loadshape/http.hpp"

namespace loadshape {

/// Download a URL into a unique temp file; used by read_source for direct
/// URL ingestion.
std::filesystem::path fetch_url_to_temp(const std::string& url) {
  auto [host, path] = http::split_url(url);
  httplib::Client client(host);
  client.set_connection_timeout(10);
  client.set_read_timeout(120);
  client.set_follow_location(true);

  auto res = client.Get(path);
  if (!res) throw HttpError(0, "no response from " + host);
  if (res->status != 200) throw HttpError(res->status, url);

  static std::mt19937_64 name_rng{std::random_device{}()};
  auto dir = std::filesystem::temp_directory_path();
  std::filesystem::path file =
      dir / ("loadshape-" + std::to_string(name_rng()) + ".download");
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + file.string());
  out.write(res->body.data(), std::streamsize(res->body.size()));
  if (!out) throw IoError("short write to " + file.string());
  return file;
}

}  // namespace loadshape
