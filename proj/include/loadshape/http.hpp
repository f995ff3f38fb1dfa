#pragma once

// Eigen must be pulled in before httplib: one of httplib's transitive system
// headers defines a macro that mangles Eigen's internals when included first.
#include <Eigen/Core>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <string>
#include <utility>

namespace loadshape::http {

/// Split "https://host:port/some/path" into ("https://host:port", "/some/path").
inline std::pair<std::string, std::string> split_url(const std::string& url) {
  std::size_t scheme = url.find("://");
  std::size_t path = scheme == std::string::npos ? url.find('/') : url.find('/', scheme + 3);
  if (path == std::string::npos) return {url, "/"};
  return {url.substr(0, path), url.substr(path)};
}

}  // namespace loadshape::http
