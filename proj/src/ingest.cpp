#include "loadshape/ingest.hpp"

#include <zlib.h>

#include <cstdio>
#include <fstream>
#include <regex>
#include <stdexcept>

#include "loadshape/calendar.hpp"
#include "loadshape/errors.hpp"

namespace loadshape {

void SourceDescriptor::validate() const {
  if (format == SourceFormat::summary && !bucket_width)
    throw std::invalid_argument("summary sources need a bucket_width");
  if (format == SourceFormat::clf && bucket_width)
    throw std::invalid_argument("bucket_width only applies to summary sources");
  if (bucket_width && *bucket_width <= 0)
    throw std::invalid_argument("bucket_width must be positive");
}

SummaryRecord parse_summary_record(std::string_view line, std::int64_t bucket_start,
                                   const SourceDescriptor& desc) {
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.remove_suffix(1);

  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    std::size_t start = pos;
    while (pos < line.size() && line[pos] != ' ') ++pos;
    if (pos > start) fields.push_back(line.substr(start, pos - start));
  }
  if (fields.size() < 3) throw MalformedLine(0, "expected `project page count [bytes]`");

  std::string_view count_field = fields[2];
  std::int64_t count = 0;
  for (char c : count_field) {
    if (c < '0' || c > '9') throw MalformedLine(0, "count is not a non-negative integer");
    count = count * 10 + (c - '0');
  }

  if (desc.bucket_width && bucket_start % *desc.bucket_width != 0)
    throw MalformedLine(0, "bucket start not aligned to bucket width");

  SummaryRecord rec;
  rec.bucket_start = bucket_start;
  rec.count = count;
  rec.labels.emplace_back("project", std::string(fields[0]));
  rec.labels.emplace_back("page", std::string(fields[1]));
  return rec;
}

std::optional<std::int64_t> bucket_start_from_path(const std::filesystem::path& path) {
  std::string name = path.filename().string();

  static const std::regex dump_name(R"(pageviews-(\d{4})(\d{2})(\d{2})-(\d{2})\d{4}(\.gz)?)");
  std::smatch m;
  if (std::regex_match(name, m, dump_name)) {
    try {
      return cal::civil_to_epoch(std::stoi(m[1]), unsigned(std::stoi(m[2])),
                                 unsigned(std::stoi(m[3])), std::stoi(m[4]), 0, 0);
    } catch (const std::invalid_argument&) {
      return std::nullopt;
    }
  }

  // cache layout: .../yyyy/mm/dd/hh.gz
  static const std::regex cache_name(R"((\d{2})(\.gz)?)");
  if (std::regex_match(name, m, cache_name)) {
    auto parent = path.parent_path();
    std::string dd = parent.filename().string();
    std::string mm = parent.parent_path().filename().string();
    std::string yyyy = parent.parent_path().parent_path().filename().string();
    static const std::regex two(R"(\d{2})"), four(R"(\d{4})");
    if (std::regex_match(dd, two) && std::regex_match(mm, two) && std::regex_match(yyyy, four)) {
      try {
        return cal::civil_to_epoch(std::stoi(yyyy), unsigned(std::stoi(mm)),
                                   unsigned(std::stoi(dd)), std::stoi(name.substr(0, 2)), 0, 0);
      } catch (const std::invalid_argument&) {
        return std::nullopt;
      }
    }
  }
  return std::nullopt;
}

struct LineReader::Impl {
  gzFile gz = nullptr;
  std::ifstream plain;
  bool use_gz = false;
  std::string buffer;
};

LineReader::LineReader(const std::filesystem::path& path, Compression compression)
    : impl_(new Impl) {
  if (compression == Compression::gzip) {
    {
      std::ifstream probe(path, std::ios::binary);
      if (!probe) {
        delete impl_;
        throw IoError("cannot open " + path.string());
      }
      unsigned char magic[2] = {0, 0};
      probe.read(reinterpret_cast<char*>(magic), 2);
      if (probe.gcount() == 2 && (magic[0] != 0x1f || magic[1] != 0x8b)) {
        delete impl_;
        throw DecompressionError(path.string() + " is not gzip data");
      }
    }
    impl_->gz = gzopen(path.string().c_str(), "rb");
    if (!impl_->gz) {
      delete impl_;
      throw IoError("cannot open " + path.string());
    }
    impl_->use_gz = true;
  } else {
    impl_->plain.open(path, std::ios::binary);
    if (!impl_->plain) {
      delete impl_;
      throw IoError("cannot open " + path.string());
    }
  }
}

LineReader::~LineReader() {
  if (impl_->gz) gzclose(impl_->gz);
  delete impl_;
}

bool LineReader::next(std::string& line) {
  if (!impl_->use_gz) {
    if (!std::getline(impl_->plain, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }
  line.clear();
  char chunk[4096];
  while (true) {
    if (gzgets(impl_->gz, chunk, sizeof(chunk)) == nullptr) {
      int err = 0;
      const char* msg = gzerror(impl_->gz, &err);
      if (err != Z_OK && err != Z_STREAM_END) throw DecompressionError(msg ? msg : "gzip error");
      return !line.empty();
    }
    line += chunk;
    if (!line.empty() && line.back() == '\n') {
      line.pop_back();
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return true;
    }
    if (line.size() > (1u << 22)) throw MalformedLine(0, "line longer than 4 MiB");
  }
}

namespace {

bool is_url(const std::string& s) {
  return s.rfind("http://", 0) == 0 || s.rfind("https://", 0) == 0;
}

bool is_blank(std::string_view line) {
  for (char c : line)
    if (c != ' ' && c != '\t' && c != '\r') return false;
  return true;
}

}  // namespace

std::filesystem::path fetch_url_to_temp(const std::string& url);  // http_io.cpp

ReadStats read_source(const std::string& path_or_url, const SourceDescriptor& desc,
                      const RecordVisitor& visit) {
  desc.validate();

  std::filesystem::path path;
  std::filesystem::path temp;
  if (is_url(path_or_url)) {
    temp = fetch_url_to_temp(path_or_url);
    path = temp;
  } else {
    path = path_or_url;
    if (!std::filesystem::exists(path)) throw IoError("no such file: " + path_or_url);
  }

  std::optional<std::int64_t> bucket = desc.bucket_start;
  if (desc.format == SourceFormat::summary && !bucket) {
    bucket = bucket_start_from_path(path);
    if (!bucket)
      throw Error("cannot derive bucket start for " + path.string() +
                                  "; set SourceDescriptor::bucket_start");
  }

  struct TempGuard {
    std::filesystem::path p;
    ~TempGuard() {
      if (!p.empty()) std::filesystem::remove(p);
    }
  } guard{temp};

  ReadStats stats;
  LineReader reader(path, desc.compression);
  std::string line;
  std::uint64_t line_no = 0;
  while (reader.next(line)) {
    ++line_no;
    ++stats.total;
    if (is_blank(line)) {
      ++stats.skipped;
      continue;
    }
    try {
      if (desc.format == SourceFormat::clf) {
        auto ev = parse_clf_line(line, desc.timezone_policy);
        if (!ev) {
          ++stats.skipped;
          continue;
        }
        ++stats.parsed;
        if (visit.on_event) visit.on_event(*ev);
      } else {
        SummaryRecord rec = parse_summary_record(line, *bucket, desc);
        ++stats.parsed;
        if (visit.on_summary) visit.on_summary(rec);
      }
    } catch (const MalformedLine& e) {
      if (desc.strict)
        throw MalformedLine(line_no, "line " + std::to_string(line_no) + ": " + e.reason());
      ++stats.malformed;
    }
  }
  return stats;
}

}  // namespace loadshape
