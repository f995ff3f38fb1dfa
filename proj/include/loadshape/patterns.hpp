#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "loadshape/polyfit.hpp"

namespace loadshape {

struct Pattern {
  std::string name;         // D1..D3, W1..W3, or user-defined
  std::string description;
  PolynomialModel model;    // cubic over hours [0,24) or quadratic over weekdays [1,8)
};

/// Named polynomial workload shapes. builtin() carries the six reference
/// patterns; user patterns may be added under unused names.
class PatternLibrary {
 public:
  static PatternLibrary builtin();

  const Pattern& at(const std::string& name) const;  // throws UnknownPattern
  bool contains(const std::string& name) const;
  void add(Pattern p);  // throws std::invalid_argument on duplicate names
  const std::vector<Pattern>& entries() const { return entries_; }

 private:
  std::vector<Pattern> entries_;
};

/// JSON round trip; coefficient values survive byte-exactly (shortest
/// round-trip float formatting on both sides).
void write_library_json(const PatternLibrary& lib, const std::filesystem::path& path);
PatternLibrary read_library_json(const std::filesystem::path& path);

}  // namespace loadshape
