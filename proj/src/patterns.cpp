#include <Eigen/Core>

#include "loadshape/patterns.hpp"

#include <fstream>

#include <json.hpp>

#include "loadshape/errors.hpp"

namespace loadshape {

namespace {

Pattern make(const char* name, const char* description, std::vector<double> coeffs, double lo,
             double hi) {
  Pattern p;
  p.name = name;
  p.description = description;
  p.model.degree = int(coeffs.size()) - 1;
  p.model.coefficients = Eigen::Map<Eigen::VectorXd>(coeffs.data(), Eigen::Index(coeffs.size()));
  p.model.domain_lo = lo;
  p.model.domain_hi = hi;
  p.model.rmse = 0;
  return p;
}

}  // namespace

PatternLibrary PatternLibrary::builtin() {
  // Reference shapes; daily cubics over hour-of-day, weekly quadratics over
  // ISO weekday. D2's leading coefficient is published as 0.000 and is
  // stored as written.
  PatternLibrary lib;
  lib.add(make("D1", "Daytime active with rapid decline", {-0.001, 0.029, -0.221, -0.728}, 0, 24));
  lib.add(make("D2", "Nighttime active", {0.000, 0.011, -0.214, 0.648}, 0, 24));
  lib.add(make("D3", "Daytime active with gradual decline", {-0.001, 0.031, -0.166, -0.708}, 0, 24));
  lib.add(make("W1", "Weekday Active", {0.041, -0.516, 1.299}, 1, 8));
  lib.add(make("W2", "Weekend Active", {0.005, 0.087, -0.535}, 1, 8));
  lib.add(make("W3", "Midweek Active", {-0.079, 0.352, 0.251}, 1, 8));
  return lib;
}

const Pattern& PatternLibrary::at(const std::string& name) const {
  for (const auto& p : entries_)
    if (p.name == name) return p;
  throw UnknownPattern("no pattern named `" + name + "`");
}

bool PatternLibrary::contains(const std::string& name) const {
  for (const auto& p : entries_)
    if (p.name == name) return true;
  return false;
}

void PatternLibrary::add(Pattern p) {
  if (contains(p.name)) throw std::invalid_argument("pattern `" + p.name + "` already exists");
  entries_.push_back(std::move(p));
}

void write_library_json(const PatternLibrary& lib, const std::filesystem::path& path) {
  auto arr = nlohmann::json::array();
  for (const auto& p : lib.entries()) {
    nlohmann::json e;
    e["name"] = p.name;
    e["description"] = p.description;
    e["degree"] = p.model.degree;
    e["coefficients"] = std::vector<double>(p.model.coefficients.begin(),
                                            p.model.coefficients.end());
    e["domain"] = {p.model.domain_lo, p.model.domain_hi};
    e["rmse"] = p.model.rmse;
    arr.push_back(std::move(e));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << nlohmann::json{{"patterns", std::move(arr)}}.dump(2) << "\n";
  if (!out) throw IoError("short write to " + path.string());
}

PatternLibrary read_library_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("bad pattern library in " + path.string() + ": " + e.what());
  }

  PatternLibrary lib;
  for (const auto& e : j.at("patterns")) {
    Pattern p;
    p.name = e.at("name").get<std::string>();
    p.description = e.at("description").get<std::string>();
    p.model.degree = e.at("degree").get<int>();
    auto coeffs = e.at("coefficients").get<std::vector<double>>();
    if (int(coeffs.size()) != p.model.degree + 1)
      throw Error("coefficient count does not match degree for `" + p.name + "`");
    p.model.coefficients =
        Eigen::Map<Eigen::VectorXd>(coeffs.data(), Eigen::Index(coeffs.size()));
    p.model.domain_lo = e.at("domain").at(0).get<double>();
    p.model.domain_hi = e.at("domain").at(1).get<double>();
    p.model.rmse = e.value("rmse", 0.0);
    lib.add(std::move(p));
  }
  return lib;
}

}  // namespace loadshape
