#include <Eigen/Dense>

#include <cstdint>
#include <fstream>
#include <string>

#include "loadshape/association.hpp"
#include "loadshape/calendar.hpp"
#include "loadshape/errors.hpp"

#include "fixtures.hpp"

#include <doctest.h>

using namespace loadshape;

namespace {

// 1995-07-03, a Monday.
const std::int64_t kMon = fixtures::kFixtureWeekStart;

/// Two weeks of one dataset: week 0 labeled W0, week 1 labeled W1; days
/// alternate daily labels D0, D1 starting with D0 on each Monday.
LabeledRows sample_daily() {
  LabeledRows daily;
  daily.label_names = {"D1", "D2"};
  for (int d = 0; d < 14; ++d) {
    daily.rows.push_back({"a", kMon + std::int64_t(d) * cal::kDay});
    daily.labels.push_back(d % 2);
  }
  return daily;
}

LabeledRows sample_weekly() {
  LabeledRows weekly;
  weekly.label_names = {"W1", "W2"};
  weekly.rows.push_back({"a", kMon});
  weekly.labels.push_back(0);
  weekly.rows.push_back({"a", kMon + 7 * cal::kDay});
  weekly.labels.push_back(1);
  return weekly;
}

}  // namespace

TEST_CASE("association joins days into their dataset's week") {
  FrequencyTable t = association_table(sample_daily(), sample_weekly());
  CHECK(t.matched_days == 14);
  REQUIRE(t.row_labels == std::vector<std::string>{"W1", "W2"});
  REQUIRE(t.col_labels == std::vector<std::string>{"D1", "D2"});
  // Each week holds 4 even-offset and 3 odd-offset days: 4/14 and 3/14.
  CHECK(t.percentages(0, 0) == doctest::Approx(100.0 * 4 / 14).epsilon(1e-9));
  CHECK(t.percentages(0, 1) == doctest::Approx(100.0 * 3 / 14).epsilon(1e-9));
  CHECK(t.percentages.sum() == doctest::Approx(100.0).epsilon(1e-9));
  CHECK(t.row_totals.sum() == doctest::Approx(100.0).epsilon(1e-9));
  CHECK(t.col_totals.sum() == doctest::Approx(100.0).epsilon(1e-9));
  // One dataset contributes to every populated cell.
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(t.dataset_counts(i, j) == 1);
}

TEST_CASE("days without a clustered week are ignored") {
  LabeledRows daily = sample_daily();
  // Days of a third week with no weekly row, plus a foreign dataset.
  daily.rows.push_back({"a", kMon + 14 * cal::kDay});
  daily.labels.push_back(0);
  daily.rows.push_back({"b", kMon});
  daily.labels.push_back(1);
  FrequencyTable t = association_table(daily, sample_weekly());
  CHECK(t.matched_days == 14);
}

TEST_CASE("disjoint inputs throw NoOverlap") {
  LabeledRows daily = sample_daily();
  LabeledRows weekly;
  weekly.label_names = {"W1"};
  weekly.rows.push_back({"other", kMon});
  weekly.labels.push_back(0);
  CHECK_THROWS_AS(association_table(daily, weekly), NoOverlap);
}

TEST_CASE("weekday and weekend buckets split cluster members") {
  LabeledRows daily = sample_daily();
  TimeDependence td = time_dependence(daily, TimeScheme::weekday_weekend);
  REQUIRE(td.buckets == std::vector<std::string>{"weekday", "weekend"});
  REQUIRE(td.labels == std::vector<std::string>{"D1", "D2"});
  // Label 0 sits on even offsets: Mon Wed Fri Sun -> 6 weekday, 2 weekend
  // per fortnight plan (Mon,Wed,Fri,Sun,Tue,Thu,Sat pattern repeats).
  // Row sums are always 100.
  CHECK(td.percentages.row(0).sum() == doctest::Approx(100.0).epsilon(1e-9));
  CHECK(td.percentages.row(1).sum() == doctest::Approx(100.0).epsilon(1e-9));
  // Even offsets from Monday: Mon(0) Wed(2) Fri(4) Sun(6) + next week's
  // Tue(8) Thu(10) Sat(12): 5 weekdays of 7 -> ~71.4%.
  CHECK(td.percentages(0, 0) == doctest::Approx(100.0 * 5 / 7).epsilon(1e-9));
  CHECK(td.percentages(1, 0) == doctest::Approx(100.0 * 5 / 7).epsilon(1e-9));
}

TEST_CASE("seasonal buckets follow the origin month") {
  LabeledRows rows;
  rows.label_names = {"C"};
  // One member per meteorological season: Jan, Apr, Jul, Oct of 2005.
  for (int month : {1, 4, 7, 10}) {
    rows.rows.push_back({"a", cal::civil_to_epoch(2005, month, 10, 0, 0, 0)});
    rows.labels.push_back(0);
  }
  TimeDependence td = time_dependence(rows, TimeScheme::season);
  REQUIRE(td.buckets == std::vector<std::string>{"winter", "spring", "summer", "autumn"});
  for (int b = 0; b < 4; ++b) CHECK(td.percentages(0, b) == doctest::Approx(25.0).epsilon(1e-9));

  // December belongs to winter under the meteorological convention but to Q4
  // under calendar quarters.
  LabeledRows dec;
  dec.label_names = {"C"};
  dec.rows.push_back({"a", cal::civil_to_epoch(2005, 12, 5, 0, 0, 0)});
  dec.labels.push_back(0);
  TimeDependence met = time_dependence(dec, TimeScheme::season, SeasonMode::meteorological);
  CHECK(met.percentages(0, 0) == 100.0);
  TimeDependence cq = time_dependence(dec, TimeScheme::season, SeasonMode::calendar_quarter);
  REQUIRE(cq.buckets.size() == 4);
  CHECK(cq.percentages(0, 3) == 100.0);
}

TEST_CASE("frequency and time dependence csv exports") {
  auto dir = fixtures::scratch_dir("assoc-csv");
  FrequencyTable t = association_table(sample_daily(), sample_weekly());
  write_frequency_csv(t, dir / "f.csv");
  std::ifstream in(dir / "f.csv");
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line.find("W1") == std::string::npos);  // header names daily columns
  CHECK(line.find("D1") != std::string::npos);
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows >= 2);

  TimeDependence td = time_dependence(sample_daily(), TimeScheme::weekday_weekend);
  write_time_dependence_csv(td, dir / "t.csv");
  std::ifstream tin(dir / "t.csv");
  REQUIRE(std::getline(tin, line));
  CHECK(line.find("weekday") != std::string::npos);
}
