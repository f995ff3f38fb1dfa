#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <vector>

namespace loadshape::svg {

/// One labeled bar per value; negative values hang below the axis.
std::string bar_chart(const std::vector<std::string>& labels,
                      const Eigen::Ref<const Eigen::VectorXd>& values, const std::string& title);

struct Series {
  std::string name;
  Eigen::VectorXd y;
  bool points = false;  // draw markers instead of a line
};

/// Shared-x line/point chart; x runs over the given grid.
std::string line_chart(const Eigen::Ref<const Eigen::VectorXd>& x,
                       const std::vector<Series>& series, const std::string& title);

/// Grouped bars: one group per label, one bar per bucket within it.
std::string grouped_bar_chart(const std::vector<std::string>& groups,
                              const std::vector<std::string>& buckets,
                              const Eigen::Ref<const Eigen::MatrixXd>& values,
                              const std::string& title);

void write(const std::string& svg, const std::filesystem::path& path);

}  // namespace loadshape::svg
