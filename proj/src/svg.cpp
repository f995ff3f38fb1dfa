#include "loadshape/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "loadshape/errors.hpp"

namespace loadshape::svg {

namespace {

constexpr int kWidth = 640, kHeight = 400;
constexpr int kMarginLeft = 56, kMarginRight = 16, kMarginTop = 40, kMarginBottom = 48;
constexpr const char* kPalette[] = {"#4878d0", "#ee854a", "#6acc64", "#d65f5f",
                                    "#956cb4", "#8c613c"};

struct Frame {
  double lo, hi;  // value range mapped onto the plot height

  double y(double v) const {
    double t = (v - lo) / (hi - lo);
    return kHeight - kMarginBottom - t * (kHeight - kMarginTop - kMarginBottom);
  }
};

Frame frame_for(double lo, double hi) {
  if (lo > 0) lo = 0;
  if (hi < 0) hi = 0;
  if (hi == lo) hi = lo + 1;
  double pad = (hi - lo) * 0.05;
  return {lo - (lo < 0 ? pad : 0), hi + pad};
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void open_chart(std::ostringstream& os, const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
     << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"15\">"
     << title << "</text>\n";
}

void axes(std::ostringstream& os, const Frame& f) {
  double y0 = f.y(0);
  os << "<line x1=\"" << kMarginLeft << "\" y1=\"" << num(y0) << "\" x2=\""
     << kWidth - kMarginRight << "\" y2=\"" << num(y0) << "\" stroke=\"#444\"/>\n";
  os << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\"" << kMarginLeft
     << "\" y2=\"" << kHeight - kMarginBottom << "\" stroke=\"#444\"/>\n";
  for (double v : {f.lo, f.hi, (f.lo + f.hi) / 2}) {
    os << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << num(f.y(v) + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << num(v)
       << "</text>\n";
  }
}

}  // namespace

std::string bar_chart(const std::vector<std::string>& labels,
                      const Eigen::Ref<const Eigen::VectorXd>& values, const std::string& title) {
  if (std::size_t(values.size()) != labels.size())
    throw LengthMismatch("bar chart labels do not match values");
  std::ostringstream os;
  open_chart(os, title);
  Frame f = frame_for(values.size() ? values.minCoeff() : 0, values.size() ? values.maxCoeff() : 1);
  axes(os, f);

  const double span = kWidth - kMarginLeft - kMarginRight;
  const double slot = span / std::max<double>(1, double(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    double x = kMarginLeft + double(i) * slot + slot * 0.15;
    double top = f.y(std::max(0.0, values[i]));
    double bottom = f.y(std::min(0.0, values[i]));
    os << "<rect x=\"" << num(x) << "\" y=\"" << num(top) << "\" width=\"" << num(slot * 0.7)
       << "\" height=\"" << num(std::max(0.5, bottom - top)) << "\" fill=\"" << kPalette[0]
       << "\"/>\n";
    os << "<text x=\"" << num(x + slot * 0.35) << "\" y=\"" << kHeight - kMarginBottom + 16
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
       << labels[std::size_t(i)] << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string line_chart(const Eigen::Ref<const Eigen::VectorXd>& x,
                       const std::vector<Series>& series, const std::string& title) {
  std::ostringstream os;
  open_chart(os, title);
  double lo = 0, hi = 1;
  bool first = true;
  for (const auto& s : series) {
    if (s.y.size() == 0) continue;
    lo = first ? s.y.minCoeff() : std::min(lo, s.y.minCoeff());
    hi = first ? s.y.maxCoeff() : std::max(hi, s.y.maxCoeff());
    first = false;
  }
  Frame f = frame_for(lo, hi);
  axes(os, f);

  const double span = kWidth - kMarginLeft - kMarginRight;
  const double x_lo = x.minCoeff(), x_hi = x.maxCoeff();
  auto px = [&](double v) {
    return kMarginLeft + (x_hi > x_lo ? (v - x_lo) / (x_hi - x_lo) : 0.5) * span;
  };

  int color = 0;
  double legend_y = kMarginTop;
  for (const auto& s : series) {
    if (s.y.size() != x.size()) throw LengthMismatch("series length does not match x grid");
    const char* c = kPalette[color++ % 6];
    if (s.points) {
      for (Eigen::Index i = 0; i < x.size(); ++i)
        os << "<circle cx=\"" << num(px(x[i])) << "\" cy=\"" << num(f.y(s.y[i]))
           << "\" r=\"3\" fill=\"" << c << "\"/>\n";
    } else {
      os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
      for (Eigen::Index i = 0; i < x.size(); ++i)
        os << num(px(x[i])) << ',' << num(f.y(s.y[i])) << ' ';
      os << "\"/>\n";
    }
    os << "<text x=\"" << kWidth - kMarginRight - 4 << "\" y=\"" << num(legend_y += 14)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << c
       << "\">" << s.name << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string grouped_bar_chart(const std::vector<std::string>& groups,
                              const std::vector<std::string>& buckets,
                              const Eigen::Ref<const Eigen::MatrixXd>& values,
                              const std::string& title) {
  if (std::size_t(values.rows()) != groups.size() || std::size_t(values.cols()) != buckets.size())
    throw LengthMismatch("grouped bar chart shape mismatch");
  std::ostringstream os;
  open_chart(os, title);
  Frame f = frame_for(std::min(0.0, values.size() ? values.minCoeff() : 0),
                      values.size() ? values.maxCoeff() : 1);
  axes(os, f);

  const double span = kWidth - kMarginLeft - kMarginRight;
  const double slot = span / std::max<double>(1, double(groups.size()));
  for (Eigen::Index g = 0; g < values.rows(); ++g) {
    double base = kMarginLeft + double(g) * slot;
    double bar = slot * 0.8 / double(values.cols());
    for (Eigen::Index b = 0; b < values.cols(); ++b) {
      double x = base + slot * 0.1 + double(b) * bar;
      double top = f.y(std::max(0.0, values(g, b)));
      double bottom = f.y(std::min(0.0, values(g, b)));
      os << "<rect x=\"" << num(x) << "\" y=\"" << num(top) << "\" width=\"" << num(bar * 0.9)
         << "\" height=\"" << num(std::max(0.5, bottom - top)) << "\" fill=\""
         << kPalette[std::size_t(b) % 6] << "\"/>\n";
    }
    os << "<text x=\"" << num(base + slot / 2) << "\" y=\"" << kHeight - kMarginBottom + 16
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
       << groups[std::size_t(g)] << "</text>\n";
  }
  double legend_y = kMarginTop;
  for (std::size_t b = 0; b < buckets.size(); ++b)
    os << "<text x=\"" << kWidth - kMarginRight - 4 << "\" y=\"" << num(legend_y += 14)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\""
       << kPalette[b % 6] << "\">" << buckets[b] << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

void write(const std::string& svg, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << svg;
  if (!out) throw IoError("short write to " + path.string());
}

}  // namespace loadshape::svg
