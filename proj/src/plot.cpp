#include "corrnet/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace corrnet {

namespace {

constexpr double kWidth = 720, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 30, kBottom = 50;
constexpr double kFloor = -16;  // log10 floor for zero values

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

double safe_log(double v) { return v > 0 ? std::max(std::log10(v), kFloor) : kFloor; }

}  // namespace

SweepTable sweep_table(const SweepResult& sr) {
  SweepTable tab;
  tab.c_norm = sr.c_norm;
  for (const auto& r : sr.records) {
    tab.t.push_back(r.t);
    tab.diff.push_back(r.diff);
    tab.tol.push_back(r.tol);
  }
  return tab;
}

std::string sweep_svg(const SweepTable& table, const std::vector<TInterval>& regions, std::optional<double> t0) {
  double lo = 0, hi = 0;
  bool any = false;
  auto include = [&](double y) {
    if (!std::isfinite(y)) return;
    lo = any ? std::min(lo, y) : y;
    hi = any ? std::max(hi, y) : y;
    any = true;
  };
  for (double d : table.diff) include(safe_log(d));
  for (const auto& t : table.tol)
    if (t) include(safe_log(*t));
  if (!any) lo = -1, hi = 0;
  lo = std::floor(lo);
  hi = std::ceil(hi);
  if (hi <= lo) hi = lo + 1;

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double t) { return kLeft + pw * std::clamp(t, 0.0, 1.0); };
  auto py = [&](double y) { return kTop + ph * (hi - y) / (hi - lo); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& r : regions)
    os << "<rect x=\"" << fixed(px(r.lo)) << "\" y=\"" << fixed(kTop) << "\" width=\"" << fixed(px(r.hi) - px(r.lo))
       << "\" height=\"" << fixed(ph) << "\" fill=\"#cfe3f7\"/>\n";
  os << "<rect x=\"" << fixed(kLeft) << "\" y=\"" << fixed(kTop) << "\" width=\"" << fixed(pw) << "\" height=\""
     << fixed(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 10; ++k) {
    double t = k / 10.0;
    os << "<text x=\"" << fixed(px(t)) << "\" y=\"" << fixed(kTop + ph + 18)
       << "\" font-size=\"11\" text-anchor=\"middle\">" << fixed(t).substr(0, 3) << "</text>\n";
  }
  int step = std::max(1, static_cast<int>(std::ceil((hi - lo) / 8)));
  for (int e = static_cast<int>(lo); e <= static_cast<int>(hi); e += step)
    os << "<text x=\"" << fixed(kLeft - 6) << "\" y=\"" << fixed(py(e) + 4)
       << "\" font-size=\"11\" text-anchor=\"end\">1e" << e << "</text>\n";
  os << "<text x=\"" << fixed(kLeft + pw / 2) << "\" y=\"" << fixed(kHeight - 10)
     << "\" font-size=\"13\" text-anchor=\"middle\">t</text>\n";

  auto polyline = [&](const std::vector<std::optional<double>>& ys, const char* colour, const char* dash) {
    std::string pts;
    auto flush = [&] {
      if (!pts.empty())
        os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\"" << dash << " points=\""
           << pts << "\"/>\n";
      pts.clear();
    };
    for (size_t i = 0; i < ys.size() && i < table.t.size(); ++i) {
      if (!ys[i] || !std::isfinite(*ys[i])) {
        flush();
        continue;
      }
      pts += (pts.empty() ? "" : " ") + fixed(px(table.t[i])) + "," + fixed(py(safe_log(*ys[i])));
    }
    flush();
  };
  std::vector<std::optional<double>> diff(table.diff.begin(), table.diff.end());
  polyline(diff, "#1f4e9c", "");
  polyline(table.tol, "#c0392b", " stroke-dasharray=\"5,3\"");
  if (t0)
    os << "<line x1=\"" << fixed(px(*t0)) << "\" x2=\"" << fixed(px(*t0)) << "\" y1=\"" << fixed(kTop) << "\" y2=\""
       << fixed(kTop + ph) << "\" stroke=\"#2e7d32\" stroke-dasharray=\"2,2\"/>\n";
  os << "<text x=\"" << fixed(kLeft + 8) << "\" y=\"" << fixed(kTop - 10)
     << "\" font-size=\"12\" fill=\"#1f4e9c\">diff_t</text>\n";
  os << "<text x=\"" << fixed(kLeft + 60) << "\" y=\"" << fixed(kTop - 10)
     << "\" font-size=\"12\" fill=\"#c0392b\">tol_t</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace corrnet
