#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "topodyn/entropy.hpp"
#include "topodyn/properties.hpp"

namespace topodyn::svg {

/// Log-count growth plot for one or more entropy estimates.
inline std::string count_table_plot(const std::vector<EntropyEstimate>& tables,
                                    const std::vector<std::string>& labels) {
  const int W = 640, H = 420, ml = 70, mb = 50, mt = 30, mr = 20;
  double xmax = 1, ymax = 1;
  for (const auto& t : tables) {
    for (long n : t.ns) xmax = std::max(xmax, static_cast<double>(n));
    for (auto c : t.counts)
      ymax = std::max(ymax, std::log(static_cast<double>(c)));
  }
  auto X = [&](double n) { return ml + (W - ml - mr) * n / xmax; };
  auto Y = [&](double v) { return H - mb - (H - mb - mt) * v / ymax; };
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  std::ostringstream s;
  s << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='"
    << H << "'>\n";
  s << "<rect width='100%' height='100%' fill='white'/>\n";
  s << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - mr
    << "' y2='" << H - mb << "' stroke='black'/>\n";
  s << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << ml << "' y2='"
    << mt << "' stroke='black'/>\n";
  s << "<text x='" << (W / 2) << "' y='" << H - 12
    << "' font-size='13' text-anchor='middle'>window length n</text>\n";
  s << "<text x='16' y='" << (H / 2)
    << "' font-size='13' transform='rotate(-90 16 " << (H / 2)
    << ")' text-anchor='middle'>ln s(n)</text>\n";
  for (std::size_t t = 0; t < tables.size(); ++t) {
    std::ostringstream pts;
    for (std::size_t i = 0; i < tables[t].ns.size(); ++i) {
      double x = X(static_cast<double>(tables[t].ns[i]));
      double y = Y(std::log(static_cast<double>(tables[t].counts[i])));
      pts << x << "," << y << " ";
      s << "<circle cx='" << x << "' cy='" << y << "' r='3' fill='"
        << colors[t % 4] << "'/>\n";
    }
    s << "<polyline points='" << pts.str() << "' fill='none' stroke='"
      << colors[t % 4] << "'/>\n";
    s << "<text x='" << W - mr - 6 << "' y='" << mt + 16 * (t + 1)
      << "' font-size='12' text-anchor='end' fill='" << colors[t % 4] << "'>"
      << labels[t] << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

/// The five-condition implication diagram annotated with per-system
/// verdicts: (1) zero entropy, (2) minimal, (3) equicontinuous,
/// (4) uniformly rigid, (5) uniquely ergodic.
inline std::string implication_diagram(
    const std::vector<std::string>& systems,
    const std::vector<std::array<VerdictStatus, 5>>& verdicts) {
  const char* names[5] = {"(1) zero entropy", "(2) minimal",
                          "(3) equicontinuous", "(4) uniformly rigid",
                          "(5) uniquely ergodic"};
  const int nx[5] = {120, 400, 680, 120, 400};
  const int ny[5] = {80, 80, 80, 300, 300};
  auto mark = [](VerdictStatus v) {
    switch (v) {
      case VerdictStatus::holds_at_scale: return "+";
      case VerdictStatus::fails_with_witness: return "-";
      default: return "?";
    }
  };
  std::ostringstream s;
  s << "<svg xmlns='http://www.w3.org/2000/svg' width='840' height='460'>\n";
  s << "<rect width='100%' height='100%' fill='white'/>\n";
  s << "<defs><marker id='a' markerWidth='10' markerHeight='10' refX='9' "
       "refY='3' orient='auto'><path d='M0,0 L9,3 L0,6 z'/></marker></defs>\n";
  auto arrow = [&](int f, int t, int dy, const std::string& label) {
    s << "<line x1='" << nx[f] << "' y1='" << ny[f] + dy << "' x2='" << nx[t]
      << "' y2='" << ny[t] + dy
      << "' stroke='black' marker-end='url(#a)'/>\n";
    if (!label.empty())
      s << "<text x='" << (nx[f] + nx[t]) / 2 << "' y='"
        << (ny[f] + ny[t]) / 2 + dy - 6 << "' font-size='11' "
        << "text-anchor='middle'>" << label << "</text>\n";
  };
  arrow(0, 1, -6, "");
  arrow(1, 0, 6, "");
  arrow(0, 3, 0, "");
  arrow(3, 2, 0, "");
  arrow(2, 0, 0, "");
  arrow(4, 1, 0, "");
  arrow(2, 4, 40, "with (2)");
  for (int k = 0; k < 5; ++k) {
    s << "<rect x='" << nx[k] - 95 << "' y='" << ny[k] - 26 << "' width='190' "
      << "height='" << (30 + 15 * systems.size())
      << "' fill='#f5f5f5' stroke='black'/>\n";
    s << "<text x='" << nx[k] << "' y='" << ny[k] - 8
      << "' font-size='13' text-anchor='middle' font-weight='bold'>"
      << names[k] << "</text>\n";
    for (std::size_t i = 0; i < systems.size(); ++i)
      s << "<text x='" << nx[k] << "' y='" << ny[k] + 8 + 15 * i
        << "' font-size='11' text-anchor='middle'>" << systems[i] << ": "
        << mark(verdicts[i][k]) << "</text>\n";
  }
  s << "<text x='420' y='440' font-size='12' text-anchor='middle'>"
       "implications hold under the gluing orbit property; + holds at scale, "
       "- fails with witness, ? inconclusive</text>\n";
  s << "</svg>\n";
  return s.str();
}

}  // namespace topodyn::svg
