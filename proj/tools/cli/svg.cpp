#include "cli/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <variant>

#include "cli/config.hpp"

namespace rpf::cli {

namespace {

constexpr std::array<const char*, 10> kPalette = {
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

constexpr double kCanvas = 640.0;
constexpr double kMargin = 24.0;

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Bounds {
  double x0 = std::numeric_limits<double>::infinity();
  double y0 = std::numeric_limits<double>::infinity();
  double x1 = -std::numeric_limits<double>::infinity();
  double y1 = -std::numeric_limits<double>::infinity();

  void add(Vec2 p, double pad = 0.0) {
    x0 = std::min(x0, p.x - pad);
    y0 = std::min(y0, p.y - pad);
    x1 = std::max(x1, p.x + pad);
    y1 = std::max(y1, p.y + pad);
  }
};

// World to canvas: uniform scale, y axis pointing up.
struct View {
  Bounds b;
  double scale = 1.0;

  explicit View(const Bounds& bounds) : b(bounds) {
    const double span = std::max({b.x1 - b.x0, b.y1 - b.y0, 1e-9});
    scale = (kCanvas - 2.0 * kMargin) / span;
  }
  double x(double wx) const { return kMargin + (wx - b.x0) * scale; }
  double y(double wy) const { return kCanvas - kMargin - (wy - b.y0) * scale; }
};

}  // namespace

std::string trajectory_svg(const TrajectoryDocument& doc) {
  if (doc.rows.empty()) throw ConfigError("trajectory: no records");
  const auto trails = doc.trails();

  Bounds bounds;
  for (const auto& ob : doc.obstacles) {
    if (const auto* c = std::get_if<Circle>(&ob.shape)) {
      bounds.add(c->center, c->radius);
    } else {
      const auto& r = std::get<Rect>(ob.shape);
      bounds.add(r.min);
      bounds.add(r.max);
    }
  }
  for (const auto& spawn : doc.robots) {
    bounds.add(spawn.start, 0.3);
    bounds.add(spawn.goal, 0.3);
  }
  for (const auto& trail : trails) {
    for (const Vec2& p : trail) bounds.add(p);
  }
  const View v(bounds);

  std::ostringstream s;
  s.precision(6);
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kCanvas << "\" height=\""
    << kCanvas << "\" viewBox=\"0 0 " << kCanvas << ' ' << kCanvas << "\">\n";
  s << "<title>" << escape(doc.scenario) << "</title>\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  s << "<g id=\"obstacles\" fill=\"#dddddd\" stroke=\"#333333\" stroke-width=\"1\">\n";
  for (const auto& ob : doc.obstacles) {
    if (const auto* c = std::get_if<Circle>(&ob.shape)) {
      s << "<circle cx=\"" << v.x(c->center.x) << "\" cy=\"" << v.y(c->center.y) << "\" r=\""
        << c->radius * v.scale << "\"/>\n";
    } else {
      const auto& r = std::get<Rect>(ob.shape);
      s << "<rect x=\"" << v.x(r.min.x) << "\" y=\"" << v.y(r.max.y) << "\" width=\""
        << (r.max.x - r.min.x) * v.scale << "\" height=\"" << (r.max.y - r.min.y) * v.scale
        << "\" fill=\"none\" stroke-width=\"2\"/>\n";
    }
  }
  s << "</g>\n";

  s << "<g id=\"trails\" fill=\"none\" stroke-width=\"1.5\">\n";
  for (std::size_t i = 0; i < trails.size(); ++i) {
    const char* colour = kPalette[i % kPalette.size()];
    s << "<polyline class=\"trail\" data-robot=\"" << i << "\" stroke=\"" << colour
      << "\" points=\"";
    for (const Vec2& p : trails[i]) s << v.x(p.x) << ',' << v.y(p.y) << ' ';
    s << "\"/>\n";
  }
  s << "</g>\n";

  s << "<g id=\"markers\" stroke-width=\"1.5\">\n";
  const double m = 5.0;
  for (std::size_t i = 0; i < doc.robots.size(); ++i) {
    const char* colour = kPalette[i % kPalette.size()];
    const Vec2 a = doc.robots[i].start;
    const Vec2 g = doc.robots[i].goal;
    s << "<circle class=\"start\" cx=\"" << v.x(a.x) << "\" cy=\"" << v.y(a.y) << "\" r=\"" << m
      << "\" fill=\"none\" stroke=\"" << colour << "\"/>\n";
    s << "<path class=\"goal\" stroke=\"" << colour << "\" d=\"M" << v.x(g.x) - m << ','
      << v.y(g.y) - m << " L" << v.x(g.x) + m << ',' << v.y(g.y) + m << " M" << v.x(g.x) - m
      << ',' << v.y(g.y) + m << " L" << v.x(g.x) + m << ',' << v.y(g.y) - m << "\"/>\n";
  }
  s << "</g>\n</svg>\n";
  return s.str();
}

std::string metrics_bar_svg(const std::vector<MetricBar>& bars) {
  if (bars.empty()) throw ConfigError("plot: no reports");
  const double width = 720.0, height = 360.0, top = 40.0, bottom = 60.0;
  const double panel = width / 2.0;
  const double plot_h = height - top - bottom;

  std::ostringstream s;
  s.precision(6);
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  const std::array<const char*, 2> titles = {"traveling distance l", "smoothness xi"};
  for (int metric = 0; metric < 2; ++metric) {
    double peak = 0.0;
    for (const auto& b : bars) peak = std::max(peak, metric == 0 ? b.distance : b.smoothness);
    if (peak <= 0.0) peak = 1.0;
    const double x0 = metric * panel + 30.0;
    const double slot = (panel - 60.0) / static_cast<double>(bars.size());
    s << "<g class=\"metric\" data-metric=\"" << (metric == 0 ? "l" : "xi") << "\">\n";
    s << "<text x=\"" << metric * panel + panel / 2.0 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << titles[metric] << "</text>\n";
    s << "<line x1=\"" << x0 << "\" y1=\"" << top + plot_h << "\" x2=\"" << x0 + slot * bars.size()
      << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
    for (std::size_t i = 0; i < bars.size(); ++i) {
      const double value = metric == 0 ? bars[i].distance : bars[i].smoothness;
      const double h = plot_h * std::max(0.0, value) / peak;
      const double x = x0 + slot * i + slot * 0.15;
      s << "<rect class=\"bar\" x=\"" << x << "\" y=\"" << top + plot_h - h << "\" width=\""
        << slot * 0.7 << "\" height=\"" << h << "\" fill=\"" << kPalette[i % kPalette.size()]
        << "\"/>\n";
      s << "<text x=\"" << x + slot * 0.35 << "\" y=\"" << top + plot_h - h - 4
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << value
        << "</text>\n";
      s << "<text x=\"" << x + slot * 0.35 << "\" y=\"" << top + plot_h + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << escape(bars[i].label) << "</text>\n";
    }
    s << "</g>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace rpf::cli
