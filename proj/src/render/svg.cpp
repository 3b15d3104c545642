#include "geoloop/render/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "geoloop/dsl/print.hpp"

namespace geoloop::render {

namespace {

// Fixed two-decimal canvas coordinates keep the output byte-stable.
std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

struct Transform {
  double scale = 1.0;
  double ox = 0.0, oy = 0.0;  // world origin offset
  int canvas = 512;

  double x(double wx) const { return (wx - ox) * scale; }
  // SVG y grows downward; world y grows upward.
  double y(double wy) const { return canvas - (wy - oy) * scale; }
};

}  // namespace

std::string render_svg(const dsl::ConstructionProgram& p,
                       const exec::Diagram& d, const RenderSpec& spec) {
  if (spec.canvas_px < 64 || spec.margin_px < 0 || spec.stroke_width <= 0)
    throw RenderError("invalid render spec");
  if (d.points.empty()) throw RenderError("empty diagram");

  double minx = 1e300, miny = 1e300, maxx = -1e300, maxy = -1e300;
  auto grow = [&](double x, double y) {
    minx = std::min(minx, x);
    miny = std::min(miny, y);
    maxx = std::max(maxx, x);
    maxy = std::max(maxy, y);
  };
  for (const auto& [name, v] : d.points) grow(v.x, v.y);
  for (const auto& [name, c] : d.circles) {
    grow(c.center_xy.x - c.radius, c.center_xy.y - c.radius);
    grow(c.center_xy.x + c.radius, c.center_xy.y + c.radius);
  }

  double spanx = maxx - minx;
  double spany = maxy - miny;
  double span = std::max({spanx, spany, 1e-9});
  double usable = double(spec.canvas_px - 2 * spec.margin_px);

  Transform t;
  t.canvas = spec.canvas_px;
  t.scale = usable / span;
  // center the figure
  t.ox = minx - (span - spanx) / 2.0 - double(spec.margin_px) / t.scale;
  t.oy = miny - (span - spany) / 2.0 - double(spec.margin_px) / t.scale;

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
     << spec.canvas_px << "\" height=\"" << spec.canvas_px << "\" viewBox=\"0 0 "
     << spec.canvas_px << " " << spec.canvas_px << "\">\n";
  os << "<rect width=\"" << spec.canvas_px << "\" height=\"" << spec.canvas_px
     << "\" fill=\"white\"/>\n";

  std::string stroke = "stroke=\"black\" stroke-width=\"" +
                       dsl::format_number(spec.stroke_width) + "\"";

  // circles first, then lines/segments, then points, then labels: later
  // layers stay visible.
  for (const auto& [name, c] : d.circles) {
    os << "<circle id=\"circle-" << name << "\" cx=\"" << px(t.x(c.center_xy.x))
       << "\" cy=\"" << px(t.y(c.center_xy.y)) << "\" r=\""
       << px(c.radius * t.scale) << "\" fill=\"none\" " << stroke << "/>\n";
  }

  auto draw_line = [&](const std::string& a, const std::string& b,
                       bool extend) {
    if (!d.has_point(a) || !d.has_point(b)) return;
    exec::Vec2 pa = d.points.at(a);
    exec::Vec2 pb = d.points.at(b);
    if (extend) {
      // stretch the named line across the world bounding box
      exec::Vec2 dir = pb - pa;
      double n = std::hypot(dir.x, dir.y);
      if (n > 0) {
        double reach = 2.0 * span;
        pa = pa + (-reach / n) * dir;
        pb = pb + (reach / n) * dir;
      }
    }
    os << "<line x1=\"" << px(t.x(pa.x)) << "\" y1=\"" << px(t.y(pa.y))
       << "\" x2=\"" << px(t.x(pb.x)) << "\" y2=\"" << px(t.y(pb.y)) << "\" "
       << stroke << "/>\n";
  };
  for (const auto& [a, b] : d.lines) draw_line(a, b, true);
  for (const auto& [a, b] : d.segments) draw_line(a, b, false);

  for (const auto& [name, v] : d.points) {
    os << "<circle id=\"pt-" << name << "\" cx=\"" << px(t.x(v.x)) << "\" cy=\""
       << px(t.y(v.y)) << "\" r=\"" << px(spec.point_radius_px)
       << "\" fill=\"black\"/>\n";
  }

  // label offsets come from label statements (world units); default offset
  // up-right in canvas pixels.
  std::map<std::string, std::pair<double, double>> offsets;
  for (const auto& s : p.statements)
    if (auto* l = std::get_if<dsl::Label>(&s)) offsets[l->target] = {l->dx, l->dy};

  for (const auto& [name, v] : d.points) {
    double lx, ly;
    auto it = offsets.find(name);
    if (it != offsets.end()) {
      lx = t.x(v.x + it->second.first);
      ly = t.y(v.y + it->second.second);
    } else {
      lx = t.x(v.x) + spec.label_offset_px * 0.6;
      ly = t.y(v.y) - spec.label_offset_px * 0.6;
    }
    os << "<text id=\"label-" << name << "\" x=\"" << px(lx) << "\" y=\""
       << px(ly) << "\" font-family=\"sans-serif\" font-size=\""
       << spec.font_size_px << "\">" << name << "</text>\n";
  }

  os << "</svg>\n";
  return os.str();
}

}  // namespace geoloop::render
