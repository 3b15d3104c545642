#pragma once

#include <stdexcept>
#include <string>

#include "geoloop/exec/diagram.hpp"

namespace geoloop::render {

struct RenderSpec {
  int canvas_px = 512;   // >= 64
  int margin_px = 32;
  double stroke_width = 1.5;
  int font_size_px = 14;
  double point_radius_px = 3.0;
  double label_offset_px = 10.0;  // default offset when no label statement
};

class RenderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Byte-deterministic SVG 1.1. The world-to-canvas transform fits every
// entity inside the margin and preserves aspect ratio. Point markers get
// id="pt-<name>" so coordinates can be read back from the output.
std::string render_svg(const dsl::ConstructionProgram& p,
                       const exec::Diagram& d, const RenderSpec& spec = {});

}  // namespace geoloop::render
