#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <regex>

#include "geoloop/dsl/parse.hpp"
#include "geoloop/dsl/print.hpp"
#include "geoloop/exec/evaluate.hpp"
#include "geoloop/render/instructions.hpp"
#include "geoloop/render/svg.hpp"

using namespace geoloop;
using render::render_svg;

namespace {

const std::string kInscribedSrc =
    "point O = free(0, 0)\n"
    "circle K = circle(O, 2)\n"
    "point A = on_circle(K, 10)\n"
    "point D = on_circle(K, 130)\n"
    "point P = on_circle(K, 250)\n"
    "segment A P\n"
    "segment D P\n"
    "given angle(A, O, D) = 120\n"
    "ask angle(A, P, D)\n";

struct Px {
  double x = 0, y = 0;
};

// Read a point marker's canvas coordinates back out of the SVG text.
Px marker(const std::string& svg, const std::string& name) {
  std::regex re("id=\"pt-" + name + "\" cx=\"([-0-9.]+)\" cy=\"([-0-9.]+)\"");
  std::smatch m;
  REQUIRE(std::regex_search(svg, m, re));
  return {std::stod(m[1]), std::stod(m[2])};
}

double px_angle(Px a, Px v, Px c) {
  double ux = a.x - v.x, uy = a.y - v.y;
  double wx = c.x - v.x, wy = c.y - v.y;
  double cross = ux * wy - uy * wx;
  double dot = ux * wx + uy * wy;
  return std::atan2(std::fabs(cross), dot) * 180.0 / M_PI;
}

}  // namespace

TEST_CASE("rendering is byte-deterministic and survives a round trip") {
  auto p = dsl::parse(kInscribedSrc);
  auto ex = exec::execute(p);
  REQUIRE(ex.report.valid());
  std::string a = render_svg(p, ex.diagram);
  std::string b = render_svg(p, ex.diagram);
  CHECK(a == b);

  // re-parse the canonical print: still the same bytes
  auto p2 = dsl::parse(dsl::print(p));
  auto ex2 = exec::execute(p2);
  CHECK(render_svg(p2, ex2.diagram) == a);
}

TEST_CASE("svg is well-formed and contains every entity") {
  auto p = dsl::parse(kInscribedSrc);
  auto ex = exec::execute(p);
  std::string svg = render_svg(p, ex.diagram);
  CHECK(svg.find("<?xml") == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("id=\"circle-K\"") != std::string::npos);
  for (const char* n : {"O", "A", "D", "P"}) {
    CHECK(svg.find("id=\"pt-" + std::string(n) + "\"") != std::string::npos);
    CHECK(svg.find("id=\"label-" + std::string(n) + "\"") != std::string::npos);
  }
  // two drawn segments
  size_t lines = 0;
  for (size_t pos = 0; (pos = svg.find("<line ", pos)) != std::string::npos;
       ++pos)
    ++lines;
  CHECK(lines == 2);
}

TEST_CASE("angles re-measured from svg pixel coordinates match the figure") {
  // inscribed angle APD = 60 degrees; %.2f pixel rounding on a
  // 512px canvas perturbs it by well under half a degree.
  auto p = dsl::parse(kInscribedSrc);
  auto ex = exec::execute(p);
  std::string svg = render_svg(p, ex.diagram);
  double got = px_angle(marker(svg, "A"), marker(svg, "P"), marker(svg, "D"));
  CHECK(got == doctest::Approx(60.0).epsilon(0.005));
}

TEST_CASE("degenerate specs and empty diagrams are rejected") {
  auto p = dsl::parse(kInscribedSrc);
  auto ex = exec::execute(p);
  render::RenderSpec tiny;
  tiny.canvas_px = 32;
  CHECK_THROWS_AS(render_svg(p, ex.diagram, tiny), render::RenderError);
  exec::Diagram empty;
  CHECK_THROWS_AS(render_svg(p, empty), render::RenderError);
}

TEST_CASE("a single free point still renders") {
  auto p = dsl::parse("point A = free(1, 1)\nask dist(A, A)\n");
  auto ex = exec::execute(p);
  std::string svg = render_svg(p, ex.diagram);
  CHECK(svg.find("id=\"pt-A\"") != std::string::npos);
}

TEST_CASE("instruction translation covers every drawable statement") {
  auto p = dsl::parse(kInscribedSrc);
  auto ex = exec::execute(p);
  auto ins = render::translate_instructions(p, ex.diagram);
  CHECK(ins.steps.size() == render::drawable_count(p));
  CHECK(ins.steps.size() == 8);  // everything except the ask
  std::string text = ins.text();
  CHECK(text.find("1. ") == 0);
  CHECK(text.find("circle K") != std::string::npos);
  CHECK(text.find("120 degrees") != std::string::npos);
}

TEST_CASE("right-angle givens become a right-angle label step") {
  auto p = dsl::parse(
      "point A = free(0, 0)\n"
      "point B = free(3, 0)\n"
      "point C = free(0, 4)\n"
      "segment A B\n"
      "given angle(B, A, C) = 90\n"
      "ask dist(B, C)\n");
  auto ex = exec::execute(p);
  auto ins = render::translate_instructions(p, ex.diagram);
  REQUIRE(ins.steps.size() == 5);
  CHECK(ins.steps[4] == "Label the right angle at A.");
}

TEST_CASE("question text states the givens and the boxed-answer format") {
  auto p = dsl::parse(kInscribedSrc);
  std::string q = render::question_text(p);
  CHECK(q.find("angle AOD = 120 degrees") != std::string::npos);
  CHECK(q.find("Find the measure of angle APD in degrees.") !=
        std::string::npos);
  CHECK(q.find("\\boxed{value}") != std::string::npos);
}
