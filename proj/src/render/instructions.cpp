#include "geoloop/render/instructions.hpp"

#include <sstream>

#include "geoloop/dsl/print.hpp"

namespace geoloop::render {

namespace {

using dsl::format_number;

std::string coords(const exec::Diagram& d, const std::string& name) {
  auto it = d.points.find(name);
  if (it == d.points.end()) return "(unknown)";
  return "(" + format_number(it->second.x) + ", " +
         format_number(it->second.y) + ")";
}

std::string objref_text(const dsl::ObjRef& o) {
  if (auto* c = std::get_if<dsl::CircleRef>(&o)) return "circle " + c->name;
  auto& l = std::get<dsl::LineRef>(o);
  return "line " + l.a + l.b;
}

std::string ctor_step(const dsl::PointDef& s, const exec::Diagram& d) {
  const std::string at = " at coordinates " + coords(d, s.name) + ".";
  return std::visit(
      [&](const auto& c) -> std::string {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, dsl::FreeCtor>) {
          return "Place point " + s.name + at;
        } else if constexpr (std::is_same_v<T, dsl::OnCircleCtor>) {
          return "Place point " + s.name + " on circle " + c.circle + " at " +
                 format_number(c.theta_deg) +
                 " degrees from the positive x-axis," + at.substr(0, at.size() - 1) + ".";
        } else if constexpr (std::is_same_v<T, dsl::MidpointCtor>) {
          return "Mark point " + s.name + " as the midpoint of " + c.a + c.b +
                 "," + at.substr(0, at.size() - 1) + ".";
        } else if constexpr (std::is_same_v<T, dsl::IntersectCtor>) {
          return "Mark point " + s.name + " at the " +
                 (c.sel == dsl::Selector::First ? "first" : "second") +
                 " intersection of " + objref_text(c.obj1) + " and " +
                 objref_text(c.obj2) + "," + at.substr(0, at.size() - 1) + ".";
        } else {
          return "Drop a perpendicular from " + c.point + " to line " + c.a +
                 c.b + " and mark its foot as point " + s.name + "," +
                 at.substr(0, at.size() - 1) + ".";
        }
      },
      s.ctor);
}

std::string given_step(const dsl::Assertion& a) {
  if (auto* ang = std::get_if<dsl::AngleAssert>(&a)) {
    if (ang->value_deg == 90.0)
      return "Label the right angle at " + ang->b + ".";
    return "Note that angle " + ang->a + ang->b + ang->c + " measures " +
           format_number(ang->value_deg) + " degrees.";
  }
  if (auto* ds = std::get_if<dsl::DistAssert>(&a))
    return "Note that segment " + ds->a + ds->b + " has length " +
           format_number(ds->value) + " units.";
  auto& eq = std::get<dsl::EqDistAssert>(a);
  return "Note that segments " + eq.a1 + eq.b1 + " and " + eq.a2 + eq.b2 +
         " have equal length.";
}

}  // namespace

size_t drawable_count(const dsl::ConstructionProgram& p) {
  size_t n = 0;
  for (const auto& s : p.statements)
    if (!std::holds_alternative<dsl::Ask>(s) &&
        !std::holds_alternative<dsl::Answer>(s))
      ++n;
  return n;
}

DrawingInstruction translate_instructions(const dsl::ConstructionProgram& p,
                                          const exec::Diagram& d) {
  DrawingInstruction out;
  for (const auto& s : p.statements) {
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, dsl::PointDef>) {
            out.steps.push_back(ctor_step(v, d));
          } else if constexpr (std::is_same_v<T, dsl::CircleDef>) {
            std::string r;
            if (auto* rv = std::get_if<dsl::RadiusValue>(&v.radius))
              r = format_number(rv->r);
            else
              r = format_number(
                  d.circles.count(v.name) ? d.circles.at(v.name).radius : 0.0);
            out.steps.push_back("Draw circle " + v.name + " centered at " +
                                v.center + " " + coords(d, v.center) +
                                " with radius " + r + ".");
          } else if constexpr (std::is_same_v<T, dsl::SegmentDef>) {
            out.steps.push_back("Draw segment " + v.a + v.b + " from " +
                                coords(d, v.a) + " to " + coords(d, v.b) + ".");
          } else if constexpr (std::is_same_v<T, dsl::LineDef>) {
            out.steps.push_back("Draw the straight line through " + v.a + " " +
                                coords(d, v.a) + " and " + v.b + " " +
                                coords(d, v.b) + ".");
          } else if constexpr (std::is_same_v<T, dsl::Given>) {
            out.steps.push_back(given_step(v.assertion));
          } else if constexpr (std::is_same_v<T, dsl::Label>) {
            out.steps.push_back("Place the label \"" + v.target +
                                "\" offset (" + format_number(v.dx) + ", " +
                                format_number(v.dy) + ") from point " +
                                v.target + ".");
          }
          // Ask/Answer carry no drawing content.
        },
        s);
  }
  return out;
}

std::string question_text(const dsl::ConstructionProgram& p) {
  std::ostringstream os;
  os << "In the figure";
  bool first = true;
  for (const auto& s : p.statements) {
    if (auto* g = std::get_if<dsl::Given>(&s)) {
      os << (first ? ", " : " and ");
      first = false;
      if (auto* ang = std::get_if<dsl::AngleAssert>(&g->assertion))
        os << "angle " << ang->a << ang->b << ang->c << " = "
           << format_number(ang->value_deg) << " degrees";
      else if (auto* ds = std::get_if<dsl::DistAssert>(&g->assertion))
        os << ds->a << ds->b << " = " << format_number(ds->value);
      else {
        auto& eq = std::get<dsl::EqDistAssert>(g->assertion);
        os << eq.a1 << eq.b1 << " = " << eq.a2 << eq.b2;
      }
    }
  }
  os << ". ";
  if (const dsl::Ask* a = p.ask()) {
    if (auto* aq = std::get_if<dsl::AngleQuery>(&a->query))
      os << "Find the measure of angle " << aq->a << aq->b << aq->c
         << " in degrees.";
    else {
      auto& dq = std::get<dsl::DistQuery>(a->query);
      os << "Find the length of " << dq.a << dq.b << ".";
    }
  }
  os << " Give the final answer as \\boxed{value}.";
  return os.str();
}

}  // namespace geoloop::render
