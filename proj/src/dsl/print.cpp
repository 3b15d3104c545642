#include "geoloop/dsl/print.hpp"

#include <cstdint>
#include <cstdio>
#include <sstream>

namespace geoloop::dsl {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  std::string s = buf;
  if (s == "-0") s = "0";
  return s;
}

namespace {

std::string print_objref(const ObjRef& o) {
  if (auto* c = std::get_if<CircleRef>(&o)) return c->name;
  auto& l = std::get<LineRef>(o);
  return "line(" + l.a + ", " + l.b + ")";
}

std::string print_ctor(const PointCtor& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, FreeCtor>) {
          return "free(" + format_number(v.x) + ", " + format_number(v.y) + ")";
        } else if constexpr (std::is_same_v<T, OnCircleCtor>) {
          return "on_circle(" + v.circle + ", " + format_number(v.theta_deg) +
                 ")";
        } else if constexpr (std::is_same_v<T, MidpointCtor>) {
          return "midpoint(" + v.a + ", " + v.b + ")";
        } else if constexpr (std::is_same_v<T, IntersectCtor>) {
          return "intersect(" + print_objref(v.obj1) + ", " +
                 print_objref(v.obj2) + ", " +
                 (v.sel == Selector::First ? "first" : "second") + ")";
        } else {
          return "foot(" + v.point + ", " + v.a + ", " + v.b + ")";
        }
      },
      c);
}

}  // namespace

std::string print(const Assertion& a) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, AngleAssert>) {
          return "angle(" + v.a + ", " + v.b + ", " + v.c +
                 ") = " + format_number(v.value_deg);
        } else if constexpr (std::is_same_v<T, DistAssert>) {
          return "dist(" + v.a + ", " + v.b + ") = " + format_number(v.value);
        } else {
          return "eq(dist(" + v.a1 + ", " + v.b1 + "), dist(" + v.a2 + ", " +
                 v.b2 + "))";
        }
      },
      a);
}

std::string print(const Query& q) {
  if (auto* a = std::get_if<AngleQuery>(&q))
    return "angle(" + a->a + ", " + a->b + ", " + a->c + ")";
  auto& d = std::get<DistQuery>(q);
  return "dist(" + d.a + ", " + d.b + ")";
}

std::string print(const Statement& s) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PointDef>) {
          return "point " + v.name + " = " + print_ctor(v.ctor);
        } else if constexpr (std::is_same_v<T, CircleDef>) {
          std::string r;
          if (auto* rv = std::get_if<RadiusValue>(&v.radius))
            r = format_number(rv->r);
          else
            r = "through(" + std::get<RadiusThrough>(v.radius).point + ")";
          return "circle " + v.name + " = circle(" + v.center + ", " + r + ")";
        } else if constexpr (std::is_same_v<T, SegmentDef>) {
          return "segment " + v.a + " " + v.b;
        } else if constexpr (std::is_same_v<T, LineDef>) {
          return "line " + v.a + " " + v.b;
        } else if constexpr (std::is_same_v<T, Given>) {
          return "given " + print(v.assertion);
        } else if constexpr (std::is_same_v<T, Label>) {
          return "label " + v.target + " (" + format_number(v.dx) + ", " +
                 format_number(v.dy) + ")";
        } else if constexpr (std::is_same_v<T, Ask>) {
          return "ask " + print(v.query);
        } else {
          return "answer " + format_number(v.value) +
                 (v.unit == Unit::Degrees ? " deg" : " units");
        }
      },
      s);
}

std::string print(const ConstructionProgram& p) {
  std::ostringstream os;
  for (const auto& s : p.statements) os << print(s) << "\n";
  return os.str();
}

std::string program_hash(const ConstructionProgram& p) {
  // FNV-1a 64-bit over the canonical text.
  std::string text = print(p);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ConstructionProgram finalize(std::vector<Statement> statements) {
  ConstructionProgram p;
  p.statements = std::move(statements);
  p.source_text = print(p);
  p.program_id = program_hash(p);
  return p;
}

}  // namespace geoloop::dsl
