#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace geoloop::dsl {

// Point constructors. A construction is a straight-line sequence: every
// constructor only refers to identifiers defined on earlier lines.
struct FreeCtor {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const FreeCtor&) const = default;
};

struct OnCircleCtor {
  std::string circle;
  double theta_deg = 0.0;  // angle from +x axis around the circle center
  bool operator==(const OnCircleCtor&) const = default;
};

struct MidpointCtor {
  std::string a;
  std::string b;
  bool operator==(const MidpointCtor&) const = default;
};

// Object reference usable inside intersect(): a named circle or the
// infinite line through two named points.
struct CircleRef {
  std::string name;
  bool operator==(const CircleRef&) const = default;
};

struct LineRef {
  std::string a;
  std::string b;
  bool operator==(const LineRef&) const = default;
};

using ObjRef = std::variant<CircleRef, LineRef>;

enum class Selector { First, Second };

struct IntersectCtor {
  ObjRef obj1;
  ObjRef obj2;
  Selector sel = Selector::First;
  bool operator==(const IntersectCtor&) const = default;
};

struct FootCtor {
  std::string point;  // drop perpendicular from this point
  std::string a;      // onto line a-b
  std::string b;
  bool operator==(const FootCtor&) const = default;
};

using PointCtor =
    std::variant<FreeCtor, OnCircleCtor, MidpointCtor, IntersectCtor, FootCtor>;

struct PointDef {
  std::string name;
  PointCtor ctor;
  bool operator==(const PointDef&) const = default;
};

struct RadiusValue {
  double r = 1.0;
  bool operator==(const RadiusValue&) const = default;
};

struct RadiusThrough {
  std::string point;
  bool operator==(const RadiusThrough&) const = default;
};

using RadiusSpec = std::variant<RadiusValue, RadiusThrough>;

struct CircleDef {
  std::string name;
  std::string center;
  RadiusSpec radius;
  bool operator==(const CircleDef&) const = default;
};

struct SegmentDef {
  std::string a;
  std::string b;
  bool operator==(const SegmentDef&) const = default;
};

struct LineDef {
  std::string a;
  std::string b;
  bool operator==(const LineDef&) const = default;
};

// given assertions
struct AngleAssert {
  std::string a;
  std::string b;  // vertex
  std::string c;
  double value_deg = 0.0;
  bool operator==(const AngleAssert&) const = default;
};

struct DistAssert {
  std::string a;
  std::string b;
  double value = 0.0;
  bool operator==(const DistAssert&) const = default;
};

struct EqDistAssert {
  std::string a1, b1;  // dist(a1,b1) == dist(a2,b2)
  std::string a2, b2;
  bool operator==(const EqDistAssert&) const = default;
};

using Assertion = std::variant<AngleAssert, DistAssert, EqDistAssert>;

struct Given {
  Assertion assertion;
  bool operator==(const Given&) const = default;
};

struct Label {
  std::string target;
  double dx = 0.0;
  double dy = 0.0;
  bool operator==(const Label&) const = default;
};

struct AngleQuery {
  std::string a;
  std::string b;  // vertex
  std::string c;
  bool operator==(const AngleQuery&) const = default;
};

struct DistQuery {
  std::string a;
  std::string b;
  bool operator==(const DistQuery&) const = default;
};

using Query = std::variant<AngleQuery, DistQuery>;

struct Ask {
  Query query;
  bool operator==(const Ask&) const = default;
};

enum class Unit { Degrees, Length };

struct Answer {
  double value = 0.0;
  Unit unit = Unit::Degrees;
  bool operator==(const Answer&) const = default;
};

using Statement = std::variant<PointDef, CircleDef, SegmentDef, LineDef, Given,
                               Label, Ask, Answer>;

struct ConstructionProgram {
  std::vector<Statement> statements;
  std::string source_text;
  std::string program_id;  // hash of the canonical printed form

  bool operator==(const ConstructionProgram& o) const {
    return statements == o.statements;
  }

  const Ask* ask() const {
    for (const auto& s : statements)
      if (auto* a = std::get_if<Ask>(&s)) return a;
    return nullptr;
  }

  const Answer* answer() const {
    for (const auto& s : statements)
      if (auto* a = std::get_if<Answer>(&s)) return a;
    return nullptr;
  }
};

inline Unit query_unit(const Query& q) {
  return std::holds_alternative<AngleQuery>(q) ? Unit::Degrees : Unit::Length;
}

}  // namespace geoloop::dsl
