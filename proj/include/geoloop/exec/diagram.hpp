#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geoloop/dsl/ast.hpp"
#include "json.hpp"

namespace geoloop::exec {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }

struct CircleShape {
  std::string center;  // point name
  Vec2 center_xy;
  double radius = 0.0;
};

enum class ViolationKind {
  GivenViolated,
  DegeneratePoints,
  DegenerateAngle,
  IntersectionMiss,
  NonFiniteCoordinate,
};

std::string to_string(ViolationKind k);

struct Violation {
  ViolationKind kind;
  std::string detail;
};

struct ValidityReport {
  std::vector<Violation> violations;
  bool valid() const { return violations.empty(); }
  bool has(ViolationKind k) const {
    for (const auto& v : violations)
      if (v.kind == k) return true;
    return false;
  }
};

struct GivenCheck {
  dsl::Assertion assertion;
  std::optional<double> measured;  // absent when identifiers unresolved
  bool pass = false;
};

struct MeasuredAnswer {
  double value = 0.0;
  dsl::Unit unit = dsl::Unit::Degrees;
};

struct Diagram {
  std::map<std::string, Vec2> points;
  std::map<std::string, CircleShape> circles;
  std::vector<std::pair<std::string, std::string>> segments;
  std::vector<std::pair<std::string, std::string>> lines;
  std::vector<GivenCheck> given_checks;
  std::optional<dsl::Query> asked;
  std::optional<MeasuredAnswer> measured_answer;

  bool has_point(const std::string& n) const { return points.count(n) > 0; }
};

nlohmann::json to_json(const Diagram& d);
nlohmann::json to_json(const ValidityReport& r);

}  // namespace geoloop::exec
