#include "geoloop/exec/evaluate.hpp"

#include <algorithm>
#include <cmath>

#include "geoloop/dsl/print.hpp"

namespace geoloop::exec {

std::string to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::GivenViolated: return "GivenViolated";
    case ViolationKind::DegeneratePoints: return "DegeneratePoints";
    case ViolationKind::DegenerateAngle: return "DegenerateAngle";
    case ViolationKind::IntersectionMiss: return "IntersectionMiss";
    case ViolationKind::NonFiniteCoordinate: return "NonFiniteCoordinate";
  }
  return "?";
}

double dist(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double angle_deg(Vec2 a, Vec2 vertex, Vec2 c) {
  Vec2 u = a - vertex;
  Vec2 v = c - vertex;
  double nu = std::hypot(u.x, u.y);
  double nv = std::hypot(v.x, v.y);
  if (nu == 0.0 || nv == 0.0)
    throw MeasureError(MeasureError::Kind::DegenerateAngle,
                       "zero-length ray at angle vertex");
  // atan2 of cross/dot is well conditioned near 0 and 180.
  double cross = u.x * v.y - u.y * v.x;
  double dot = u.x * v.x + u.y * v.y;
  double rad = std::atan2(std::fabs(cross), dot);
  return rad * 180.0 / M_PI;
}

namespace {

constexpr double kDegToRad = M_PI / 180.0;

struct Line2 {
  Vec2 a, b;  // through two points
};

// Intersection candidates, unsorted.
std::vector<Vec2> intersect_line_line(const Line2& l1, const Line2& l2) {
  Vec2 d1 = l1.b - l1.a;
  Vec2 d2 = l2.b - l2.a;
  double denom = d1.x * d2.y - d1.y * d2.x;
  double scale = std::max({std::fabs(d1.x), std::fabs(d1.y), std::fabs(d2.x),
                           std::fabs(d2.y), 1e-300});
  if (std::fabs(denom) < 1e-12 * scale * scale) return {};
  Vec2 w = l2.a - l1.a;
  double t = (w.x * d2.y - w.y * d2.x) / denom;
  return {l1.a + t * d1};
}

std::vector<Vec2> intersect_circle_line(const CircleShape& c, const Line2& l) {
  Vec2 d = l.b - l.a;
  double len2 = d.x * d.x + d.y * d.y;
  if (len2 == 0.0) return {};
  Vec2 f = l.a - c.center_xy;
  double A = len2;
  double B = 2.0 * (f.x * d.x + f.y * d.y);
  double C = f.x * f.x + f.y * f.y - c.radius * c.radius;
  double disc = B * B - 4 * A * C;
  if (disc < 0) return {};
  double sq = std::sqrt(disc);
  double t1 = (-B - sq) / (2 * A);
  double t2 = (-B + sq) / (2 * A);
  std::vector<Vec2> out{l.a + t1 * d};
  if (sq > 0) out.push_back(l.a + t2 * d);
  return out;
}

std::vector<Vec2> intersect_circle_circle(const CircleShape& c1,
                                          const CircleShape& c2) {
  Vec2 d = c2.center_xy - c1.center_xy;
  double dd = std::hypot(d.x, d.y);
  if (dd == 0.0) return {};
  if (dd > c1.radius + c2.radius || dd < std::fabs(c1.radius - c2.radius))
    return {};
  double a = (c1.radius * c1.radius - c2.radius * c2.radius + dd * dd) /
             (2.0 * dd);
  double h2 = c1.radius * c1.radius - a * a;
  double h = h2 > 0 ? std::sqrt(h2) : 0.0;
  Vec2 mid = c1.center_xy + (a / dd) * d;
  Vec2 perp{-d.y / dd, d.x / dd};
  std::vector<Vec2> out{mid + h * perp};
  if (h > 0) out.push_back(mid + (-h) * perp);
  return out;
}

class Evaluator {
 public:
  explicit Evaluator(const dsl::ConstructionProgram& p) : p_(p) {}

  ExecResult run() {
    for (size_t i = 0; i < p_.statements.size(); ++i)
      std::visit([&](const auto& s) { eval(s); }, p_.statements[i]);
    finish();
    return {std::move(d_), std::move(report_)};
  }

 private:
  void violate(ViolationKind k, std::string detail) {
    report_.violations.push_back({k, std::move(detail)});
  }

  std::optional<Vec2> point(const std::string& n) const {
    auto it = d_.points.find(n);
    if (it == d_.points.end()) return std::nullopt;
    return it->second;
  }

  void define(const std::string& name, Vec2 v) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
      violate(ViolationKind::NonFiniteCoordinate, "point " + name);
      return;
    }
    d_.points[name] = v;
  }

  std::optional<std::variant<CircleShape, Line2>> resolve(
      const dsl::ObjRef& o) const {
    if (auto* c = std::get_if<dsl::CircleRef>(&o)) {
      auto it = d_.circles.find(c->name);
      if (it == d_.circles.end()) return std::nullopt;
      return it->second;
    }
    auto& l = std::get<dsl::LineRef>(o);
    auto a = point(l.a);
    auto b = point(l.b);
    if (!a || !b) return std::nullopt;
    return Line2{*a, *b};
  }

  void eval(const dsl::PointDef& s) {
    std::visit([&](const auto& ctor) { eval_ctor(s.name, ctor); }, s.ctor);
  }

  void eval_ctor(const std::string& name, const dsl::FreeCtor& c) {
    define(name, {c.x, c.y});
  }

  void eval_ctor(const std::string& name, const dsl::OnCircleCtor& c) {
    auto it = d_.circles.find(c.circle);
    if (it == d_.circles.end()) return;
    const auto& circ = it->second;
    double t = c.theta_deg * kDegToRad;
    define(name, {circ.center_xy.x + circ.radius * std::cos(t),
                  circ.center_xy.y + circ.radius * std::sin(t)});
  }

  void eval_ctor(const std::string& name, const dsl::MidpointCtor& c) {
    auto a = point(c.a);
    auto b = point(c.b);
    if (!a || !b) return;
    define(name, 0.5 * (*a + *b));
  }

  void eval_ctor(const std::string& name, const dsl::FootCtor& c) {
    auto pt = point(c.point);
    auto a = point(c.a);
    auto b = point(c.b);
    if (!pt || !a || !b) return;
    Vec2 d = *b - *a;
    double len2 = d.x * d.x + d.y * d.y;
    if (len2 == 0.0) {
      violate(ViolationKind::NonFiniteCoordinate,
              "foot " + name + ": base points coincide");
      return;
    }
    Vec2 w = *pt - *a;
    double t = (w.x * d.x + w.y * d.y) / len2;
    define(name, *a + t * d);
  }

  void eval_ctor(const std::string& name, const dsl::IntersectCtor& c) {
    auto o1 = resolve(c.obj1);
    auto o2 = resolve(c.obj2);
    if (!o1 || !o2) return;

    std::vector<Vec2> cands;
    std::visit(
        [&](const auto& a, const auto& b) {
          using A = std::decay_t<decltype(a)>;
          using B = std::decay_t<decltype(b)>;
          if constexpr (std::is_same_v<A, CircleShape> &&
                        std::is_same_v<B, CircleShape>)
            cands = intersect_circle_circle(a, b);
          else if constexpr (std::is_same_v<A, CircleShape>)
            cands = intersect_circle_line(a, b);
          else if constexpr (std::is_same_v<B, CircleShape>)
            cands = intersect_circle_line(b, a);
          else
            cands = intersect_line_line(a, b);
        },
        *o1, *o2);

    // Reference point of obj1: circle center, or the first named endpoint.
    Vec2 ref = std::holds_alternative<CircleShape>(*o1)
                   ? std::get<CircleShape>(*o1).center_xy
                   : std::get<Line2>(*o1).a;
    // Deterministic selector ordering: ascending angle from the +x axis
    // around ref, in [0, 360); ties broken by distance from ref.
    auto key = [&](Vec2 v) {
      double ang = std::atan2(v.y - ref.y, v.x - ref.x);
      if (ang < 0) ang += 2 * M_PI;
      return std::pair<double, double>{ang, dist(v, ref)};
    };
    std::sort(cands.begin(), cands.end(),
              [&](Vec2 a, Vec2 b) { return key(a) < key(b); });

    size_t idx = c.sel == dsl::Selector::First ? 0 : 1;
    if (idx >= cands.size()) {
      violate(ViolationKind::IntersectionMiss, "point " + name);
      return;
    }
    define(name, cands[idx]);
  }

  void eval(const dsl::CircleDef& s) {
    auto center = point(s.center);
    if (!center) return;
    double r = 0.0;
    if (auto* rv = std::get_if<dsl::RadiusValue>(&s.radius)) {
      r = rv->r;
    } else {
      auto th = point(std::get<dsl::RadiusThrough>(s.radius).point);
      if (!th) return;
      r = dist(*center, *th);
    }
    if (!(r > 0.0) || !std::isfinite(r)) {
      violate(ViolationKind::NonFiniteCoordinate,
              "circle " + s.name + ": non-positive radius");
      return;
    }
    d_.circles[s.name] = CircleShape{s.center, *center, r};
  }

  void eval(const dsl::SegmentDef& s) { d_.segments.emplace_back(s.a, s.b); }
  void eval(const dsl::LineDef& s) { d_.lines.emplace_back(s.a, s.b); }

  void eval(const dsl::Given& g) { givens_.push_back(g.assertion); }

  void eval(const dsl::Label&) {}
  void eval(const dsl::Ask& a) { d_.asked = a.query; }
  void eval(const dsl::Answer&) {}

  std::optional<double> try_measure(const dsl::Query& q) {
    try {
      return measure(d_, q);
    } catch (const MeasureError&) {
      return std::nullopt;
    }
  }

  void finish() {
    // Given checks run after the whole construction so every check sees
    // final coordinates; collect-all semantics.
    for (const auto& a : givens_) {
      GivenCheck chk{a, std::nullopt, false};
      if (auto* ang = std::get_if<dsl::AngleAssert>(&a)) {
        chk.measured = try_measure(dsl::AngleQuery{ang->a, ang->b, ang->c});
        if (chk.measured)
          chk.pass = std::fabs(*chk.measured - ang->value_deg) <= kAngleTolDeg;
      } else if (auto* ds = std::get_if<dsl::DistAssert>(&a)) {
        chk.measured = try_measure(dsl::DistQuery{ds->a, ds->b});
        if (chk.measured)
          chk.pass = std::fabs(*chk.measured - ds->value) <=
                     kLengthRelTol * std::max(std::fabs(ds->value), 1.0);
      } else {
        auto& eq = std::get<dsl::EqDistAssert>(a);
        auto d1 = try_measure(dsl::DistQuery{eq.a1, eq.b1});
        auto d2 = try_measure(dsl::DistQuery{eq.a2, eq.b2});
        if (d1 && d2) {
          chk.measured = *d1 - *d2;
          chk.pass = std::fabs(*d1 - *d2) <=
                     kLengthRelTol * std::max({std::fabs(*d1), std::fabs(*d2), 1.0});
        }
      }
      if (!chk.pass)
        violate(ViolationKind::GivenViolated, dsl::print(a));
      d_.given_checks.push_back(std::move(chk));
    }

    if (d_.asked) {
      if (auto v = try_measure(*d_.asked))
        d_.measured_answer = MeasuredAnswer{*v, dsl::query_unit(*d_.asked)};
    }
  }

  const dsl::ConstructionProgram& p_;
  Diagram d_;
  ValidityReport report_;
  std::vector<dsl::Assertion> givens_;
};

}  // namespace

ExecResult execute(const dsl::ConstructionProgram& p) {
  return Evaluator(p).run();
}

double measure(const Diagram& d, const dsl::Query& q) {
  auto pt = [&](const std::string& n) -> Vec2 {
    auto it = d.points.find(n);
    if (it == d.points.end())
      throw MeasureError(MeasureError::Kind::UnknownIdentifier,
                         "unknown point '" + n + "'");
    return it->second;
  };
  if (auto* a = std::get_if<dsl::AngleQuery>(&q)) {
    if (a->a == a->c)
      throw MeasureError(MeasureError::Kind::DegenerateAngle,
                         "angle endpoints coincide: " + a->a);
    return angle_deg(pt(a->a), pt(a->b), pt(a->c));
  }
  auto& dq = std::get<dsl::DistQuery>(q);
  return dist(pt(dq.a), pt(dq.b));
}

ValidityReport check_nondegeneracy(const dsl::ConstructionProgram& p,
                                   const Diagram& d,
                                   const DegeneracyPolicy& policy) {
  ValidityReport r;

  std::vector<std::pair<std::string, Vec2>> pts(d.points.begin(),
                                                d.points.end());
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j)
      if (dist(pts[i].second, pts[j].second) < policy.min_separation)
        r.violations.push_back({ViolationKind::DegeneratePoints,
                                pts[i].first + " ~ " + pts[j].first});

  // Marked vertices: every angle named by a given or the ask.
  auto check_angle = [&](const std::string& a, const std::string& b,
                         const std::string& c) {
    if (!d.has_point(a) || !d.has_point(b) || !d.has_point(c)) return;
    try {
      double v = angle_deg(d.points.at(a), d.points.at(b), d.points.at(c));
      if (v < policy.min_angle_deg || v > 180.0 - policy.min_angle_deg)
        r.violations.push_back({ViolationKind::DegenerateAngle,
                                "angle(" + a + ", " + b + ", " + c + ") = " +
                                    dsl::format_number(v)});
    } catch (const MeasureError&) {
      r.violations.push_back({ViolationKind::DegenerateAngle,
                              "angle(" + a + ", " + b + ", " + c + ")"});
    }
  };
  for (const auto& s : p.statements) {
    if (auto* g = std::get_if<dsl::Given>(&s)) {
      if (auto* ang = std::get_if<dsl::AngleAssert>(&g->assertion))
        check_angle(ang->a, ang->b, ang->c);
    } else if (auto* ask = std::get_if<dsl::Ask>(&s)) {
      if (auto* aq = std::get_if<dsl::AngleQuery>(&ask->query))
        check_angle(aq->a, aq->b, aq->c);
    }
  }

  std::vector<std::pair<std::string, CircleShape>> cs(d.circles.begin(),
                                                      d.circles.end());
  for (size_t i = 0; i < cs.size(); ++i)
    for (size_t j = i + 1; j < cs.size(); ++j)
      if (dist(cs[i].second.center_xy, cs[j].second.center_xy) <
              policy.min_separation &&
          std::fabs(cs[i].second.radius - cs[j].second.radius) <
              policy.min_separation)
        r.violations.push_back({ViolationKind::DegeneratePoints,
                                "circle " + cs[i].first + " ~ circle " +
                                    cs[j].first});
  return r;
}

nlohmann::json to_json(const Diagram& d) {
  nlohmann::json j;
  j["points"] = nlohmann::json::object();
  for (const auto& [name, v] : d.points) j["points"][name] = {v.x, v.y};
  j["circles"] = nlohmann::json::object();
  for (const auto& [name, c] : d.circles)
    j["circles"][name] = {{"center", c.center},
                          {"center_xy", {c.center_xy.x, c.center_xy.y}},
                          {"radius", c.radius}};
  j["segments"] = nlohmann::json::array();
  for (const auto& [a, b] : d.segments) j["segments"].push_back({a, b});
  j["lines"] = nlohmann::json::array();
  for (const auto& [a, b] : d.lines) j["lines"].push_back({a, b});
  j["given_checks"] = nlohmann::json::array();
  for (const auto& g : d.given_checks) {
    nlohmann::json c{{"assertion", dsl::print(g.assertion)}, {"pass", g.pass}};
    if (g.measured) c["measured"] = *g.measured;
    j["given_checks"].push_back(c);
  }
  if (d.asked) j["asked"] = dsl::print(*d.asked);
  if (d.measured_answer)
    j["measured_answer"] = {
        {"value", d.measured_answer->value},
        {"unit", d.measured_answer->unit == dsl::Unit::Degrees ? "deg"
                                                               : "units"}};
  return j;
}

nlohmann::json to_json(const ValidityReport& r) {
  nlohmann::json j;
  j["valid"] = r.valid();
  j["violations"] = nlohmann::json::array();
  for (const auto& v : r.violations)
    j["violations"].push_back({{"kind", to_string(v.kind)},
                               {"detail", v.detail}});
  return j;
}

}  // namespace geoloop::exec
