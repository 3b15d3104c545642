#include "geoloop/oracle/engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "geoloop/dsl/print.hpp"
#include "geoloop/exec/evaluate.hpp"

namespace geoloop::oracle {

namespace {

constexpr double kAngleTol = 1e-6;
constexpr double kLengthRelTol = 1e-9;
constexpr int kFactCap = 10000;

std::string angle_key(const std::string& a, const std::string& b,
                      const std::string& c) {
  return (a <= c) ? a + "|" + b + "|" + c : c + "|" + b + "|" + a;
}

std::string length_key(const std::string& a, const std::string& b) {
  return (a <= b) ? a + "|" + b : b + "|" + a;
}

std::string angle_desc(const std::string& key) {
  auto p1 = key.find('|');
  auto p2 = key.rfind('|');
  return "angle(" + key.substr(0, p1) + ", " + key.substr(p1 + 1, p2 - p1 - 1) +
         ", " + key.substr(p2 + 1) + ")";
}

std::string length_desc(const std::string& key) {
  auto p = key.find('|');
  return "dist(" + key.substr(0, p) + ", " + key.substr(p + 1) + ")";
}

struct Inconsistency {
  std::string detail;
};

struct Fact {
  std::string rule;
  std::vector<int> premises;
  std::string desc;
  std::optional<double> value;
  std::optional<int> given_index;
};

// Structural registries read off the program text.
struct CircleInfo {
  std::string name;
  std::string center;
  std::optional<double> radius_value;
  std::vector<std::pair<std::string, std::optional<double>>> points;  // name, theta
};

class Engine {
 public:
  Engine(const dsl::ConstructionProgram& p, const exec::Diagram& d,
         const SolveOptions& opts)
      : p_(p), d_(d), opts_(opts) {}

  SolveResult run() {
    try {
      seed_structural();
      seed_givens();
      if (opts_.assume) {
        int id = -1;
        const auto& [q, v] = *opts_.assume;
        if (auto* aq = std::get_if<dsl::AngleQuery>(&q))
          id = add_angle(aq->a, aq->b, aq->c, v, "assumption", {});
        else {
          auto& dq = std::get<dsl::DistQuery>(q);
          id = add_length(dq.a, dq.b, v, "assumption", {});
        }
        (void)id;
      }
      fixpoint();
    } catch (const Inconsistency& inc) {
      SolveResult r;
      r.status = SolveStatus::Inconsistent;
      r.diagnostic = inc.detail;
      return r;
    }

    if (capped_) {
      SolveResult r;
      r.status = SolveStatus::Unsolvable;
      r.diagnostic = "fact cap exceeded (" + std::to_string(kFactCap) + ")";
      return r;
    }

    const dsl::Ask* ask = p_.ask();
    if (!ask) return {SolveStatus::Unsolvable, std::nullopt, "no ask"};
    int fact_id = -1;
    dsl::Unit unit = dsl::query_unit(ask->query);
    if (auto* aq = std::get_if<dsl::AngleQuery>(&ask->query)) {
      auto it = angle_values_.find(angle_key(aq->a, aq->b, aq->c));
      if (it != angle_values_.end()) fact_id = it->second;
    } else {
      auto& dq = std::get<dsl::DistQuery>(ask->query);
      auto it = length_values_.find(length_key(dq.a, dq.b));
      if (it != length_values_.end()) fact_id = it->second;
    }
    if (fact_id < 0)
      return {SolveStatus::Unsolvable, std::nullopt, "asked quantity not derivable"};

    SolveResult r;
    r.status = SolveStatus::Solved;
    OracleAnswer ans;
    ans.value = *facts_[fact_id].value;
    ans.unit = unit;
    ans.trace = build_trace(fact_id);
    r.answer = std::move(ans);
    return r;
  }

 private:
  // ---- fact bookkeeping -------------------------------------------------

  void check_cap() {
    if (int(facts_.size()) >= kFactCap) capped_ = true;
  }

  int push_fact(Fact f) {
    facts_.push_back(std::move(f));
    check_cap();
    return int(facts_.size()) - 1;
  }

  int add_structural(const std::string& desc) {
    auto it = structural_ids_.find(desc);
    if (it != structural_ids_.end()) return it->second;
    int id = push_fact({"structural", {}, desc, std::nullopt, std::nullopt});
    structural_ids_[desc] = id;
    return id;
  }

  // Returns the fact id holding the value; adds when new. Conflicting
  // values throw Inconsistency.
  int add_angle(const std::string& a, const std::string& b,
                const std::string& c, double v, const std::string& rule,
                std::vector<int> premises, std::optional<int> given_idx = {}) {
    std::string key = angle_key(a, b, c);
    auto it = angle_values_.find(key);
    if (it != angle_values_.end()) {
      double old = *facts_[it->second].value;
      if (std::fabs(old - v) > kAngleTol)
        throw Inconsistency{facts_[it->second].desc + " vs " + angle_desc(key) +
                            " = " + dsl::format_number(v) + " (" + rule + ")"};
      return it->second;
    }
    if (capped_) return -1;
    int id = push_fact({rule, std::move(premises),
                        angle_desc(key) + " = " + dsl::format_number(v), v,
                        given_idx});
    angle_values_[key] = id;
    changed_ = true;
    return id;
  }

  int add_length(const std::string& a, const std::string& b, double v,
                 const std::string& rule, std::vector<int> premises,
                 std::optional<int> given_idx = {}) {
    std::string key = length_key(a, b);
    auto it = length_values_.find(key);
    if (it != length_values_.end()) {
      double old = *facts_[it->second].value;
      if (std::fabs(old - v) > kLengthRelTol * std::max({std::fabs(old),
                                                         std::fabs(v), 1.0}))
        throw Inconsistency{facts_[it->second].desc + " vs " + length_desc(key) +
                            " = " + dsl::format_number(v) + " (" + rule + ")"};
      return it->second;
    }
    if (capped_) return -1;
    int id = push_fact({rule, std::move(premises),
                        length_desc(key) + " = " + dsl::format_number(v), v,
                        given_idx});
    length_values_[key] = id;
    changed_ = true;
    return id;
  }

  void add_angle_eq(const std::string& k1, const std::string& k2,
                    const std::string& rule, std::vector<int> premises,
                    std::optional<int> given_idx = {}) {
    if (k1 == k2 || capped_) return;
    std::string edge = (k1 < k2) ? k1 + "~" + k2 : k2 + "~" + k1;
    if (!angle_eq_seen_.insert(edge).second) return;
    int id = push_fact({rule, std::move(premises),
                        angle_desc(k1) + " == " + angle_desc(k2), std::nullopt,
                        given_idx});
    angle_eq_.push_back({k1, k2, id});
    changed_ = true;
  }

  void add_length_eq(const std::string& k1, const std::string& k2,
                     const std::string& rule, std::vector<int> premises,
                     std::optional<int> given_idx = {}) {
    if (k1 == k2 || capped_) return;
    std::string edge = (k1 < k2) ? k1 + "~" + k2 : k2 + "~" + k1;
    if (!length_eq_seen_.insert(edge).second) return;
    int id = push_fact({rule, std::move(premises),
                        length_desc(k1) + " == " + length_desc(k2),
                        std::nullopt, given_idx});
    length_eq_.push_back({k1, k2, id});
    changed_ = true;
  }

  // ---- coordinate predicates (orientation only) -------------------------

  std::optional<exec::Vec2> coord(const std::string& n) const {
    auto it = d_.points.find(n);
    if (it == d_.points.end()) return std::nullopt;
    return it->second;
  }

  // +1 / -1 side of directed line a->b; 0 when too close to call.
  int side_of(const std::string& a, const std::string& b,
              const std::string& p) const {
    auto ca = coord(a), cb = coord(b), cp = coord(p);
    if (!ca || !cb || !cp) return 0;
    double cross = (cb->x - ca->x) * (cp->y - ca->y) -
                   (cb->y - ca->y) * (cp->x - ca->x);
    double scale = std::max({std::fabs(cb->x - ca->x), std::fabs(cb->y - ca->y),
                             1.0});
    if (std::fabs(cross) < 1e-9 * scale * scale) return 0;
    return cross > 0 ? 1 : -1;
  }

  bool strictly_between(const std::string& a, const std::string& m,
                        const std::string& b) const {
    auto ca = coord(a), cm = coord(m), cb = coord(b);
    if (!ca || !cm || !cb) return false;
    double dot = (ca->x - cm->x) * (cb->x - cm->x) +
                 (ca->y - cm->y) * (cb->y - cm->y);
    double la = std::hypot(ca->x - cm->x, ca->y - cm->y);
    double lb = std::hypot(cb->x - cm->x, cb->y - cm->y);
    return la > 1e-9 && lb > 1e-9 && dot < -1e-12 * la * lb;
  }

  bool on_line(const std::string& a, const std::string& b,
               const std::string& p) const {
    return side_of(a, b, p) == 0;
  }

  // ---- structural seeding -----------------------------------------------

  void seed_structural() {
    for (const auto& s : p_.statements) {
      if (auto* pd = std::get_if<dsl::PointDef>(&s)) {
        if (auto* oc = std::get_if<dsl::OnCircleCtor>(&pd->ctor)) {
          circle(oc->circle).points.push_back({pd->name, oc->theta_deg});
        } else if (auto* mp = std::get_if<dsl::MidpointCtor>(&pd->ctor)) {
          midpoints_.push_back({pd->name, mp->a, mp->b});
        } else if (auto* ft = std::get_if<dsl::FootCtor>(&pd->ctor)) {
          feet_.push_back({pd->name, ft->point, ft->a, ft->b});
        } else if (auto* ix = std::get_if<dsl::IntersectCtor>(&pd->ctor)) {
          for (const auto* obj : {&ix->obj1, &ix->obj2})
            if (auto* cr = std::get_if<dsl::CircleRef>(obj))
              circle(cr->name).points.push_back({pd->name, std::nullopt});
        }
      } else if (auto* cd = std::get_if<dsl::CircleDef>(&s)) {
        auto& ci = circle(cd->name);
        ci.center = cd->center;
        if (auto* rv = std::get_if<dsl::RadiusValue>(&cd->radius))
          ci.radius_value = rv->r;
        else
          ci.points.push_back(
              {std::get<dsl::RadiusThrough>(cd->radius).point, std::nullopt});
      }
    }

    // Deduplicate circle incidences, keeping any known theta.
    for (auto& [name, ci] : circles_) {
      std::vector<std::pair<std::string, std::optional<double>>> dedup;
      for (auto& e : ci.points) {
        auto it = std::find_if(dedup.begin(), dedup.end(),
                               [&](auto& d) { return d.first == e.first; });
        if (it == dedup.end())
          dedup.push_back(e);
        else if (!it->second && e.second)
          it->second = e.second;
      }
      ci.points = std::move(dedup);
    }

    // Midpoints: betweenness is definitional, no coordinates needed.
    for (const auto& [m, a, b] : midpoints_) {
      int s = add_structural(m + " is the midpoint of " + a + b);
      add_length_eq(length_key(a, m), length_key(m, b), "midpoint", {s});
      if (a != b) add_angle(a, m, b, 180.0, "midpoint", {s});
    }

    // Perpendicular feet: right angles hold whenever the projecting point
    // is off the base line (orientation read from coordinates).
    for (const auto& [f, p, a, b] : feet_) {
      int s = add_structural(f + " is the foot of the perpendicular from " +
                             p + " to " + a + b);
      if (!on_line(a, b, p)) {
        if (f != a && coord(f) && coord(a) &&
            exec::dist(*coord(f), *coord(a)) > 1e-9)
          add_angle(p, f, a, 90.0, "foot-perpendicular", {s});
        if (f != b && coord(f) && coord(b) &&
            exec::dist(*coord(f), *coord(b)) > 1e-9)
          add_angle(p, f, b, 90.0, "foot-perpendicular", {s});
      }
      if (strictly_between(a, f, b)) add_angle(a, f, b, 180.0, "foot-on-base", {s});
    }

    // Circles: radii values / equal radii for every incident point.
    for (auto& [name, ci] : circles_) {
      if (ci.center.empty()) continue;
      int s = add_structural("circle " + name + " centered at " + ci.center);
      for (const auto& [pt, theta] : ci.points) {
        if (pt == ci.center) continue;
        int inc = add_structural(pt + " lies on circle " + name);
        if (ci.radius_value)
          add_length(ci.center, pt, *ci.radius_value, "radius", {s, inc});
      }
      for (size_t i = 0; i < ci.points.size(); ++i)
        for (size_t j = i + 1; j < ci.points.size(); ++j) {
          const auto& pi = ci.points[i].first;
          const auto& pj = ci.points[j].first;
          if (pi == ci.center || pj == ci.center || pi == pj) continue;
          int ii = add_structural(pi + " lies on circle " + name);
          int ij = add_structural(pj + " lies on circle " + name);
          add_length_eq(length_key(ci.center, pi), length_key(ci.center, pj),
                        "equal-radii", {s, ii, ij});
        }
    }
  }

  void seed_givens() {
    int idx = -1;
    for (const auto& s : p_.statements) {
      auto* g = std::get_if<dsl::Given>(&s);
      if (!g) continue;
      ++idx;
      if (opts_.skip_givens.count(idx)) continue;
      if (auto* ang = std::get_if<dsl::AngleAssert>(&g->assertion))
        add_angle(ang->a, ang->b, ang->c, ang->value_deg, "given", {}, idx);
      else if (auto* ds = std::get_if<dsl::DistAssert>(&g->assertion))
        add_length(ds->a, ds->b, ds->value, "given", {}, idx);
      else {
        auto& eq = std::get<dsl::EqDistAssert>(g->assertion);
        add_length_eq(length_key(eq.a1, eq.b1), length_key(eq.a2, eq.b2),
                      "given", {}, idx);
      }
    }
  }

  // ---- rules ------------------------------------------------------------

  void fixpoint() {
    do {
      changed_ = false;
      if (capped_) return;
      rule_equality_propagation();
      rule_triangle_sum();
      rule_linear_pair();
      rule_vertical_angles();
      rule_isosceles();
      rule_central_angle();
      rule_inscribed_angle();
      rule_same_arc();
      rule_pythagoras();
      rule_midpoint_halving();
    } while (changed_ && !capped_);
  }

  void rule_equality_propagation() {
    for (size_t i = 0; i < angle_eq_.size(); ++i) {
      auto [k1, k2, id] = angle_eq_[i];
      auto i1 = angle_values_.find(k1);
      auto i2 = angle_values_.find(k2);
      if (i1 != angle_values_.end() && i2 == angle_values_.end())
        add_angle_key(k2, *facts_[i1->second].value, "equality-propagation",
                      {id, i1->second});
      else if (i2 != angle_values_.end() && i1 == angle_values_.end())
        add_angle_key(k1, *facts_[i2->second].value, "equality-propagation",
                      {id, i2->second});
    }
    for (size_t i = 0; i < length_eq_.size(); ++i) {
      auto [k1, k2, id] = length_eq_[i];
      auto i1 = length_values_.find(k1);
      auto i2 = length_values_.find(k2);
      if (i1 != length_values_.end() && i2 == length_values_.end())
        add_length_key(k2, *facts_[i1->second].value, "equality-propagation",
                       {id, i1->second});
      else if (i2 != length_values_.end() && i1 == length_values_.end())
        add_length_key(k1, *facts_[i2->second].value, "equality-propagation",
                       {id, i2->second});
    }
  }

  void add_angle_key(const std::string& key, double v, const std::string& rule,
                     std::vector<int> premises) {
    auto p1 = key.find('|');
    auto p2 = key.rfind('|');
    add_angle(key.substr(0, p1), key.substr(p1 + 1, p2 - p1 - 1),
              key.substr(p2 + 1), v, rule, std::move(premises));
  }

  void add_length_key(const std::string& key, double v, const std::string& rule,
                      std::vector<int> premises) {
    auto p = key.find('|');
    add_length(key.substr(0, p), key.substr(p + 1), v, rule,
               std::move(premises));
  }

  void rule_triangle_sum() {
    // group valued vertex angles by their point triple
    std::map<std::string, std::vector<std::pair<std::string, int>>> by_triple;
    for (const auto& [key, id] : angle_values_) {
      auto p1 = key.find('|');
      auto p2 = key.rfind('|');
      std::string a = key.substr(0, p1);
      std::string b = key.substr(p1 + 1, p2 - p1 - 1);
      std::string c = key.substr(p2 + 1);
      if (a == b || b == c || a == c) continue;
      std::vector<std::string> tri{a, b, c};
      std::sort(tri.begin(), tri.end());
      by_triple[tri[0] + "|" + tri[1] + "|" + tri[2]].push_back({b, id});
    }
    for (const auto& [tripkey, angles] : by_triple) {
      if (angles.size() < 2) continue;
      auto p1 = tripkey.find('|');
      auto p2 = tripkey.rfind('|');
      std::vector<std::string> tri{tripkey.substr(0, p1),
                                   tripkey.substr(p1 + 1, p2 - p1 - 1),
                                   tripkey.substr(p2 + 1)};
      for (const auto& missing : tri) {
        bool have = false;
        for (const auto& [v, id] : angles)
          if (v == missing) have = true;
        if (have) continue;
        // two known vertex angles, third missing
        std::vector<int> prem;
        double sum = 0;
        for (const auto& [v, id] : angles) {
          if (v == missing) continue;
          prem.push_back(id);
          sum += *facts_[id].value;
          if (prem.size() == 2) break;
        }
        if (prem.size() < 2) continue;
        if (sum > 180.0 + kAngleTol) continue;
        std::vector<std::string> others;
        for (const auto& t : tri)
          if (t != missing) others.push_back(t);
        add_angle(others[0], missing, others[1], 180.0 - sum,
                  "triangle-angle-sum", std::move(prem));
      }
    }

    // One valued vertex angle plus equality of the other two splits the
    // remainder evenly.
    for (size_t i = 0; i < angle_eq_.size(); ++i) {
      auto [k1, k2, eq_id] = angle_eq_[i];
      auto split = [](const std::string& key) {
        auto p1 = key.find('|');
        auto p2 = key.rfind('|');
        return std::array<std::string, 3>{key.substr(0, p1),
                                          key.substr(p1 + 1, p2 - p1 - 1),
                                          key.substr(p2 + 1)};
      };
      auto [a1, b1, c1] = split(k1);
      auto [a2, b2, c2] = split(k2);
      std::vector<std::string> t1{a1, b1, c1}, t2{a2, b2, c2};
      std::sort(t1.begin(), t1.end());
      std::sort(t2.begin(), t2.end());
      if (t1 != t2 || b1 == b2) continue;
      if (t1[0] == t1[1] || t1[1] == t1[2]) continue;
      if (angle_values_.count(k1) || angle_values_.count(k2)) continue;
      std::string apex;
      for (const auto& v : t1)
        if (v != b1 && v != b2) apex = v;
      if (apex.empty()) continue;
      auto it = angle_values_.find(angle_key(b1, apex, b2));
      if (it == angle_values_.end()) continue;
      double v = *facts_[it->second].value;
      if (v >= 180.0 - kAngleTol) continue;
      double base = (180.0 - v) / 2.0;
      add_angle_key(k1, base, "triangle-angle-sum", {eq_id, it->second});
      add_angle_key(k2, base, "triangle-angle-sum", {eq_id, it->second});
    }
  }

  // Straight-angle facts currently known, as (x, vertex, y, id).
  std::vector<std::tuple<std::string, std::string, std::string, int>>
  straight_angles() const {
    std::vector<std::tuple<std::string, std::string, std::string, int>> out;
    for (const auto& [key, id] : angle_values_) {
      if (std::fabs(*facts_[id].value - 180.0) > 1e-9) continue;
      auto p1 = key.find('|');
      auto p2 = key.rfind('|');
      out.push_back({key.substr(0, p1), key.substr(p1 + 1, p2 - p1 - 1),
                     key.substr(p2 + 1), id});
    }
    return out;
  }

  void rule_linear_pair() {
    auto straights = straight_angles();
    // snapshot of valued angles to iterate over while adding
    std::vector<std::pair<std::string, int>> values(angle_values_.begin(),
                                                    angle_values_.end());
    for (const auto& [x, b, y, sid] : straights) {
      for (const auto& [key, id] : values) {
        auto p1 = key.find('|');
        auto p2 = key.rfind('|');
        std::string ka = key.substr(0, p1);
        std::string kb = key.substr(p1 + 1, p2 - p1 - 1);
        std::string kc = key.substr(p2 + 1);
        if (kb != b) continue;
        double v = *facts_[id].value;
        if (v >= 180.0 - 1e-9) continue;
        // one endpoint on the straight line, the other free
        auto emit = [&](const std::string& onl, const std::string& z) {
          std::string other = (onl == x) ? y : x;
          if (z == other || z == onl) return;
          add_angle(z, b, other, 180.0 - v, "linear-pair", {sid, id});
        };
        if (ka == x || ka == y) emit(ka, kc);
        if (kc == x || kc == y) emit(kc, ka);
      }
    }
  }

  void rule_vertical_angles() {
    auto straights = straight_angles();
    for (size_t i = 0; i < straights.size(); ++i)
      for (size_t j = i + 1; j < straights.size(); ++j) {
        auto& [x1, b1, y1, id1] = straights[i];
        auto& [x2, b2, y2, id2] = straights[j];
        if (b1 != b2) continue;
        if (x1 == x2 || x1 == y2 || y1 == x2 || y1 == y2) continue;
        add_angle_eq(angle_key(x1, b1, x2), angle_key(y1, b1, y2),
                     "vertical-angles", {id1, id2});
        add_angle_eq(angle_key(x1, b1, y2), angle_key(y1, b1, x2),
                     "vertical-angles", {id1, id2});
      }
  }

  void rule_isosceles() {
    // From equal-length edges sharing an apex endpoint.
    for (size_t i = 0; i < length_eq_.size(); ++i) {
      auto [k1, k2, id] = length_eq_[i];
      auto p1 = k1.find('|');
      auto p2 = k2.find('|');
      std::string a1 = k1.substr(0, p1), b1 = k1.substr(p1 + 1);
      std::string a2 = k2.substr(0, p2), b2 = k2.substr(p2 + 1);
      // find shared apex
      std::string apex, l1, l2;
      if (a1 == a2) apex = a1, l1 = b1, l2 = b2;
      else if (a1 == b2) apex = a1, l1 = b1, l2 = a2;
      else if (b1 == a2) apex = b1, l1 = a1, l2 = b2;
      else if (b1 == b2) apex = b1, l1 = a1, l2 = a2;
      else continue;
      if (l1 == l2) continue;
      add_angle_eq(angle_key(apex, l1, l2), angle_key(apex, l2, l1),
                   "isosceles-base-angles", {id});
    }
  }

  void rule_central_angle() {
    for (auto& [name, ci] : circles_) {
      if (ci.center.empty()) continue;
      for (size_t i = 0; i < ci.points.size(); ++i)
        for (size_t j = i + 1; j < ci.points.size(); ++j) {
          const auto& [pi, ti] = ci.points[i];
          const auto& [pj, tj] = ci.points[j];
          if (!ti || !tj || pi == pj) continue;
          if (pi == ci.center || pj == ci.center) continue;
          double delta = std::fabs(*ti - *tj);
          delta = std::fmod(delta, 360.0);
          double central = std::min(delta, 360.0 - delta);
          int ii = add_structural(pi + " lies on circle " + name);
          int ij = add_structural(pj + " lies on circle " + name);
          add_angle(pi, ci.center, pj, central, "central-angle", {ii, ij});
        }
    }
  }

  void rule_inscribed_angle() {
    for (auto& [name, ci] : circles_) {
      if (ci.center.empty()) continue;
      for (size_t i = 0; i < ci.points.size(); ++i)
        for (size_t j = i + 1; j < ci.points.size(); ++j) {
          const auto& pa = ci.points[i].first;
          const auto& pb = ci.points[j].first;
          if (pa == pb || pa == ci.center || pb == ci.center) continue;
          auto it = angle_values_.find(angle_key(pa, ci.center, pb));
          if (it == angle_values_.end()) continue;
          double central = *facts_[it->second].value;
          for (const auto& [pp, tp] : ci.points) {
            if (pp == pa || pp == pb || pp == ci.center) continue;
            int sp = side_of(pa, pb, pp);
            int sc = side_of(pa, pb, ci.center);
            if (sp == 0) continue;
            double inscribed;
            if (std::fabs(central - 180.0) <= kAngleTol) {
              inscribed = 90.0;  // chord is a diameter
            } else if (sp == sc) {
              inscribed = central / 2.0;  // same side as center: major arc
            } else {
              inscribed = 180.0 - central / 2.0;  // minor arc
            }
            int ip = add_structural(pp + " lies on circle " + name);
            add_angle(pa, pp, pb, inscribed, "inscribed-angle",
                      {it->second, ip});
          }
        }
    }
  }

  void rule_same_arc() {
    for (auto& [name, ci] : circles_) {
      if (ci.center.empty()) continue;
      const auto& pts = ci.points;
      for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j) {
          const auto& pa = pts[i].first;
          const auto& pb = pts[j].first;
          if (pa == pb || pa == ci.center || pb == ci.center) continue;
          for (size_t u = 0; u < pts.size(); ++u)
            for (size_t v = u + 1; v < pts.size(); ++v) {
              const auto& pp = pts[u].first;
              const auto& pq = pts[v].first;
              if (pp == pa || pp == pb || pq == pa || pq == pb) continue;
              if (pp == ci.center || pq == ci.center || pp == pq) continue;
              int s1 = side_of(pa, pb, pp);
              int s2 = side_of(pa, pb, pq);
              if (s1 == 0 || s2 == 0 || s1 != s2) continue;
              int ip = add_structural(pp + " lies on circle " + name);
              int iq = add_structural(pq + " lies on circle " + name);
              int ia = add_structural(pa + " lies on circle " + name);
              int ib = add_structural(pb + " lies on circle " + name);
              add_angle_eq(angle_key(pa, pp, pb), angle_key(pa, pq, pb),
                           "inscribed-same-arc", {ia, ib, ip, iq});
            }
        }
    }
  }

  void rule_pythagoras() {
    std::vector<std::pair<std::string, int>> values(angle_values_.begin(),
                                                    angle_values_.end());
    for (const auto& [key, id] : values) {
      if (std::fabs(*facts_[id].value - 90.0) > kAngleTol) continue;
      auto p1 = key.find('|');
      auto p2 = key.rfind('|');
      std::string b = key.substr(0, p1);          // leg endpoint
      std::string a = key.substr(p1 + 1, p2 - p1 - 1);  // right-angle vertex
      std::string c = key.substr(p2 + 1);         // leg endpoint
      auto val = [&](const std::string& x, const std::string& y)
          -> std::optional<std::pair<double, int>> {
        auto it = length_values_.find(length_key(x, y));
        if (it == length_values_.end()) return std::nullopt;
        return std::pair{*facts_[it->second].value, it->second};
      };
      auto ab = val(a, b), ac = val(a, c), bc = val(b, c);
      // Derive even when the target side already has a value: add_length
      // then acts as a consistency check on the triple.
      if (ab && ac) {
        add_length(b, c, std::hypot(ab->first, ac->first), "pythagoras",
                   {id, ab->second, ac->second});
      } else if (bc && ab) {
        double rest = bc->first * bc->first - ab->first * ab->first;
        if (rest > 0)
          add_length(a, c, std::sqrt(rest), "pythagoras",
                     {id, bc->second, ab->second});
      } else if (bc && ac) {
        double rest = bc->first * bc->first - ac->first * ac->first;
        if (rest > 0)
          add_length(a, b, std::sqrt(rest), "pythagoras",
                     {id, bc->second, ac->second});
      }
    }
  }

  void rule_midpoint_halving() {
    for (const auto& [m, a, b] : midpoints_) {
      int s = add_structural(m + " is the midpoint of " + a + b);
      auto whole = length_values_.find(length_key(a, b));
      if (whole != length_values_.end()) {
        double v = *facts_[whole->second].value;
        add_length(a, m, v / 2.0, "midpoint-halving", {s, whole->second});
        add_length(m, b, v / 2.0, "midpoint-halving", {s, whole->second});
      } else {
        for (const auto& half : {length_key(a, m), length_key(m, b)}) {
          auto it = length_values_.find(half);
          if (it != length_values_.end()) {
            add_length(a, b, 2.0 * *facts_[it->second].value,
                       "midpoint-halving", {s, it->second});
            break;
          }
        }
      }
    }
  }

  // ---- trace ------------------------------------------------------------

  DerivationTrace build_trace(int answer_id) const {
    std::set<int> keep;
    std::vector<int> stack{answer_id};
    while (!stack.empty()) {
      int id = stack.back();
      stack.pop_back();
      if (!keep.insert(id).second) continue;
      for (int p : facts_[id].premises) stack.push_back(p);
    }
    DerivationTrace t;
    for (int id : keep) {  // std::set iterates ascending = topological
      const Fact& f = facts_[id];
      TraceStep step;
      step.fact_id = id;
      step.rule = f.rule;
      step.premise_ids = f.premises;
      step.conclusion = f.desc;
      step.value = f.value;
      step.given_index = f.given_index;
      if (f.given_index) t.given_indices.insert(*f.given_index);
      t.steps.push_back(std::move(step));
    }
    return t;
  }

  CircleInfo& circle(const std::string& name) {
    auto& ci = circles_[name];
    ci.name = name;
    return ci;
  }

  const dsl::ConstructionProgram& p_;
  const exec::Diagram& d_;
  const SolveOptions& opts_;

  std::vector<Fact> facts_;
  std::map<std::string, int> structural_ids_;
  std::map<std::string, int> angle_values_;   // key -> fact id
  std::map<std::string, int> length_values_;
  std::vector<std::tuple<std::string, std::string, int>> angle_eq_;
  std::vector<std::tuple<std::string, std::string, int>> length_eq_;
  std::set<std::string> angle_eq_seen_;
  std::set<std::string> length_eq_seen_;

  std::map<std::string, CircleInfo> circles_;
  std::vector<std::tuple<std::string, std::string, std::string>> midpoints_;
  std::vector<std::tuple<std::string, std::string, std::string, std::string>>
      feet_;  // foot, from-point, base a, base b

  bool changed_ = false;
  bool capped_ = false;
};

}  // namespace

SolveResult solve(const dsl::ConstructionProgram& p, const exec::Diagram& d,
                  const SolveOptions& opts) {
  return Engine(p, d, opts).run();
}

int count_givens(const dsl::ConstructionProgram& p) {
  int n = 0;
  for (const auto& s : p.statements)
    if (std::holds_alternative<dsl::Given>(s)) ++n;
  return n;
}

bool cross_check(const OracleAnswer& answer, const exec::Diagram& d) {
  if (!d.measured_answer) return false;
  if (d.measured_answer->unit != answer.unit)
    throw UnitMismatch("symbolic unit differs from measured unit");
  double a = answer.value;
  double m = d.measured_answer->value;
  if (answer.unit == dsl::Unit::Degrees) return std::fabs(a - m) <= 1e-6;
  return std::fabs(a - m) <= 1e-9 * std::max({std::fabs(a), std::fabs(m), 1.0});
}

nlohmann::json to_json(const DerivationTrace& t) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : t.steps) {
    nlohmann::json j{{"fact_id", s.fact_id},
                     {"rule", s.rule},
                     {"premises", s.premise_ids},
                     {"conclusion", s.conclusion}};
    if (s.value) j["value"] = *s.value;
    if (s.given_index) j["given_index"] = *s.given_index;
    steps.push_back(std::move(j));
  }
  return nlohmann::json{{"steps", steps},
                        {"given_indices", t.given_indices}};
}

}  // namespace geoloop::oracle
