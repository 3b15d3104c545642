#include "geoloop/dsl/parse.hpp"

#include "geoloop/dsl/print.hpp"

#include <cctype>
#include <cstdlib>
#include <set>
#include <sstream>

namespace geoloop::dsl {

std::string ParseError::format(ParseErrorKind kind, int line, int col,
                               const std::string& detail) {
  std::ostringstream os;
  switch (kind) {
    case ParseErrorKind::SyntaxError:
      os << "syntax error at line " << line << ", col " << col << ": expected "
         << detail;
      break;
    case ParseErrorKind::UndefinedIdentifier:
      os << "undefined identifier '" << detail << "' at line " << line;
      break;
    case ParseErrorKind::DuplicateIdentifier:
      os << "duplicate identifier '" << detail << "'";
      break;
    case ParseErrorKind::MissingAsk:
      os << "program has no 'ask' statement";
      break;
  }
  return os.str();
}

namespace {

// Cursor over a single statement line.
class LineScanner {
 public:
  LineScanner(std::string text, int line_no)
      : text_(std::move(text)), line_(line_no) {}

  [[noreturn]] void fail(const std::string& expected) const {
    throw ParseError(ParseErrorKind::SyntaxError, line_, int(pos_) + 1,
                     expected);
  }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t'))
      ++pos_;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }

  void expect_end() {
    if (!at_end()) fail("end of line");
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c)
      fail(std::string("'") + c + "'");
    ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string ident() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_'))
      ++pos_;
    if (pos_ == start) fail("identifier");
    return text_.substr(start, pos_ - start);
  }

  double number() {
    skip_ws();
    size_t start = pos_;
    const char* begin = text_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("number");
    pos_ = start + size_t(end - begin);
    return v;
  }

  int line() const { return line_; }
  int col() const { return int(pos_) + 1; }

 private:
  std::string text_;
  int line_;
  size_t pos_ = 0;
};

struct Scope {
  std::set<std::string> points;
  std::set<std::string> circles;
  int line = 0;

  void require_point(const std::string& n) const {
    if (!points.count(n))
      throw ParseError(ParseErrorKind::UndefinedIdentifier, line, 1, n);
  }
  void require_circle(const std::string& n) const {
    if (!circles.count(n))
      throw ParseError(ParseErrorKind::UndefinedIdentifier, line, 1, n);
  }
};

ObjRef parse_objref(LineScanner& sc, const Scope& scope) {
  std::string head = sc.ident();
  if (head == "line" || head == "seg") {
    sc.expect('(');
    std::string a = sc.ident();
    sc.expect(',');
    std::string b = sc.ident();
    sc.expect(')');
    scope.require_point(a);
    scope.require_point(b);
    return LineRef{a, b};
  }
  scope.require_circle(head);
  return CircleRef{head};
}

PointCtor parse_ctor(LineScanner& sc, const Scope& scope) {
  std::string kind = sc.ident();
  sc.expect('(');
  if (kind == "free") {
    double x = sc.number();
    sc.expect(',');
    double y = sc.number();
    sc.expect(')');
    return FreeCtor{x, y};
  }
  if (kind == "on_circle") {
    std::string c = sc.ident();
    scope.require_circle(c);
    sc.expect(',');
    double theta = sc.number();
    sc.expect(')');
    return OnCircleCtor{c, theta};
  }
  if (kind == "midpoint") {
    std::string a = sc.ident();
    sc.expect(',');
    std::string b = sc.ident();
    sc.expect(')');
    scope.require_point(a);
    scope.require_point(b);
    return MidpointCtor{a, b};
  }
  if (kind == "intersect") {
    ObjRef o1 = parse_objref(sc, scope);
    sc.expect(',');
    ObjRef o2 = parse_objref(sc, scope);
    sc.expect(',');
    std::string sel = sc.ident();
    sc.expect(')');
    if (sel != "first" && sel != "second") sc.fail("'first' or 'second'");
    return IntersectCtor{o1, o2,
                         sel == "first" ? Selector::First : Selector::Second};
  }
  if (kind == "foot") {
    std::string p = sc.ident();
    sc.expect(',');
    std::string a = sc.ident();
    sc.expect(',');
    std::string b = sc.ident();
    sc.expect(')');
    scope.require_point(p);
    scope.require_point(a);
    scope.require_point(b);
    return FootCtor{p, a, b};
  }
  sc.fail("point constructor (free/on_circle/midpoint/intersect/foot)");
}

Assertion parse_assertion(LineScanner& sc, const Scope& scope) {
  std::string kind = sc.ident();
  if (kind == "angle") {
    sc.expect('(');
    std::string a = sc.ident();
    sc.expect(',');
    std::string b = sc.ident();
    sc.expect(',');
    std::string c = sc.ident();
    sc.expect(')');
    scope.require_point(a);
    scope.require_point(b);
    scope.require_point(c);
    sc.expect('=');
    double v = sc.number();
    return AngleAssert{a, b, c, v};
  }
  if (kind == "dist") {
    sc.expect('(');
    std::string a = sc.ident();
    sc.expect(',');
    std::string b = sc.ident();
    sc.expect(')');
    scope.require_point(a);
    scope.require_point(b);
    sc.expect('=');
    double v = sc.number();
    return DistAssert{a, b, v};
  }
  if (kind == "eq") {
    sc.expect('(');
    auto pair = [&]() {
      std::string d = sc.ident();
      if (d != "dist") sc.fail("'dist'");
      sc.expect('(');
      std::string a = sc.ident();
      sc.expect(',');
      std::string b = sc.ident();
      sc.expect(')');
      scope.require_point(a);
      scope.require_point(b);
      return std::pair<std::string, std::string>{a, b};
    };
    auto [a1, b1] = pair();
    sc.expect(',');
    auto [a2, b2] = pair();
    sc.expect(')');
    return EqDistAssert{a1, b1, a2, b2};
  }
  sc.fail("assertion (angle/dist/eq)");
}

Query parse_query(LineScanner& sc, const Scope& scope) {
  std::string kind = sc.ident();
  if (kind == "angle") {
    sc.expect('(');
    std::string a = sc.ident();
    sc.expect(',');
    std::string b = sc.ident();
    sc.expect(',');
    std::string c = sc.ident();
    sc.expect(')');
    scope.require_point(a);
    scope.require_point(b);
    scope.require_point(c);
    return AngleQuery{a, b, c};
  }
  if (kind == "dist") {
    sc.expect('(');
    std::string a = sc.ident();
    sc.expect(',');
    std::string b = sc.ident();
    sc.expect(')');
    scope.require_point(a);
    scope.require_point(b);
    return DistQuery{a, b};
  }
  sc.fail("query (angle/dist)");
}

}  // namespace

ConstructionProgram parse(const std::string& source) {
  ConstructionProgram p;
  p.source_text = source;
  Scope scope;

  std::istringstream in(source);
  std::string raw;
  int line_no = 0;
  int ask_count = 0;
  int answer_count = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    if (auto pos = raw.find('#'); pos != std::string::npos) raw.resize(pos);
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    bool blank = true;
    for (char c : raw)
      if (c != ' ' && c != '\t') blank = false;
    if (blank) continue;

    LineScanner sc(raw, line_no);
    scope.line = line_no;
    std::string head = sc.ident();

    if (head == "point") {
      std::string name = sc.ident();
      sc.expect('=');
      PointCtor ctor = parse_ctor(sc, scope);
      sc.expect_end();
      if (scope.points.count(name))
        throw ParseError(ParseErrorKind::DuplicateIdentifier, line_no, 1, name);
      scope.points.insert(name);
      p.statements.push_back(PointDef{name, ctor});
    } else if (head == "circle") {
      std::string name = sc.ident();
      sc.expect('=');
      std::string kw = sc.ident();
      if (kw != "circle") sc.fail("'circle(center, radius)'");
      sc.expect('(');
      std::string center = sc.ident();
      scope.require_point(center);
      sc.expect(',');
      RadiusSpec radius;
      if (std::isalpha(static_cast<unsigned char>(sc.peek()))) {
        std::string th = sc.ident();
        if (th != "through") sc.fail("'through' or number");
        sc.expect('(');
        std::string q = sc.ident();
        sc.expect(')');
        scope.require_point(q);
        radius = RadiusThrough{q};
      } else {
        radius = RadiusValue{sc.number()};
      }
      sc.expect(')');
      sc.expect_end();
      if (scope.circles.count(name))
        throw ParseError(ParseErrorKind::DuplicateIdentifier, line_no, 1, name);
      scope.circles.insert(name);
      p.statements.push_back(CircleDef{name, center, radius});
    } else if (head == "segment" || head == "line") {
      std::string a = sc.ident();
      std::string b = sc.ident();
      sc.expect_end();
      scope.require_point(a);
      scope.require_point(b);
      if (head == "segment")
        p.statements.push_back(SegmentDef{a, b});
      else
        p.statements.push_back(LineDef{a, b});
    } else if (head == "given") {
      Assertion a = parse_assertion(sc, scope);
      sc.expect_end();
      p.statements.push_back(Given{a});
    } else if (head == "label") {
      std::string target = sc.ident();
      scope.require_point(target);
      sc.expect('(');
      double dx = sc.number();
      sc.expect(',');
      double dy = sc.number();
      sc.expect(')');
      sc.expect_end();
      p.statements.push_back(Label{target, dx, dy});
    } else if (head == "ask") {
      Query q = parse_query(sc, scope);
      sc.expect_end();
      if (++ask_count > 1)
        throw ParseError(ParseErrorKind::SyntaxError, line_no, 1,
                         "at most one 'ask' statement");
      p.statements.push_back(Ask{q});
    } else if (head == "answer") {
      double v = sc.number();
      std::string unit = sc.ident();
      sc.expect_end();
      if (unit != "deg" && unit != "units") sc.fail("'deg' or 'units'");
      if (++answer_count > 1)
        throw ParseError(ParseErrorKind::SyntaxError, line_no, 1,
                         "at most one 'answer' statement");
      p.statements.push_back(
          Answer{v, unit == "deg" ? Unit::Degrees : Unit::Length});
    } else {
      sc.fail("statement keyword (point/circle/segment/line/given/label/ask/answer)");
    }
  }

  if (ask_count == 0)
    throw ParseError(ParseErrorKind::MissingAsk, 0, 0, "");

  // program_id is defined over the canonical print, set in finalize-style.
  p.program_id = program_hash(p);
  return p;
}

}  // namespace geoloop::dsl
