#include "geoloop/harness/verify.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace geoloop::harness {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return char(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::optional<double> numeric_value(const std::string& extracted) {
  std::string s = lower(trim(extracted));
  // strip recognized unit words/symbols from the tail
  static const char* units[] = {"degrees", "degree", "deg", "units", "unit",
                                "cm", "°"};
  bool stripped = true;
  while (stripped) {
    stripped = false;
    s = trim(s);
    for (const char* u : units) {
      size_t n = std::string(u).size();
      if (s.size() >= n && s.compare(s.size() - n, n, u) == 0) {
        s.resize(s.size() - n);
        stripped = true;
      }
    }
  }
  s = trim(s);
  if (s.empty()) return std::nullopt;
  try {
    size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) return std::nullopt;
    return v;
  } catch (...) {
    return std::nullopt;
  }
}

int verify(const std::optional<std::string>& extracted, const Reference& ref) {
  if (!extracted) return 0;
  if (ref.kind == Reference::Kind::Choice)
    return lower(trim(*extracted)) == lower(trim(ref.choice)) ? 1 : 0;
  auto v = numeric_value(*extracted);
  if (!v) return 0;
  double tol = std::max(1e-9, 1e-6 * std::max(std::fabs(*v),
                                              std::fabs(ref.value)));
  return std::fabs(*v - ref.value) <= tol ? 1 : 0;
}

}  // namespace geoloop::harness
