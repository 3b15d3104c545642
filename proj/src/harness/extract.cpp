#include "geoloop/harness/extract.hpp"

#include <cctype>
#include <regex>

namespace geoloop::harness {

namespace {

bool is_numeric_token(const std::string& t, double* out) {
  if (t.empty()) return false;
  try {
    size_t used = 0;
    double v = std::stod(t, &used);
    // allow a trailing degree sign or percent-free punctuation remnant
    if (used == t.size()) {
      if (out) *out = v;
      return true;
    }
  } catch (...) {
  }
  return false;
}

}  // namespace

std::optional<std::string> extract_answer(const std::string& raw) {
  static const std::regex boxed(R"(\\boxed\{([^}]+)\})");
  std::optional<std::string> last_boxed;
  for (auto it = std::sregex_iterator(raw.begin(), raw.end(), boxed);
       it != std::sregex_iterator(); ++it)
    last_boxed = (*it)[1].str();
  if (last_boxed) return last_boxed;

  // tokenize on whitespace, trimming punctuation
  std::vector<std::string> tokens;
  std::vector<bool> punct_after;  // token was followed by . , ! ? : ;
  std::string cur;
  bool cur_punct = false;
  auto flush = [&] {
    if (!cur.empty()) {
      tokens.push_back(cur);
      punct_after.push_back(cur_punct);
    }
    cur.clear();
    cur_punct = false;
  };
  for (char ch : raw) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      flush();
    } else if (ch == '.' || ch == ',' || ch == '!' || ch == '?' || ch == ':' ||
               ch == ';' || ch == ')' || ch == '(') {
      // punctuation ends the token but is not part of it
      cur_punct = !cur.empty();
      flush();
    } else {
      cur += ch;
    }
  }
  flush();

  // standalone option letter A-D; the bare article "A" mid-sentence is
  // ignored unless terminal or followed by punctuation
  std::optional<std::string> letter;
  for (size_t i = 0; i < tokens.size(); ++i) {
    const std::string& t = tokens[i];
    if (t.size() != 1) continue;
    char c = char(std::toupper(static_cast<unsigned char>(t[0])));
    if (c < 'A' || c > 'D') continue;
    bool terminal = (i + 1 == tokens.size());
    if (c == 'A' && !terminal && !punct_after[i]) continue;
    letter = std::string(1, t[0]);
  }
  if (letter) return letter;

  std::optional<std::string> number;
  for (const auto& t : tokens) {
    double v;
    if (is_numeric_token(t, &v)) number = t;
  }
  return number;
}

}  // namespace geoloop::harness
