#pragma once

#include <optional>
#include <string>

namespace geoloop::harness {

// Primary: content of the last \boxed{...} group. Fallback: standalone
// option letter A-D (not the article "A"), then the last numeric token.
std::optional<std::string> extract_answer(const std::string& raw);

}  // namespace geoloop::harness
