#include "geoloop/harness/config.hpp"

#include <fstream>
#include <sstream>

namespace geoloop::harness {

namespace {

int to_int(const std::string& k, const std::string& v) {
  try {
    size_t used = 0;
    int out = std::stoi(v, &used);
    if (used == v.size()) return out;
  } catch (...) {
  }
  throw ConfigError("invalid integer for " + k + ": " + v);
}

double to_double(const std::string& k, const std::string& v) {
  try {
    size_t used = 0;
    double out = std::stod(v, &used);
    if (used == v.size()) return out;
  } catch (...) {
  }
  throw ConfigError("invalid number for " + k + ": " + v);
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config parse_config_text(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (auto pos = line.find('#'); pos != std::string::npos) line.resize(pos);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key=value, got: " + line);
    std::string k = trim(line.substr(0, eq));
    std::string v = trim(line.substr(eq + 1));

    if (k == "seeds") cfg.seeds_path = v;
    else if (k == "out") cfg.out_dir = v;
    else if (k == "iterations") cfg.iterations = to_int(k, v);
    else if (k == "k") cfg.k = to_int(k, v);
    else if (k == "n") cfg.n_eval = to_int(k, v);
    else if (k == "sample_n") cfg.sample_n = to_int(k, v);
    else if (k == "workers") cfg.workers = to_int(k, v);
    else if (k == "eps") cfg.eps = to_double(k, v);
    else if (k == "beta") cfg.beta = to_double(k, v);
    else if (k == "lr") cfg.lr = to_double(k, v);
    else if (k == "seed") cfg.seed = std::uint64_t(to_int(k, v));
    else if (k == "backend") {
      if (v != "toy" && v != "scripted" && v != "http")
        throw ConfigError("unknown backend: " + v);
      cfg.backend = v;
    } else if (k == "scripted_fallback") cfg.scripted_fallback = v;
    else if (k == "http_url") cfg.http_url = v;
    else if (k == "http_model") cfg.http_model = v;
    else if (k == "http_timeout_s") cfg.http_timeout_s = to_int(k, v);
    else if (k == "http_max_tokens") cfg.http_max_tokens = to_int(k, v);
    else if (k == "http_temperature") cfg.http_temperature = to_double(k, v);
    else throw ConfigError("unknown config key: " + k);
  }
  if (cfg.iterations < 0 || cfg.k < 1 || cfg.workers < 1)
    throw ConfigError("iterations >= 0, k >= 1, workers >= 1 required");
  if (cfg.backend == "http" && cfg.http_url.empty())
    throw ConfigError("http backend requires http_url");
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace geoloop::harness
