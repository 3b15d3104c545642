#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace geoloop::harness {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Loop configuration; parsed from key=value lines ('#' comments allowed).
struct Config {
  std::string seeds_path;   // directory of .geo seed programs
  std::string out_dir = "out";
  int iterations = 5;       // T
  int k = 8;                // attempts per problem (trigger group size)
  int n_eval = 8;           // N for Mean@N evaluation
  int sample_n = 4;         // problems sampled per iteration
  int workers = 16;
  double eps = 0.2;
  double beta = 0.04;
  double lr = 0.1;
  std::uint64_t seed = 0;
  std::string backend = "toy";  // toy | scripted | http
  std::string scripted_fallback = "I cannot solve this.";
  std::string http_url;
  std::string http_model = "default";
  int http_timeout_s = 300;
  int http_max_tokens = 1024;
  double http_temperature = 0.1;
};

Config parse_config_text(const std::string& text);
Config load_config(const std::string& path);

}  // namespace geoloop::harness
