#ifndef DIRAC6C_CONFIG_HPP
#define DIRAC6C_CONFIG_HPP

#include "dirac6c/harness.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dirac6c {

/// Parse or validation failure; line is 0 when the offending value is a
/// default.
class ConfigError : public std::runtime_error {
public:
  ConfigError(int line, std::string key, std::string const &message);
  int line() const { return line_; }
  std::string const &key() const { return key_; }

private:
  int line_;
  std::string key_;
};

struct RunConfig {
  ProblemConfig problem;

  std::string scheme = "S6c";
  double tau = 0.01;
  std::vector<double> taus;
  std::vector<int> sizes;
  int workers = 1;
  std::uint64_t seed = 1;

  ReferenceProtocol reference;
  SweepSpec sweep;

  std::string csv;
  std::string gnuplot;
  std::string dump;
  std::string cache_dir;

  /// Fully resolved config in the input format; parse(echo()) == *this.
  std::string echo() const;
  /// Hash of echo().
  std::string hash() const;
  /// Cache directory after applying DIRAC6C_CACHE_DIR when unset here.
  std::string resolved_cache_dir() const;

  friend bool operator==(RunConfig const &a, RunConfig const &b) {
    return a.echo() == b.echo();
  }
};

/// `key = value` lines under `[section]` headers; `#` starts a comment.
/// Unknown sections or keys, malformed values and constraint violations
/// throw ConfigError naming the line and key.
RunConfig parse_config(std::string_view text);
RunConfig load_config(std::string const &path);

/// Documentation of every key: "section.key  default  description".
std::string config_schema_text();

} // namespace dirac6c

#endif
