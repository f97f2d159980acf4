#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace biaslearn {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Plain-text sectioned "key = value" configuration:
//
//   [experiment]
//   kind = curve
//   [sweep]
//   n = 1 2 4 8
//
// Values after '=' are whitespace-separated tokens; '#' starts a comment.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;

  std::string get_str(const std::string& section, const std::string& key) const;
  std::string get_str(const std::string& section, const std::string& key,
                      const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  long long get_int(const std::string& section, const std::string& key) const;
  long long get_int(const std::string& section, const std::string& key,
                    long long fallback) const;

  std::vector<double> get_doubles(const std::string& section,
                                  const std::string& key) const;
  std::vector<long long> get_ints(const std::string& section,
                                  const std::string& key) const;

  const std::vector<std::string>& tokens(const std::string& section,
                                         const std::string& key) const;

 private:
  std::map<std::string, std::map<std::string, std::vector<std::string>>> data_;
};

}  // namespace biaslearn
