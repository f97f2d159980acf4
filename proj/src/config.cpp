#include "biaslearn/config.hpp"

#include <fstream>
#include <sstream>

namespace biaslearn {
namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(line_no) +
                          ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError("line " + std::to_string(line_no) +
                          ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (section.empty())
      throw ConfigError("line " + std::to_string(line_no) +
                        ": key outside any [section]");
    std::istringstream vs(line.substr(eq + 1));
    std::vector<std::string> toks;
    std::string tok;
    while (vs >> tok) toks.push_back(tok);
    cfg.data_[section][key] = std::move(toks);
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

bool Config::has(const std::string& section, const std::string& key) const {
  const auto s = data_.find(section);
  return s != data_.end() && s->second.count(key) > 0;
}

const std::vector<std::string>& Config::tokens(const std::string& section,
                                               const std::string& key) const {
  const auto s = data_.find(section);
  if (s == data_.end())
    throw ConfigError("missing config section [" + section + "]");
  const auto k = s->second.find(key);
  if (k == s->second.end())
    throw ConfigError("missing config key '" + key + "' in [" + section + "]");
  return k->second;
}

std::string Config::get_str(const std::string& section,
                            const std::string& key) const {
  const auto& t = tokens(section, key);
  if (t.size() != 1)
    throw ConfigError("key '" + key + "' in [" + section +
                      "] wants a single value");
  return t[0];
}

std::string Config::get_str(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
  return has(section, key) ? get_str(section, key) : fallback;
}

double Config::get_double(const std::string& section,
                          const std::string& key) const {
  try {
    return std::stod(get_str(section, key));
  } catch (const std::invalid_argument&) {
    throw ConfigError("key '" + key + "' in [" + section + "] is not a number");
  }
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

long long Config::get_int(const std::string& section,
                          const std::string& key) const {
  try {
    return std::stoll(get_str(section, key));
  } catch (const std::invalid_argument&) {
    throw ConfigError("key '" + key + "' in [" + section +
                      "] is not an integer");
  }
}

long long Config::get_int(const std::string& section, const std::string& key,
                          long long fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

std::vector<double> Config::get_doubles(const std::string& section,
                                        const std::string& key) const {
  std::vector<double> out;
  for (const auto& t : tokens(section, key)) {
    try {
      out.push_back(std::stod(t));
    } catch (const std::invalid_argument&) {
      throw ConfigError("key '" + key + "' in [" + section +
                        "] has a non-numeric entry '" + t + "'");
    }
  }
  return out;
}

std::vector<long long> Config::get_ints(const std::string& section,
                                        const std::string& key) const {
  std::vector<long long> out;
  for (const auto& t : tokens(section, key)) {
    try {
      out.push_back(std::stoll(t));
    } catch (const std::invalid_argument&) {
      throw ConfigError("key '" + key + "' in [" + section +
                        "] has a non-integer entry '" + t + "'");
    }
  }
  return out;
}

}  // namespace biaslearn
