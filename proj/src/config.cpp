#include "sfcplan/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "sfcplan/errors.hpp"

namespace sfcplan {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string formatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

KeyValueConfig KeyValueConfig::fromFile(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return fromString(ss.str());
}

KeyValueConfig KeyValueConfig::fromString(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + " has no '='");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + " has empty key");
    cfg.values_[key] = trim(t.substr(eq + 1));
  }
  return cfg;
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

double KeyValueConfig::getDouble(const std::string& key, double fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  try {
    std::size_t pos = 0;
    const double d = std::stod(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' is not a number: " + *v);
  }
}

int KeyValueConfig::getInt(const std::string& key, int fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  try {
    std::size_t pos = 0;
    const long d = std::stol(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument("trailing characters");
    return static_cast<int>(d);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' is not an integer: " + *v);
  }
}

bool KeyValueConfig::getBool(const std::string& key, bool fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  throw ConfigError("config key '" + key + "' is not a boolean: " + *v);
}

std::string KeyValueConfig::getString(const std::string& key,
                                      const std::string& fallback) const {
  return get(key).value_or(fallback);
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  values_[key] = value;
}

void KeyValueConfig::setDouble(const std::string& key, double value) {
  values_[key] = formatDouble(value);
}

void KeyValueConfig::setInt(const std::string& key, long long value) {
  values_[key] = std::to_string(value);
}

void KeyValueConfig::setBool(const std::string& key, bool value) {
  values_[key] = value ? "true" : "false";
}

std::vector<std::string> KeyValueConfig::keys() const {
  std::vector<std::string> out;
  out.reserve(values_.size());
  for (const auto& [k, v] : values_) out.push_back(k);
  return out;
}

std::string KeyValueConfig::echo() const {
  std::ostringstream os;
  for (const auto& [k, v] : values_) os << k << " = " << v << "\n";
  return os.str();
}

void KeyValueConfig::writeFile(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open config file for writing: " + path);
  os << echo();
  if (!os) throw ConfigError("failed writing config file: " + path);
}

}  // namespace sfcplan
