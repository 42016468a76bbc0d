#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sfcplan {

// Plain-text key=value configuration. Lines starting with '#' and blank
// lines are skipped; whitespace around keys and values is trimmed. Writing
// emits keys in sorted order so a parse/echo round trip is stable.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig fromFile(const std::string& path);
  static KeyValueConfig fromString(const std::string& text);

  bool contains(const std::string& key) const { return values_.count(key) > 0; }
  std::optional<std::string> get(const std::string& key) const;
  // Typed getters throw ConfigError on malformed values, and return the
  // fallback when the key is absent.
  double getDouble(const std::string& key, double fallback) const;
  int getInt(const std::string& key, int fallback) const;
  bool getBool(const std::string& key, bool fallback) const;
  std::string getString(const std::string& key, const std::string& fallback) const;

  void set(const std::string& key, const std::string& value);
  void setDouble(const std::string& key, double value);
  void setInt(const std::string& key, long long value);
  void setBool(const std::string& key, bool value);

  std::vector<std::string> keys() const;
  std::string echo() const;
  void writeFile(const std::string& path) const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace sfcplan
