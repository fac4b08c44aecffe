#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace cwvo {

/// "key = value" text with '#' comments. Keys may repeat; scalar getters
/// take the last occurrence.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text, const std::string& origin = "<string>");
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_all(const std::string& key) const;

  void set(const std::string& key, const std::string& value);

  /// Throws kValidation naming every key outside `allowed`.
  void reject_unknown(const std::set<std::string>& allowed) const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  const Entry* last(const std::string& key) const;
  [[noreturn]] void bad_value(const std::string& key, const Entry& e, const char* want) const;

  std::string origin_;
  std::map<std::string, std::vector<Entry>> entries_;
};

/// Parses a full-string finite double, accepting "a/b" fractions such as "7/255".
bool parse_number(const std::string& text, double& out);

}  // namespace cwvo
