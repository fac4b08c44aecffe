#include "cwvo/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cwvo/error.hpp"

namespace cwvo {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_plain(const std::string& text, double& out) {
  const char* first = text.data();
  const char* end = text.data() + text.size();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(first, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return false;
  out = v;
  return true;
}

}  // namespace

bool parse_number(const std::string& text, double& out) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse_plain(text, out);
  double num = 0.0;
  double den = 0.0;
  if (!parse_plain(text.substr(0, slash), num) || !parse_plain(text.substr(slash + 1), den) ||
      den == 0.0) {
    return false;
  }
  out = num / den;
  return true;
}

KeyValueConfig KeyValueConfig::parse(const std::string& text, const std::string& origin) {
  KeyValueConfig cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string content = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kParse, origin + ":" + std::to_string(line) + ": expected key = value");
    }
    const std::string key = trim(content.substr(0, eq));
    if (key.empty()) {
      throw Error(ErrorKind::kParse, origin + ":" + std::to_string(line) + ": empty key");
    }
    cfg.entries_[key].push_back({trim(content.substr(eq + 1)), line});
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::kIo, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path.string());
}

const KeyValueConfig::Entry* KeyValueConfig::last(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second.back();
}

void KeyValueConfig::bad_value(const std::string& key, const Entry& e, const char* want) const {
  throw Error(ErrorKind::kParse, origin_ + ":" + std::to_string(e.line) + ": " + key +
                                     " expects " + want + ", got '" + e.value + "'");
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  const Entry* e = last(key);
  return e ? e->value : fallback;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const Entry* e = last(key);
  if (!e) return fallback;
  double v = 0.0;
  if (!parse_number(e->value, v)) bad_value(key, *e, "a number");
  return v;
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const {
  const Entry* e = last(key);
  if (!e) return fallback;
  long long v = 0;
  const char* end = e->value.data() + e->value.size();
  auto [ptr, ec] = std::from_chars(e->value.data(), end, v);
  if (ec != std::errc() || ptr != end) bad_value(key, *e, "an integer");
  return v;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  const Entry* e = last(key);
  if (!e) return fallback;
  if (e->value == "true" || e->value == "1") return true;
  if (e->value == "false" || e->value == "0") return false;
  bad_value(key, *e, "true or false");
}

std::vector<std::string> KeyValueConfig::get_all(const std::string& key) const {
  std::vector<std::string> out;
  const auto it = entries_.find(key);
  if (it != entries_.end()) {
    for (const Entry& e : it->second) out.push_back(e.value);
  }
  return out;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  entries_[key] = {Entry{value, 0}};
}

void KeyValueConfig::reject_unknown(const std::set<std::string>& allowed) const {
  std::string unknown;
  for (const auto& [key, list] : entries_) {
    if (allowed.count(key)) continue;
    unknown += (unknown.empty() ? "" : ", ") + key + " (line " +
               std::to_string(list.front().line) + ")";
  }
  if (!unknown.empty()) throw Error(ErrorKind::kValidation, origin_ + ": unknown keys: " + unknown);
}

}  // namespace cwvo
