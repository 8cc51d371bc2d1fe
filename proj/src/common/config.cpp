#include "ptv/common/config.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "ptv/common/error.hpp"
#include "ptv/common/table_io.hpp"

namespace ptv {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

Config Config::from_file(const std::filesystem::path& path) {
  return from_text(read_text_file(path), path.string());
}

Config Config::from_text(const std::string& text, const std::string& origin) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": expected 'key = value', got '" + stripped + "'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    }
    cfg.entries_[key] = value;
  }
  return cfg;
}

void Config::set(const std::string& key, const std::string& value) {
  entries_[key] = value;
}

void Config::merge(const Config& overrides) {
  for (const auto& [k, v] : overrides.entries_) entries_[k] = v;
}

bool Config::has(const std::string& key) const { return entries_.count(key) > 0; }

std::optional<std::string> Config::raw(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
  const auto v = raw(key);
  return v ? *v : fallback;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto v = raw(key);
  if (!v) return fallback;
  double out = 0.0;
  const char* first = v->data();
  const char* last = v->data() + v->size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) {
    throw ConfigError("config key '" + key + "': not a number: '" + *v + "'");
  }
  return out;
}

long Config::get_long(const std::string& key, long fallback) const {
  const double v = get_double(key, static_cast<double>(fallback));
  const long out = static_cast<long>(v);
  if (static_cast<double>(out) != v) {
    throw ConfigError("config key '" + key + "': expected an integer");
  }
  return out;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto v = raw(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + *v + "'");
}

std::vector<std::string> Config::keys() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [k, v] : entries_) out.push_back(k);
  return out;
}

std::string Config::canonical_text() const {
  std::ostringstream out;
  for (const auto& [k, v] : entries_) out << k << " = " << v << "\n";
  return out.str();
}

void Config::require_known_keys(const std::vector<std::string>& known) const {
  for (const auto& [key, value] : entries_) {
    bool ok = false;
    for (const auto& pattern : known) {
      if (pattern.size() >= 2 && pattern.ends_with(".*")) {
        const std::string prefix = pattern.substr(0, pattern.size() - 1);
        if (key.rfind(prefix, 0) == 0) {
          ok = true;
          break;
        }
      } else if (key == pattern) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ConfigError("unknown config key: '" + key + "'");
  }
}

}  // namespace ptv
