#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ptv {

// Flat `key = value` configuration. `#` starts a comment; later assignments
// override earlier ones, so layering is: built-in defaults, then file, then
// command-line --set overrides.
class Config {
 public:
  Config() = default;

  static Config from_file(const std::filesystem::path& path);
  static Config from_text(const std::string& text, const std::string& origin);

  void set(const std::string& key, const std::string& value);
  void merge(const Config& overrides);

  bool has(const std::string& key) const;
  std::optional<std::string> raw(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Keys actually present, sorted; used for schema validation and hashing.
  std::vector<std::string> keys() const;

  // Canonical `key = value` dump (sorted), the input to the config hash and
  // the manifests.
  std::string canonical_text() const;

  // Throws ConfigError naming the first key that is not in `known` (prefix
  // matches allowed for `prefix.*` entries).
  void require_known_keys(const std::vector<std::string>& known) const;

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace ptv
