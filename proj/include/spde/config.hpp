#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace spde {

/// Flat dotted-key configuration, e.g. `kernel.family = heat`.
///
/// Files hold one `key = value` pair per line; `#` starts a comment. Later
/// assignments override earlier ones, so a file followed by command-line
/// overrides forms the layered configuration. Every key is checked against a
/// fixed schema; violations raise ConfigError carrying the key path.
class Config {
 public:
  Config() = default;

  static Config from_text(const std::string& text, const std::string& origin = "<text>");
  /// Reads a key-value file or a manifest.json written by a previous run.
  static Config from_file(const std::string& path);

  void set(const std::string& key, const std::string& value);
  /// Parses `key=value`.
  void assign(const std::string& assignment);
  void erase(const std::string& key) { values_.erase(key); }

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::optional<std::string> get(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  /// Accepts `inf`.
  std::optional<double> get_optional_double(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<int> get_int_list(const std::string& key) const;
  std::uint64_t get_seed() const;

  const std::map<std::string, std::string>& values() const { return values_; }
  /// Sorted `key=value` lines.
  std::string canonical() const;
  /// FNV-1a 64 of the canonical form.
  std::uint64_t hash() const;
  std::string hash_hex() const;

  /// Subcommand recorded in a replayed manifest, if any.
  const std::optional<std::string>& subcommand() const { return subcommand_; }

  /// Every key accepted by the schema.
  static const std::vector<std::string>& known_keys();

 private:
  std::map<std::string, std::string> values_;
  std::optional<std::string> subcommand_;
};

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace spde
