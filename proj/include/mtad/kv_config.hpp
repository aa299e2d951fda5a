#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mtad {

/// `key = value` text configuration. Blank lines and lines starting with '#'
/// are ignored. Every typed getter marks its key as consumed so that
/// `require_all_consumed` can reject unknown keys.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  /// Throws ConfigError naming `source` and the line on malformed input.
  static KeyValueConfig parse(std::string_view text, std::string_view source = "<config>");
  static KeyValueConfig load(const std::filesystem::path& path);

  /// Adds or replaces an entry; "key=value" form for command-line overrides.
  void set(const std::string& key, const std::string& value);
  void set_assignment(std::string_view assignment);
  void erase(const std::string& key);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// "lo:hi" with lo <= hi.
  std::pair<double, double> get_range(const std::string& key, std::pair<double, double> fallback) const;
  /// Throws ConfigError when the key is absent.
  std::string require_string(const std::string& key) const;

  /// Marks a key as known without reading it.
  void mark_consumed(const std::string& key) const { consumed_.insert(key); }
  /// Throws ConfigError listing every key no getter has read.
  void require_all_consumed() const;
  std::vector<std::string> unconsumed() const;

  /// Sorted `key=value` lines; stable for hashing.
  std::string serialize() const;
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
  mutable std::set<std::string> consumed_;
};

}  // namespace mtad
