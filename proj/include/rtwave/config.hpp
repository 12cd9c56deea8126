#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rtwave {

/// Flat configuration: dotted keys mapped to textual values.
///
/// Text format, line by line:
///   - '#' starts a comment unless inside a double-quoted value;
///   - "[a.b]" sets the prefix "a.b." for the keys that follow ("[]" clears it);
///   - "key = value" with key characters [A-Za-z0-9_.-]; duplicates are errors;
///   - values are trimmed; "..." is a string with \" and \\ escapes;
///     "[x, y, z]" is a list; everything else is a bare scalar.
/// Numbers are parsed with std::from_chars (round to nearest) and must use the
/// whole token. Booleans are true/false. A document whose first non-blank
/// character is '{' is read as JSON instead; nested objects become dotted keys.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<config>");
  static Config load(const std::string& path);

  bool has(const std::string& key) const;
  /// True when any key starts with "prefix.".
  bool has_block(const std::string& prefix) const;

  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<std::string> get_strings(const std::string& key) const;

  void set(const std::string& key, const std::string& value);
  /// Keys never read by any getter, in sorted order.
  std::vector<std::string> unused_keys() const;
  /// Throws ConfigError naming the first unused key.
  void reject_unused() const;
  /// Sorted "key = value" lines; identical for equivalent documents.
  std::string canonical() const;

 private:
  struct Entry {
    std::string value;
    bool list = false;
    std::vector<std::string> items;
    bool quoted = false;
    int line = 0;
    mutable bool used = false;
  };
  const Entry& entry(const std::string& key) const;
  void insert(const std::string& key, Entry e, const std::string& where);

  std::string origin_;
  std::map<std::string, Entry> entries_;
};

/// Strict numeric parse of a whole token; nullopt when the token is not a number.
std::optional<double> parse_number(const std::string& token);

}  // namespace rtwave
