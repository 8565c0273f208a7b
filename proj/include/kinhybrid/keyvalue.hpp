#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace kinhybrid {

/// Sectioned key/value text:
///
///   # comment
///   [section]
///   key = value tokens
///
/// Sections and keys may repeat; order is kept.
struct KvEntry {
  std::string key;
  std::string value;
  int line = 0;
};

struct KvSection {
  std::string name;
  std::vector<KvEntry> entries;
  int line = 0;

  /// Last value of `key`, if any.
  std::optional<std::string> find(const std::string& key) const;
  std::vector<std::string> all(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
};

struct KvDocument {
  std::vector<KvSection> sections;

  const KvSection* first(const std::string& name) const;
  std::vector<const KvSection*> all(const std::string& name) const;
};

KvDocument parse_keyvalue(std::istream& in);
KvDocument parse_keyvalue_file(const std::string& path);

/// Whitespace-separated numbers of a value string.
std::vector<double> parse_numbers(const std::string& text);
double parse_double(const std::string& text);
std::int64_t parse_int(const std::string& text);

/// Shortest text that reads back to the same double.
std::string format_double(double v);

}  // namespace kinhybrid
