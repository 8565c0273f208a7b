#include "kinhybrid/keyvalue.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "kinhybrid/errors.hpp"

namespace kinhybrid {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) throw ConfigError("not a number: '" + text + "'");
  return v;
}

std::int64_t parse_int(const std::string& text) {
  const std::string t = trim(text);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec == std::errc() && ptr == t.data() + t.size() && !t.empty()) return v;
  // Accept integral values written in floating-point form, e.g. 1e5.
  const double d = parse_double(t);
  if (d != static_cast<double>(static_cast<std::int64_t>(d))) throw ConfigError("not an integer: '" + text + "'");
  return static_cast<std::int64_t>(d);
}

std::vector<double> parse_numbers(const std::string& text) {
  std::istringstream in(text);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(parse_double(tok));
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw ContractViolation("format_double failed");
  return std::string(buf, ptr);
}

std::optional<std::string> KvSection::find(const std::string& key) const {
  std::optional<std::string> out;
  for (const auto& e : entries)
    if (e.key == key) out = e.value;
  return out;
}

std::vector<std::string> KvSection::all(const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& e : entries)
    if (e.key == key) out.push_back(e.value);
  return out;
}

std::string KvSection::get_string(const std::string& key) const {
  auto v = find(key);
  if (!v) throw ConfigError("[" + name + "] missing key '" + key + "'");
  return *v;
}

std::string KvSection::get_string(const std::string& key, const std::string& fallback) const {
  return find(key).value_or(fallback);
}

double KvSection::get_double(const std::string& key) const { return parse_double(get_string(key)); }

double KvSection::get_double(const std::string& key, double fallback) const {
  auto v = find(key);
  return v ? parse_double(*v) : fallback;
}

std::int64_t KvSection::get_int(const std::string& key) const { return parse_int(get_string(key)); }

std::int64_t KvSection::get_int(const std::string& key, std::int64_t fallback) const {
  auto v = find(key);
  return v ? parse_int(*v) : fallback;
}

std::uint64_t KvSection::get_uint(const std::string& key, std::uint64_t fallback) const {
  auto v = find(key);
  if (!v) return fallback;
  const std::int64_t i = parse_int(*v);
  if (i < 0) throw ConfigError("[" + name + "] key '" + key + "' must be non-negative");
  return static_cast<std::uint64_t>(i);
}

const KvSection* KvDocument::first(const std::string& name) const {
  for (const auto& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

std::vector<const KvSection*> KvDocument::all(const std::string& name) const {
  std::vector<const KvSection*> out;
  for (const auto& s : sections)
    if (s.name == name) out.push_back(&s);
  return out;
}

KvDocument parse_keyvalue(std::istream& in) {
  KvDocument doc;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header");
      doc.sections.push_back({trim(line.substr(1, line.size() - 2)), {}, line_no});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    if (doc.sections.empty()) throw ConfigError("line " + std::to_string(line_no) + ": entry outside any section");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    doc.sections.back().entries.push_back({key, trim(line.substr(eq + 1)), line_no});
  }
  return doc;
}

KvDocument parse_keyvalue_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return parse_keyvalue(in);
}

}  // namespace kinhybrid
