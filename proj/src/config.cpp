#include "itwf/config.hpp"

#include <charconv>
#include <fstream>

#include "itwf/errors.hpp"

namespace itwf {

namespace {

std::string trim(std::string_view s) {
  auto const first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) { return {}; }
  auto const last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename Number>
bool parse_number(std::string const &text, Number &out) {
  auto const *end = text.data() + text.size();
  auto const [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string> split_commas(std::string const &s) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    size_t const comma = s.find(',', start);
    parts.push_back(trim(std::string_view(s).substr(start, comma - start)));
    if (comma == std::string::npos) { break; }
    start = comma + 1;
  }
  return parts;
}

} // namespace

KeyValueConfig KeyValueConfig::parse(std::istream &in, std::string const &source) {
  KeyValueConfig cfg;
  cfg.source_ = source;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto const hash = line.find('#'); hash != std::string::npos) { line.erase(hash); }
    std::string const content = trim(line);
    if (content.empty()) { continue; }
    auto const eq = content.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(number) + ": expected 'key = value'");
    }
    std::string key = trim(std::string_view(content).substr(0, eq));
    std::string value = trim(std::string_view(content).substr(eq + 1));
    if (key.empty()) { throw ConfigError(source + ":" + std::to_string(number) + ": empty key"); }
    if (cfg.entries_.contains(key)) {
      throw ConfigError(source + ":" + std::to_string(number) + ": duplicate key '" + key + "'");
    }
    cfg.entries_.emplace(std::move(key), Entry{std::move(value), number});
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(std::filesystem::path const &path) {
  std::ifstream in(path);
  if (!in) { throw IoError("cannot open config " + path.string()); }
  return parse(in, path.string());
}

std::optional<KeyValueConfig::Entry> KeyValueConfig::take(std::string const &key) {
  auto const it = entries_.find(key);
  if (it == entries_.end()) { return std::nullopt; }
  Entry e = it->second;
  entries_.erase(it);
  return e;
}

void KeyValueConfig::fail(std::string const &key, Entry const &e, std::string const &why) const {
  std::string where = source_;
  if (e.line > 0) { where += ":" + std::to_string(e.line); }
  throw ConfigError(where + ": key '" + key + "': " + why + " (got '" + e.value + "')");
}

std::optional<std::string> KeyValueConfig::take_string(std::string const &key) {
  auto e = take(key);
  if (!e) { return std::nullopt; }
  return e->value;
}

std::optional<double> KeyValueConfig::take_double(std::string const &key) {
  auto e = take(key);
  if (!e) { return std::nullopt; }
  double v = 0.0;
  if (!parse_number(e->value, v)) { fail(key, *e, "expected a number"); }
  return v;
}

std::optional<long long> KeyValueConfig::take_int(std::string const &key) {
  auto e = take(key);
  if (!e) { return std::nullopt; }
  long long v = 0;
  if (!parse_number(e->value, v)) { fail(key, *e, "expected an integer"); }
  return v;
}

std::optional<std::uint64_t> KeyValueConfig::take_u64(std::string const &key) {
  auto e = take(key);
  if (!e) { return std::nullopt; }
  std::uint64_t v = 0;
  if (!parse_number(e->value, v)) { fail(key, *e, "expected an unsigned 64-bit integer"); }
  return v;
}

std::optional<bool> KeyValueConfig::take_bool(std::string const &key) {
  auto e = take(key);
  if (!e) { return std::nullopt; }
  if (e->value == "true" || e->value == "on" || e->value == "1") { return true; }
  if (e->value == "false" || e->value == "off" || e->value == "0") { return false; }
  fail(key, *e, "expected true/false");
}

std::optional<std::vector<double>> KeyValueConfig::take_doubles(std::string const &key) {
  auto e = take(key);
  if (!e) { return std::nullopt; }
  std::vector<double> values;
  for (auto const &part : split_commas(e->value)) {
    double v = 0.0;
    if (!parse_number(part, v)) { fail(key, *e, "expected a comma-separated list of numbers"); }
    values.push_back(v);
  }
  return values;
}

std::optional<std::vector<std::string>> KeyValueConfig::take_strings(std::string const &key) {
  auto e = take(key);
  if (!e) { return std::nullopt; }
  auto parts = split_commas(e->value);
  for (auto const &p : parts) {
    if (p.empty()) { fail(key, *e, "empty list element"); }
  }
  return parts;
}

void KeyValueConfig::require_consumed() const {
  if (entries_.empty()) { return; }
  auto const &[key, e] = *entries_.begin();
  std::string where = source_;
  if (e.line > 0) { where += ":" + std::to_string(e.line); }
  throw ConfigError(where + ": unknown key '" + key + "'");
}

} // namespace itwf
