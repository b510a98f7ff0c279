#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace itwf {

/// Flat `key = value` configuration with `#` comments. Values are consumed
/// through the typed take_* accessors; whatever is left over afterwards is an
/// unknown key.
class KeyValueConfig {
public:
  static KeyValueConfig parse(std::istream &in, std::string const &source = "<config>");
  /// IoError if the file cannot be opened, ConfigError if it cannot be parsed.
  static KeyValueConfig load(std::filesystem::path const &path);

  bool empty() const { return entries_.empty(); }
  bool contains(std::string const &key) const { return entries_.contains(key); }
  void set(std::string const &key, std::string value) { entries_[key] = {std::move(value), 0}; }

  std::optional<std::string> take_string(std::string const &key);
  std::optional<double> take_double(std::string const &key);
  std::optional<long long> take_int(std::string const &key);
  std::optional<std::uint64_t> take_u64(std::string const &key);
  std::optional<bool> take_bool(std::string const &key);
  /// Comma-separated list of numbers.
  std::optional<std::vector<double>> take_doubles(std::string const &key);
  std::optional<std::vector<std::string>> take_strings(std::string const &key);

  /// ConfigError naming the first unconsumed key, if any.
  void require_consumed() const;

private:
  struct Entry {
    std::string value;
    int line;
  };
  std::optional<Entry> take(std::string const &key);
  [[noreturn]] void fail(std::string const &key, Entry const &e, std::string const &why) const;

  std::string source_;
  std::map<std::string, Entry> entries_;
};

} // namespace itwf
