#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vitals {

/// Flat key-value settings read from an INI/TOML-style file. Section
/// headers and dotted keys both flatten to "section.key"; array values
/// ("[1, 2]") become several entries.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig parse(std::string_view text);
  static KeyValueConfig load(const std::filesystem::path& path);

  bool contains(std::string_view key) const;
  const std::vector<std::string>* find(std::string_view key) const;

  /// The single value of a key; throws InputError when it holds an array.
  std::optional<std::string> get(std::string_view key) const;
  std::optional<double> get_double(std::string_view key) const;
  std::optional<long long> get_int(std::string_view key) const;
  std::optional<bool> get_bool(std::string_view key) const;

  const std::map<std::string, std::vector<std::string>, std::less<>>& entries() const { return entries_; }

  void set(std::string key, std::vector<std::string> values) { entries_[std::move(key)] = std::move(values); }

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> entries_;
};

double parse_double(std::string_view key, std::string_view text);
long long parse_int(std::string_view key, std::string_view text);

}  // namespace vitals
