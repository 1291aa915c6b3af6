#include "vitals/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "vitals/errors.hpp"

namespace vitals {

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  KeyValueConfig config;
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error& e) {
    throw InputError(fmt::format("config: {}", e.what()));
  }
  for (auto& item : items) {
    // section open/close markers are named "++" and "--"
    if (item.name == "--" || item.name == "++" || item.name.empty()) continue;
    std::vector<std::string> parents;
    for (auto& p : item.parents)
      if (p != "default") parents.push_back(p);
    auto key = parents.empty() ? item.name : fmt::format("{}.{}", fmt::join(parents, "."), item.name);
    config.entries_[key] = std::move(item.inputs);
  }
  return config;
}

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse(in);
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot read config file '{}'", path.string()));
  return parse(in);
}

bool KeyValueConfig::contains(std::string_view key) const { return entries_.find(key) != entries_.end(); }

const std::vector<std::string>* KeyValueConfig::find(std::string_view key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

std::optional<std::string> KeyValueConfig::get(std::string_view key) const {
  const auto* values = find(key);
  if (!values) return std::nullopt;
  if (values->size() != 1) throw InputError(fmt::format("config key '{}' expects a single value", key));
  return values->front();
}

double parse_double(std::string_view key, std::string_view text) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw InputError(fmt::format("'{}': expected a number, got '{}'", key, text));
  return value;
}

long long parse_int(std::string_view key, std::string_view text) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw InputError(fmt::format("'{}': expected an integer, got '{}'", key, text));
  return value;
}

std::optional<double> KeyValueConfig::get_double(std::string_view key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  return parse_double(key, *v);
}

std::optional<long long> KeyValueConfig::get_int(std::string_view key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  return parse_int(key, *v);
}

std::optional<bool> KeyValueConfig::get_bool(std::string_view key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  if (*v == "true" || *v == "1" || *v == "on" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "off" || *v == "no") return false;
  throw InputError(fmt::format("'{}': expected a boolean, got '{}'", key, *v));
}

}  // namespace vitals
