#include "config.hpp"

#include <charconv>
#include <cmath>

#include <boost/property_tree/ini_parser.hpp>

namespace cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_double(std::string_view s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

}  // namespace

Config Config::load(const std::filesystem::path& path) {
  Config cfg;
  cfg.source_ = path.string();
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), cfg.tree_);
  } catch (const boost::property_tree::ini_parser_error& e) {
    std::string where = e.filename();
    if (e.line() > 0) where += ":" + std::to_string(e.line());
    throw ConfigError(where + ": " + e.message());
  }
  return cfg;
}

bool Config::has_section(const std::string& section) const {
  return tree_.get_child_optional(section).has_value();
}

bool Config::has(const std::string& section, const std::string& key) const {
  const auto sec = tree_.get_child_optional(section);
  return sec && sec->find(key) != sec->not_found();
}

std::optional<std::string> Config::raw(const std::string& section, const std::string& key) {
  read_.insert({section, key});
  const auto sec = tree_.get_child_optional(section);
  if (!sec) return std::nullopt;
  const auto it = sec->find(key);
  if (it == sec->not_found()) return std::nullopt;
  return it->second.data();
}

void Config::bad(const std::string& section, const std::string& key, const std::string& why) const {
  throw ConfigError(source_ + ": [" + section + "] " + key + ": " + why);
}

double Config::number(const std::string& section, const std::string& key, double fallback) {
  const auto v = raw(section, key);
  if (!v) return fallback;
  double out = 0;
  if (!parse_double(*v, out)) bad(section, key, "expected a number, got '" + *v + "'");
  return out;
}

double Config::number(const std::string& section, const std::string& key) {
  if (!has(section, key)) bad(section, key, "required key is missing");
  return number(section, key, 0.0);
}

std::uint64_t Config::count(const std::string& section, const std::string& key,
                            std::uint64_t fallback) {
  const auto v = raw(section, key);
  if (!v) return fallback;
  const std::string t = trim(*v);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    bad(section, key, "expected a non-negative integer, got '" + *v + "'");
  return out;
}

std::string Config::text(const std::string& section, const std::string& key,
                         const std::string& fallback) {
  const auto v = raw(section, key);
  return v ? trim(*v) : fallback;
}

std::string Config::text(const std::string& section, const std::string& key) {
  if (!has(section, key)) bad(section, key, "required key is missing");
  return text(section, key, "");
}

std::vector<double> Config::list(const std::string& section, const std::string& key) {
  const auto v = raw(section, key);
  if (!v) bad(section, key, "required key is missing");
  std::vector<double> out;
  std::string_view rest = *v;
  std::size_t item = 1;
  for (;;) {
    const auto comma = rest.find(',');
    double x = 0;
    if (!parse_double(rest.substr(0, comma), x))
      bad(section, key, "item " + std::to_string(item) + " of '" + *v + "' is not a number");
    out.push_back(x);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
    ++item;
  }
  return out;
}

std::vector<std::pair<std::string, double>> Config::rest_as_numbers(const std::string& section) {
  std::vector<std::pair<std::string, double>> out;
  const auto sec = tree_.get_child_optional(section);
  if (!sec) return out;
  for (const auto& [key, node] : *sec) {
    if (read_.count({section, key})) continue;
    out.emplace_back(key, number(section, key, 0.0));
  }
  return out;
}

void Config::reject_unread() const {
  for (const auto& [section, node] : tree_) {
    if (node.empty() && !node.data().empty())
      throw ConfigError(source_ + ": key '" + section + "' must be inside a [section]");
    for (const auto& [key, value] : node)
      if (!read_.count({section, key})) bad(section, key, "unknown key");
  }
}

}  // namespace cli
