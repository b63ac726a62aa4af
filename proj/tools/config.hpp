#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/property_tree/ptree.hpp>

namespace cli {

/// Bad or inconsistent configuration; the CLI exits with status 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A run that could not be completed numerically; exit status 3.
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// INI file with [sections] and key = value lines (';' starts a comment).
/// Every read is recorded so that leftover keys can be reported as typos.
class Config {
 public:
  Config() = default;
  static Config load(const std::filesystem::path& path);

  bool has_section(const std::string& section) const;
  bool has(const std::string& section, const std::string& key) const;

  double number(const std::string& section, const std::string& key, double fallback);
  double number(const std::string& section, const std::string& key);
  std::uint64_t count(const std::string& section, const std::string& key, std::uint64_t fallback);
  std::string text(const std::string& section, const std::string& key, const std::string& fallback);
  std::string text(const std::string& section, const std::string& key);
  std::vector<double> list(const std::string& section, const std::string& key);

  /// Remaining (key, value) pairs of a section, marking them read.
  std::vector<std::pair<std::string, double>> rest_as_numbers(const std::string& section);

  /// Throws ConfigError naming the first key that was never read.
  void reject_unread() const;

  const std::string& source() const { return source_; }

 private:
  std::optional<std::string> raw(const std::string& section, const std::string& key);
  [[noreturn]] void bad(const std::string& section, const std::string& key,
                        const std::string& why) const;

  boost::property_tree::ptree tree_;
  std::string source_;
  std::set<std::pair<std::string, std::string>> read_;
};

}  // namespace cli
