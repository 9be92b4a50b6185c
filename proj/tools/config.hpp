#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace eigenwave::cli {

/// Bad or missing configuration entry; the message carries file and line.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// `[section]` headers, `key = value` lines, `#` comments. Every key must be
/// known to the schema; relative paths resolve against the file's directory.
class ConfigFile {
public:
  static ConfigFile parse(const std::filesystem::path& path);
  static ConfigFile parse_text(const std::string& text, const std::filesystem::path& origin);

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;

  std::string text(const std::string& section, const std::string& key) const;
  double real(const std::string& section, const std::string& key) const;
  int integer(const std::string& section, const std::string& key) const;
  bool flag(const std::string& section, const std::string& key) const;
  std::vector<double> reals(const std::string& section, const std::string& key) const;
  std::vector<int> integers(const std::string& section, const std::string& key) const;
  std::vector<std::string> words(const std::string& section, const std::string& key) const;
  std::filesystem::path path(const std::string& section, const std::string& key) const;

  double real_or(const std::string& section, const std::string& key, double fallback) const;
  int integer_or(const std::string& section, const std::string& key, int fallback) const;
  bool flag_or(const std::string& section, const std::string& key, bool fallback) const;

  const std::filesystem::path& origin() const { return origin_; }

private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  const Entry& entry(const std::string& section, const std::string& key) const;
  [[noreturn]] void fail(const Entry& e, const std::string& what) const;

  std::filesystem::path origin_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
};

} // namespace eigenwave::cli
