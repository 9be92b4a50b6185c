#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace eigenwave::cli {

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"grid", {"nx", "nz", "hx", "hz", "x0", "z0"}},
      {"model", {"speed", "start", "quantity", "c_min", "c_max"}},
      {"synth",
       {"layout", "c_top", "c_bottom", "dome", "start_c_top", "start_c_bottom", "model_noise_percent", "snr_db"}},
      {"acquisition",
       {"source_depth", "source_x_first", "source_x_last", "source_count", "receiver_depth", "receiver_x_first",
        "receiver_x_last", "receiver_count"}},
      {"data", {"frequencies", "dataset"}},
      {"spec", {"eta", "beta", "etas", "betas"}},
      {"schedule", {"n", "n_iter", "refresh_basis", "nodal"}},
      {"optimizer", {"armijo_c1", "shrink", "max_backtracks", "initial_step_fraction"}},
      {"eigensolver", {"block_size", "max_restarts", "tolerance"}},
      {"output", {"dir", "images"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::string cleaned = s;
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::istringstream is(cleaned);
  std::string w;
  while (is >> w) {
    out.push_back(w);
  }
  return out;
}

template <typename T>
bool parse_number(const std::string& s, T& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

} // namespace

ConfigFile ConfigFile::parse(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file " + path.string());
  }
  std::ostringstream os;
  os << in.rdbuf();
  return parse_text(os.str(), path);
}

ConfigFile ConfigFile::parse_text(const std::string& text, const std::filesystem::path& origin) {
  ConfigFile cfg;
  cfg.origin_ = origin;
  const std::string where = origin.filename().string();
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) {
      continue;
    }
    const std::string at = where + ":" + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(at + "malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (!schema().contains(section)) {
        throw ConfigError(at + "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(at + "expected 'key = value'");
    }
    if (section.empty()) {
      throw ConfigError(at + "key outside of any section");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!schema().at(section).contains(key)) {
      throw ConfigError(at + "unknown key '" + key + "' in [" + section + "]");
    }
    if (value.empty()) {
      throw ConfigError(at + "empty value for '" + key + "'");
    }
    auto& entries = cfg.sections_[section];
    if (entries.contains(key)) {
      throw ConfigError(at + "duplicate key '" + key + "'");
    }
    entries[key] = {value, line_no};
  }
  return cfg;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  const auto it = sections_.find(section);
  return it != sections_.end() && it->second.contains(key);
}

bool ConfigFile::has_section(const std::string& section) const { return sections_.contains(section); }

const ConfigFile::Entry& ConfigFile::entry(const std::string& section, const std::string& key) const {
  const auto it = sections_.find(section);
  if (it == sections_.end() || !it->second.contains(key)) {
    throw ConfigError(origin_.filename().string() + ": missing required key '" + key + "' in [" + section + "]");
  }
  return it->second.at(key);
}

void ConfigFile::fail(const Entry& e, const std::string& what) const {
  throw ConfigError(origin_.filename().string() + ":" + std::to_string(e.line) + ": " + what + ", got '" + e.value +
                    "'");
}

std::string ConfigFile::text(const std::string& section, const std::string& key) const {
  return entry(section, key).value;
}

double ConfigFile::real(const std::string& section, const std::string& key) const {
  const Entry& e = entry(section, key);
  double v = 0.0;
  if (!parse_number(e.value, v) || !std::isfinite(v)) {
    fail(e, key + " must be a number");
  }
  return v;
}

int ConfigFile::integer(const std::string& section, const std::string& key) const {
  const Entry& e = entry(section, key);
  int v = 0;
  if (!parse_number(e.value, v)) {
    fail(e, key + " must be an integer");
  }
  return v;
}

bool ConfigFile::flag(const std::string& section, const std::string& key) const {
  const Entry& e = entry(section, key);
  std::string v = e.value;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (v == "true" || v == "yes" || v == "1") {
    return true;
  }
  if (v == "false" || v == "no" || v == "0") {
    return false;
  }
  fail(e, key + " must be true or false");
}

std::vector<double> ConfigFile::reals(const std::string& section, const std::string& key) const {
  const Entry& e = entry(section, key);
  std::vector<double> out;
  for (const auto& w : split_words(e.value)) {
    double v = 0.0;
    if (!parse_number(w, v) || !std::isfinite(v)) {
      fail(e, key + " must be a list of numbers");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<int> ConfigFile::integers(const std::string& section, const std::string& key) const {
  const Entry& e = entry(section, key);
  std::vector<int> out;
  for (const auto& w : split_words(e.value)) {
    int v = 0;
    if (!parse_number(w, v)) {
      fail(e, key + " must be a list of integers");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> ConfigFile::words(const std::string& section, const std::string& key) const {
  return split_words(entry(section, key).value);
}

std::filesystem::path ConfigFile::path(const std::string& section, const std::string& key) const {
  const std::filesystem::path p(entry(section, key).value);
  return p.is_absolute() ? p : origin_.parent_path() / p;
}

double ConfigFile::real_or(const std::string& section, const std::string& key, double fallback) const {
  return has(section, key) ? real(section, key) : fallback;
}

int ConfigFile::integer_or(const std::string& section, const std::string& key, int fallback) const {
  return has(section, key) ? integer(section, key) : fallback;
}

bool ConfigFile::flag_or(const std::string& section, const std::string& key, bool fallback) const {
  return has(section, key) ? flag(section, key) : fallback;
}

} // namespace eigenwave::cli
