#include "krylov/config.hpp"

#include <fstream>
#include <sstream>

namespace krylov {

namespace {
std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}
}  // namespace

RunConfig RunConfig::parse_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_text(ss.str());
}

RunConfig RunConfig::parse_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config: line " + std::to_string(lineno) + ": empty key");
    if (cfg.kv_.count(key))
      throw ConfigError("config: duplicate key '" + key + "'");
    cfg.kv_[key] = val;
  }
  return cfg;
}

std::string RunConfig::get_str(const std::string& key, std::optional<std::string> def) const {
  const auto it = kv_.find(key);
  if (it != kv_.end()) return it->second;
  if (def) return *def;
  throw ConfigError("config: missing key '" + key + "'");
}

double RunConfig::get_num(const std::string& key, std::optional<double> def) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) {
    if (def) return *def;
    throw ConfigError("config: missing key '" + key + "'");
  }
  try {
    size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError("config: key '" + key + "' is not a number: " + it->second);
  }
}

long RunConfig::get_int(const std::string& key, std::optional<long> def) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) {
    if (def) return *def;
    throw ConfigError("config: missing key '" + key + "'");
  }
  try {
    size_t pos = 0;
    const long v = std::stol(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError("config: key '" + key + "' is not an integer: " + it->second);
  }
}

bool RunConfig::get_bool(const std::string& key, std::optional<bool> def) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) {
    if (def) return *def;
    throw ConfigError("config: missing key '" + key + "'");
  }
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw ConfigError("config: key '" + key + "' is not a bool: " + it->second);
}

void RunConfig::check_schema(const std::set<std::string>& allowed) const {
  for (const auto& [k, v] : kv_)
    if (!allowed.count(k))
      throw ConfigError("config: unknown key '" + k + "'");
}

std::string RunConfig::canonical_text() const {
  std::string out;
  for (const auto& [k, v] : kv_) {
    out += k;
    out += "=";
    out += v;
    out += "\n";
  }
  return out;
}

std::string RunConfig::hash() const {
  const std::string text = canonical_text();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace krylov
