#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>

#include "krylov/types.hpp"

namespace krylov {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key-value config with dotted keys ("model.N = 16"), '#' comments.
// Unknown keys are rejected against a per-command schema.
class RunConfig {
 public:
  static RunConfig parse_file(const std::string& path);
  static RunConfig parse_text(const std::string& text);

  void set(const std::string& key, const std::string& value) { kv_[key] = value; }
  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  std::string get_str(const std::string& key, std::optional<std::string> def = {}) const;
  double get_num(const std::string& key, std::optional<double> def = {}) const;
  long get_int(const std::string& key, std::optional<long> def = {}) const;
  bool get_bool(const std::string& key, std::optional<bool> def = {}) const;

  void check_schema(const std::set<std::string>& allowed) const;
  std::string canonical_text() const;
  std::string hash() const;  // FNV-1a of the canonical text, hex

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace krylov
