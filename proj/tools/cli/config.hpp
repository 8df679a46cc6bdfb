#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace critasym::cli {

/// Flat key = value configuration. Lines starting with '#' are comments.
/// Numeric lists are comma separated or range(lo, hi, count) with both ends
/// included; an empty value is an empty list.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  /// Parses "key=value" as given on the command line.
  void set_assignment(const std::string& assignment);

  // Each getter records the value it resolved, defaults included, so that the
  // effective configuration (and its hash) is known before any computation.
  std::string get_string(const std::string& key, const std::string& fallback);
  double get_double(const std::string& key, double fallback);
  int get_int(const std::string& key, int fallback);
  std::vector<double> get_list(const std::string& key, const std::string& fallback);

  bool has(const std::string& key) const { return raw_.count(key) != 0; }
  /// Throws ValidationError naming keys that no getter consumed.
  void reject_unknown() const;

  const std::map<std::string, std::string>& effective() const { return effective_; }

 private:
  std::string resolve(const std::string& key, const std::string& fallback);

  std::map<std::string, std::string> raw_;
  std::map<std::string, std::string> effective_;
  std::set<std::string> used_;
};

std::vector<double> parse_list(const std::string& key, const std::string& text);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);

/// Hash of the command name, the effective configuration in key order and the
/// tolerance scale, as 16 hex digits.
std::string config_hash(const std::string& command, const std::map<std::string, std::string>& effective,
                        double tol_scale);

}  // namespace critasym::cli
