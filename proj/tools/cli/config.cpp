#include "config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "critasym/errors.hpp"

namespace critasym::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Shortest spelling that round-trips.
std::string canonical(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (t.empty() || pos != t.size() || !std::isfinite(v)) {
    throw ValidationError("config key '" + key + "': '" + t + "' is not a finite number");
  }
  return v;
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) throw ValidationError("config line " + std::to_string(lineno) + ": empty key");
    if (c.raw_.count(key)) throw ValidationError("config line " + std::to_string(lineno) + ": duplicate key " + key);
    c.raw_[key] = trim(s.substr(eq + 1));
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void Config::set(const std::string& key, const std::string& value) { raw_[trim(key)] = trim(value); }

void Config::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || trim(assignment.substr(0, eq)).empty()) {
    throw ValidationError("override '" + assignment + "' is not key=value");
  }
  set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

std::string Config::resolve(const std::string& key, const std::string& fallback) {
  used_.insert(key);
  const auto it = raw_.find(key);
  const std::string v = it == raw_.end() ? fallback : it->second;
  effective_[key] = v;
  return v;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) { return resolve(key, fallback); }

double Config::get_double(const std::string& key, double fallback) {
  const double v = parse_number(key, resolve(key, canonical(fallback)));
  effective_[key] = canonical(v);  // so "0.10" and "0.1" hash alike
  return v;
}

int Config::get_int(const std::string& key, int fallback) {
  const double v = parse_number(key, resolve(key, std::to_string(fallback)));
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ValidationError("config key '" + key + "' must be an integer");
  effective_[key] = std::to_string(static_cast<int>(v));
  return static_cast<int>(v);
}

std::vector<double> Config::get_list(const std::string& key, const std::string& fallback) {
  const std::vector<double> v = parse_list(key, resolve(key, fallback));
  std::string canon;
  for (std::size_t i = 0; i < v.size(); ++i) canon += (i ? "," : "") + canonical(v[i]);
  effective_[key] = canon;
  return v;
}

void Config::reject_unknown() const {
  std::string bad;
  for (const auto& [k, v] : raw_) {
    if (!used_.count(k)) bad += (bad.empty() ? "" : ", ") + k;
  }
  if (!bad.empty()) throw ValidationError("unknown config keys: " + bad);
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  std::vector<double> out;
  if (s.empty()) return out;
  if (s.rfind("range(", 0) == 0) {
    if (s.back() != ')') throw ValidationError("config key '" + key + "': unterminated range(");
    const std::string inner = s.substr(6, s.size() - 7);
    std::vector<std::string> parts;
    std::stringstream ss(inner);
    for (std::string p; std::getline(ss, p, ',');) parts.push_back(p);
    if (parts.size() != 3) throw ValidationError("config key '" + key + "': range(lo, hi, count) takes three values");
    const double lo = parse_number(key, parts[0]);
    const double hi = parse_number(key, parts[1]);
    const double cnt = parse_number(key, parts[2]);
    if (cnt != std::floor(cnt) || cnt < 1 || cnt > 1e6) {
      throw ValidationError("config key '" + key + "': range count must be a positive integer");
    }
    const int n = static_cast<int>(cnt);
    if (n == 1) return {lo};
    for (int i = 0; i < n; ++i) out.push_back(i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1));
    return out;
  }
  std::stringstream ss(s);
  for (std::string p; std::getline(ss, p, ',');) out.push_back(parse_number(key, p));
  return out;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash(const std::string& command, const std::map<std::string, std::string>& effective,
                        double tol_scale) {
  std::string canon = "command=" + command + "\n";
  for (const auto& [k, v] : effective) canon += k + "=" + v + "\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "tol_scale=%.17g\n", tol_scale);
  canon += buf;
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canon)));
  return buf;
}

}  // namespace critasym::cli
