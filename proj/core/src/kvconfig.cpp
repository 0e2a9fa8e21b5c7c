#include "mtcnn/kvconfig.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "mtcnn/errors.hpp"

namespace mtcnn {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

KvConfig KvConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str(), path);
}

KvConfig KvConfig::from_string(const std::string& text, const std::string& origin) {
  KvConfig cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value', got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    cfg.entries_[key] = value;
  }
  return cfg;
}

bool KvConfig::has(const std::string& key) const { return entries_.count(key) != 0; }

void KvConfig::set(const std::string& key, const std::string& value) { entries_[key] = value; }

std::string KvConfig::take(const std::string& key) {
  consumed_.insert(key);
  return entries_.at(key);
}

std::string KvConfig::get_string(const std::string& key, const std::string& fallback) {
  if (!has(key)) return fallback;
  return take(key);
}

long long KvConfig::get_int(const std::string& key, long long fallback) {
  if (!has(key)) return fallback;
  std::string v = take(key);
  try {
    std::size_t pos = 0;
    long long r = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected integer, got '" + v + "'");
  }
}

double KvConfig::get_double(const std::string& key, double fallback) {
  if (!has(key)) return fallback;
  std::string v = take(key);
  try {
    std::size_t pos = 0;
    double r = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected number, got '" + v + "'");
  }
}

bool KvConfig::get_bool(const std::string& key, bool fallback) {
  if (!has(key)) return fallback;
  std::string v = take(key);
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "': expected boolean, got '" + v + "'");
}

std::vector<long long> KvConfig::get_int_list(const std::string& key, const std::vector<long long>& fallback) {
  if (!has(key)) return fallback;
  std::string v = take(key);
  std::vector<long long> out;
  for (const auto& part : split(v, ',')) {
    std::string p = trim(part);
    if (p.empty()) throw ConfigError("key '" + key + "': empty list element");
    try {
      std::size_t pos = 0;
      out.push_back(std::stoll(p, &pos));
      if (pos != p.size()) throw std::invalid_argument(p);
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': expected integer list, got '" + v + "'");
    }
  }
  return out;
}

std::vector<double> KvConfig::get_double_list(const std::string& key, const std::vector<double>& fallback) {
  if (!has(key)) return fallback;
  std::string v = take(key);
  std::vector<double> out;
  for (const auto& part : split(v, ',')) {
    std::string p = trim(part);
    if (p.empty()) throw ConfigError("key '" + key + "': empty list element");
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(p, &pos));
      if (pos != p.size()) throw std::invalid_argument(p);
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': expected number list, got '" + v + "'");
    }
  }
  return out;
}

void KvConfig::finish() const {
  for (const auto& [key, value] : entries_) {
    if (!consumed_.count(key))
      throw ConfigError(origin_ + ": unknown key '" + key + "'");
  }
}

}  // namespace mtcnn
