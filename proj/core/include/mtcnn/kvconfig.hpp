#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace mtcnn {

/// Plain-text key-value configuration file reader.
///
/// Grammar: one `key = value` pair per line, `#` starts a comment,
/// blank lines are ignored. Consumers pull typed values through the
/// getters; `finish()` rejects any key that was never consumed so
/// misspelled keys fail loudly instead of silently using defaults.
class KvConfig {
 public:
  KvConfig() = default;

  static KvConfig from_file(const std::string& path);
  static KvConfig from_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback);
  long long get_int(const std::string& key, long long fallback);
  double get_double(const std::string& key, double fallback);
  bool get_bool(const std::string& key, bool fallback);
  std::vector<long long> get_int_list(const std::string& key, const std::vector<long long>& fallback);
  std::vector<double> get_double_list(const std::string& key, const std::vector<double>& fallback);

  /// Override or insert a value (flag-over-file precedence).
  void set(const std::string& key, const std::string& value);

  /// Throws ConfigError naming the first unconsumed key, if any.
  void finish() const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::string take(const std::string& key);

  std::map<std::string, std::string> entries_;
  std::set<std::string> consumed_;
  std::string origin_;
};

std::vector<std::string> split(const std::string& s, char sep);
std::string trim(const std::string& s);

}  // namespace mtcnn
