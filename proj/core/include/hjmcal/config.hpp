#pragma once

#include <map>
#include <string>
#include <vector>

namespace hjmcal {

// INI-style configuration: [section] headers, key = value lines, '#' comments.
// Keys are addressed as "section.key"; keys before any section live in "".
class Config {
 public:
  Config() = default;

  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get_str(const std::string& key) const;
  std::string get_str(const std::string& key, const std::string& dflt) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double dflt) const;
  long get_int(const std::string& key) const;
  long get_int(const std::string& key, long dflt) const;
  bool get_bool(const std::string& key, bool dflt) const;
  // Comma-separated list of numbers.
  std::vector<double> get_list(const std::string& key, const std::vector<double>& dflt) const;

  void set(const std::string& key, const std::string& value);
  std::string serialize() const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace hjmcal
