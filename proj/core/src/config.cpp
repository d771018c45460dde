#include "hjmcal/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hjmcal/errors.hpp"

namespace hjmcal {
namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::from_string(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw BadConfig("unterminated section at line " + std::to_string(lineno));
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw BadConfig("expected key = value at line " + std::to_string(lineno));
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    if (key.empty()) throw BadConfig("empty key at line " + std::to_string(lineno));
    c.kv_[section.empty() ? key : section + "." + key] = val;
  }
  return c;
}

Config Config::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw BadConfig("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return from_string(ss.str());
}

bool Config::has(const std::string& key) const { return kv_.count(key) != 0; }

std::string Config::get_str(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) throw BadConfig("missing config key '" + key + "'");
  return it->second;
}

std::string Config::get_str(const std::string& key, const std::string& dflt) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? dflt : it->second;
}

double Config::get_double(const std::string& key) const {
  const std::string s = get_str(key);
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw BadConfig("config key '" + key + "' is not a number: '" + s + "'");
  return v;
}

double Config::get_double(const std::string& key, double dflt) const {
  return has(key) ? get_double(key) : dflt;
}

long Config::get_int(const std::string& key) const {
  const std::string s = get_str(key);
  char* end = nullptr;
  long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw BadConfig("config key '" + key + "' is not an integer: '" + s + "'");
  return v;
}

long Config::get_int(const std::string& key, long dflt) const {
  return has(key) ? get_int(key) : dflt;
}

bool Config::get_bool(const std::string& key, bool dflt) const {
  if (!has(key)) return dflt;
  std::string s = get_str(key);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw BadConfig("config key '" + key + "' is not a boolean: '" + s + "'");
}

std::vector<double> Config::get_list(const std::string& key,
                                     const std::vector<double>& dflt) const {
  if (!has(key)) return dflt;
  std::vector<double> out;
  std::istringstream in(get_str(key));
  std::string item;
  while (std::getline(in, item, ',')) {
    char* end = nullptr;
    double v = std::strtod(item.c_str(), &end);
    if (end == item.c_str())
      throw BadConfig("config key '" + key + "' has a non-numeric list item: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

void Config::set(const std::string& key, const std::string& value) { kv_[key] = value; }

std::string Config::serialize() const {
  // Group by section for readability; map iteration keeps output deterministic.
  std::string out, current_section;
  for (const auto& [key, val] : kv_) {
    std::size_t dot = key.find('.');
    std::string section = dot == std::string::npos ? "" : key.substr(0, dot);
    std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
    if (section != current_section) {
      if (!out.empty()) out += '\n';
      out += "[" + section + "]\n";
      current_section = section;
    }
    out += name + " = " + val + "\n";
  }
  return out;
}

}  // namespace hjmcal
