#include "rtwave/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <sstream>

#include "rtwave/common.hpp"

namespace rtwave {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& k) {
  if (k.empty() || k.front() == '.' || k.back() == '.') return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-')) return false;
  return k.find("..") == std::string::npos;
}

// Removes a trailing comment outside double quotes.
std::string strip_comment(const std::string& line) {
  bool in_quote = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quote && c == '\\') {
      ++i;
      continue;
    }
    if (c == '"') in_quote = !in_quote;
    if (c == '#' && !in_quote) return line.substr(0, i);
  }
  return line;
}

std::string unquote(const std::string& v, const std::string& where) {
  std::string out;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    char c = v[i];
    if (c == '\\') {
      if (i + 1 >= v.size() - 1) throw ConfigError(where + ": dangling escape");
      c = v[++i];
      if (c != '"' && c != '\\') throw ConfigError(where + ": unknown escape \\" + std::string(1, c));
    } else if (c == '"') {
      throw ConfigError(where + ": unescaped quote inside string");
    }
    out.push_back(c);
  }
  return out;
}

std::string number_text(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

std::optional<double> parse_number(const std::string& token) {
  const std::string t = trim(token);
  if (t.empty()) return std::nullopt;
  const char* b = t.data();
  if (*b == '+') ++b;
  double v = 0.0;
  const auto r = std::from_chars(b, t.data() + t.size(), v);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size()) return std::nullopt;
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

void Config::insert(const std::string& key, Entry e, const std::string& where) {
  if (!valid_key(key)) throw ConfigError(where + ": invalid key '" + key + "'");
  if (entries_.count(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
  entries_.emplace(key, std::move(e));
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(origin + ": invalid JSON: " + e.what());
    }
    std::function<void(const nlohmann::json&, const std::string&)> walk = [&](const nlohmann::json& node,
                                                                               const std::string& path) {
      if (node.is_object()) {
        for (auto it = node.begin(); it != node.end(); ++it)
          walk(it.value(), path.empty() ? it.key() : path + "." + it.key());
        return;
      }
      Entry e;
      auto scalar = [&](const nlohmann::json& v, bool& quoted) -> std::string {
        if (v.is_string()) {
          quoted = true;
          return v.get<std::string>();
        }
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        if (v.is_number_integer()) return std::to_string(v.get<long long>());
        if (v.is_number()) return number_text(v.get<double>());
        throw ConfigError(origin + ": " + path + ": unsupported JSON value");
      };
      if (node.is_array()) {
        e.list = true;
        for (const auto& v : node) {
          bool q = false;
          e.items.push_back(scalar(v, q));
        }
      } else {
        e.value = scalar(node, e.quoted);
      }
      cfg.insert(path, std::move(e), origin + ": " + path);
    };
    if (!j.is_object()) throw ConfigError(origin + ": top-level JSON value must be an object");
    walk(j, "");
    return cfg;
  }

  std::istringstream in(text);
  std::string raw, prefix;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (!name.empty() && !valid_key(name)) throw ConfigError(where + ": invalid section name '" + name + "'");
      prefix = name.empty() ? "" : name + ".";
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    Entry e;
    e.line = lineno;
    if (val.size() >= 2 && val.front() == '"' && val.back() == '"') {
      e.quoted = true;
      e.value = unquote(val, where);
    } else if (!val.empty() && val.front() == '[') {
      if (val.back() != ']') throw ConfigError(where + ": unterminated list");
      e.list = true;
      const std::string body = trim(val.substr(1, val.size() - 2));
      if (!body.empty()) {
        std::istringstream items(body);
        std::string item;
        while (std::getline(items, item, ',')) {
          item = trim(item);
          if (item.empty()) throw ConfigError(where + ": empty list item");
          if (item.size() >= 2 && item.front() == '"' && item.back() == '"') item = unquote(item, where);
          e.items.push_back(item);
        }
      }
    } else {
      if (val.empty()) throw ConfigError(where + ": empty value for '" + prefix + key + "'");
      e.value = val;
    }
    cfg.insert(prefix + key, std::move(e), where);
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path);
}

bool Config::has(const std::string& key) const { return entries_.count(key) > 0; }

bool Config::has_block(const std::string& prefix) const {
  const std::string p = prefix + ".";
  const auto it = entries_.lower_bound(p);
  return it != entries_.end() && it->first.compare(0, p.size(), p) == 0;
}

const Config::Entry& Config::entry(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError(key + ": missing required key");
  it->second.used = true;
  return it->second;
}

double Config::get_double(const std::string& key) const {
  const Entry& e = entry(key);
  const auto v = e.list || e.quoted ? std::nullopt : parse_number(e.value);
  if (!v) throw ConfigError(key + ": expected a number, got '" + e.value + "'");
  return *v;
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long long Config::get_int(const std::string& key) const {
  const Entry& e = entry(key);
  long long v = 0;
  const char* b = e.value.data();
  const auto r = std::from_chars(b, b + e.value.size(), v);
  if (e.list || e.quoted || r.ec != std::errc() || r.ptr != b + e.value.size())
    throw ConfigError(key + ": expected an integer, got '" + e.value + "'");
  return v;
}

long long Config::get_int(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t Config::get_uint64(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const Entry& e = entry(key);
  std::uint64_t v = 0;
  const char* b = e.value.data();
  const auto r = std::from_chars(b, b + e.value.size(), v);
  if (e.list || e.quoted || r.ec != std::errc() || r.ptr != b + e.value.size())
    throw ConfigError(key + ": expected a nonnegative integer, got '" + e.value + "'");
  return v;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const Entry& e = entry(key);
  if (!e.list && !e.quoted && e.value == "true") return true;
  if (!e.list && !e.quoted && e.value == "false") return false;
  throw ConfigError(key + ": expected true or false, got '" + e.value + "'");
}

std::string Config::get_string(const std::string& key) const {
  const Entry& e = entry(key);
  if (e.list) throw ConfigError(key + ": expected a scalar, got a list");
  return e.value;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  const Entry& e = entry(key);
  if (!e.list) throw ConfigError(key + ": expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < e.items.size(); ++i) {
    const auto v = parse_number(e.items[i]);
    if (!v) throw ConfigError(key + "[" + std::to_string(i) + "]: expected a number, got '" + e.items[i] + "'");
    out.push_back(*v);
  }
  return out;
}

std::vector<double> Config::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
  return has(key) ? get_doubles(key) : fallback;
}

std::vector<std::string> Config::get_strings(const std::string& key) const {
  const Entry& e = entry(key);
  if (!e.list) return {e.value};
  return e.items;
}

void Config::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw ConfigError("invalid key '" + key + "'");
  Entry e;
  e.value = value;
  e.quoted = !parse_number(value).has_value();
  entries_[key] = std::move(e);
}

std::vector<std::string> Config::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, e] : entries_)
    if (!e.used) out.push_back(k);
  return out;
}

void Config::reject_unused() const {
  const auto u = unused_keys();
  if (!u.empty()) throw ConfigError(u.front() + ": unknown key for this scenario");
}

std::string Config::canonical() const {
  std::ostringstream os;
  for (const auto& [k, e] : entries_) {
    os << k << " = ";
    if (e.list) {
      os << '[';
      for (std::size_t i = 0; i < e.items.size(); ++i) os << (i ? ", " : "") << e.items[i];
      os << ']';
    } else {
      os << e.value;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace rtwave
