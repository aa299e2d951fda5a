#include "mtad/kv_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mtad/error.hpp"

namespace mtad {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, std::string_view text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ConfigError("config key '" + key + "': '" + std::string(text) + "' is not a finite number");
  }
  return v;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text, std::string_view source) {
  KeyValueConfig cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    const auto key = eq == std::string_view::npos ? std::string_view{} : trim(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError(std::string(source) + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string k(key);
    if (cfg.entries_.count(k)) {
      throw ConfigError(std::string(source) + ":" + std::to_string(line_no) + ": duplicate key '" + k + "'");
    }
    cfg.entries_[k] = std::string(trim(line.substr(eq + 1)));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

void KeyValueConfig::set(const std::string& key, const std::string& value) { entries_[key] = value; }

void KeyValueConfig::set_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  const auto key = eq == std::string_view::npos ? std::string_view{} : trim(assignment.substr(0, eq));
  if (key.empty()) throw ConfigError("override '" + std::string(assignment) + "' must be key=value");
  set(std::string(key), std::string(trim(assignment.substr(eq + 1))));
}

void KeyValueConfig::erase(const std::string& key) { entries_.erase(key); }

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  consumed_.insert(key);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const auto v = get(key);
  return v ? parse_double(key, *v) : fallback;
}

std::uint64_t KeyValueConfig::get_uint(const std::string& key, std::uint64_t fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  std::uint64_t out = 0;
  const auto* end = v->data() + v->size();
  auto [ptr, ec] = std::from_chars(v->data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("config key '" + key + "': '" + *v + "' is not a non-negative integer");
  }
  return out;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw ConfigError("config key '" + key + "': '" + *v + "' is not a boolean");
}

std::pair<double, double> KeyValueConfig::get_range(const std::string& key,
                                                    std::pair<double, double> fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  const auto colon = v->find(':');
  if (colon == std::string::npos) throw ConfigError("config key '" + key + "' must be lo:hi");
  const double lo = parse_double(key, trim(std::string_view(*v).substr(0, colon)));
  const double hi = parse_double(key, trim(std::string_view(*v).substr(colon + 1)));
  if (lo > hi) throw ConfigError("config key '" + key + "': lower bound exceeds upper bound");
  return {lo, hi};
}

std::string KeyValueConfig::require_string(const std::string& key) const {
  const auto v = get(key);
  if (!v || v->empty()) throw ConfigError("missing required config key '" + key + "'");
  return *v;
}

std::vector<std::string> KeyValueConfig::unconsumed() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) {
    if (!consumed_.count(k)) out.push_back(k);
  }
  return out;
}

void KeyValueConfig::require_all_consumed() const {
  const auto unknown = unconsumed();
  if (unknown.empty()) return;
  std::string msg = "unknown config key";
  msg += unknown.size() > 1 ? "s: " : ": ";
  for (std::size_t i = 0; i < unknown.size(); ++i) msg += (i ? ", " : "") + unknown[i];
  throw ConfigError(msg);
}

std::string KeyValueConfig::serialize() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + "=" + v + "\n";
  return out;
}

}  // namespace mtad
