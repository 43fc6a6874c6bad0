#ifndef HDWN_CONFIG_HPP
#define HDWN_CONFIG_HPP

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hdwn/dgp.hpp"
#include "hdwn/error.hpp"

namespace hdwn::config {

/// One `key = value` or `key = [a, b, ...]` entry.
struct Entry {
  std::vector<std::string> items;
  bool is_array = false;
  int line = 0;
};

/// Flat key/value file. Lines are `key = value` or `key = [v1, v2, ...]`;
/// `#` starts a comment; an array item `a..b` expands to the integers a..b.
class KeyValueFile {
 public:
  static KeyValueFile parse(std::istream& in, const std::string& source = "<config>") {
    KeyValueFile kv;
    kv.source_ = source;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      std::string_view line = raw;
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) kv.error(line_no, "expected 'key = value'");
      const std::string key(trim(line.substr(0, eq)));
      auto value = trim(line.substr(eq + 1));
      if (key.empty()) kv.error(line_no, "empty key");
      if (kv.entries_.count(key)) kv.error(line_no, "duplicate key '" + key + "'");
      Entry e;
      e.line = line_no;
      if (!value.empty() && value.front() == '[') {
        if (value.back() != ']') kv.error(line_no, "unterminated array for '" + key + "'");
        e.is_array = true;
        value = trim(value.substr(1, value.size() - 2));
        std::size_t start = 0;
        while (!value.empty() && start <= value.size()) {
          const auto comma = value.find(',', start);
          const auto item = trim(value.substr(start, comma == std::string_view::npos ? value.npos : comma - start));
          if (item.empty()) kv.error(line_no, "empty array item in '" + key + "'");
          kv.expand(item, e.items, line_no, key);
          if (comma == std::string_view::npos) break;
          start = comma + 1;
        }
      } else {
        if (value.empty()) kv.error(line_no, "missing value for '" + key + "'");
        e.items.emplace_back(value);
      }
      kv.order_.push_back(key);
      kv.entries_.emplace(key, std::move(e));
    }
    return kv;
  }

  static KeyValueFile parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, "cannot open config '" + path + "'");
    return parse(in, path);
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::vector<std::string>& keys() const { return order_; }

  const Entry& entry(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) fail(ErrorCode::Config, source_ + ": missing required key '" + key + "'");
    return it->second;
  }

  std::string scalar(const std::string& key) const {
    const auto& e = entry(key);
    if (e.is_array || e.items.size() != 1) error(e.line, "'" + key + "' must be a single value");
    return e.items.front();
  }

  /// Array entries as-is; a scalar is read as a one-element list.
  const std::vector<std::string>& list(const std::string& key) const { return entry(key).items; }

  template <class T>
  T number(const std::string& key) const {
    return to_number<T>(scalar(key), key, entry(key).line);
  }

  template <class T>
  std::vector<T> numbers(const std::string& key) const {
    const auto& e = entry(key);
    std::vector<T> out;
    for (std::size_t i = 0; i < e.items.size(); ++i)
      out.push_back(to_number<T>(e.items[i], key + "[" + std::to_string(i) + "]", e.line));
    return out;
  }

  /// Rejects keys outside `allowed`.
  void require_known(const std::vector<std::string>& allowed) const {
    for (const auto& k : order_) {
      bool ok = false;
      for (const auto& a : allowed) ok = ok || a == k;
      if (!ok) error(entries_.at(k).line, "unknown key '" + k + "'");
    }
  }

  [[noreturn]] void error(int line, const std::string& what) const {
    fail(ErrorCode::Config, source_ + ":" + std::to_string(line) + ": " + what);
  }

  const std::string& source() const { return source_; }

 private:
  static std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
  }

  template <class T>
  T to_number(std::string_view text, const std::string& field, int line) const {
    T v{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
      error(line, field + ": '" + std::string(text) + "' is not a valid number");
    return v;
  }

  void expand(std::string_view item, std::vector<std::string>& out, int line, const std::string& key) const {
    const auto dots = item.find("..");
    if (dots == std::string_view::npos) {
      out.emplace_back(item);
      return;
    }
    const auto lo = to_number<long long>(trim(item.substr(0, dots)), key, line);
    const auto hi = to_number<long long>(trim(item.substr(dots + 2)), key, line);
    if (hi < lo || hi - lo > 100000) error(line, key + ": bad range '" + std::string(item) + "'");
    for (auto v = lo; v <= hi; ++v) out.push_back(std::to_string(v));
  }

  std::string source_;
  std::map<std::string, Entry> entries_;
  std::vector<std::string> order_;
};

// ---- DgpSpec <-> config ----------------------------------------------------

inline std::string to_config(const DgpSpec& spec) {
  std::ostringstream os;
  os << "scenario = " << to_string(spec.scenario) << '\n'
     << "innovation = " << to_string(spec.innovation) << '\n'
     << "n = " << spec.n << '\n'
     << "p = " << spec.p << '\n';
  if (spec.m) os << "m = " << *spec.m << '\n';
  os << "seed = " << spec.seed << '\n';
  return os.str();
}

inline DgpSpec dgp_spec_from_config(const KeyValueFile& kv) {
  kv.require_known({"scenario", "innovation", "n", "p", "m", "seed"});
  DgpSpec spec;
  const auto sc = kv.scalar("scenario");
  auto scenario = parse_scenario(sc);
  if (!scenario) kv.error(kv.entry("scenario").line, "scenario: unknown value '" + sc + "'");
  spec.scenario = *scenario;
  if (kv.has("innovation")) {
    const auto in = kv.scalar("innovation");
    auto law = parse_innovation(in);
    if (!law) kv.error(kv.entry("innovation").line, "innovation: unknown value '" + in + "'");
    spec.innovation = *law;
  }
  spec.n = kv.number<long long>("n");
  spec.p = kv.number<long long>("p");
  if (kv.has("m")) spec.m = kv.number<int>("m");
  spec.seed = kv.has("seed") ? kv.number<std::uint64_t>("seed") : 0;
  try {
    spec.validate();
  } catch (const Error& e) {
    fail(ErrorCode::Config, kv.source() + ": " + e.what());
  }
  return spec;
}

inline DgpSpec dgp_spec_from_config(std::istream& in, const std::string& source = "<config>") {
  return dgp_spec_from_config(KeyValueFile::parse(in, source));
}

}  // namespace hdwn::config

#endif  // HDWN_CONFIG_HPP
