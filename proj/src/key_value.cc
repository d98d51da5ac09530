#include "wbplc/key_value.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "wbplc/error.h"

namespace wbplc {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

double ParseDouble(std::string_view text, std::string_view what) {
  const std::string s(Trim(text));
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size()) {
    throw Error(ErrorCode::kInvalidConfig,
                std::string(what) + ": not a number: '" + s + "'");
  }
  return v;
}

std::uint64_t ParseUint(std::string_view text, std::string_view what) {
  const std::string_view s = Trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kInvalidConfig, std::string(what) +
                                               ": not an unsigned integer: '" +
                                               std::string(s) + "'");
  }
  return v;
}

std::vector<std::string> SplitList(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(sep, start);
    if (end == std::string_view::npos) end = text.size();
    const auto item = Trim(text.substr(start, end - start));
    if (!item.empty()) out.emplace_back(item);
    start = end + 1;
  }
  return out;
}

KeyValues KeyValues::Parse(std::string_view text) {
  KeyValues kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = Trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidConfig,
                  "line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = Trim(body.substr(0, eq));
    if (key.empty()) {
      throw Error(ErrorCode::kInvalidConfig,
                  "line " + std::to_string(line_no) + ": empty key");
    }
    kv.values_[std::string(key)] = std::string(Trim(body.substr(eq + 1)));
  }
  return kv;
}

KeyValues KeyValues::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str());
}

std::optional<std::string> KeyValues::Get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValues::GetString(const std::string& key,
                                 std::string fallback) const {
  return Get(key).value_or(std::move(fallback));
}

double KeyValues::GetDouble(const std::string& key, double fallback) const {
  const auto v = Get(key);
  return v ? ParseDouble(*v, key) : fallback;
}

std::uint64_t KeyValues::GetUint(const std::string& key,
                                 std::uint64_t fallback) const {
  const auto v = Get(key);
  return v ? ParseUint(*v, key) : fallback;
}

std::vector<double> KeyValues::GetDoubleList(
    const std::string& key, std::vector<double> fallback) const {
  const auto v = Get(key);
  if (!v) return fallback;
  std::vector<double> out;
  for (const auto& item : SplitList(*v)) out.push_back(ParseDouble(item, key));
  return out;
}

std::vector<std::string> KeyValues::GetStringList(
    const std::string& key, std::vector<std::string> fallback) const {
  const auto v = Get(key);
  return v ? SplitList(*v) : fallback;
}

void KeyValues::RejectUnknown(const std::vector<std::string>& known) const {
  for (const auto& [key, value] : values_) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error(ErrorCode::kInvalidConfig, "unknown key '" + key + "'");
    }
  }
}

StreamConfig StreamConfigFrom(const KeyValues& kv) {
  StreamConfig config;
  config.header_words = kv.GetUint("header_words", config.header_words);
  config.payload_words = kv.GetUint("payload_words", config.payload_words);
  config.frame_duration_ms =
      kv.GetUint("frame_duration_ms", config.frame_duration_ms);
  config.Validate();
  return config;
}

}  // namespace wbplc
