#ifndef WBPLC_KEY_VALUE_H_
#define WBPLC_KEY_VALUE_H_

// Flat `key = value` text configuration. Blank lines and lines whose first
// non-blank character is '#' are ignored; later keys override earlier ones.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wbplc/frame.h"

namespace wbplc {

class KeyValues {
 public:
  static KeyValues Parse(std::string_view text);
  static KeyValues Load(const std::string& path);

  bool Has(const std::string& key) const { return values_.count(key) > 0; }
  std::optional<std::string> Get(const std::string& key) const;

  // Typed accessors return `fallback` when the key is absent and throw
  // kInvalidConfig when the value does not parse.
  std::string GetString(const std::string& key, std::string fallback) const;
  double GetDouble(const std::string& key, double fallback) const;
  std::uint64_t GetUint(const std::string& key, std::uint64_t fallback) const;
  std::vector<double> GetDoubleList(const std::string& key,
                                    std::vector<double> fallback) const;
  std::vector<std::string> GetStringList(
      const std::string& key, std::vector<std::string> fallback) const;

  // Throws kInvalidConfig naming the first key not in `known`.
  void RejectUnknown(const std::vector<std::string>& known) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

double ParseDouble(std::string_view text, std::string_view what);
std::uint64_t ParseUint(std::string_view text, std::string_view what);
std::vector<std::string> SplitList(std::string_view text, char sep = ',');

// Reads header_words / payload_words / frame_duration_ms; other keys are
// ignored so a sweep config can double as a stream config.
StreamConfig StreamConfigFrom(const KeyValues& kv);

}  // namespace wbplc

#endif  // WBPLC_KEY_VALUE_H_
