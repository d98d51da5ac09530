#ifndef WBPLC_CHANNEL_H_
#define WBPLC_CHANNEL_H_

// Burst-loss channel models.
//
// GilbertParams is the 2-state Good/Bad chain. EgmParams is the extended
// Gilbert model: Good plus Bad_1..Bad_m, where Bad_i means "the current burst
// has reached length i". From Bad_i the burst extends with probability
// persistence[i-1]; Bad_m extends into itself, so bursts longer than m keep
// the last persistence value. Uniform persistence reduces to the 2-state
// chain.
//
// Walk rule (shared by both models, and what makes patterns reproducible):
// the channel starts in Good; at every frame step exactly one uniform draw
// u in [0,1) is taken from a std::mt19937_64 seeded with `seed`, as
// u = (engine() >> 11) * 2^-53; the chain moves (Good -> Bad when u < p_gb,
// Bad stays Bad when u < persistence) and then the frame's flag is read off
// the new state.

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "wbplc/conceal.h"

namespace wbplc {

struct GilbertParams {
  double p_gb = 0.0;  // Good -> Bad
  double p_bb = 0.0;  // Bad -> Bad

  friend bool operator==(const GilbertParams&, const GilbertParams&) = default;
};

struct EgmParams {
  double p_gb = 0.0;
  std::vector<double> persistence;  // m entries, m >= 1

  std::size_t m() const { return persistence.size(); }

  friend bool operator==(const EgmParams&, const EgmParams&) = default;
};

using ChannelParams = std::variant<GilbertParams, EgmParams>;

// Throws kInvalidParams on probabilities outside [0,1] or m == 0.
void Validate(const ChannelParams& params);

enum class LossFlag : std::uint8_t { kReceived, kLost };

struct LossPattern {
  std::vector<LossFlag> flags;
  std::uint64_t seed = 0;
  ChannelParams params;

  std::size_t size() const { return flags.size(); }
  bool lost(std::size_t i) const { return flags[i] == LossFlag::kLost; }
};

// Uniform [0,1) draws following the walk rule above.
class ChannelRng {
 public:
  explicit ChannelRng(std::uint64_t seed) : engine_(seed) {}

  double Next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

// Throws kInvalidParams when n == 0 or params are invalid.
LossPattern Simulate(std::size_t n, const ChannelParams& params,
                     std::uint64_t seed);

// p_gb = flr * (1 - p_bb) / (1 - flr), giving a stationary loss rate of flr.
GilbertParams ParamsForFlr(double target_flr, double p_bb);

// Same targeting for the extended model: p_gb = flr / (E[L] * (1 - flr)).
EgmParams EgmParamsForFlr(double target_flr, std::vector<double> persistence);

// Mean burst length E[L]. Infinite when the last persistence value is 1.
double MeanBurstLength(const ChannelParams& params);

// Stationary probability of the Bad states.
double StationaryLossRate(const ChannelParams& params);

// Conservative effective sample size for the empirical loss rate of an n-frame
// walk: n * (1 - r) / (1 + r), r = p_bb - p_gb being the lag-1 correlation of
// the 2-state loss indicator. For the extended model r uses the largest
// persistence value, which can only shrink the result.
double EffectiveSampleSize(const ChannelParams& params, std::size_t n);

// Exact probability that a walk produces `flags` (forward recursion over the
// chain; the state is determined by the flags so this is a product).
double PathProbability(std::span<const LossFlag> flags,
                       const ChannelParams& params);

struct PatternStats {
  double flr = 0.0;
  std::map<std::size_t, std::uint64_t> burst_histogram;  // run length -> count
  double mean_burst = 0.0;
};

PatternStats ComputePatternStats(std::span<const LossFlag> flags);
inline PatternStats ComputePatternStats(const LossPattern& pattern) {
  return ComputePatternStats(pattern.flags);
}

struct GoodnessOfFit {
  double statistic = 0.0;
  std::size_t degrees_of_freedom = 0;
  double p_value = 1.0;
  std::uint64_t bursts = 0;
};

// Pearson chi-square of the completed burst lengths against the geometric law
// P(L = k) = (1 - q) q^(k-1). A run touching the end of the pattern is
// censored and dropped. Bins are merged from the tail until every expected
// count is >= 5. Throws kInvalidParams when fewer than two bins remain.
GoodnessOfFit GeometricBurstFit(std::span<const LossFlag> flags, double q);

// Slot i carries frames[i] iff flags[i] is Received; seq = i.
// Throws kLengthMismatch when sizes differ.
std::vector<ReceivedSlot> ApplyChannel(std::span<const Frame> frames,
                                       const LossPattern& pattern);

// Text loss-pattern files:
//   # flr=<stationary rate> seed=<seed> model=<gilbert|egm> params=<...>
//   RLLRRR...
// params is "p_gb:<x>,p_bb:<y>" or "p_gb:<x>,persistence:<s1>/<s2>/...".
std::string FormatParams(const ChannelParams& params);
ChannelParams ParseParams(const std::string& model, const std::string& text);
void WritePatternFile(const std::string& path, const LossPattern& pattern);
LossPattern ReadPatternFile(const std::string& path);
std::string FormatPattern(const LossPattern& pattern);
LossPattern ParsePattern(const std::string& text);

}  // namespace wbplc

#endif  // WBPLC_CHANNEL_H_
