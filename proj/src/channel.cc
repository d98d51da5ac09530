#include "wbplc/channel.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>

#include "wbplc/error.h"
#include "wbplc/key_value.h"

namespace wbplc {
namespace {

// Both models walk the same state space: 0 is Good, i in 1..m is Bad_i.
struct Chain {
  double p_gb;
  std::span<const double> persistence;

  std::size_t m() const { return persistence.size(); }

  double LossProbability(std::size_t state) const {
    return state == 0 ? p_gb : persistence[state - 1];
  }
  std::size_t NextBad(std::size_t state) const {
    return state == 0 ? 1 : std::min(state + 1, m());
  }
};

Chain AsChain(const ChannelParams& params) {
  if (const auto* g = std::get_if<GilbertParams>(&params)) {
    return Chain{g->p_gb, std::span<const double>(&g->p_bb, 1)};
  }
  const auto& e = std::get<EgmParams>(params);
  return Chain{e.p_gb, e.persistence};
}

bool IsProbability(double p) { return p >= 0.0 && p <= 1.0; }

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void Validate(const ChannelParams& params) {
  const Chain chain = AsChain(params);
  if (chain.m() == 0) {
    throw Error(ErrorCode::kInvalidParams, "EGM needs at least one state");
  }
  if (!IsProbability(chain.p_gb)) {
    throw Error(ErrorCode::kInvalidParams,
                "p_gb out of [0,1]: " + FormatDouble(chain.p_gb));
  }
  for (double s : chain.persistence) {
    if (!IsProbability(s)) {
      throw Error(ErrorCode::kInvalidParams,
                  "persistence out of [0,1]: " + FormatDouble(s));
    }
  }
}

LossPattern Simulate(std::size_t n, const ChannelParams& params,
                     std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::kInvalidParams, "frame count must be > 0");
  Validate(params);
  const Chain chain = AsChain(params);
  ChannelRng rng(seed);
  LossPattern pattern{std::vector<LossFlag>(n, LossFlag::kReceived), seed,
                      params};
  std::size_t state = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.Next();
    state = u < chain.LossProbability(state) ? chain.NextBad(state) : 0;
    if (state != 0) pattern.flags[i] = LossFlag::kLost;
  }
  return pattern;
}

GilbertParams ParamsForFlr(double target_flr, double p_bb) {
  if (!(target_flr >= 0.0 && target_flr < 1.0) || !(p_bb >= 0.0 && p_bb < 1.0)) {
    throw Error(ErrorCode::kInvalidParams,
                "need 0 <= flr < 1 and 0 <= p_bb < 1 (flr=" +
                    FormatDouble(target_flr) + ", p_bb=" + FormatDouble(p_bb) +
                    ")");
  }
  const double p_gb = target_flr * (1.0 - p_bb) / (1.0 - target_flr);
  if (p_gb > 1.0) {
    throw Error(ErrorCode::kInvalidParams,
                "flr " + FormatDouble(target_flr) +
                    " is unreachable with p_bb " + FormatDouble(p_bb));
  }
  return {p_gb, p_bb};
}

double MeanBurstLength(const ChannelParams& params) {
  Validate(params);
  const Chain chain = AsChain(params);
  const std::size_t m = chain.m();
  // P(L >= k+1) = s_1 ... s_k for k < m, then geometric in s_m.
  double reach = 1.0;
  double mean = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    mean += reach;
    if (k + 1 < m) reach *= chain.persistence[k];
  }
  const double last = chain.persistence[m - 1];
  if (last >= 1.0) {
    return reach > 0.0 ? std::numeric_limits<double>::infinity() : mean;
  }
  return mean + reach * last / (1.0 - last);
}

double StationaryLossRate(const ChannelParams& params) {
  const double p_gb = AsChain(params).p_gb;
  const double mean_burst = MeanBurstLength(params);
  if (p_gb == 0.0) return 0.0;
  if (std::isinf(mean_burst)) return 1.0;
  return p_gb * mean_burst / (1.0 + p_gb * mean_burst);
}

EgmParams EgmParamsForFlr(double target_flr, std::vector<double> persistence) {
  EgmParams params{0.0, std::move(persistence)};
  if (!(target_flr >= 0.0 && target_flr < 1.0)) {
    throw Error(ErrorCode::kInvalidParams,
                "need 0 <= flr < 1, got " + FormatDouble(target_flr));
  }
  const double mean_burst = MeanBurstLength(params);
  if (std::isinf(mean_burst)) {
    throw Error(ErrorCode::kInvalidParams,
                "last persistence value must be < 1 to target a loss rate");
  }
  params.p_gb = target_flr / (mean_burst * (1.0 - target_flr));
  if (params.p_gb > 1.0) {
    throw Error(ErrorCode::kInvalidParams,
                "flr " + FormatDouble(target_flr) +
                    " is unreachable with these persistence values");
  }
  return params;
}

double EffectiveSampleSize(const ChannelParams& params, std::size_t n) {
  const Chain chain = AsChain(params);
  const double s_max =
      *std::max_element(chain.persistence.begin(), chain.persistence.end());
  const double r = std::max(0.0, s_max - chain.p_gb);
  if (r >= 1.0) return 1.0;
  return static_cast<double>(n) * (1.0 - r) / (1.0 + r);
}

double PathProbability(std::span<const LossFlag> flags,
                       const ChannelParams& params) {
  Validate(params);
  const Chain chain = AsChain(params);
  double prob = 1.0;
  std::size_t state = 0;
  for (LossFlag flag : flags) {
    const double p_loss = chain.LossProbability(state);
    if (flag == LossFlag::kLost) {
      prob *= p_loss;
      state = chain.NextBad(state);
    } else {
      prob *= 1.0 - p_loss;
      state = 0;
    }
  }
  return prob;
}

PatternStats ComputePatternStats(std::span<const LossFlag> flags) {
  PatternStats stats;
  if (flags.empty()) return stats;
  std::uint64_t lost = 0;
  std::uint64_t runs = 0;
  std::size_t run = 0;
  auto close_run = [&] {
    if (run > 0) {
      ++stats.burst_histogram[run];
      ++runs;
    }
    run = 0;
  };
  for (LossFlag flag : flags) {
    if (flag == LossFlag::kLost) {
      ++lost;
      ++run;
    } else {
      close_run();
    }
  }
  close_run();
  stats.flr = static_cast<double>(lost) / static_cast<double>(flags.size());
  stats.mean_burst =
      runs == 0 ? 0.0 : static_cast<double>(lost) / static_cast<double>(runs);
  return stats;
}

GoodnessOfFit GeometricBurstFit(std::span<const LossFlag> flags, double q) {
  if (!(q >= 0.0 && q < 1.0)) {
    throw Error(ErrorCode::kInvalidParams, "geometric ratio must be in [0,1)");
  }
  // Drop a run that is still open at the end of the pattern.
  std::size_t usable = flags.size();
  while (usable > 0 && flags[usable - 1] == LossFlag::kLost) --usable;
  const PatternStats stats = ComputePatternStats(flags.first(usable));

  GoodnessOfFit fit;
  for (const auto& [len, count] : stats.burst_histogram) fit.bursts += count;
  const double total = static_cast<double>(fit.bursts);

  auto observed_at_least = [&](std::size_t k) {
    std::uint64_t c = 0;
    for (auto it = stats.burst_histogram.lower_bound(k);
         it != stats.burst_histogram.end(); ++it) {
      c += it->second;
    }
    return static_cast<double>(c);
  };

  std::size_t bins = 0;
  for (std::size_t k = 1;; ++k) {
    const double expected = total * (1.0 - q) * std::pow(q, double(k - 1));
    const double tail_after = total * std::pow(q, double(k));
    double observed = 0.0;
    double expected_bin = 0.0;
    bool last = false;
    if (expected >= 5.0 && tail_after >= 5.0) {
      const auto it = stats.burst_histogram.find(k);
      observed = it == stats.burst_histogram.end() ? 0.0 : double(it->second);
      expected_bin = expected;
    } else {
      observed = observed_at_least(k);
      expected_bin = total * std::pow(q, double(k - 1));
      last = true;
    }
    if (expected_bin > 0.0) {
      const double d = observed - expected_bin;
      fit.statistic += d * d / expected_bin;
    }
    ++bins;
    if (last) break;
  }
  if (bins < 2) {
    throw Error(ErrorCode::kInvalidParams,
                "too few bursts for a chi-square fit (" +
                    std::to_string(fit.bursts) + ")");
  }
  fit.degrees_of_freedom = bins - 1;
  const boost::math::chi_squared dist(double(fit.degrees_of_freedom));
  fit.p_value = boost::math::cdf(boost::math::complement(dist, fit.statistic));
  return fit;
}

std::vector<ReceivedSlot> ApplyChannel(std::span<const Frame> frames,
                                       const LossPattern& pattern) {
  if (frames.size() != pattern.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(frames.size()) + " frames vs pattern of " +
                    std::to_string(pattern.size()));
  }
  std::vector<ReceivedSlot> slots;
  slots.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    slots.push_back(pattern.lost(i) ? ReceivedSlot::Lost(i)
                                    : ReceivedSlot::Received(i, frames[i]));
  }
  return slots;
}

std::string FormatParams(const ChannelParams& params) {
  if (const auto* g = std::get_if<GilbertParams>(&params)) {
    return "p_gb:" + FormatDouble(g->p_gb) + ",p_bb:" + FormatDouble(g->p_bb);
  }
  const auto& e = std::get<EgmParams>(params);
  std::string s = "p_gb:" + FormatDouble(e.p_gb) + ",persistence:";
  for (std::size_t i = 0; i < e.persistence.size(); ++i) {
    if (i) s += '/';
    s += FormatDouble(e.persistence[i]);
  }
  return s;
}

ChannelParams ParseParams(const std::string& model, const std::string& text) {
  std::map<std::string, std::string> fields;
  for (const auto& item : SplitList(text)) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorCode::kInvalidParams, "bad params field '" + item + "'");
    }
    fields[item.substr(0, colon)] = item.substr(colon + 1);
  }
  auto need = [&](const std::string& key) {
    const auto it = fields.find(key);
    if (it == fields.end()) {
      throw Error(ErrorCode::kInvalidParams, "params missing '" + key + "'");
    }
    return it->second;
  };
  ChannelParams params;
  if (model == "gilbert") {
    params = GilbertParams{ParseDouble(need("p_gb"), "p_gb"),
                           ParseDouble(need("p_bb"), "p_bb")};
  } else if (model == "egm") {
    EgmParams e;
    e.p_gb = ParseDouble(need("p_gb"), "p_gb");
    for (const auto& s : SplitList(need("persistence"), '/')) {
      e.persistence.push_back(ParseDouble(s, "persistence"));
    }
    params = std::move(e);
  } else {
    throw Error(ErrorCode::kInvalidParams, "unknown model '" + model + "'");
  }
  Validate(params);
  return params;
}

std::string FormatPattern(const LossPattern& pattern) {
  char flr[32];
  std::snprintf(flr, sizeof(flr), "%.6g", StationaryLossRate(pattern.params));
  std::string out = "# flr=" + std::string(flr) +
                    " seed=" + std::to_string(pattern.seed) + " model=" +
                    (std::holds_alternative<GilbertParams>(pattern.params)
                         ? "gilbert"
                         : "egm") +
                    " params=" + FormatParams(pattern.params) + "\n";
  out.reserve(out.size() + pattern.size() + 1);
  for (LossFlag f : pattern.flags) out += f == LossFlag::kLost ? 'L' : 'R';
  out += '\n';
  return out;
}

LossPattern ParsePattern(const std::string& text) {
  LossPattern pattern;
  std::istringstream in(text);
  std::string line;
  std::string model = "gilbert";
  std::string params;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') {
      std::istringstream header(line.substr(1));
      std::string token;
      while (header >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "seed") pattern.seed = ParseUint(value, "seed");
        if (key == "model") model = value;
        if (key == "params") params = value;
      }
      continue;
    }
    for (char c : line) {
      if (c == 'R') {
        pattern.flags.push_back(LossFlag::kReceived);
      } else if (c == 'L') {
        pattern.flags.push_back(LossFlag::kLost);
      } else if (c != ' ' && c != '\t' && c != '\r') {
        throw Error(ErrorCode::kInvalidConfig,
                    std::string("loss pattern has invalid character '") + c +
                        "'");
      }
    }
  }
  if (!params.empty()) pattern.params = ParseParams(model, params);
  return pattern;
}

void WritePatternFile(const std::string& path, const LossPattern& pattern) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot create " + path);
  out << FormatPattern(pattern);
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path);
}

LossPattern ReadPatternFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParsePattern(ss.str());
}

}  // namespace wbplc
