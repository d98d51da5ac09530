#include "wbplc/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <random>
#include <thread>
#include <tuple>

#include "wbplc/conceal.h"
#include "wbplc/error.h"
#include "wbplc/fec_parity.h"

namespace wbplc {
namespace {

std::string FormatFixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::size_t TotalPayloadBytes(std::span<const Frame> frames) {
  std::size_t n = 0;
  for (const Frame& f : frames) n += f.byte_size();
  return n;
}

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

MeanSd Summarize(const std::vector<double>& xs) {
  MeanSd r;
  if (xs.empty()) return r;
  for (double x : xs) r.mean += x;
  r.mean /= double(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.sd = std::sqrt(ss / double(xs.size() - 1));
  }
  return r;
}

}  // namespace

const char* MethodName(Method method) {
  switch (method) {
    case Method::kPiggyback: return "piggyback";
    case Method::kFecParity: return "fec_parity";
    case Method::kRepetition: return "repetition";
  }
  return "?";
}

Method ParseMethod(std::string_view name) {
  if (name == "piggyback") return Method::kPiggyback;
  if (name == "fec_parity") return Method::kFecParity;
  if (name == "repetition") return Method::kRepetition;
  throw Error(ErrorCode::kInvalidConfig,
              "unknown method '" + std::string(name) + "'");
}

ChannelParams ChannelModel::ForFlr(double flr) const {
  if (kind == Kind::kGilbert) return ParamsForFlr(flr, p_bb);
  return EgmParamsForFlr(flr, persistence);
}

void SweepConfig::Validate() const {
  stream.Validate();
  if (flr_points.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "flr_points is empty");
  }
  for (double flr : flr_points) {
    if (!(flr >= 0.0 && flr < 1.0)) {
      throw Error(ErrorCode::kInvalidConfig, "flr point outside [0,1)");
    }
    try {
      channel.ForFlr(flr);
    } catch (const Error& e) {
      throw Error(ErrorCode::kInvalidConfig, e.what());
    }
  }
  if (runs_per_point == 0) {
    throw Error(ErrorCode::kInvalidConfig, "runs_per_point must be >= 1");
  }
  if (methods.empty()) throw Error(ErrorCode::kInvalidConfig, "no methods");
  if (stream_path.empty() && synthetic_frames == 0) {
    throw Error(ErrorCode::kInvalidConfig, "synthetic_frames must be > 0");
  }
}

SweepConfig SweepConfig::FromKeyValues(const KeyValues& kv) {
  kv.RejectUnknown({"flr_points", "runs_per_point", "base_seed",
                    "channel_model", "p_bb", "egm_persistence", "methods",
                    "stream_source", "synthetic_frames", "synthetic_seed",
                    "first_frame", "header_words", "payload_words",
                    "frame_duration_ms", "threads"});
  SweepConfig c;
  c.flr_points = kv.GetDoubleList("flr_points", c.flr_points);
  c.runs_per_point = kv.GetUint("runs_per_point", c.runs_per_point);
  c.base_seed = kv.GetUint("base_seed", c.base_seed);
  const std::string model = kv.GetString("channel_model", "gilbert");
  if (model == "gilbert") {
    c.channel.kind = ChannelModel::Kind::kGilbert;
  } else if (model == "egm") {
    c.channel.kind = ChannelModel::Kind::kEgm;
  } else {
    throw Error(ErrorCode::kInvalidConfig,
                "channel_model must be gilbert or egm, got '" + model + "'");
  }
  c.channel.p_bb = kv.GetDouble("p_bb", c.channel.p_bb);
  c.channel.persistence = kv.GetDoubleList("egm_persistence", {});
  if (c.channel.kind == ChannelModel::Kind::kEgm &&
      c.channel.persistence.empty()) {
    throw Error(ErrorCode::kInvalidConfig,
                "channel_model = egm needs egm_persistence");
  }
  if (kv.Has("methods")) {
    c.methods.clear();
    for (const auto& m : kv.GetStringList("methods", {})) {
      c.methods.push_back(ParseMethod(m));
    }
  }
  const std::string source = kv.GetString("stream_source", "synthetic");
  c.stream_path = source == "synthetic" ? std::string() : source;
  c.synthetic_frames = kv.GetUint("synthetic_frames", c.synthetic_frames);
  c.synthetic_seed = kv.GetUint("synthetic_seed", c.synthetic_seed);
  c.first_frame = ParseFirstFramePolicy(kv.GetString("first_frame", "self"));
  c.stream = StreamConfigFrom(kv);
  c.threads = kv.GetUint("threads", c.threads);
  c.Validate();
  return c;
}

std::vector<Frame> GenerateSyntheticStream(std::size_t n, std::uint64_t seed,
                                           const StreamConfig& config) {
  config.Validate();
  std::vector<std::uint8_t> header(config.header_bytes(), 0);
  if (header.size() >= 2) {
    header[0] = 0x6B;
    header[1] = 0x21;
  }
  if (header.size() >= 4) {
    header[2] = static_cast<std::uint8_t>(config.payload_words >> 8);
    header[3] = static_cast<std::uint8_t>(config.payload_words & 0xFF);
  }
  std::mt19937_64 engine(seed);
  std::vector<Frame> frames;
  frames.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<SoftbitWord> payload(config.payload_words);
    for (SoftbitWord& w : payload) w = EncodeBit((engine() >> 63) != 0);
    frames.emplace_back(header, std::move(payload));
  }
  return frames;
}

StreamDiff DiffStreams(std::span<const Frame> reference,
                       std::span<const Frame> actual) {
  if (reference.size() != actual.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "reference has " + std::to_string(reference.size()) +
                    " frames, actual " + std::to_string(actual.size()));
  }
  StreamDiff diff;
  diff.per_frame_differs.resize(reference.size(), false);
  std::uint64_t bits = 0;
  std::uint64_t bit_errors = 0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    if (reference[i].payload().size() != actual[i].payload().size() ||
        reference[i].header().size() != actual[i].header().size()) {
      throw Error(ErrorCode::kConfigMismatch,
                  "frame " + std::to_string(i) + " geometry differs");
    }
    const BitVector a = PackPayload(reference[i]);
    const BitVector b = PackPayload(actual[i]);
    std::uint64_t errors = 0;
    for (std::size_t k = 0; k < a.size(); ++k) errors += a.bits[k] != b.bits[k];
    bits += a.size();
    bit_errors += errors;
    if (errors > 0) {
      diff.per_frame_differs[i] = true;
      ++diff.frames_differing;
    }
  }
  diff.payload_bit_error_rate =
      bits == 0 ? 0.0 : double(bit_errors) / double(bits);
  return diff;
}

void ExportForScoring(std::span<const Frame> frames, const std::string& path,
                      const StreamConfig& config) {
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].form() != FrameForm::kCanonical) {
      throw Error(ErrorCode::kNotCanonical,
                  "export frame " + std::to_string(i) + " is " +
                      FrameFormName(frames[i].form()));
    }
  }
  WriteFileBytes(path, SerializeStream(frames, config));
}

CellOutput RunCell(const SweepConfig& config, std::span<const Frame> reference,
                   Method method, std::size_t flr_index,
                   std::size_t run_index) {
  const double flr = config.flr_points.at(flr_index);
  const ChannelParams params = config.channel.ForFlr(flr);
  const std::uint64_t seed = config.CellSeed(flr_index, run_index);

  std::vector<Frame> sent;
  switch (method) {
    case Method::kPiggyback:
      sent = ProcessStream(reference, config.first_frame);
      if (sent.size() != reference.size() ||
          TotalPayloadBytes(sent) != TotalPayloadBytes(reference)) {
        throw Error(ErrorCode::kInvariantViolation,
                    "piggyback stream changed the byte count");
      }
      break;
    case Method::kFecParity:
      sent = FecEncode(reference, config.stream);
      break;
    case Method::kRepetition:
      sent.assign(reference.begin(), reference.end());
      break;
  }

  const LossPattern pattern = Simulate(sent.size(), params, seed);
  const auto slots = ApplyChannel(sent, pattern);
  ConcealResult result = method == Method::kFecParity
                             ? FecDecode(slots, config.stream)
                             : ConcealStream(slots, config.stream);
  if (!result.report.Consistent()) {
    throw Error(ErrorCode::kInvariantViolation, "recovery report inconsistent");
  }
  const StreamDiff diff = DiffStreams(reference, result.frames);

  CellOutput out;
  SweepRow& row = out.row;
  row.method = method;
  row.flr_target = flr;
  row.flr_empirical = ComputePatternStats(pattern).flr;
  row.run_index = run_index;
  row.seed = seed;
  row.lost = result.report.lost;
  row.recovered_exact = result.report.recovered_exact;
  row.concealed_repetition = result.report.concealed_repetition;
  row.unrecovered = result.report.unrecovered;
  row.data_frames = reference.size();
  row.sent_frames = sent.size();
  row.overhead_frames = sent.size() - reference.size();
  row.recovery_delay_frames = result.report.recovery_delay_frames;
  // Frames not reproduced bit-exactly, over data frames. Lost parity frames
  // carry no speech and are excluded.
  const std::uint64_t residual = result.report.lost -
                                 result.report.recovered_exact -
                                 result.report.parity_lost;
  row.residual_flr = double(residual) / double(reference.size());
  row.payload_bit_error_rate = diff.payload_bit_error_rate;
  out.recovered = std::move(result.frames);
  return out;
}

std::vector<Frame> LoadReference(const SweepConfig& config) {
  if (config.stream_path.empty()) {
    return GenerateSyntheticStream(config.synthetic_frames,
                                   config.synthetic_seed, config.stream);
  }
  auto frames = ParseStream(ReadFileBytes(config.stream_path), config.stream);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].form() != FrameForm::kCanonical) {
      throw Error(ErrorCode::kNotCanonical,
                  "reference frame " + std::to_string(i) + " is " +
                      FrameFormName(frames[i].form()));
    }
  }
  return frames;
}

std::vector<SweepRow> RunSweep(const SweepConfig& config,
                               std::span<const Frame> reference,
                               const std::optional<std::string>& export_dir) {
  config.Validate();
  if (reference.empty()) {
    throw Error(ErrorCode::kEmptyStream, "reference stream is empty");
  }
  if (export_dir) {
    std::filesystem::create_directories(*export_dir);
    ExportForScoring(reference, *export_dir + "/reference.cod", config.stream);
  }

  struct Cell {
    Method method;
    std::size_t flr_index;
    std::size_t run_index;
  };
  std::vector<Cell> cells;
  for (Method m : config.methods) {
    for (std::size_t f = 0; f < config.flr_points.size(); ++f) {
      for (std::size_t r = 0; r < config.runs_per_point; ++r) {
        cells.push_back({m, f, r});
      }
    }
  }

  std::vector<SweepRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        const Cell& c = cells[i];
        CellOutput out =
            RunCell(config, reference, c.method, c.flr_index, c.run_index);
        if (export_dir) {
          const std::string name =
              std::string(MethodName(c.method)) + "_flr" +
              FormatFixed(config.flr_points[c.flr_index], 2) + "_run" +
              std::to_string(c.run_index) + ".cod";
          ExportForScoring(out.recovered, *export_dir + "/" + name,
                           config.stream);
        }
        rows[i] = out.row;
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::size_t threads = config.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, cells.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  std::stable_sort(rows.begin(), rows.end(),
                   [](const SweepRow& a, const SweepRow& b) {
                     return std::tie(a.method, a.flr_target, a.run_index) <
                            std::tie(b.method, b.flr_target, b.run_index);
                   });
  return rows;
}

void WriteSweepCsv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "method,flr_target,flr_empirical,run_index,seed,lost,"
         "recovered_exact,concealed_repetition,unrecovered,residual_flr,"
         "overhead_frames,payload_bit_error_rate\n";
  for (const SweepRow& r : rows) {
    out << MethodName(r.method) << ',' << FormatFixed(r.flr_target, 4) << ','
        << FormatFixed(r.flr_empirical, 6) << ',' << r.run_index << ','
        << r.seed << ',' << r.lost << ',' << r.recovered_exact << ','
        << r.concealed_repetition << ',' << r.unrecovered << ','
        << FormatFixed(r.residual_flr, 6) << ',' << r.overhead_frames << ','
        << FormatFixed(r.payload_bit_error_rate, 6) << '\n';
  }
}

void WriteSweepSummary(std::ostream& out, std::span<const SweepRow> rows) {
  std::map<Method, std::map<double, std::vector<const SweepRow*>>> groups;
  for (const SweepRow& r : rows) groups[r.method][r.flr_target].push_back(&r);

  for (const auto& [method, by_flr] : groups) {
    out << "# method " << MethodName(method) << "\n"
        << "# flr_target residual_mean residual_sd ber_mean ber_sd "
           "flr_empirical_mean overhead_of_data overhead_of_sent "
           "mean_recovery_delay_frames\n";
    for (const auto& [flr, cell] : by_flr) {
      std::vector<double> residual, ber, empirical;
      std::uint64_t data = 0, sent = 0, delay = 0, recovered = 0;
      for (const SweepRow* r : cell) {
        residual.push_back(r->residual_flr);
        ber.push_back(r->payload_bit_error_rate);
        empirical.push_back(r->flr_empirical);
        data += r->data_frames;
        sent += r->sent_frames;
        delay += r->recovery_delay_frames;
        recovered += r->recovered_exact;
      }
      const MeanSd res = Summarize(residual);
      const MeanSd b = Summarize(ber);
      const double overhead = double(sent - data);
      out << FormatFixed(flr, 4) << ' ' << FormatFixed(res.mean, 6) << ' '
          << FormatFixed(res.sd, 6) << ' ' << FormatFixed(b.mean, 6) << ' '
          << FormatFixed(b.sd, 6) << ' '
          << FormatFixed(Summarize(empirical).mean, 6) << ' '
          << FormatFixed(data ? overhead / double(data) : 0.0, 4) << ' '
          << FormatFixed(sent ? overhead / double(sent) : 0.0, 4) << ' '
          << FormatFixed(recovered ? double(delay) / double(recovered) : 0.0,
                         3)
          << '\n';
    }
    out << "\n\n";
  }
}

}  // namespace wbplc
