#ifndef WBPLC_HARNESS_H_
#define WBPLC_HARNESS_H_

// Loss-rate sweep driver.
//
// Every (method, flr, run) cell draws a loss pattern, pushes the reference
// stream through one concealment method end to end and diffs the result
// against the reference bit by bit. The same seed is used for every method
// of a given (flr, run), so methods are compared on identical channels; the
// FEC pattern is just longer, and its prefix matches the others.
//
// Cell seed: base_seed + (flr_index * runs_per_point + run_index) * kSeedStride.

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wbplc/channel.h"
#include "wbplc/frame.h"
#include "wbplc/interleave.h"
#include "wbplc/key_value.h"

namespace wbplc {

inline constexpr std::uint64_t kSeedStride = 7919;

enum class Method { kPiggyback, kFecParity, kRepetition };

const char* MethodName(Method method);
Method ParseMethod(std::string_view name);

struct ChannelModel {
  enum class Kind { kGilbert, kEgm };

  Kind kind = Kind::kGilbert;
  double p_bb = 0.5;                // gilbert
  std::vector<double> persistence;  // egm

  ChannelParams ForFlr(double flr) const;
};

struct SweepConfig {
  std::vector<double> flr_points = {0.00, 0.02, 0.04, 0.06, 0.08, 0.10,
                                    0.12, 0.14, 0.16, 0.18, 0.20};
  std::size_t runs_per_point = 10;
  std::uint64_t base_seed = 1;
  ChannelModel channel;
  std::vector<Method> methods = {Method::kPiggyback, Method::kFecParity,
                                 Method::kRepetition};
  // Empty path means a synthetic stream; 400 frames is 8 s at 20 ms.
  std::string stream_path;
  std::size_t synthetic_frames = 400;
  std::uint64_t synthetic_seed = 1;
  StreamConfig stream;
  FirstFramePolicy first_frame = FirstFramePolicy::kSelfEmbed;
  std::size_t threads = 0;  // 0: one per hardware thread

  // Throws kInvalidConfig.
  void Validate() const;

  // Unknown keys are rejected.
  static SweepConfig FromKeyValues(const KeyValues& kv);

  std::uint64_t CellSeed(std::size_t flr_index, std::size_t run_index) const {
    return base_seed + (flr_index * runs_per_point + run_index) * kSeedStride;
  }
};

struct SweepRow {
  Method method = Method::kPiggyback;
  double flr_target = 0.0;
  double flr_empirical = 0.0;
  std::size_t run_index = 0;
  std::uint64_t seed = 0;
  std::uint64_t lost = 0;
  std::uint64_t recovered_exact = 0;
  std::uint64_t concealed_repetition = 0;
  std::uint64_t unrecovered = 0;
  double residual_flr = 0.0;
  std::uint64_t overhead_frames = 0;
  double payload_bit_error_rate = 0.0;

  // Not written to the CSV; feed the summary.
  std::uint64_t data_frames = 0;
  std::uint64_t sent_frames = 0;
  std::uint64_t recovery_delay_frames = 0;
};

// Deterministic uniform payload bits, canonical form, constant header (sync
// word 0x6B21, then the payload word count, then zeros).
std::vector<Frame> GenerateSyntheticStream(std::size_t n, std::uint64_t seed,
                                           const StreamConfig& config);

struct StreamDiff {
  std::size_t frames_differing = 0;
  double payload_bit_error_rate = 0.0;
  std::vector<bool> per_frame_differs;
};

// Compares decoded payload bits only. Throws kLengthMismatch on different
// frame counts and kConfigMismatch on different frame geometry.
StreamDiff DiffStreams(std::span<const Frame> reference,
                       std::span<const Frame> actual);

// Writes a canonical softbit file for an external reference decoder.
// Throws kNotCanonical on embedded/unknown frames.
void ExportForScoring(std::span<const Frame> frames, const std::string& path,
                      const StreamConfig& config);

// Runs one cell against `reference`. Throws kInvariantViolation if the
// piggyback stream is not byte-for-byte the size of the reference.
struct CellOutput {
  SweepRow row;
  std::vector<Frame> recovered;
};
CellOutput RunCell(const SweepConfig& config, std::span<const Frame> reference,
                   Method method, std::size_t flr_index, std::size_t run_index);

// Rows ordered by (method, flr, run). When export_dir is set, writes
// reference.cod plus one recovered stream per cell.
std::vector<SweepRow> RunSweep(const SweepConfig& config,
                               std::span<const Frame> reference,
                               const std::optional<std::string>& export_dir =
                                   std::nullopt);

// Loads or generates the reference stream named by the config.
std::vector<Frame> LoadReference(const SweepConfig& config);

// Header row then one row per SweepRow, columns in SweepRow field order.
void WriteSweepCsv(std::ostream& out, std::span<const SweepRow> rows);

// gnuplot-friendly block per method: flr, mean/stddev of residual FLR and
// BER, empirical FLR, overhead relative to data and to sent frames, and the
// mean recovery delay in frames.
void WriteSweepSummary(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace wbplc

#endif  // WBPLC_HARNESS_H_
