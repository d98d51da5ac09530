#ifndef WBPLC_CONCEAL_H_
#define WBPLC_CONCEAL_H_

// Receiver side of the piggyback scheme.
//
// A received embedded frame is normalized back to canonical softbits before
// playout. When the slot just before it was lost, its lo bytes are the lost
// frame's hi bytes, so that frame is rebuilt bit-exactly. Streams from an
// unmodified sender (canonical frames) fall back to repeating the next frame.
// Losses deeper inside a burst cannot be rebuilt and are filled by repeating
// the last frame played out.

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "wbplc/frame.h"

namespace wbplc {

struct ReceivedSlot {
  std::uint64_t seq = 0;
  std::optional<Frame> frame;  // nullopt when lost

  static ReceivedSlot Received(std::uint64_t seq, Frame frame) {
    return {seq, std::move(frame)};
  }
  static ReceivedSlot Lost(std::uint64_t seq) { return {seq, std::nullopt}; }

  bool lost() const { return !frame.has_value(); }
};

struct BurstTally {
  std::uint64_t runs = 0;
  std::uint64_t recovered = 0;

  friend bool operator==(const BurstTally&, const BurstTally&) = default;
};

struct RecoveryReport {
  std::uint64_t total = 0;  // slots seen
  std::uint64_t lost = 0;
  std::uint64_t recovered_exact = 0;
  std::uint64_t concealed_repetition = 0;
  std::uint64_t unrecovered = 0;

  // Received frames whose lo bytes are neither canonical nor embedded.
  std::uint64_t corrupt_frames = 0;
  // Parity FEC only: lost parity frames, already counted in lost and
  // unrecovered.
  std::uint64_t parity_lost = 0;
  // Sum over exact recoveries of the frame-times between the loss and the
  // frame that made recovery possible.
  std::uint64_t recovery_delay_frames = 0;

  // Maximal loss run length -> runs seen and frames recovered exactly.
  std::map<std::uint64_t, BurstTally> per_burst;

  bool Consistent() const {
    return lost == recovered_exact + concealed_repetition + unrecovered;
  }
};

// Columns: total,lost,recovered_exact,concealed_repetition,unrecovered
void WriteReportCsv(std::ostream& out, const RecoveryReport& report);

// lo <- CanonicalLo(hi) for every word. Idempotent.
Frame Normalize(const Frame& frame);

// Rebuilds the predecessor of an embedded frame from its lo bytes. The header
// is copied from `curr`. Throws kNotEmbedded unless curr is Embedded.
Frame RecoverPrevious(const Frame& curr);

inline FrameForm DetectForm(const Frame& frame) { return frame.form(); }

// All-zero header and an all-zero-bit canonical payload. Used only when a
// stream has no received frame to repeat.
Frame ErasureFrame(const StreamConfig& config);

// Fills every empty position with the nearest earlier frame, or the nearest
// later one when nothing precedes it, or ErasureFrame when all are empty.
std::vector<Frame> FillByRepetition(std::vector<std::optional<Frame>> frames,
                                    const StreamConfig& config);

// Streaming receiver with one frame of lookahead. Frames are released in slot
// order as soon as they are final. One instance per stream.
class ConcealSession {
 public:
  explicit ConcealSession(StreamConfig config);

  // Throws kSequenceGap on non-contiguous seq and kConfigMismatch on frames
  // with the wrong geometry.
  std::vector<Frame> Push(const ReceivedSlot& slot);

  // Flushes a trailing loss run.
  std::vector<Frame> Finish();

  const RecoveryReport& report() const { return report_; }

 private:
  void CheckSequence(std::uint64_t seq);
  void EmitRun(std::vector<Frame>& out, const Frame& filler,
               std::size_t count);

  StreamConfig config_;
  std::optional<std::uint64_t> next_seq_;
  std::size_t pending_lost_ = 0;
  std::optional<Frame> last_emitted_;
  RecoveryReport report_;
};

struct ConcealResult {
  std::vector<Frame> frames;
  RecoveryReport report;
};

// One output frame per slot.
ConcealResult ConcealStream(std::span<const ReceivedSlot> slots,
                            const StreamConfig& config);

}  // namespace wbplc

#endif  // WBPLC_CONCEAL_H_
