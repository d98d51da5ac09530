#include "wbplc/conceal.h"

#include <iterator>
#include <string>
#include <utility>

#include "wbplc/error.h"

namespace wbplc {

void WriteReportCsv(std::ostream& out, const RecoveryReport& report) {
  out << "total,lost,recovered_exact,concealed_repetition,unrecovered\n"
      << report.total << ',' << report.lost << ',' << report.recovered_exact
      << ',' << report.concealed_repetition << ',' << report.unrecovered
      << '\n';
}

Frame Normalize(const Frame& frame) {
  if (frame.form() == FrameForm::kCanonical) return frame;
  std::vector<SoftbitWord> payload = frame.payload();
  for (SoftbitWord& w : payload) w.lo = CanonicalLo(w.hi);
  return Frame(frame.header(), std::move(payload));
}

Frame RecoverPrevious(const Frame& curr) {
  if (curr.form() != FrameForm::kEmbedded) {
    throw Error(ErrorCode::kNotEmbedded,
                std::string("cannot recover from a ") +
                    FrameFormName(curr.form()) + " frame");
  }
  std::vector<SoftbitWord> payload(curr.payload().size());
  for (std::size_t k = 0; k < payload.size(); ++k) {
    const std::uint8_t hi = curr.payload()[k].lo;
    payload[k] = SoftbitWord{hi, CanonicalLo(hi)};
  }
  return Frame(curr.header(), std::move(payload));
}

Frame ErasureFrame(const StreamConfig& config) {
  return Frame(std::vector<std::uint8_t>(config.header_bytes(), 0),
               std::vector<SoftbitWord>(config.payload_words, EncodeBit(false)));
}

std::vector<Frame> FillByRepetition(std::vector<std::optional<Frame>> frames,
                                    const StreamConfig& config) {
  std::optional<Frame> first;
  for (const auto& f : frames) {
    if (f) {
      first = f;
      break;
    }
  }
  std::vector<Frame> out;
  out.reserve(frames.size());
  const Frame* last = first ? &*first : nullptr;
  const Frame erasure = first ? *first : ErasureFrame(config);
  for (auto& f : frames) {
    if (f) {
      out.push_back(std::move(*f));
      last = &out.back();
    } else {
      out.push_back(last ? *last : erasure);
      last = &out.back();
    }
  }
  return out;
}

ConcealSession::ConcealSession(StreamConfig config) : config_(config) {
  config_.Validate();
}

void ConcealSession::CheckSequence(std::uint64_t seq) {
  if (next_seq_ && seq != *next_seq_) {
    throw Error(ErrorCode::kSequenceGap,
                "expected seq " + std::to_string(*next_seq_) + ", got " +
                    std::to_string(seq));
  }
  next_seq_ = seq + 1;
}

void ConcealSession::EmitRun(std::vector<Frame>& out, const Frame& filler,
                             std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) out.push_back(filler);
}

std::vector<Frame> ConcealSession::Push(const ReceivedSlot& slot) {
  CheckSequence(slot.seq);
  ++report_.total;
  if (slot.lost()) {
    ++report_.lost;
    ++pending_lost_;
    return {};
  }

  const Frame& received = *slot.frame;
  received.CheckConforms(config_);
  Frame current = Normalize(received);
  if (received.form() == FrameForm::kUnknown) ++report_.corrupt_frames;

  std::vector<Frame> out;
  if (pending_lost_ > 0) {
    // Only the loss right before `received` can be rebuilt or repeated from
    // it; the rest of the run repeats the last frame played out.
    std::optional<Frame> closing;
    BurstTally& tally = report_.per_burst[pending_lost_];
    ++tally.runs;
    switch (received.form()) {
      case FrameForm::kEmbedded:
        closing = RecoverPrevious(received);
        ++report_.recovered_exact;
        ++report_.recovery_delay_frames;
        ++tally.recovered;
        break;
      case FrameForm::kCanonical:
        closing = current;
        ++report_.concealed_repetition;
        break;
      case FrameForm::kUnknown:
        closing = last_emitted_ ? *last_emitted_ : current;
        ++report_.unrecovered;
        break;
    }
    const Frame& filler = last_emitted_ ? *last_emitted_ : *closing;
    EmitRun(out, filler, pending_lost_ - 1);
    report_.unrecovered += pending_lost_ - 1;
    out.push_back(std::move(*closing));
    pending_lost_ = 0;
  }
  out.push_back(current);
  last_emitted_ = std::move(current);
  return out;
}

std::vector<Frame> ConcealSession::Finish() {
  std::vector<Frame> out;
  if (pending_lost_ == 0) return out;
  ++report_.per_burst[pending_lost_].runs;
  report_.unrecovered += pending_lost_;
  EmitRun(out, last_emitted_ ? *last_emitted_ : ErasureFrame(config_),
          pending_lost_);
  pending_lost_ = 0;
  return out;
}

ConcealResult ConcealStream(std::span<const ReceivedSlot> slots,
                            const StreamConfig& config) {
  ConcealSession session(config);
  ConcealResult result;
  result.frames.reserve(slots.size());
  for (const ReceivedSlot& slot : slots) {
    auto released = session.Push(slot);
    std::move(released.begin(), released.end(),
              std::back_inserter(result.frames));
  }
  auto tail = session.Finish();
  std::move(tail.begin(), tail.end(), std::back_inserter(result.frames));
  result.report = session.report();
  return result;
}

}  // namespace wbplc
