#include "wbplc/fec_parity.h"

#include <optional>
#include <string>

#include "wbplc/error.h"

namespace wbplc {

BitVector XorParity(std::span<const BitVector> data) {
  if (data.empty()) throw Error(ErrorCode::kEmptyStream, "empty parity group");
  BitVector parity = data.front();
  for (const BitVector& v : data.subspan(1)) parity ^= v;
  return parity;
}

double FecOverhead::of_data() const {
  return data_frames == 0 ? 0.0 : double(parity_frames) / double(data_frames);
}

double FecOverhead::of_sent() const {
  return sent_frames == 0 ? 0.0 : double(parity_frames) / double(sent_frames);
}

FecOverhead ComputeFecOverhead(std::size_t data_frames) {
  FecOverhead o;
  o.data_frames = data_frames;
  o.parity_frames = (data_frames + kFecGroupData - 1) / kFecGroupData;
  o.sent_frames = o.data_frames + o.parity_frames;
  return o;
}

std::size_t DataFramesForEncoded(std::size_t encoded_frames) {
  const std::size_t groups = encoded_frames / (kFecGroupData + 1);
  const std::size_t rest = encoded_frames % (kFecGroupData + 1);
  if (encoded_frames == 0 || rest == 1) {
    throw Error(ErrorCode::kLayoutMismatch,
                std::to_string(encoded_frames) +
                    " frames is not a valid 4+1 parity layout");
  }
  return groups * kFecGroupData + (rest == 0 ? 0 : rest - 1);
}

std::vector<Frame> FecEncode(std::span<const Frame> frames,
                             const StreamConfig& config) {
  if (frames.empty()) throw Error(ErrorCode::kEmptyStream, "nothing to encode");
  std::vector<Frame> out;
  out.reserve(ComputeFecOverhead(frames.size()).sent_frames);
  for (std::size_t start = 0; start < frames.size(); start += kFecGroupData) {
    const auto group = frames.subspan(
        start, std::min(kFecGroupData, frames.size() - start));
    std::vector<BitVector> bits;
    bits.reserve(group.size());
    for (const Frame& f : group) {
      f.CheckConforms(config);
      if (f.form() != FrameForm::kCanonical) {
        throw Error(ErrorCode::kNotCanonical,
                    "FEC input frame " + std::to_string(start + bits.size()) +
                        " is " + FrameFormName(f.form()));
      }
      bits.push_back(PackPayload(f));
      out.push_back(f);
    }
    out.push_back(UnpackPayload(XorParity(bits), group.back().header(), config));
  }
  return out;
}

ConcealResult FecDecode(std::span<const ReceivedSlot> slots,
                        const StreamConfig& config) {
  const std::size_t data_frames = DataFramesForEncoded(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].seq != slots[0].seq + i) {
      throw Error(ErrorCode::kSequenceGap,
                  "slot " + std::to_string(i) + " has seq " +
                      std::to_string(slots[i].seq));
    }
    if (!slots[i].lost()) slots[i].frame->CheckConforms(config);
  }

  ConcealResult result;
  RecoveryReport& report = result.report;
  report.total = slots.size();
  std::vector<std::optional<Frame>> data;
  data.reserve(data_frames);

  for (std::size_t start = 0; start < slots.size();
       start += kFecGroupData + 1) {
    const std::size_t group_data =
        std::min(kFecGroupData, slots.size() - start - 1);
    const auto group = slots.subspan(start, group_data);
    const ReceivedSlot& parity = slots[start + group_data];

    std::vector<std::size_t> missing;
    for (std::size_t i = 0; i < group_data; ++i) {
      if (group[i].lost()) missing.push_back(i);
    }
    report.lost += missing.size();
    if (parity.lost()) {
      ++report.lost;
      ++report.parity_lost;
      ++report.unrecovered;
    }

    std::vector<std::optional<Frame>> rebuilt(group_data);
    for (std::size_t i = 0; i < group_data; ++i) {
      if (!group[i].lost()) rebuilt[i] = Normalize(*group[i].frame);
    }
    if (missing.size() == 1 && !parity.lost()) {
      BitVector bits = PackPayload(*parity.frame);
      for (std::size_t i = 0; i < group_data; ++i) {
        if (rebuilt[i]) bits ^= PackPayload(*rebuilt[i]);
      }
      rebuilt[missing[0]] = UnpackPayload(bits, parity.frame->header(), config);
      ++report.recovered_exact;
      report.recovery_delay_frames += group_data - missing[0];
    } else {
      report.unrecovered += missing.size();
    }
    for (auto& f : rebuilt) data.push_back(std::move(f));
  }

  result.frames = FillByRepetition(std::move(data), config);
  return result;
}

}  // namespace wbplc
