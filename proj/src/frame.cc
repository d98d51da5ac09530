#include "wbplc/frame.h"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>
#include <utility>

#include "wbplc/error.h"

namespace wbplc {
namespace {

std::string Hex(std::uint8_t b) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "0x%02X", b);
  return buf;
}

}  // namespace

SoftbitWord EncodeBit(bool bit) {
  return bit ? SoftbitWord{kHiOne, kLoOne} : SoftbitWord{kHiZero, kLoZero};
}

bool DecodeWord(SoftbitWord word, std::size_t word_index) {
  if (word.hi == kHiOne) return true;
  if (word.hi == kHiZero) return false;
  throw Error(ErrorCode::kInvalidSoftbit, "word " + std::to_string(word_index) +
                                              " has hi byte " + Hex(word.hi));
}

std::uint8_t CanonicalLo(std::uint8_t hi) {
  if (hi == kHiOne) return kLoOne;
  if (hi == kHiZero) return kLoZero;
  throw Error(ErrorCode::kInvalidSoftbit, "no canonical lo for " + Hex(hi));
}

void StreamConfig::Validate() const {
  if (payload_words == 0) {
    throw Error(ErrorCode::kInvalidConfig, "payload_words must be > 0");
  }
  if (frame_duration_ms == 0) {
    throw Error(ErrorCode::kInvalidConfig, "frame_duration_ms must be > 0");
  }
}

const char* FrameFormName(FrameForm form) {
  switch (form) {
    case FrameForm::kCanonical: return "canonical";
    case FrameForm::kEmbedded: return "embedded";
    case FrameForm::kUnknown: return "unknown";
  }
  return "?";
}

FrameForm ClassifyPayload(std::span<const SoftbitWord> payload) {
  bool canonical = true;
  bool embedded = true;
  for (const SoftbitWord& w : payload) {
    canonical = canonical && w.lo == CanonicalLo(w.hi);
    embedded = embedded && IsInformativeByte(w.lo);
    if (!canonical && !embedded) return FrameForm::kUnknown;
  }
  // The two lo alphabets are disjoint, so both can only hold when empty.
  return canonical ? FrameForm::kCanonical : FrameForm::kEmbedded;
}

Frame::Frame(std::vector<std::uint8_t> header, std::vector<SoftbitWord> payload)
    : header_(std::move(header)), payload_(std::move(payload)) {
  for (std::size_t k = 0; k < payload_.size(); ++k) {
    DecodeWord(payload_[k], k);
  }
  form_ = ClassifyPayload(payload_);
}

bool Frame::Conforms(const StreamConfig& config) const {
  return header_.size() == config.header_bytes() &&
         payload_.size() == config.payload_words;
}

void Frame::CheckConforms(const StreamConfig& config) const {
  if (!Conforms(config)) {
    throw Error(ErrorCode::kConfigMismatch,
                "frame has " + std::to_string(header_.size()) +
                    " header bytes and " + std::to_string(payload_.size()) +
                    " payload words; expected " +
                    std::to_string(config.header_bytes()) + " and " +
                    std::to_string(config.payload_words));
  }
}

BitVector& BitVector::operator^=(const BitVector& other) {
  if (other.bits.size() != bits.size()) {
    throw Error(ErrorCode::kLengthMismatch, "XOR of bit vectors of length " +
                                                std::to_string(bits.size()) +
                                                " and " +
                                                std::to_string(other.size()));
  }
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] ^= other.bits[i];
  return *this;
}

std::vector<Frame> ParseStream(std::span<const std::uint8_t> data,
                               const StreamConfig& config) {
  config.Validate();
  const std::size_t frame_bytes = config.frame_bytes();
  if (data.empty() || data.size() % frame_bytes != 0) {
    throw Error(ErrorCode::kTruncatedStream,
                std::to_string(data.size()) +
                    " bytes is not a positive multiple of the " +
                    std::to_string(frame_bytes) + "-byte frame size");
  }
  const std::size_t count = data.size() / frame_bytes;
  std::vector<Frame> frames;
  frames.reserve(count);
  for (std::size_t f = 0; f < count; ++f) {
    auto bytes = data.subspan(f * frame_bytes, frame_bytes);
    std::vector<std::uint8_t> header(bytes.begin(),
                                     bytes.begin() + config.header_bytes());
    std::vector<SoftbitWord> payload(config.payload_words);
    for (std::size_t k = 0; k < config.payload_words; ++k) {
      const std::size_t at = config.header_bytes() + 2 * k;
      payload[k] = SoftbitWord{bytes[at], bytes[at + 1]};
      if (!IsInformativeByte(payload[k].hi)) {
        throw Error(ErrorCode::kInvalidSoftbit,
                    "frame " + std::to_string(f) + " word " +
                        std::to_string(k) + " has hi byte " +
                        Hex(payload[k].hi));
      }
    }
    frames.emplace_back(std::move(header), std::move(payload));
  }
  return frames;
}

std::vector<std::uint8_t> SerializeStream(std::span<const Frame> frames,
                                          const StreamConfig& config) {
  std::vector<std::uint8_t> out;
  out.reserve(frames.size() * config.frame_bytes());
  for (const Frame& frame : frames) {
    frame.CheckConforms(config);
    out.insert(out.end(), frame.header().begin(), frame.header().end());
    for (const SoftbitWord& w : frame.payload()) {
      out.push_back(w.hi);
      out.push_back(w.lo);
    }
  }
  return out;
}

BitVector PackPayload(const Frame& frame) {
  BitVector v;
  v.bits.reserve(frame.payload().size());
  for (std::size_t k = 0; k < frame.payload().size(); ++k) {
    v.bits.push_back(DecodeWord(frame.payload()[k], k) ? 1 : 0);
  }
  return v;
}

Frame UnpackPayload(const BitVector& bits, std::span<const std::uint8_t> header,
                    const StreamConfig& config) {
  if (bits.size() != config.payload_words ||
      header.size() != config.header_bytes()) {
    throw Error(ErrorCode::kLengthMismatch,
                "bit vector of length " + std::to_string(bits.size()) +
                    " with " + std::to_string(header.size()) +
                    " header bytes does not fit the stream config");
  }
  std::vector<SoftbitWord> payload;
  payload.reserve(bits.size());
  for (std::uint8_t b : bits.bits) payload.push_back(EncodeBit(b != 0));
  return Frame({header.begin(), header.end()}, std::move(payload));
}

std::vector<std::uint8_t> ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteFileBytes(const std::string& path,
                    std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot create " + path);
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path);
}

}  // namespace wbplc
