#ifndef WBPLC_FRAME_H_
#define WBPLC_FRAME_H_

// Softbit serial frame model.
//
// Every payload bit is carried as a 16-bit word written hi byte first:
//
//   bit 1  ->  7F 00
//   bit 0  ->  81 FF
//
// The hi byte alone determines the bit. In canonical form the lo byte is a
// fixed function of the hi byte; after piggyback embedding the lo byte holds
// the hi byte of the same word in the previous frame, so it is also 7F/81.
// A frame is a run of opaque header words followed by the payload words.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wbplc {

inline constexpr std::uint8_t kHiOne = 0x7F;
inline constexpr std::uint8_t kHiZero = 0x81;
inline constexpr std::uint8_t kLoOne = 0x00;
inline constexpr std::uint8_t kLoZero = 0xFF;

struct SoftbitWord {
  std::uint8_t hi = kHiZero;
  std::uint8_t lo = kLoZero;

  friend bool operator==(const SoftbitWord&, const SoftbitWord&) = default;
};

// True iff `b` is one of the two informative byte values (7F, 81).
constexpr bool IsInformativeByte(std::uint8_t b) {
  return b == kHiOne || b == kHiZero;
}

SoftbitWord EncodeBit(bool bit);

// Reads only the hi byte. Throws kInvalidSoftbit (reporting `word_index`)
// when hi is outside {7F, 81}.
bool DecodeWord(SoftbitWord word, std::size_t word_index = 0);

// 7F -> 00, 81 -> FF. Throws kInvalidSoftbit otherwise.
std::uint8_t CanonicalLo(std::uint8_t hi);

struct StreamConfig {
  std::size_t header_words = 3;
  std::size_t payload_words = 132;  // mode 0, 6.60 kbit/s
  std::size_t frame_duration_ms = 20;

  std::size_t header_bytes() const { return 2 * header_words; }
  std::size_t frame_bytes() const { return 2 * (header_words + payload_words); }

  // Throws kInvalidConfig when payload_words == 0 or duration == 0.
  void Validate() const;

  friend bool operator==(const StreamConfig&, const StreamConfig&) = default;
};

enum class FrameForm { kCanonical, kEmbedded, kUnknown };

const char* FrameFormName(FrameForm form);

// Canonical iff every lo == CanonicalLo(hi); Embedded iff every lo is 7F/81;
// Unknown otherwise. Hi bytes must already be valid.
FrameForm ClassifyPayload(std::span<const SoftbitWord> payload);

// Immutable frame value. Construction validates every payload hi byte and
// classifies the form once.
class Frame {
 public:
  Frame(std::vector<std::uint8_t> header, std::vector<SoftbitWord> payload);

  const std::vector<std::uint8_t>& header() const { return header_; }
  const std::vector<SoftbitWord>& payload() const { return payload_; }
  FrameForm form() const { return form_; }

  std::size_t byte_size() const { return header_.size() + 2 * payload_.size(); }

  // Throws kConfigMismatch unless header and payload sizes match `config`.
  void CheckConforms(const StreamConfig& config) const;
  bool Conforms(const StreamConfig& config) const;

  friend bool operator==(const Frame& a, const Frame& b) {
    return a.header_ == b.header_ && a.payload_ == b.payload_;
  }

 private:
  std::vector<std::uint8_t> header_;
  std::vector<SoftbitWord> payload_;
  FrameForm form_;
};

struct BitVector {
  std::vector<std::uint8_t> bits;  // one 0/1 value per payload word

  std::size_t size() const { return bits.size(); }

  BitVector& operator^=(const BitVector& other);  // kLengthMismatch on size
  friend bool operator==(const BitVector&, const BitVector&) = default;
};

// Frame splitting at fixed offsets. Throws kTruncatedStream if the size is
// zero or not a multiple of the frame size; kInvalidSoftbit with frame and
// word index on a bad hi byte.
std::vector<Frame> ParseStream(std::span<const std::uint8_t> data,
                               const StreamConfig& config);

std::vector<std::uint8_t> SerializeStream(std::span<const Frame> frames,
                                          const StreamConfig& config);

BitVector PackPayload(const Frame& frame);

Frame UnpackPayload(const BitVector& bits, std::span<const std::uint8_t> header,
                    const StreamConfig& config);

// Whole-file helpers for the .cod-style softbit stream files.
std::vector<std::uint8_t> ReadFileBytes(const std::string& path);
void WriteFileBytes(const std::string& path, std::span<const std::uint8_t> data);

}  // namespace wbplc

#endif  // WBPLC_FRAME_H_
