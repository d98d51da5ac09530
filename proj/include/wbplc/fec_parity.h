#ifndef WBPLC_FEC_PARITY_H_
#define WBPLC_FEC_PARITY_H_

// XOR parity FEC baseline.
//
// Encoded layout, positional with no in-band markers:
//
//   d0 d1 d2 d3 P0 | d4 d5 d6 d7 P1 | ... | d(4g) .. d(4g+t-1) Pg
//
// Each parity frame carries the XOR of its group's packed payload bits,
// re-encoded as canonical softbits, and a copy of the group's last data
// header. A tail of t = n mod 4 (1..3) data frames gets its own parity over
// those t frames. The decoder derives the data count from the encoded count,
// since n + ceil(n/4) is injective; an encoded count of 5g+1 is invalid.

#include <cstddef>
#include <span>
#include <vector>

#include "wbplc/conceal.h"
#include "wbplc/frame.h"

namespace wbplc {

inline constexpr std::size_t kFecGroupData = 4;

struct ParityGroup {
  std::vector<BitVector> data;  // 1..4 entries
  BitVector parity;
  std::size_t group_index = 0;
};

// XOR of all data vectors. Throws kLengthMismatch on ragged input and
// kEmptyStream on no input.
BitVector XorParity(std::span<const BitVector> data);

struct FecOverhead {
  std::size_t data_frames = 0;
  std::size_t parity_frames = 0;
  std::size_t sent_frames = 0;

  double of_data() const;  // parity / data, 25% for full groups
  double of_sent() const;  // parity / sent, 20% for full groups
};

FecOverhead ComputeFecOverhead(std::size_t data_frames);

// Inverse of n + ceil(n/4). Throws kLayoutMismatch when no n maps to
// `encoded_frames`.
std::size_t DataFramesForEncoded(std::size_t encoded_frames);

// Throws kEmptyStream on empty input and kNotCanonical on non-canonical
// frames.
std::vector<Frame> FecEncode(std::span<const Frame> frames,
                             const StreamConfig& config);

// Returns exactly the data frames, parity stripped. Report totals cover every
// transmitted frame, so lost and unrecovered include lost parity frames
// (also tallied in parity_lost). Unrecoverable data losses are filled by
// repetition.
ConcealResult FecDecode(std::span<const ReceivedSlot> slots,
                        const StreamConfig& config);

}  // namespace wbplc

#endif  // WBPLC_FEC_PARITY_H_
