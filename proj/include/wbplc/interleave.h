#ifndef WBPLC_INTERLEAVE_H_
#define WBPLC_INTERLEAVE_H_

// Sender side of the piggyback scheme. Each outgoing frame keeps its own hi
// bytes and carries the previous frame's hi bytes in its lo bytes, so the
// stream size is unchanged and a single lost frame can be rebuilt from its
// successor.

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "wbplc/frame.h"

namespace wbplc {

enum class FirstFramePolicy {
  kSelfEmbed,    // frame 0 carries its own hi bytes
  kPassThrough,  // frame 0 is sent canonical, untouched
};

// Accepts "self" / "pass".
FirstFramePolicy ParseFirstFramePolicy(std::string_view text);

// out.payload[k] = {curr.payload[k].hi, prev.payload[k].hi}; header from curr.
// Throws kNotCanonical if either input is not canonical and kConfigMismatch if
// their geometries differ.
Frame Embed(const Frame& prev, const Frame& curr);

// One-frame FIFO embedder for a single stream. Not thread-safe; use one per
// stream.
class Embedder {
 public:
  explicit Embedder(FirstFramePolicy policy = FirstFramePolicy::kSelfEmbed)
      : policy_(policy) {}

  Frame Push(const Frame& frame);

  const std::optional<Frame>& previous() const { return previous_; }
  FirstFramePolicy policy() const { return policy_; }

 private:
  FirstFramePolicy policy_;
  std::optional<Frame> previous_;
};

// Throws kEmptyStream on empty input.
std::vector<Frame> ProcessStream(std::span<const Frame> frames,
                                 FirstFramePolicy policy);

}  // namespace wbplc

#endif  // WBPLC_INTERLEAVE_H_
