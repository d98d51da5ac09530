#include "wbplc/interleave.h"

#include <string>

#include "wbplc/error.h"

namespace wbplc {
namespace {

void RequireCanonical(const Frame& frame, const char* which) {
  if (frame.form() != FrameForm::kCanonical) {
    throw Error(ErrorCode::kNotCanonical,
                std::string(which) + " frame is " + FrameFormName(frame.form()));
  }
}

}  // namespace

FirstFramePolicy ParseFirstFramePolicy(std::string_view text) {
  if (text == "self") return FirstFramePolicy::kSelfEmbed;
  if (text == "pass") return FirstFramePolicy::kPassThrough;
  throw Error(ErrorCode::kInvalidConfig,
              "first-frame policy must be 'self' or 'pass', got '" +
                  std::string(text) + "'");
}

Frame Embed(const Frame& prev, const Frame& curr) {
  if (prev.header().size() != curr.header().size() ||
      prev.payload().size() != curr.payload().size()) {
    throw Error(ErrorCode::kConfigMismatch,
                "previous and current frame geometries differ");
  }
  RequireCanonical(prev, "previous");
  RequireCanonical(curr, "current");

  std::vector<SoftbitWord> payload(curr.payload().size());
  for (std::size_t k = 0; k < payload.size(); ++k) {
    payload[k] = SoftbitWord{curr.payload()[k].hi, prev.payload()[k].hi};
  }
  return Frame(curr.header(), std::move(payload));
}

Frame Embedder::Push(const Frame& frame) {
  RequireCanonical(frame, "input");
  Frame out = [&] {
    if (previous_) return Embed(*previous_, frame);
    if (policy_ == FirstFramePolicy::kSelfEmbed) return Embed(frame, frame);
    return frame;
  }();
  previous_ = frame;
  return out;
}

std::vector<Frame> ProcessStream(std::span<const Frame> frames,
                                 FirstFramePolicy policy) {
  if (frames.empty()) throw Error(ErrorCode::kEmptyStream, "no frames to embed");
  Embedder embedder(policy);
  std::vector<Frame> out;
  out.reserve(frames.size());
  for (const Frame& f : frames) out.push_back(embedder.Push(f));
  return out;
}

}  // namespace wbplc
