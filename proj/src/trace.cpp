#include "kirchhoff/trace.hpp"

#include "kirchhoff/errors.hpp"

namespace kirchhoff {

void Trace::push(Sample sample) {
  if (!samples_.empty() && !(sample.t > samples_.back().t)) {
    throw InvalidInput("trace samples must be strictly increasing in time");
  }
  samples_.push_back(std::move(sample));
}

Vector Trace::times() const {
  Vector out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) out.push_back(s.t);
  return out;
}

}  // namespace kirchhoff
