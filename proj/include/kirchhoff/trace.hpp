#pragma once

#include <optional>
#include <vector>

#include "kirchhoff/coefficient.hpp"
#include "kirchhoff/spectrum.hpp"

namespace kirchhoff {

/// One recorded point of a trajectory.
struct Sample {
  double t = 0.0;
  Vector u;
  Vector v;
  /// u″ per mode.
  Vector accel;
  /// w_k = v_k + bλ_k²u_k, equal to −εu″_k.
  Vector defect;
  double b = 0.0;
  /// b′ from the chain rule (nonlinear runs) or the prescribed family (linear runs).
  double db = 0.0;
  double B = 0.0;
};

enum class TraceKind { Nonlinear, Linear };

struct TraceInfo {
  TraceKind kind = TraceKind::Nonlinear;
  Spectrum spectrum;
  double epsilon = 0.0;
  /// Zero for linear runs.
  double gamma = 0.0;
  /// Smallest frequency carrying nonzero data (zero if all data vanish).
  double nu = 0.0;
  double b0 = 0.0;
  Vector u0;
  Vector u1;
  std::optional<LinearCoefficient> coefficient;
};

/// Samples of one trajectory, strictly increasing in time.
class Trace {
 public:
  explicit Trace(TraceInfo info) : info_(std::move(info)) {}

  /// Throws InvalidInput if the time does not increase strictly.
  void push(Sample sample);

  const TraceInfo& info() const { return info_; }
  const std::vector<Sample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }
  const Sample& back() const { return samples_.back(); }
  Vector times() const;

 private:
  TraceInfo info_;
  std::vector<Sample> samples_;
};

}  // namespace kirchhoff
