#include "pma/signals.hpp"

#include <algorithm>
#include <cmath>

namespace pma {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double chirp_pressure(double t, double f0, double f1, double T, double offset,
                      double amplitude) {
  if (!(t >= 0.0 && t <= T)) {
    throw std::invalid_argument("chirp_pressure: t outside [0, T]");
  }
  if (!(f1 > f0 && f0 > 0.0)) {
    throw std::invalid_argument("chirp_pressure: need f1 > f0 > 0");
  }
  const double phase = kTwoPi * (f0 * t + (f1 - f0) * t * t / (2.0 * T));
  return offset + amplitude * std::sin(phase);
}

double PressureSignal::value(double t) const {
  switch (kind) {
    case SignalKind::constant:
      return offset;
    case SignalKind::step:
      return t < step_time ? offset : offset + amplitude;
    case SignalKind::sine:
      return offset + amplitude * std::sin(kTwoPi * f0 * t);
    case SignalKind::chirp:
      // Hold the sweep endpoints outside [0, duration].
      return chirp_pressure(std::clamp(t, 0.0, duration), f0, f1, duration,
                            offset, amplitude);
  }
  throw std::logic_error("PressureSignal: unknown kind");
}

void PressureSignal::validate() const {
  if (!(std::isfinite(offset) && std::isfinite(amplitude))) {
    throw std::invalid_argument("PressureSignal: offset/amplitude must be finite");
  }
  switch (kind) {
    case SignalKind::constant:
      break;
    case SignalKind::step:
      if (!(std::isfinite(step_time) && step_time >= 0.0)) {
        throw std::invalid_argument("PressureSignal: step_time must be >= 0");
      }
      break;
    case SignalKind::sine:
      if (!(std::isfinite(f0) && f0 > 0.0)) {
        throw std::invalid_argument("PressureSignal: sine needs f0 > 0");
      }
      break;
    case SignalKind::chirp:
      if (!(std::isfinite(f0) && std::isfinite(f1) && f1 > f0 && f0 > 0.0)) {
        throw std::invalid_argument("PressureSignal: chirp needs f1 > f0 > 0");
      }
      if (!(std::isfinite(duration) && duration > 0.0)) {
        throw std::invalid_argument("PressureSignal: chirp needs duration > 0");
      }
      break;
  }
}

RefPoint ReferenceSignal::eval(double t) const {
  const double w = kTwoPi * f;
  return {bias + amplitude * std::sin(w * t), amplitude * w * std::cos(w * t),
          -amplitude * w * w * std::sin(w * t)};
}

void ReferenceSignal::validate() const {
  if (!(std::isfinite(bias) && std::isfinite(amplitude))) {
    throw std::invalid_argument("ReferenceSignal: bias/amplitude must be finite");
  }
  if (!(std::isfinite(f) && f > 0.0)) {
    throw std::invalid_argument("ReferenceSignal: f must be > 0");
  }
}

RefPoint tracking_reference(double t, double f) {
  if (!(f > 0.0)) {
    throw std::invalid_argument("tracking_reference: f must be > 0");
  }
  return ReferenceSignal{0.005, 0.0225, f}.eval(t);
}

}  // namespace pma
