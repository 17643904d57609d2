#pragma once

#include <stdexcept>

namespace pma {

enum class SignalKind { constant, step, chirp, sine };

/// Linear-sweep chirp offset + amplitude * sin(2 pi (f0 t + (f1-f0) t^2 / 2T)).
/// Instantaneous frequency at t is f0 + (f1 - f0) t / T. Rejects t outside
/// [0, T].
double chirp_pressure(double t, double f0, double f1, double T, double offset,
                      double amplitude);

/// Commanded-pressure waveform. All kinds are deterministic pure functions
/// of t and evaluate finite on [0, duration].
struct PressureSignal {
  SignalKind kind = SignalKind::constant;
  double offset = 0.0;     // Pa
  double amplitude = 0.0;  // Pa
  double f0 = 0.0;         // Hz (chirp start; sine frequency)
  double f1 = 0.0;         // Hz (chirp end)
  double duration = 0.0;   // s (chirp sweep length)
  double step_time = 0.0;  // s (step switch instant)

  double value(double t) const;
  void validate() const;  // throws std::invalid_argument
};

struct RefPoint {
  double x_d;  // desired extension (m)
  double v_d;  // desired velocity (m/s)
  double a_d;  // desired acceleration (m/s^2)
};

/// Sinusoidal tracking reference x_d(t) = bias + amplitude sin(2 pi f t)
/// with exact analytic derivatives.
struct ReferenceSignal {
  double bias = 0.005;       // m
  double amplitude = 0.0225; // m
  double f = 0.5;            // Hz

  RefPoint eval(double t) const;
  void validate() const;
};

/// Reference of the tracking experiments: bias 5 mm, amplitude 22.5 mm.
RefPoint tracking_reference(double t, double f);

}  // namespace pma
