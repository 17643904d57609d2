#include <doctest.h>

#include <cmath>

#include "pma/signals.hpp"

using namespace pma;

TEST_CASE("chirp starts at the offset and rejects out-of-range times") {
  CHECK(chirp_pressure(0.0, 0.1, 3.0, 15.0, 0.25e6, 0.25e6) == 0.25e6);
  CHECK_THROWS_AS(chirp_pressure(-0.1, 0.1, 3.0, 15.0, 0.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(chirp_pressure(15.1, 0.1, 3.0, 15.0, 0.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(chirp_pressure(1.0, 3.0, 0.1, 15.0, 0.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("chirp cycle count matches the analytic frequency integral") {
  // integral of f over the sweep: (f0 + f1) T / 2 = 23.25 cycles
  const double f0 = 0.1, f1 = 3.0, T = 15.0;
  const double dt = 1e-3;
  int upward = 0;
  double prev = chirp_pressure(0.0, f0, f1, T, 0.0, 1.0);
  double last_crossing = -1.0, prev_crossing = -1.0;
  for (double t = dt; t <= T; t += dt) {
    const double cur = chirp_pressure(t, f0, f1, T, 0.0, 1.0);
    if (prev < 0.0 && cur >= 0.0) {
      ++upward;
      prev_crossing = last_crossing;
      last_crossing = t;
    }
    prev = cur;
  }
  CHECK(std::abs(upward - 23.25) <= 1.0);

  // The spacing of the final crossings reflects the 3 Hz sweep endpoint.
  REQUIRE(prev_crossing > 0.0);
  const double end_freq = 1.0 / (last_crossing - prev_crossing);
  CHECK(end_freq == doctest::Approx(f1).epsilon(0.06));
}

TEST_CASE("pressure signal kinds") {
  PressureSignal sig;
  SUBCASE("constant") {
    sig.offset = 123.0;
    CHECK(sig.value(0.0) == 123.0);
    CHECK(sig.value(5.0) == 123.0);
  }
  SUBCASE("step switches at step_time") {
    sig.kind = SignalKind::step;
    sig.offset = 0.0;
    sig.amplitude = 0.4e6;
    sig.step_time = 1.0;
    CHECK(sig.value(0.999) == 0.0);
    CHECK(sig.value(1.0) == 0.4e6);
  }
  SUBCASE("sine oscillates around the offset") {
    sig.kind = SignalKind::sine;
    sig.offset = 2e5;
    sig.amplitude = 1e5;
    sig.f0 = 2.0;
    CHECK(sig.value(0.0) == doctest::Approx(2e5));
    CHECK(sig.value(0.125) == doctest::Approx(3e5));
  }
  SUBCASE("chirp holds its endpoints outside the sweep") {
    sig.kind = SignalKind::chirp;
    sig.offset = 0.25e6;
    sig.amplitude = 0.25e6;
    sig.f0 = 0.1;
    sig.f1 = 3.0;
    sig.duration = 15.0;
    CHECK(sig.value(16.0) == sig.value(15.0));
  }
  SUBCASE("validation rejects a backwards sweep") {
    sig.kind = SignalKind::chirp;
    sig.f0 = 3.0;
    sig.f1 = 0.1;
    sig.duration = 15.0;
    CHECK_THROWS_AS(sig.validate(), std::invalid_argument);
  }
}

TEST_CASE("tracking reference values and derivatives") {
  const double f = 0.5;
  const RefPoint at0 = tracking_reference(0.0, f);
  CHECK(at0.x_d == doctest::Approx(0.005));
  CHECK(at0.v_d == doctest::Approx(0.0225 * 2.0 * M_PI * f));

  const RefPoint peak = tracking_reference(1.0 / (4.0 * f), f);
  CHECK(peak.x_d == doctest::Approx(0.0275));
  CHECK(std::abs(peak.v_d) < 1e-12);

  // a_d(t) = -(2 pi f)^2 (x_d(t) - bias) for every sample
  const double w = 2.0 * M_PI * f;
  for (double t = 0.0; t < 4.0; t += 0.37) {
    const RefPoint r = tracking_reference(t, f);
    CHECK(r.a_d == doctest::Approx(-w * w * (r.x_d - 0.005)).epsilon(1e-10));
  }
}

TEST_CASE("reference derivative matches a central difference to O(h^2)") {
  const ReferenceSignal ref{0.005, 0.0225, 1.0};
  const double h = 1e-3;
  const double w = 2.0 * M_PI * ref.f;
  // |central diff - v_d| <= amplitude w^3 h^2 / 6
  const double bound = ref.amplitude * w * w * w * h * h / 6.0 * 1.5;
  for (double t = h; t < 3.0; t += 0.111) {
    const double numeric =
        (ref.eval(t + h).x_d - ref.eval(t - h).x_d) / (2.0 * h);
    CHECK(std::abs(numeric - ref.eval(t).v_d) < bound);
  }
}
