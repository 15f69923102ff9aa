#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "vfield/sphere.hpp"

namespace vfield {

/// Field making the constant angle theta0 with every parallel.
AngleField make_loxodromic_field(double theta0);

enum class Window { kNone, kCosSquared };

/// theta = theta0 + k lambda + a cos(m lambda - phase) w(phi), w = 1 or cos^2(phi).
struct TestFieldSpec {
  double theta0 = kHalfPi;
  int winding = 0;
  double amplitude = 0.0;
  int mode = 1;
  double phase = 0.0;
  Window window = Window::kNone;
};

AngleField make_test_field(const TestFieldSpec& spec);

/// One latitude/longitude harmonic of a random field:
///   amplitude cos(mode lambda - phase) cos(lat_freq phi - lat_phase)
struct Harmonic {
  double amplitude = 0.0;
  int mode = 0;
  double phase = 0.0;
  double lat_freq = 0.0;
  double lat_phase = 0.0;
};

/// theta0 + k lambda + sum of harmonics; analytic derivatives.
struct SmoothFieldSpec {
  double theta0 = 0.0;
  int winding = 0;
  std::vector<Harmonic> harmonics;
};

AngleField make_smooth_field(const SmoothFieldSpec& spec);

struct RandomFieldOptions {
  int max_winding = 2;
  int harmonics = 3;
  double max_amplitude = 0.4;
  int max_mode = 3;
  double max_lat_freq = 3.0;
};

/// Draws a random smooth field spec; deterministic for a given engine state.
SmoothFieldSpec random_smooth_field_spec(std::mt19937_64& rng, const RandomFieldOptions& options = {});

enum class TraceStop { kArcLength, kPole };

std::string_view to_string(TraceStop stop);

struct TracePoint {
  double s = 0.0;        // cumulative arc length
  SphericalPoint point{0.0, 0.0};
  double lambda_unwrapped = 0.0;
};

/// Rhumb line sampled at uniform arc-length spacing (plus the end point).
struct RhumbTrace {
  std::vector<TracePoint> points;
  double theta0 = 0.0;
  int direction = 0;     // +1 north-bound, -1 south-bound, 0 along a parallel
  TraceStop stop = TraceStop::kArcLength;
  /// Arc length to the pole: end point plus the remaining colatitude / |sin theta0|.
  /// Only meaningful for direction != 0.
  double length_to_pole = 0.0;
};

/// Colatitude at which tracing stops near a pole.
inline constexpr double kPoleStop = 1e-6;

/// Integrates dphi/ds = sin(theta0), dlambda/ds = cos(theta0)/cos(phi) with an
/// adaptive embedded Runge-Kutta pair, writing points every `step` of arc length.
/// Stops at s_max or when |phi| reaches pi/2 - kPoleStop. Throws NumericalError if
/// step control collapses.
RhumbTrace trace_rhumb(double theta0, const SphericalPoint& start, double s_max, double step);

}  // namespace vfield
