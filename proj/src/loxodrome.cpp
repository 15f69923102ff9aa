#include "vfield/loxodrome.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <boost/numeric/odeint.hpp>

namespace vfield {

AngleField make_loxodromic_field(double theta0) {
  return AngleField([theta0](double, double) { return AngleJet{theta0, 0.0, 0.0}; },
                    FieldKind::kClosedForm);
}

AngleField make_test_field(const TestFieldSpec& spec) {
  return AngleField(
      [spec](double phi, double lambda) {
        double w = 1.0;
        double dw = 0.0;
        if (spec.window == Window::kCosSquared) {
          const double c = std::cos(phi);
          w = c * c;
          dw = -2.0 * c * std::sin(phi);
        }
        const double arg = spec.mode * lambda - spec.phase;
        const double wave = spec.amplitude * std::cos(arg);
        return AngleJet{
            .theta = spec.theta0 + spec.winding * lambda + wave * w,
            .dphi = wave * dw,
            .dlambda = spec.winding - spec.amplitude * spec.mode * std::sin(arg) * w,
        };
      },
      FieldKind::kClosedForm);
}

AngleField make_smooth_field(const SmoothFieldSpec& spec) {
  return AngleField(
      [spec](double phi, double lambda) {
        AngleJet j{spec.theta0 + spec.winding * lambda, 0.0, static_cast<double>(spec.winding)};
        for (const Harmonic& h : spec.harmonics) {
          const double lon = h.mode * lambda - h.phase;
          const double lat = h.lat_freq * phi - h.lat_phase;
          const double cl = std::cos(lon);
          const double ct = std::cos(lat);
          j.theta += h.amplitude * cl * ct;
          j.dlambda -= h.amplitude * h.mode * std::sin(lon) * ct;
          j.dphi -= h.amplitude * h.lat_freq * cl * std::sin(lat);
        }
        return j;
      },
      FieldKind::kClosedForm);
}

SmoothFieldSpec random_smooth_field_spec(std::mt19937_64& rng, const RandomFieldOptions& options) {
  std::uniform_int_distribution<int> winding(-options.max_winding, options.max_winding);
  std::uniform_int_distribution<int> mode(0, options.max_mode);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  std::uniform_real_distribution<double> amplitude(-options.max_amplitude, options.max_amplitude);
  std::uniform_real_distribution<double> lat_freq(0.0, options.max_lat_freq);
  SmoothFieldSpec spec;
  spec.theta0 = angle(rng);
  spec.winding = winding(rng);
  for (int i = 0; i < options.harmonics; ++i) {
    Harmonic h;
    h.amplitude = amplitude(rng);
    h.mode = mode(rng);
    h.phase = angle(rng);
    h.lat_freq = lat_freq(rng);
    h.lat_phase = angle(rng);
    spec.harmonics.push_back(h);
  }
  return spec;
}

std::string_view to_string(TraceStop stop) {
  return stop == TraceStop::kPole ? "pole" : "arc-length";
}

RhumbTrace trace_rhumb(double theta0, const SphericalPoint& start, double s_max, double step) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 2>;

  if (!std::isfinite(theta0)) throw DomainError("trace_rhumb: theta0 must be finite");
  if (!(s_max >= 0.0) || !std::isfinite(s_max)) throw DomainError("trace_rhumb: s_max must be >= 0");
  if (!(step > 0.0)) throw DomainError("trace_rhumb: step must be positive");

  const double sin0 = std::sin(theta0);
  const double cos0 = std::cos(theta0);

  RhumbTrace trace;
  trace.theta0 = theta0;
  trace.direction = std::abs(sin0) < 1e-14 ? 0 : (sin0 > 0.0 ? 1 : -1);

  // phi is linear in s, so the arc length at which the stop latitude is reached is known.
  const double phi_stop = kHalfPi - kPoleStop;
  double s_end = s_max;
  if (trace.direction != 0) {
    const double to_stop = (phi_stop - trace.direction * start.phi()) / std::abs(sin0);
    if (to_stop <= s_max) {
      s_end = std::max(0.0, to_stop);
      trace.stop = TraceStop::kPole;
    }
  }

  auto rhs = [sin0, cos0](const State& x, State& dxds, double) {
    dxds[0] = sin0;
    dxds[1] = cos0 / std::cos(x[0]);
  };
  auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(1e-13, 1e-13);

  State x{start.phi(), start.lambda()};
  double s = 0.0;
  double dt = std::min(step, 1e-3);
  auto record = [&] {
    trace.points.push_back(TracePoint{s, SphericalPoint(x[0], x[1]), x[1]});
  };
  record();

  std::size_t k = 0;
  while (s < s_end) {
    ++k;
    const double target = std::min(s_end, step * static_cast<double>(k));
    while (s < target) {
      dt = std::min(dt, target - s);
      if (stepper.try_step(rhs, x, s, dt) == odeint::success) {
        // land exactly on output times despite rounding in s + dt
        if (target - s < 1e-15 * std::max(1.0, target)) s = target;
      } else if (dt < 1e-15) {
        throw NumericalError("trace_rhumb: step control collapsed at s = " + std::to_string(s) +
                             ", phi = " + std::to_string(x[0]));
      }
    }
    record();
  }

  if (trace.direction != 0) {
    trace.length_to_pole = s + (kHalfPi - std::abs(x[0])) / std::abs(sin0);
  }
  return trace;
}

}  // namespace vfield
