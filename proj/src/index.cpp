#include "vfield/index.hpp"

#include <cmath>
#include <string>

#include "vfield/curvature.hpp"

namespace vfield {

std::string_view to_string(Pole pole) { return pole == Pole::kNorth ? "N" : "S"; }

std::string_view to_string(IndexMethod method) {
  return method == IndexMethod::kWinding ? "winding" : "connection-form";
}

namespace {

void check_probe(Pole pole, double phi_probe) {
  const bool ok = pole == Pole::kNorth ? (phi_probe > 0.0 && phi_probe < kHalfPi)
                                       : (phi_probe < 0.0 && phi_probe > -kHalfPi);
  if (!ok) {
    throw DomainError("probe latitude " + std::to_string(phi_probe) + " is not on the " +
                      std::string(to_string(pole)) + " side");
  }
}

// Longitude of loop parameter t; loops are positively oriented about the pole.
double loop_longitude(Pole pole, double t) { return pole == Pole::kNorth ? t : -t; }

void finish(IndexReport& r) {
  r.index = static_cast<int>(std::lround(r.raw));
  r.residual = std::abs(r.raw - r.index);
}

template <class Attempt>
IndexReport refine(const IndexOptions& options, Attempt attempt) {
  IndexReport report;
  for (std::size_t samples = options.initial_samples;; samples *= 2) {
    report = attempt(samples);
    if (report.reliable || samples * 2 > options.max_samples) return report;
  }
}

}  // namespace

Vec2 pole_chart_position(Pole pole, const SphericalPoint& p) {
  if (pole == Pole::kNorth) {
    const double rho = kHalfPi - p.phi();
    return rho * Vec2(std::cos(p.lambda()), std::sin(p.lambda()));
  }
  const double rho = kHalfPi + p.phi();
  return rho * Vec2(std::cos(p.lambda()), -std::sin(p.lambda()));
}

Vec2 pole_chart_pushforward(Pole pole, const SphericalPoint& p, const Vec3& w) {
  const Vec3 x = embed(p);
  const double cos_phi = std::cos(p.phi());
  const double dphi = w.z() / cos_phi;
  const double dlambda = (x.x() * w.y() - x.y() * w.x()) / (x.x() * x.x() + x.y() * x.y());
  double rho, psi, drho, dpsi;
  if (pole == Pole::kNorth) {
    rho = kHalfPi - p.phi();
    psi = p.lambda();
    drho = -dphi;
    dpsi = dlambda;
  } else {
    rho = kHalfPi + p.phi();
    psi = -p.lambda();
    drho = dphi;
    dpsi = -dlambda;
  }
  const Vec2 e_rho(std::cos(psi), std::sin(psi));
  const Vec2 e_psi(-std::sin(psi), std::cos(psi));
  return drho * e_rho + rho * dpsi * e_psi;
}

double planar_winding(const std::function<Vec2(double t)>& vector_on_loop, std::size_t samples,
                      double* max_step) {
  if (samples < 3) throw DomainError("planar_winding: need at least 3 samples");
  const double dt = kTwoPi / static_cast<double>(samples);
  auto angle_at = [&](std::size_t k) {
    const Vec2 w = vector_on_loop(dt * static_cast<double>(k));
    if (!(w.norm() > 0.0) || !std::isfinite(w.norm())) {
      throw NumericalError("planar_winding: vanishing or non-finite vector on the loop");
    }
    return std::atan2(w.y(), w.x());
  };
  const double first = angle_at(0);
  double prev = first;
  double total = 0.0;
  double largest = 0.0;
  for (std::size_t k = 1; k <= samples; ++k) {
    const double cur = k == samples ? first : angle_at(k);
    const double step = std::remainder(cur - prev, kTwoPi);
    largest = std::max(largest, std::abs(step));
    total += step;
    prev = cur;
  }
  if (max_step) *max_step = largest;
  return total / kTwoPi;
}

IndexReport index_of_planar_field(const std::function<Vec2(const Vec2&)>& field, double radius,
                                  const IndexOptions& options) {
  if (!(radius > 0.0)) throw DomainError("index_of_planar_field: radius must be positive");
  return refine(options, [&](std::size_t samples) {
    IndexReport r;
    r.method = IndexMethod::kWinding;
    r.probe_phi = kHalfPi - radius;
    r.samples = samples;
    double max_step = 0.0;
    r.raw = planar_winding(
        [&](double t) { return field(radius * Vec2(std::cos(t), std::sin(t))); }, samples, &max_step);
    finish(r);
    r.reliable = r.residual < kIndexResidualLimit && max_step < kHalfPi;
    return r;
  });
}

IndexReport index_by_winding(const AngleField& field, Pole pole, double phi_probe,
                             const IndexOptions& options) {
  check_probe(pole, phi_probe);
  return refine(options, [&](std::size_t samples) {
    IndexReport r;
    r.pole = pole;
    r.method = IndexMethod::kWinding;
    r.probe_phi = phi_probe;
    r.samples = samples;
    double max_step = 0.0;
    r.raw = planar_winding(
        [&](double t) {
          const double lambda = loop_longitude(pole, t);
          const SphericalPoint p(phi_probe, lambda);
          return pole_chart_pushforward(pole, p, field_vector(field, phi_probe, lambda));
        },
        samples, &max_step);
    finish(r);
    r.reliable = r.residual < kIndexResidualLimit && max_step < kHalfPi;
    return r;
  });
}

IndexReport index_by_connection_form(const AngleField& field, Pole pole, double phi_probe,
                                     const IndexOptions& options) {
  check_probe(pole, phi_probe);
  const double cos_phi = std::cos(phi_probe);
  const double cap_area = pole == Pole::kNorth ? kTwoPi * (1.0 - std::sin(phi_probe))
                                               : kTwoPi * (1.0 + std::sin(phi_probe));
  const double orientation = pole == Pole::kNorth ? 1.0 : -1.0;
  return refine(options, [&](std::size_t samples) {
    IndexReport r;
    r.pole = pole;
    r.method = IndexMethod::kConnectionForm;
    r.probe_phi = phi_probe;
    r.samples = samples;
    const double dt = kTwoPi / static_cast<double>(samples);
    double line = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
      const SphericalPoint p(phi_probe, loop_longitude(pole, dt * static_cast<double>(k)));
      const Vec3 tangent = orientation * parallel_tangent(p);
      line += connection_form(field, p)(tangent);
    }
    line *= cos_phi * dt;
    r.raw = (cap_area - line) / kTwoPi;
    if (!std::isfinite(r.raw)) throw NumericalError("connection-form index is not finite");
    finish(r);
    r.reliable = r.residual < kIndexResidualLimit;
    return r;
  });
}

}  // namespace vfield
