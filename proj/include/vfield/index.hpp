#pragma once

#include <cstddef>
#include <functional>
#include <string_view>

#include "vfield/sphere.hpp"

namespace vfield {

enum class Pole { kNorth, kSouth };
enum class IndexMethod { kWinding, kConnectionForm };

std::string_view to_string(Pole pole);
std::string_view to_string(IndexMethod method);

/// Poincare index of a field at one puncture.
struct IndexReport {
  Pole pole = Pole::kNorth;
  IndexMethod method = IndexMethod::kWinding;
  double raw = 0.0;        // before rounding
  int index = 0;
  double residual = 0.0;   // |raw - index|
  double probe_phi = 0.0;
  std::size_t samples = 0;
  bool reliable = false;   // residual < kIndexResidualLimit and the loop was resolved
};

inline constexpr double kIndexResidualLimit = 0.1;

struct IndexOptions {
  std::size_t initial_samples = 4096;
  std::size_t max_samples = std::size_t{1} << 18;
};

/// Position of a point in the azimuthal equidistant chart centred at `pole`.
/// Chart axes are oriented so that the chart is positively oriented with
/// respect to the outward normal at the pole.
Vec2 pole_chart_position(Pole pole, const SphericalPoint& point);

/// Differential of that chart applied to a tangent vector at `point`.
Vec2 pole_chart_pushforward(Pole pole, const SphericalPoint& point, const Vec3& tangent);

/// Winding of a planar vector along a closed loop sampled at t_k = 2 pi k / samples,
/// k = 0..samples-1. `max_step` receives the largest unwrapped increment.
double planar_winding(const std::function<Vec2(double t)>& vector_on_loop, std::size_t samples,
                      double* max_step = nullptr);

/// Index of a planar field around the circle of radius `radius` about the chart origin.
IndexReport index_of_planar_field(const std::function<Vec2(const Vec2&)>& field, double radius,
                                  const IndexOptions& options = {});

/// Winding number of the field pushed into the pole chart, along the parallel at
/// phi_probe (positive for the north pole, negative for the south pole).
IndexReport index_by_winding(const AngleField& field, Pole pole, double phi_probe,
                             const IndexOptions& options = {});

/// Gauss-Bonnet on the polar cap bounded by the parallel at phi_probe:
///   2 pi I = area(cap) - (line integral of omega_12 along the positively oriented boundary)
/// with omega_12(X) = g(nabla_X v, v_perp).
IndexReport index_by_connection_form(const AngleField& field, Pole pole, double phi_probe,
                                     const IndexOptions& options = {});

}  // namespace vfield
