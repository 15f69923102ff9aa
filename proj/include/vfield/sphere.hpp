#pragma once

#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace vfield {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kHalfPi = 0.5 * std::numbers::pi;

/// Default central-difference step for angle fields without analytic derivatives.
inline constexpr double kDefaultFdStep = 1e-5;

/// Input outside the punctured sphere or otherwise invalid for an operation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed (non-finite values, non-convergence, step collapse).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reduces an angle to [0, 2pi).
double reduce_longitude(double lambda);

/// A point of the unit sphere minus its poles, in latitude/longitude.
///
/// Latitude lies in the open interval (-pi/2, pi/2); longitude is kept reduced
/// to [0, 2pi). The poles are not representable.
class SphericalPoint {
 public:
  SphericalPoint(double phi, double lambda);

  double phi() const { return phi_; }
  double lambda() const { return lambda_; }

 private:
  double phi_;
  double lambda_;
};

Vec3 embed(const SphericalPoint& point);

/// Inverse of embed. The input is normalized first; points on the polar axis
/// throw DomainError.
SphericalPoint unembed(const Vec3& position);

/// Unit tangent to the parallel, pointing towards increasing longitude.
Vec3 parallel_tangent(const SphericalPoint& point);

/// Unit tangent to the meridian, pointing north.
Vec3 meridian_tangent(const SphericalPoint& point);

/// Value and first partials of the angle function at one point.
struct AngleJet {
  double theta = 0.0;
  double dphi = 0.0;
  double dlambda = 0.0;
};

enum class FieldKind { kClosedForm, kGridInterpolated };

/// A unit vector field on the punctured sphere, given by the oriented angle
/// theta(phi, lambda) from the parallel direction u to the field.
///
/// theta is not reduced: along a parallel it may gain 2*pi*k per turn, k being
/// the winding class. The callables receive raw (unreduced) longitudes and must
/// honour theta(phi, lambda + 2pi) = theta(phi, lambda) + 2pi*k.
class AngleField {
 public:
  using ScalarFn = std::function<double(double phi, double lambda)>;
  using JetFn = std::function<AngleJet(double phi, double lambda)>;

  /// Field with analytic partial derivatives.
  AngleField(JetFn jet, FieldKind kind);

  /// Field whose partials come from central differences with step `fd_step`.
  AngleField(ScalarFn theta, FieldKind kind, double fd_step = kDefaultFdStep);

  double theta(double phi, double lambda) const;
  double theta(const SphericalPoint& p) const { return theta(p.phi(), p.lambda()); }

  AngleJet jet(double phi, double lambda) const;
  AngleJet jet(const SphericalPoint& p) const { return jet(p.phi(), p.lambda()); }

  FieldKind kind() const { return kind_; }
  bool has_analytic_derivatives() const { return static_cast<bool>(jet_); }
  double fd_step() const { return fd_step_; }

  /// theta(phi, lambda + shift): the field rotated about the polar axis.
  AngleField rotated(double shift) const;

  /// theta + offset everywhere.
  AngleField offset(double offset) const;

 private:
  JetFn jet_;
  ScalarFn theta_;
  FieldKind kind_;
  double fd_step_ = kDefaultFdStep;
};

/// Per-parallel winding of theta: (theta(phi, 2pi) - theta(phi, 0)) / 2pi.
/// Real-valued; an integer for any continuous field.
double parallel_winding(const AngleField& field, double phi);

/// Frame vectors at a point. Intrinsic components are taken in the (u, n) basis.
struct FrameSample {
  SphericalPoint point;
  double theta;
  Vec3 position;
  Vec3 u, n, v, v_perp;
  Vec2 u_intrinsic, n_intrinsic, v_intrinsic, v_perp_intrinsic;
};

FrameSample frame_at(const AngleField& field, const SphericalPoint& point);

/// Extrinsic field vector v = cos(theta) u + sin(theta) n at (phi, lambda).
Vec3 field_vector(const AngleField& field, double phi, double lambda);

}  // namespace vfield
