#include "vfield/sphere.hpp"

#include <cmath>
#include <utility>

namespace vfield {

double reduce_longitude(double lambda) {
  double r = std::fmod(lambda, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a tiny negative value can round up to exactly 2pi
  if (r >= kTwoPi) r = 0.0;
  return r;
}

SphericalPoint::SphericalPoint(double phi, double lambda) : phi_(phi), lambda_(0.0) {
  if (!std::isfinite(phi) || !std::isfinite(lambda)) {
    throw DomainError("SphericalPoint: non-finite coordinate");
  }
  if (!(std::abs(phi) < kHalfPi)) {
    throw DomainError("SphericalPoint: latitude " + std::to_string(phi) +
                      " is not in the open interval (-pi/2, pi/2)");
  }
  lambda_ = reduce_longitude(lambda);
}

Vec3 embed(const SphericalPoint& p) {
  const double cp = std::cos(p.phi());
  return {cp * std::cos(p.lambda()), cp * std::sin(p.lambda()), std::sin(p.phi())};
}

SphericalPoint unembed(const Vec3& position) {
  const double norm = position.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw DomainError("unembed: zero or non-finite vector");
  }
  const Vec3 x = position / norm;
  const double rho = std::hypot(x.x(), x.y());
  if (rho == 0.0) throw DomainError("unembed: point lies on the polar axis");
  return SphericalPoint(std::atan2(x.z(), rho), std::atan2(x.y(), x.x()));
}

Vec3 parallel_tangent(const SphericalPoint& p) {
  return {-std::sin(p.lambda()), std::cos(p.lambda()), 0.0};
}

Vec3 meridian_tangent(const SphericalPoint& p) {
  const double sp = std::sin(p.phi());
  return {-sp * std::cos(p.lambda()), -sp * std::sin(p.lambda()), std::cos(p.phi())};
}

AngleField::AngleField(JetFn jet, FieldKind kind) : jet_(std::move(jet)), kind_(kind) {
  if (!jet_) throw std::invalid_argument("AngleField: empty jet function");
}

AngleField::AngleField(ScalarFn theta, FieldKind kind, double fd_step)
    : theta_(std::move(theta)), kind_(kind), fd_step_(fd_step) {
  if (!theta_) throw std::invalid_argument("AngleField: empty theta function");
  if (!(fd_step > 0.0)) throw std::invalid_argument("AngleField: fd_step must be positive");
}

double AngleField::theta(double phi, double lambda) const {
  if (jet_) return jet_(phi, lambda).theta;
  return theta_(phi, lambda);
}

AngleJet AngleField::jet(double phi, double lambda) const {
  if (jet_) return jet_(phi, lambda);
  const double h = fd_step_;
  AngleJet out;
  out.theta = theta_(phi, lambda);
  out.dphi = (theta_(phi + h, lambda) - theta_(phi - h, lambda)) / (2.0 * h);
  out.dlambda = (theta_(phi, lambda + h) - theta_(phi, lambda - h)) / (2.0 * h);
  return out;
}

AngleField AngleField::rotated(double shift) const {
  if (jet_) {
    return AngleField([jet = jet_, shift](double phi, double lambda) { return jet(phi, lambda + shift); },
                      kind_);
  }
  return AngleField([f = theta_, shift](double phi, double lambda) { return f(phi, lambda + shift); },
                    kind_, fd_step_);
}

AngleField AngleField::offset(double offset) const {
  if (jet_) {
    return AngleField(
        [jet = jet_, offset](double phi, double lambda) {
          AngleJet j = jet(phi, lambda);
          j.theta += offset;
          return j;
        },
        kind_);
  }
  return AngleField([f = theta_, offset](double phi, double lambda) { return f(phi, lambda) + offset; },
                    kind_, fd_step_);
}

double parallel_winding(const AngleField& field, double phi) {
  return (field.theta(phi, kTwoPi) - field.theta(phi, 0.0)) / kTwoPi;
}

FrameSample frame_at(const AngleField& field, const SphericalPoint& point) {
  const double theta = field.theta(point);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const Vec3 u = parallel_tangent(point);
  const Vec3 n = meridian_tangent(point);
  return FrameSample{
      .point = point,
      .theta = theta,
      .position = embed(point),
      .u = u,
      .n = n,
      .v = c * u + s * n,
      .v_perp = s * u - c * n,
      .u_intrinsic = Vec2(1.0, 0.0),
      .n_intrinsic = Vec2(0.0, 1.0),
      .v_intrinsic = Vec2(c, s),
      .v_perp_intrinsic = Vec2(s, -c),
  };
}

Vec3 field_vector(const AngleField& field, double phi, double lambda) {
  const SphericalPoint p(phi, lambda);
  const double theta = field.theta(phi, lambda);
  return std::cos(theta) * parallel_tangent(p) + std::sin(theta) * meridian_tangent(p);
}

}  // namespace vfield
