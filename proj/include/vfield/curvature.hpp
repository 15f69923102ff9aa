#pragma once

#include <functional>

#include "vfield/sphere.hpp"

namespace vfield {

/// Sign s in g(nabla_u u, n) = s * tan(phi) for the north-pointing meridian
/// tangent n. Pinned by the extrinsic oracle (see tests/test_curvature.cpp);
/// the opposite value describes a south-pointing n.
inline constexpr int kFrameCurvatureSign = +1;

/// Directional derivatives of theta along v and v_perp.
struct DirectionalRates {
  double theta_v = 0.0;
  double theta_vperp = 0.0;
};

DirectionalRates theta_directional(const AngleField& field, const SphericalPoint& point);

/// Unit-frame chain rule applied to an already evaluated jet.
DirectionalRates theta_directional(const AngleJet& jet, double phi);

enum class CurvatureMethod { kClosedForm, kExtrinsic };

/// kappa = g(nabla_v v, v_perp), tau = g(nabla_{v_perp} v, v_perp).
struct CurvaturePair {
  double kappa = 0.0;
  double tau = 0.0;
  CurvatureMethod method = CurvatureMethod::kClosedForm;
};

/// g(nabla_u u, n) on the parallel at latitude phi.
double parallel_geodesic_curvature(double phi, int frame_sign = kFrameCurvatureSign);

/// kappa = -theta_v - cos(theta) g(nabla_u u, n),
/// tau   = -theta_vperp - sin(theta) g(nabla_u u, n).
CurvaturePair curvatures_from_jet(const AngleJet& jet, double phi,
                                  int frame_sign = kFrameCurvatureSign);

CurvaturePair curvatures_closed_form(const AngleField& field, const SphericalPoint& point,
                                     int frame_sign = kFrameCurvatureSign);

/// Tangent vector field given extrinsically, evaluated at (phi, raw lambda).
using ExtrinsicFieldFn = std::function<Vec3(double phi, double lambda)>;

/// Covariant derivative nabla_w X at `point` by central differences along the
/// great circle through `point` with unit initial velocity `direction`,
/// projected onto the tangent plane. Throws DomainError if the stencil
/// (radius 2h) would reach a pole or h is not in (1e-12, 0.1].
Vec3 covariant_derivative(const ExtrinsicFieldFn& field, const SphericalPoint& point,
                          const Vec3& direction, double h);

/// (phi, lambda) at geodesic distance t from `point` along `direction`;
/// lambda is unwrapped to lie within pi of point.lambda().
std::pair<double, double> geodesic_offset(const SphericalPoint& point, const Vec3& direction,
                                          double t);

/// Oracle: kappa and tau from extrinsic differentiation of v, independent of
/// the closed form.
CurvaturePair curvatures_extrinsic(const AngleField& field, const SphericalPoint& point,
                                   double h = kDefaultFdStep);

/// omega_12 = tau omega_1 + kappa omega_2 at a point, stored through its values
/// on the basis (v_perp, v).
struct ConnectionFormValue {
  double tau = 0.0;
  double kappa = 0.0;
  Vec3 v_perp = Vec3::Zero();
  Vec3 v = Vec3::Zero();

  /// Value on a tangent vector X = <X, v_perp> v_perp + <X, v> v.
  double operator()(const Vec3& x) const { return tau * x.dot(v_perp) + kappa * x.dot(v); }
};

ConnectionFormValue connection_form(const AngleField& field, const SphericalPoint& point);

/// The six summands of g(nabla_v v, v_perp) after expanding v = cos(theta) u + sin(theta) n:
///   a = g(cos^2 nabla_u u, v_perp)            b = g(cos sin nabla_n u, v_perp)
///   c = g(v(cos theta) u, v_perp)             d = g(cos sin nabla_u n, v_perp)
///   e = g(sin^2 nabla_n n, v_perp)            f = g(v(sin theta) n, v_perp)
/// Frame derivatives are extrinsic; v(cos theta), v(sin theta) use the closed-form theta_v.
struct KappaTerms {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0, e = 0.0, f = 0.0;
  double sum() const { return a + b + c + d + e + f; }
};

KappaTerms kappa_terms(const AngleField& field, const SphericalPoint& point,
                       double h = kDefaultFdStep);

}  // namespace vfield
