#include <cmath>
#include <random>

#include <Eigen/Geometry>

#include "doctest.h"
#include "vfield/loxodrome.hpp"
#include "vfield/sphere.hpp"

using namespace vfield;

namespace {

SphericalPoint random_point(std::mt19937_64& rng, double max_phi = 1.5) {
  std::uniform_real_distribution<double> phi(-max_phi, max_phi);
  std::uniform_real_distribution<double> lambda(0.0, kTwoPi);
  return SphericalPoint(phi(rng), lambda(rng));
}

double orientation(const Vec3& position, const Vec3& a, const Vec3& b) {
  return position.dot(a.cross(b));
}

}  // namespace

TEST_CASE("points reject the poles and reduce longitude") {
  CHECK_THROWS_AS(SphericalPoint(kHalfPi, 0.0), DomainError);
  CHECK_THROWS_AS(SphericalPoint(-kHalfPi - 0.1, 0.0), DomainError);
  CHECK_THROWS_AS(SphericalPoint(std::nan(""), 0.0), DomainError);
  const SphericalPoint p(0.2, -0.5);
  CHECK(p.lambda() == doctest::Approx(kTwoPi - 0.5).epsilon(1e-15));
  CHECK(SphericalPoint(0.0, 3 * kTwoPi + 1.0).lambda() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(reduce_longitude(kTwoPi) == 0.0);
}

TEST_CASE("embedding reference values") {
  const Vec3 a = embed(SphericalPoint(0.0, 0.0));
  CHECK((a - Vec3(1, 0, 0)).norm() < 1e-15);
  const Vec3 b = embed(SphericalPoint(kPi / 4, kHalfPi));
  CHECK((b - Vec3(0, std::sqrt(0.5), std::sqrt(0.5))).norm() < 1e-15);
  CHECK_THROWS_AS(unembed(Vec3(0, 0, 2)), DomainError);
}

TEST_CASE("embed and unembed round trip on random points") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const SphericalPoint p = random_point(rng);
    const Vec3 x = embed(p);
    CHECK(std::abs(x.norm() - 1.0) < 1e-15);
    CHECK(x.z() == doctest::Approx(std::sin(p.phi())).epsilon(1e-15));
    const SphericalPoint q = unembed(3.0 * x);
    CHECK(std::abs(q.phi() - p.phi()) < 1e-12);
    CHECK(std::abs(std::remainder(q.lambda() - p.lambda(), kTwoPi)) < 1e-12);
  }
}

TEST_CASE("meridian field frame") {
  const AngleField f = make_loxodromic_field(kHalfPi);
  const FrameSample s = frame_at(f, SphericalPoint(0.4, 1.3));
  CHECK((s.v - s.n).norm() < 1e-15);
  CHECK((s.v_perp - s.u).norm() < 1e-15);
}

TEST_CASE("parallel field frame at the reference point") {
  const FrameSample s = frame_at(make_loxodromic_field(0.0), SphericalPoint(0.0, 0.0));
  CHECK((s.v - Vec3(0, 1, 0)).norm() < 1e-15);
  CHECK((s.v_perp - Vec3(0, 0, -1)).norm() < 1e-15);
  CHECK((s.n - Vec3(0, 0, 1)).norm() < 1e-15);
}

TEST_CASE("frame invariants on random fields and points") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 1000; ++i) {
    const AngleField f = make_smooth_field(random_smooth_field_spec(rng));
    const SphericalPoint p = random_point(rng);
    const FrameSample s = frame_at(f, p);
    for (const Vec3* w : {&s.u, &s.n, &s.v, &s.v_perp}) {
      CHECK(std::abs(w->norm() - 1.0) < 1e-12);
      CHECK(std::abs(w->dot(s.position)) < 1e-12);
    }
    const double c = std::cos(s.theta), sn = std::sin(s.theta);
    CHECK((s.v - (c * s.u + sn * s.n)).norm() < 1e-12);
    CHECK((s.v_perp - (sn * s.u - c * s.n)).norm() < 1e-12);
    CHECK((s.v_intrinsic - Vec2(c, sn)).norm() < 1e-12);
    CHECK((s.v_perp_intrinsic - Vec2(sn, -c)).norm() < 1e-12);
    // (u, n) and (v_perp, v) carry the same orientation
    CHECK(orientation(s.position, s.u, s.n) > 0.0);
    CHECK(orientation(s.position, s.v_perp, s.v) > 0.0);
  }
}

TEST_CASE("finite-difference partials converge at second order") {
  auto exact = [](double phi, double lambda) {
    return AngleJet{std::sin(2 * phi) * std::cos(lambda) + lambda,
                    2 * std::cos(2 * phi) * std::cos(lambda), 1 - std::sin(2 * phi) * std::sin(lambda)};
  };
  const double phi = 0.37, lambda = 2.1;
  const AngleJet want = exact(phi, lambda);
  double prev = 0.0;
  for (double h : {1e-2, 5e-3, 2.5e-3}) {
    const AngleField f([&](double p, double l) { return exact(p, l).theta; }, FieldKind::kClosedForm, h);
    const AngleJet got = f.jet(phi, lambda);
    const double err = std::abs(got.dphi - want.dphi) + std::abs(got.dlambda - want.dlambda);
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("winding is the same integer on every parallel") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 50; ++i) {
    const SmoothFieldSpec spec = random_smooth_field_spec(rng);
    const AngleField f = make_smooth_field(spec);
    for (double phi : {-1.4, -0.5, 0.0, 0.9, 1.45}) {
      CHECK(parallel_winding(f, phi) == doctest::Approx(spec.winding).epsilon(1e-12));
    }
  }
}

TEST_CASE("rotation and offset") {
  const AngleField f = make_test_field({.theta0 = 0.3, .winding = 1, .amplitude = 0.2, .mode = 2});
  const AngleField r = f.rotated(0.7);
  CHECK(r.theta(0.1, 0.2) == doctest::Approx(f.theta(0.1, 0.9)).epsilon(1e-15));
  CHECK(r.jet(0.1, 0.2).dlambda == doctest::Approx(f.jet(0.1, 0.9).dlambda).epsilon(1e-15));
  const AngleField o = f.offset(1.0);
  CHECK(o.theta(0.1, 0.2) == doctest::Approx(f.theta(0.1, 0.2) + 1.0).epsilon(1e-15));
  CHECK(o.jet(0.1, 0.2).dphi == f.jet(0.1, 0.2).dphi);
}
