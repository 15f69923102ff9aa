#include <cmath>
#include <random>

#include "doctest.h"
#include "vfield/index.hpp"
#include "vfield/loxodrome.hpp"

using namespace vfield;

namespace {

// Azimuthal equidistant chart about the north pole, written out directly.
Vec2 north_chart(const Vec3& x) {
  const Vec3 y = x.normalized();
  const double rho = std::acos(std::clamp(y.z(), -1.0, 1.0));
  const double r = std::hypot(y.x(), y.y());
  return rho * Vec2(y.x() / r, y.y() / r);
}

// Brute-force winding of the field image in the north chart: the image of v
// is the chart difference quotient along the tangent direction, and angles
// are accumulated with unwrapping at every sample.
double brute_force_north_winding(const AngleField& f, double phi, int samples) {
  const double t = 1e-7;
  double total = 0.0;
  double prev = 0.0;
  for (int k = 0; k <= samples; ++k) {
    const double lambda = kTwoPi * k / samples;
    const Vec3 x(std::cos(phi) * std::cos(lambda), std::cos(phi) * std::sin(lambda), std::sin(phi));
    const Vec3 u(-std::sin(lambda), std::cos(lambda), 0.0);
    const Vec3 n(-std::sin(phi) * std::cos(lambda), -std::sin(phi) * std::sin(lambda), std::cos(phi));
    const double th = f.theta(phi, lambda);
    const Vec3 v = std::cos(th) * u + std::sin(th) * n;
    const Vec2 w = (north_chart(x + t * v) - north_chart(x - t * v)) / (2 * t);
    const double a = std::atan2(w.y(), w.x());
    if (k == 0) {
      prev = a;
      continue;
    }
    double d = a - prev;
    while (d > kPi) d -= kTwoPi;
    while (d < -kPi) d += kTwoPi;
    total += d;
    prev = a;
  }
  return total / kTwoPi;
}

// Index of the theta = lambda field at N, frozen from the brute-force oracle.
constexpr int kWindingOneNorthIndex = 2;

}  // namespace

TEST_CASE("planar harness") {
  CHECK(index_of_planar_field([](const Vec2&) { return Vec2(1.0, 0.3); }, 0.5).index == 0);
  CHECK(index_of_planar_field([](const Vec2& z) { return z; }, 0.5).index == 1);
  CHECK(index_of_planar_field([](const Vec2& z) { return Vec2(z.x(), -z.y()); }, 0.5).index == -1);
  const IndexReport q = index_of_planar_field(
      [](const Vec2& z) { return Vec2(z.x() * z.x() - z.y() * z.y(), 2 * z.x() * z.y()); }, 0.5);
  CHECK(q.index == 2);
  CHECK(q.reliable);
  CHECK(q.residual < 1e-12);
}

TEST_CASE("chart position and pushforward") {
  const SphericalPoint p(0.7, 1.2);
  CHECK(pole_chart_position(Pole::kNorth, p).norm() == doctest::Approx(kHalfPi - 0.7).epsilon(1e-15));
  CHECK(pole_chart_position(Pole::kSouth, p).norm() == doctest::Approx(kHalfPi + 0.7).epsilon(1e-15));
  const Vec3 w = 0.3 * parallel_tangent(p) + 0.8 * meridian_tangent(p);
  const Vec2 image = pole_chart_pushforward(Pole::kNorth, p, w);
  const Vec2 fd = (north_chart(embed(p) + 1e-7 * w) - north_chart(embed(p) - 1e-7 * w)) / 2e-7;
  CHECK((image - fd).norm() < 1e-7);
}

TEST_CASE("loxodromic fields have index one at both poles") {
  for (double theta0 : {0.0, kPi / 6, kPi / 4, kPi / 3, kHalfPi, 2.5, -1.0}) {
    const AngleField f = make_loxodromic_field(theta0);
    for (double probe : {0.3, 0.8, 1.3}) {
      for (Pole pole : {Pole::kNorth, Pole::kSouth}) {
        const double phi = pole == Pole::kNorth ? probe : -probe;
        const IndexReport w = index_by_winding(f, pole, phi);
        const IndexReport c = index_by_connection_form(f, pole, phi);
        CHECK(w.index == 1);
        CHECK(c.index == 1);
        CHECK(w.reliable);
        CHECK(c.reliable);
        CHECK(std::abs(c.raw - 1.0) < 1e-12);
        CHECK(w.residual < 1e-9);
      }
    }
  }
}

TEST_CASE("brute-force oracle for the winding-one field") {
  const AngleField f([](double, double lambda) { return AngleJet{lambda, 0.0, 1.0}; },
                     FieldKind::kClosedForm);
  const double oracle = brute_force_north_winding(f, 0.8, 100000);
  CHECK(std::abs(oracle - std::round(oracle)) < 1e-9);
  CHECK(static_cast<int>(std::lround(oracle)) == kWindingOneNorthIndex);
  CHECK(index_by_winding(f, Pole::kNorth, 0.8).index == kWindingOneNorthIndex);
  CHECK(index_by_connection_form(f, Pole::kNorth, 0.8).index == kWindingOneNorthIndex);
  const int south = index_by_winding(f, Pole::kSouth, -0.8).index;
  CHECK(kWindingOneNorthIndex + south == 2);
  CHECK(index_by_connection_form(f, Pole::kSouth, -0.8).index == south);
}

TEST_CASE("winding class shifts the index pair") {
  for (int k : {-2, -1, 1, 2}) {
    const AngleField f = make_test_field({.theta0 = 0.4, .winding = k});
    const int north = index_by_winding(f, Pole::kNorth, 0.8).index;
    const int south = index_by_winding(f, Pole::kSouth, -0.8).index;
    CHECK(north != 1);
    CHECK(north + south == 2);
    CHECK(north == 1 + k);
  }
}

TEST_CASE("methods agree on random smooth fields") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 50; ++i) {
    const AngleField f = make_smooth_field(random_smooth_field_spec(rng));
    int first_n = 0, first_s = 0;
    for (double probe : {0.3, 0.8, 1.3}) {
      const IndexReport wn = index_by_winding(f, Pole::kNorth, probe);
      const IndexReport cn = index_by_connection_form(f, Pole::kNorth, probe);
      const IndexReport ws = index_by_winding(f, Pole::kSouth, -probe);
      const IndexReport cs = index_by_connection_form(f, Pole::kSouth, -probe);
      REQUIRE(wn.reliable);
      REQUIRE(cn.reliable);
      REQUIRE(ws.reliable);
      REQUIRE(cs.reliable);
      CHECK(wn.index == cn.index);
      CHECK(ws.index == cs.index);
      CHECK(wn.index + ws.index == 2);
      if (probe == 0.3) {
        first_n = wn.index;
        first_s = ws.index;
      }
      CHECK(wn.index == first_n);
      CHECK(ws.index == first_s);
      CHECK(index_by_winding(f.rotated(1.3), Pole::kNorth, probe).index == wn.index);
    }
  }
}

TEST_CASE("probe latitude must lie on the pole's side") {
  const AngleField f = make_loxodromic_field(0.0);
  CHECK_THROWS_AS(index_by_winding(f, Pole::kNorth, -0.3), DomainError);
  CHECK_THROWS_AS(index_by_connection_form(f, Pole::kSouth, 0.3), DomainError);
  CHECK_THROWS_AS(index_by_winding(f, Pole::kNorth, 0.0), DomainError);
}

TEST_CASE("names") {
  CHECK(to_string(Pole::kNorth) == "N");
  CHECK(to_string(IndexMethod::kConnectionForm) == "connection-form");
}
