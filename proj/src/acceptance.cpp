#include "vfield/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>

#include "vfield/curvature.hpp"
#include "vfield/index.hpp"
#include "vfield/loxodrome.hpp"
#include "vfield/varmin.hpp"
#include "vfield/volume.hpp"

namespace vfield {

namespace {

const double kLoxodromicAngles[] = {0.0, kPi / 6, kPi / 4, kPi / 3, kHalfPi};

struct Check {
  bool passed = true;
  std::ostringstream detail;

  Check() { detail << std::setprecision(3); }

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (passed) detail << "FAILED: ";
      passed = false;
      detail << what << "; ";
    }
  }
};

double elapsed(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

SphericalPoint random_point(std::mt19937_64& rng, double max_phi) {
  std::uniform_real_distribution<double> phi(-max_phi, max_phi);
  std::uniform_real_distribution<double> lambda(0.0, kTwoPi);
  return SphericalPoint(phi(rng), lambda(rng));
}

AngleField perturbed_meridian_field() {
  // pi/2 + 0.3 sin(lambda)
  return make_test_field({.theta0 = kHalfPi, .amplitude = 0.3, .mode = 1, .phase = kHalfPi});
}

void loxodromic_volume(Check& c, const AcceptanceOptions&) {
  double worst_total = 0.0, worst_half = 0.0, slowest = 0.0;
  for (double theta0 : kLoxodromicAngles) {
    const auto start = std::chrono::steady_clock::now();
    const VolumeReport r = volume_total(make_loxodromic_field(theta0));
    const double seconds = elapsed(start);
    const double rel = std::abs(r.volume - kS3Volume) / kS3Volume;
    const double half = std::max(std::abs(r.north.value - kPi * kPi), std::abs(r.south.value - kPi * kPi));
    worst_total = std::max(worst_total, rel);
    worst_half = std::max(worst_half, half);
    slowest = std::max(slowest, seconds);
    c.require(rel < 1e-6, "total volume off at theta0 = " + std::to_string(theta0));
    c.require(half < 1e-6, "hemisphere off at theta0 = " + std::to_string(theta0));
    c.require(seconds < 5.0, "slow at theta0 = " + std::to_string(theta0));
  }
  c.detail << "max rel err " << worst_total << ", max hemisphere err " << worst_half
           << (slowest < 5.0 ? ", each field under 5 s" : "");
}

void floor_property(Check& c, const AcceptanceOptions&) {
  const BandIntegral b = integrate_density([](double, double) { return 1.0; }, IntegrationDomain{});
  const double err = std::abs(b.value - kSphereArea);
  c.require(err < 1e-8, "area of the floor integrand");
  c.detail << "|I - 4pi| = " << err;
}

void curvature_oracle(Check& c, const AcceptanceOptions& o) {
  std::mt19937_64 rng(o.seed);
  const int n = o.quick ? 200 : 1000;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const AngleField f = make_smooth_field(random_smooth_field_spec(rng));
    const SphericalPoint p = random_point(rng, 1.4);
    const CurvaturePair a = curvatures_closed_form(f, p);
    const CurvaturePair b = curvatures_extrinsic(f, p);
    worst = std::max({worst, std::abs(a.kappa - b.kappa), std::abs(a.tau - b.tau)});
  }
  c.require(worst < 1e-6, "closed form and extrinsic curvatures differ");

  std::uniform_real_distribution<double> angle(-kPi, kPi);
  double identity = 0.0;
  for (int i = 0; i < n; ++i) {
    const SphericalPoint p = random_point(rng, 1.4);
    const CurvaturePair k = curvatures_closed_form(make_loxodromic_field(angle(rng)), p);
    identity = std::max(identity, std::abs(std::hypot(k.kappa, k.tau) - std::abs(std::tan(p.phi()))));
  }
  c.require(identity < 1e-10, "constant-angle magnitude identity");
  c.detail << n << " fields, max diff " << worst << ", identity err " << identity;
}

void sharpness(Check& c, const AcceptanceOptions&) {
  double worst = 0.0;
  for (double theta0 : kLoxodromicAngles) {
    const SharpnessReport s = sharpness_residuals(make_loxodromic_field(theta0));
    worst = std::max({worst, s.sup_i, s.sup_ii});
  }
  c.require(worst < 1e-10, "loxodromic residuals");
  const AngleField bent = perturbed_meridian_field();
  const SharpnessReport s = sharpness_residuals(bent);
  const double volume = volume_total(bent).volume;
  c.require(s.sup_i > 0.01, "perturbed field residual i");
  c.require(volume > kS3Volume + 0.01, "perturbed field volume");
  c.detail << "loxodromic sup " << worst << ", perturbed sup res_i " << s.sup_i << ", perturbed volume "
           << std::setprecision(10) << volume;
}

struct IndexPair {
  int north = 0;
  int south = 0;
};

// Both methods at three probe latitudes; false if anything disagrees.
bool index_pair(const AngleField& f, IndexPair& out) {
  bool ok = true;
  bool first = true;
  for (double probe : {0.3, 0.8, 1.3}) {
    const IndexReport wn = index_by_winding(f, Pole::kNorth, probe);
    const IndexReport cn = index_by_connection_form(f, Pole::kNorth, probe);
    const IndexReport ws = index_by_winding(f, Pole::kSouth, -probe);
    const IndexReport cs = index_by_connection_form(f, Pole::kSouth, -probe);
    ok = ok && wn.reliable && cn.reliable && ws.reliable && cs.reliable;
    ok = ok && wn.index == cn.index && ws.index == cs.index;
    if (first) {
      out = {wn.index, ws.index};
      first = false;
    }
    ok = ok && wn.index == out.north && ws.index == out.south;
  }
  return ok;
}

void indices(Check& c, const AcceptanceOptions& o) {
  for (double theta0 : kLoxodromicAngles) {
    IndexPair pair;
    const bool ok = index_pair(make_loxodromic_field(theta0), pair);
    c.require(ok && pair.north == 1 && pair.south == 1,
              "loxodromic index pair at theta0 = " + std::to_string(theta0));
  }
  std::mt19937_64 rng(o.seed + 1);
  const int n = o.quick ? 15 : 50;
  int agreeing = 0;
  for (int i = 0; i < n; ++i) {
    IndexPair pair;
    const bool ok = index_pair(make_smooth_field(random_smooth_field_spec(rng)), pair);
    c.require(ok, "methods or probes disagree on random field " + std::to_string(i));
    c.require(pair.north + pair.south == 2, "index sum on random field " + std::to_string(i));
    agreeing += ok ? 1 : 0;
  }
  c.detail << "loxodromic (1, 1) at 3 probes; " << agreeing << "/" << n << " random fields consistent";
}

void bound_consistency(Check& c, const AcceptanceOptions& o) {
  c.require(lower_bound_s2(1, 1) == 2.0 * kPi * kPi, "S2 bound at (1, 1)");
  c.require(lower_bound_s3(1, 1) == 4.0 * kPi * kPi, "S3 bound at (1, 1)");

  std::vector<std::pair<std::string, AngleField>> fields;
  for (double theta0 : kLoxodromicAngles) fields.emplace_back("loxodromic", make_loxodromic_field(theta0));
  fields.emplace_back("perturbed meridian", perturbed_meridian_field());
  for (int k : {-1, 0, 1, 2}) {
    fields.emplace_back("test field k=" + std::to_string(k),
                        make_test_field({.theta0 = 0.4, .winding = k, .amplitude = 0.3, .mode = 2}));
  }
  std::mt19937_64 rng(o.seed + 2);
  const int n = o.quick ? 2 : 6;
  for (int i = 0; i < n; ++i) {
    fields.emplace_back("random field", make_smooth_field(random_smooth_field_spec(rng)));
  }
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& [name, f] : fields) {
    IndexPair pair;
    c.require(index_pair(f, pair), "index of " + name);
    const double volume = volume_total(f).volume;
    const double bound = lower_bound_s2(pair.north, pair.south);
    margin = std::min(margin, volume - bound);
    c.require(volume >= bound - 1e-4, name + " below its bound");
  }
  c.detail << fields.size() << " fields, min volume - bound = " << margin;
}

void minimizer_witness(Check& c, const AcceptanceOptions&) {
  const auto start = std::chrono::steady_clock::now();
  const ThetaGrid grid0 =
      ThetaGrid::sample(make_test_field({.theta0 = kPi / 3, .amplitude = 0.3, .mode = 1}), 64, 128, 0);
  const MinimizeReport r = minimize(grid0);
  const double err = std::abs(r.final_volume - kS3Volume);
  c.require(r.converged, std::string("minimizer status ") + std::string(to_string(r.status)));
  c.require(err < 1e-3, "final volume");
  c.require(r.loxodromy_defect < 1e-3, "loxodromy defect");
  c.require(r.audit_passed, "audit discrepancy");

  const ThetaGrid lox = ThetaGrid::sample(make_loxodromic_field(kPi / 3), 64, 128, 0);
  const double fixed = gradient_density_sup_norm(lox, grid_gradient(lox));
  c.require(fixed < 1e-8, "loxodromic grid gradient");
  const double seconds = elapsed(start);
  c.require(seconds < 120.0, "runtime");
  c.detail << r.iterations << " iterations, |V - 2pi^2| = " << err << ", defect " << r.loxodromy_defect
           << ", audit diff " << r.audit_discrepancy << ", fixed-point gradient " << fixed;
}

void rhumb_tracing(Check& c, const AcceptanceOptions&) {
  const double theta0 = kPi / 4;
  const RhumbTrace to_one = trace_rhumb(theta0, SphericalPoint(0.0, 0.0), 1.0, 0.01);
  const TracePoint& end = to_one.points.back();
  const double phi = 1.0 / std::sqrt(2.0);
  const double mercator = std::log(1.0 / std::cos(phi) + std::tan(phi));
  const double err = std::max(std::abs(end.point.phi() - phi), std::abs(end.lambda_unwrapped - mercator));
  c.require(end.s == 1.0 && err < 1e-8, "Mercator closed form at s = 1");

  const RhumbTrace full = trace_rhumb(theta0, SphericalPoint(0.0, 0.0), 10.0, 0.01);
  const double length_err = std::abs(full.length_to_pole - kHalfPi / std::sin(theta0));
  c.require(full.stop == TraceStop::kPole && length_err < 1e-6, "length to the pole");

  // Rhumb lines are straight in the Mercator plane; the chord between the
  // neighbours of each point gives the crossing angle there.
  auto y = [](const TracePoint& p) { return std::asinh(std::tan(p.point.phi())); };
  double angle_err = 0.0;
  const auto& pts = full.points;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const TracePoint& a = pts[k == 0 ? 0 : k - 1];
    const TracePoint& b = pts[std::min(k + 1, pts.size() - 1)];
    const double angle = std::atan2(y(b) - y(a), b.lambda_unwrapped - a.lambda_unwrapped);
    angle_err = std::max(angle_err, std::abs(angle - theta0));
  }
  c.require(angle_err < 1e-8, "crossing angle");
  c.detail << "Mercator err " << err << ", length err " << length_err << ", angle err " << angle_err << " over "
           << pts.size() << " points";
}

void density_equivalence(Check& c, const AcceptanceOptions& o) {
  std::mt19937_64 rng(o.seed + 3);
  const int n = o.quick ? 200 : 1000;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const AngleField f = make_smooth_field(random_smooth_field_spec(rng));
    const SphericalPoint p = random_point(rng, 1.4);
    worst = std::max(worst, std::abs(volume_integrand(f, p) - volume_density_extrinsic(f, p)));
  }
  c.require(worst < 1e-6, "densities differ");
  c.detail << n << " samples, max diff " << worst;
}

struct Criterion {
  int id;
  const char* name;
  void (*run)(Check&, const AcceptanceOptions&);
};

const Criterion kCriteria[] = {
    {1, "loxodromic volume", loxodromic_volume},
    {2, "floor property", floor_property},
    {3, "curvature oracle", curvature_oracle},
    {4, "sharpness conditions", sharpness},
    {5, "indices", indices},
    {6, "bound consistency", bound_consistency},
    {7, "minimizer witness", minimizer_witness},
    {8, "rhumb tracing", rhumb_tracing},
    {9, "density equivalence", density_equivalence},
};

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  std::vector<CriterionResult> results;
  for (const Criterion& criterion : kCriteria) {
    CriterionResult r;
    r.id = criterion.id;
    r.name = criterion.name;
    const auto start = std::chrono::steady_clock::now();
    Check check;
    try {
      criterion.run(check, options);
    } catch (const std::exception& e) {
      check.require(false, std::string("exception: ") + e.what());
    }
    r.seconds = elapsed(start);
    r.passed = check.passed;
    r.detail = check.detail.str();
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_result(const CriterionResult& result) {
  std::ostringstream out;
  out << (result.passed ? "PASS" : "FAIL") << " [" << result.id << "] " << result.name << ": " << result.detail
      << " (" << std::fixed << std::setprecision(2) << result.seconds << " s)";
  return out.str();
}

}  // namespace vfield
