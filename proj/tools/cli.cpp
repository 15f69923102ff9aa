#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "vfield/acceptance.hpp"
#include "vfield/curvature.hpp"
#include "vfield/index.hpp"
#include "vfield/loxodrome.hpp"
#include "vfield/varmin.hpp"
#include "vfield/volume.hpp"

namespace vfield::cli {

namespace {

using nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Key {
  const char* name;
  const char* help;
  bool is_flag = false;
};

const Key kKeys[] = {
    {"loxodromic", "field of constant angle theta0 with the parallels (radians)"},
    {"test-field", "k=<int>,a=<amp>,m=<int>[,theta0=<rad>,phase=<rad>,window=none|cos2]"},
    {"grid", "field from a grid checkpoint (JSON)"},
    {"epsilon", "pole cutoff (volume), pole clip (curvature-map) or collar width (minimize)"},
    {"nphi", "latitude resolution"},
    {"nlambda", "longitude resolution"},
    {"theta0", "crossing angle of the rhumb line (radians)"},
    {"start", "start point phi,lambda (radians)"},
    {"smax", "arc length to trace"},
    {"step", "output spacing in arc length"},
    {"probe", "probe latitude for indices (radians, > 0; mirrored for the south pole)"},
    {"out", "write the report to this file instead of stdout"},
    {"format", "json or csv"},
    {"seed", "seed for randomized suites"},
    {"threads", "worker threads for quadrature"},
    {"max-iter", "minimizer iteration cap"},
    {"tol", "minimizer tolerance on the per-area gradient sup-norm"},
    {"step0", "first trial step of the minimizer"},
    {"checkpoint", "write the final minimizer grid to this path"},
    {"quick", "reduced sample counts for verify", true},
    {"extrinsic", "curvature-map: use the extrinsic finite-difference evaluation", true},
};

bool known_key(const std::string& name) {
  return std::any_of(std::begin(kKeys), std::end(kKeys), [&](const Key& k) { return name == k.name; });
}

/// Raw string settings: config file first, then command-line flags on top.
class Settings {
 public:
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::map<std::string, std::string> values_;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, const std::string& what) {
  const std::string s = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || !std::isfinite(value)) {
    throw ConfigError(what + ": '" + text + "' is not a number");
  }
  return value;
}

double parse_radians(const std::string& text, const std::string& what) {
  std::string lower = text;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower.find("deg") != std::string::npos || lower.find("\xc2\xb0") != std::string::npos ||
      (!trim(lower).empty() && trim(lower).back() == 'd')) {
    throw ConfigError(what + ": angles are radians only, degree input '" + text + "' rejected");
  }
  return parse_number(text, what);
}

long parse_integer(const std::string& text, const std::string& what) {
  const std::string s = trim(text);
  long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError(what + ": '" + text + "' is not an integer");
  }
  return value;
}

std::size_t parse_count(const std::string& text, const std::string& what, long minimum) {
  const long v = parse_integer(text, what);
  if (v < minimum) throw ConfigError(what + " must be at least " + std::to_string(minimum));
  return static_cast<std::size_t>(v);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) parts.push_back(trim(item));
  return parts;
}

class Resolved {
 public:
  explicit Resolved(const Settings& s) : s_(s) {}

  double number(const std::string& key, double fallback) {
    const auto v = s_.get(key);
    const double x = v ? parse_number(*v, "--" + key) : fallback;
    echo_[key] = x;
    return x;
  }
  double angle(const std::string& key, std::optional<double> fallback = std::nullopt) {
    const auto v = s_.get(key);
    if (!v && !fallback) throw ConfigError("--" + key + " is required");
    const double x = v ? parse_radians(*v, "--" + key) : *fallback;
    echo_[key] = x;
    return x;
  }
  std::size_t count(const std::string& key, std::size_t fallback, long minimum) {
    const auto v = s_.get(key);
    const std::size_t x = v ? parse_count(*v, "--" + key, minimum) : fallback;
    echo_[key] = x;
    return x;
  }
  std::string text(const std::string& key, const std::string& fallback) {
    const auto v = s_.get(key);
    const std::string x = v ? *v : fallback;
    echo_[key] = x;
    return x;
  }
  bool flag(const std::string& key) {
    const auto v = s_.get(key);
    bool x = false;
    if (v) {
      if (*v == "true" || *v == "1") {
        x = true;
      } else if (*v != "false" && *v != "0") {
        throw ConfigError("--" + key + ": expected true or false");
      }
    }
    echo_[key] = x;
    return x;
  }
  std::optional<std::string> raw(const std::string& key) const { return s_.get(key); }
  void echo(const std::string& key, json value) { echo_[key] = std::move(value); }
  const json& echo() const { return echo_; }

 private:
  const Settings& s_;
  json echo_ = json::object();
};

struct FieldChoice {
  AngleField field;
  int winding = 0;
  std::optional<ThetaGrid> grid;
  std::size_t grid_iteration = 0;
};

TestFieldSpec parse_test_field(const std::string& text) {
  TestFieldSpec spec;
  bool has_k = false, has_a = false, has_m = false;
  for (const std::string& item : split(text, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("--test-field: expected key=value, got '" + item + "'");
    const std::string key = trim(item.substr(0, eq));
    const std::string value = trim(item.substr(eq + 1));
    if (key == "k") {
      spec.winding = static_cast<int>(parse_integer(value, "--test-field k"));
      has_k = true;
    } else if (key == "a") {
      spec.amplitude = parse_number(value, "--test-field a");
      has_a = true;
    } else if (key == "m") {
      spec.mode = static_cast<int>(parse_integer(value, "--test-field m"));
      has_m = true;
    } else if (key == "theta0") {
      spec.theta0 = parse_radians(value, "--test-field theta0");
    } else if (key == "phase") {
      spec.phase = parse_radians(value, "--test-field phase");
    } else if (key == "window") {
      if (value == "none") {
        spec.window = Window::kNone;
      } else if (value == "cos2") {
        spec.window = Window::kCosSquared;
      } else {
        throw ConfigError("--test-field window must be none or cos2");
      }
    } else {
      throw ConfigError("--test-field: unknown key '" + key + "'");
    }
  }
  if (!has_k || !has_a || !has_m) throw ConfigError("--test-field needs k, a and m");
  return spec;
}

FieldChoice choose_field(Resolved& r) {
  const auto lox = r.raw("loxodromic");
  const auto test = r.raw("test-field");
  const auto grid = r.raw("grid");
  const int given = (lox ? 1 : 0) + (test ? 1 : 0) + (grid ? 1 : 0);
  if (given != 1) throw ConfigError("give exactly one of --loxodromic, --test-field, --grid");
  if (lox) {
    const double theta0 = parse_radians(*lox, "--loxodromic");
    r.echo("field", {{"kind", "loxodromic"}, {"theta0", theta0}});
    return FieldChoice{make_loxodromic_field(theta0), 0, std::nullopt, 0};
  }
  if (test) {
    const TestFieldSpec spec = parse_test_field(*test);
    r.echo("field", {{"kind", "test-field"},
                     {"k", spec.winding},
                     {"a", spec.amplitude},
                     {"m", spec.mode},
                     {"theta0", spec.theta0},
                     {"phase", spec.phase},
                     {"window", spec.window == Window::kNone ? "none" : "cos2"}});
    return FieldChoice{make_test_field(spec), spec.winding, std::nullopt, 0};
  }
  Checkpoint cp = load_checkpoint(*grid);
  r.echo("field", {{"kind", "grid"}, {"path", *grid}});
  AngleField f = cp.grid.to_field();
  const int k = cp.grid.winding();
  return FieldChoice{std::move(f), k, std::move(cp.grid), cp.iteration};
}

json header(const std::string& command, const Resolved& r) {
  return json{{"tool", kToolName}, {"version", kToolVersion}, {"command", command}, {"config", r.echo()}};
}

// Shortest text that reads back to the same double.
std::string csv_number(double x) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ec == std::errc() ? end : buf);
}

std::string format_of(Resolved& r, const std::string& fallback) {
  const std::string f = r.text("format", fallback);
  if (f != "json" && f != "csv") throw ConfigError("--format must be json or csv");
  return f;
}

struct Output {
  std::string text;
  int code = kOk;
};

std::pair<IndexReport, IndexReport> winding_pair(const AngleField& f, double probe) {
  return {index_by_winding(f, Pole::kNorth, probe), index_by_winding(f, Pole::kSouth, -probe)};
}

double require_probe(Resolved& r) {
  const double probe = r.angle("probe", 0.8);
  if (!(probe > 0.0 && probe < kHalfPi)) throw ConfigError("--probe must lie in (0, pi/2)");
  return probe;
}

Output cmd_volume(Resolved& r) {
  FieldChoice fc = choose_field(r);
  VolumeResolution res;
  res.epsilon = r.number("epsilon", res.epsilon);
  res.n_phi = r.count("nphi", res.n_phi, 4);
  res.n_lambda = r.count("nlambda", res.n_lambda, 4);
  const unsigned threads = static_cast<unsigned>(r.count("threads", 1, 1));
  const double probe = require_probe(r);
  const std::string format = format_of(r, "json");

  const VolumeReport v = volume_total(fc.field, res, {.threads = threads});
  const auto [north, south] = winding_pair(fc.field, probe);
  const double bound_s2 = lower_bound_s2(north.index, south.index);
  const double bound_s3 = lower_bound_s3(north.index, south.index);
  const SharpnessReport sharp = sharpness_residuals(fc.field);

  Output o;
  if (!v.converged || !north.reliable || !south.reliable) o.code = kNonConvergence;
  if (v.volume < bound_s2 - 1e-4) o.code = kInvariantViolation;

  if (format == "csv") {
    std::string s = "quantity,value,error_estimate\n";
    auto row = [&](const char* name, double value, double err) {
      s += std::string(name) + "," + csv_number(value) + "," + csv_number(err) + "\n";
    };
    row("volume", v.volume, v.error_estimate);
    row("north", v.north.value, v.north.error_estimate);
    row("south", v.south.value, v.south.error_estimate);
    row("index_north", north.index, north.residual);
    row("index_south", south.index, south.residual);
    row("bound_s2", bound_s2, 0.0);
    row("bound_s3", bound_s3, 0.0);
    row("sharpness_i", sharp.sup_i, 0.0);
    row("sharpness_ii", sharp.sup_ii, 0.0);
    o.text = s;
    return o;
  }
  json j = header("volume", r);
  j["volume"] = {{"value", v.volume},
                 {"error_estimate", v.error_estimate},
                 {"converged", v.converged},
                 {"reference", kS3Volume},
                 {"anchor", "loxodromic volume, = 2 pi^2"}};
  j["hemispheres"] = {
      {"north", {{"value", v.north.value}, {"error_estimate", v.north.error_estimate}}},
      {"south", {{"value", v.south.value}, {"error_estimate", v.south.error_estimate}}},
      {"anchor", "hemisphere integral, = pi^2"}};
  j["indices"] = {{"north", north.index},
                  {"south", south.index},
                  {"method", "winding"},
                  {"reliable", north.reliable && south.reliable},
                  {"anchor", "loxodromic index pair, I(N) = I(S) = 1"}};
  j["bound"] = {{"s2", bound_s2},
                {"s3", bound_s3},
                {"margin", v.volume - bound_s2},
                {"anchor", "volume lower bound, 1/2 (pi + |I_N| + |I_S| - 2) vol(S^2)"},
                {"anchor_s3", "S^3 bound formula, (|I_N| + |I_S|) vol(S^3)"}};
  j["sharpness"] = {{"sup_i", sharp.sup_i},
                    {"sup_ii", sharp.sup_ii},
                    {"phi_at_sup_i", sharp.phi_at_sup_i},
                    {"phi_at_sup_ii", sharp.phi_at_sup_ii},
                    {"samples", sharp.samples},
                    {"anchor", "equality conditions (i) |sin phi| = sqrt(kappa^2 + tau^2) cos phi, (ii) kappa sin theta = tau cos theta"}};
  o.text = j.dump(2) + "\n";
  return o;
}

Output cmd_curvature_map(Resolved& r) {
  FieldChoice fc = choose_field(r);
  const double clip = r.number("epsilon", 1e-3);
  if (!(clip > 0.0 && clip < kHalfPi)) throw ConfigError("--epsilon must lie in (0, pi/2)");
  const std::size_t n_phi = r.count("nphi", 37, 2);
  const std::size_t n_lambda = r.count("nlambda", 72, 1);
  const bool extrinsic = r.flag("extrinsic");
  const std::string format = format_of(r, "csv");
  const char* method = extrinsic ? "extrinsic" : "closed-form";

  json rows = json::array();
  std::string csv = "phi,lambda,kappa,tau,method\n";
  for (std::size_t i = 0; i < n_phi; ++i) {
    const double phi = -kHalfPi + clip + (kPi - 2 * clip) * static_cast<double>(i) / static_cast<double>(n_phi - 1);
    for (std::size_t j = 0; j < n_lambda; ++j) {
      const double lambda = kTwoPi * static_cast<double>(j) / static_cast<double>(n_lambda);
      const SphericalPoint p(phi, lambda);
      const CurvaturePair c = extrinsic ? curvatures_extrinsic(fc.field, p) : curvatures_closed_form(fc.field, p);
      if (format == "csv") {
        csv += csv_number(phi) + "," + csv_number(lambda) + "," + csv_number(c.kappa) + "," + csv_number(c.tau) +
               "," + method + "\n";
      } else {
        rows.push_back({phi, lambda, c.kappa, c.tau});
      }
    }
  }
  if (format == "csv") return {csv, kOk};
  json j = header("curvature-map", r);
  j["method"] = method;
  j["frame_curvature_sign"] = kFrameCurvatureSign;
  j["columns"] = {"phi", "lambda", "kappa", "tau"};
  j["rows"] = std::move(rows);
  return {j.dump(2) + "\n", kOk};
}

Output cmd_index(Resolved& r) {
  FieldChoice fc = choose_field(r);
  const double probe = require_probe(r);
  const std::string format = format_of(r, "json");
  std::vector<IndexReport> reports;
  for (Pole pole : {Pole::kNorth, Pole::kSouth}) {
    const double phi = pole == Pole::kNorth ? probe : -probe;
    reports.push_back(index_by_winding(fc.field, pole, phi));
    reports.push_back(index_by_connection_form(fc.field, pole, phi));
  }
  Output o;
  const bool reliable = std::all_of(reports.begin(), reports.end(), [](const IndexReport& x) { return x.reliable; });
  const bool agree = reports[0].index == reports[1].index && reports[2].index == reports[3].index;
  const int sum = reports[0].index + reports[2].index;
  if (!reliable) o.code = kNonConvergence;
  if (reliable && (!agree || sum != 2)) o.code = kInvariantViolation;

  if (format == "csv") {
    std::string s = "pole,method,index,raw,residual,probe_phi,samples,reliable\n";
    for (const IndexReport& x : reports) {
      s += std::string(to_string(x.pole)) + "," + std::string(to_string(x.method)) + "," + std::to_string(x.index) +
           "," + csv_number(x.raw) + "," + csv_number(x.residual) + "," + csv_number(x.probe_phi) + "," +
           std::to_string(x.samples) + "," + (x.reliable ? "true" : "false") + "\n";
    }
    o.text = s;
    return o;
  }
  json j = header("index", r);
  json list = json::array();
  for (const IndexReport& x : reports) {
    list.push_back({{"pole", to_string(x.pole)},
                    {"method", to_string(x.method)},
                    {"index", x.index},
                    {"raw", x.raw},
                    {"residual", x.residual},
                    {"probe_phi", x.probe_phi},
                    {"samples", x.samples},
                    {"reliable", x.reliable}});
  }
  j["reports"] = std::move(list);
  j["methods_agree"] = agree;
  j["sum"] = {{"value", sum}, {"anchor", "index sum, Euler characteristic of S^2 = 2"}};
  o.text = j.dump(2) + "\n";
  return o;
}

Output cmd_trace(Resolved& r) {
  const double theta0 = r.angle("theta0");
  const std::string start_text = r.text("start", "0,0");
  const auto parts = split(start_text, ',');
  if (parts.size() != 2) throw ConfigError("--start expects phi,lambda");
  const double phi0 = parse_radians(parts[0], "--start phi");
  const double lambda0 = parse_radians(parts[1], "--start lambda");
  if (!(std::abs(phi0) < kHalfPi)) throw ConfigError("--start latitude must lie in (-pi/2, pi/2)");
  const double smax = r.number("smax", 1.0);
  const double step = r.number("step", 0.01);
  const std::string format = format_of(r, "csv");

  const RhumbTrace t = trace_rhumb(theta0, SphericalPoint(phi0, lambda0), smax, step);
  if (format == "csv") {
    std::string s = "s,phi,lambda,x,y,z\n";
    for (const TracePoint& p : t.points) {
      const Vec3 x = embed(p.point);
      s += csv_number(p.s) + "," + csv_number(p.point.phi()) + "," + csv_number(p.lambda_unwrapped) + "," +
           csv_number(x.x()) + "," + csv_number(x.y()) + "," + csv_number(x.z()) + "\n";
    }
    return {s, kOk};
  }
  json j = header("trace", r);
  j["stop"] = to_string(t.stop);
  if (t.direction != 0) {
    j["length_to_pole"] = {{"value", t.length_to_pole},
                           {"anchor", "finite loxodrome length, (pi/2) / |sin theta0| from the equator"}};
  }
  j["columns"] = {"s", "phi", "lambda", "x", "y", "z"};
  json rows = json::array();
  for (const TracePoint& p : t.points) {
    const Vec3 x = embed(p.point);
    rows.push_back({p.s, p.point.phi(), p.lambda_unwrapped, x.x(), x.y(), x.z()});
  }
  j["rows"] = std::move(rows);
  return {j.dump(2) + "\n", kOk};
}

Output cmd_minimize(Resolved& r) {
  FieldChoice fc = choose_field(r);
  std::optional<ThetaGrid> start = fc.grid;
  if (!start) {
    const double collar = r.number("epsilon", kDefaultCollar);
    const std::size_t n_phi = r.count("nphi", 64, 4);
    const std::size_t n_lambda = r.count("nlambda", 128, 4);
    start = ThetaGrid::sample(fc.field, n_phi, n_lambda, fc.winding, collar);
  }
  MinimizeOptions options;
  options.max_iter = r.count("max-iter", options.max_iter, 0);
  options.tol = r.number("tol", options.tol);
  options.step0 = r.number("step0", options.step0);
  const std::string checkpoint = r.text("checkpoint", "");
  const std::string format = format_of(r, "json");

  const MinimizeReport m = minimize(*start, options);
  const std::size_t total_iterations = fc.grid_iteration + m.iterations;
  if (!checkpoint.empty()) save_checkpoint(checkpoint, m.grid, total_iterations, m.final_volume);

  Output o;
  const bool characterized = !m.exploratory &&
                             (m.loxodromy_defect >= 10 * options.tol || std::abs(m.final_volume - kS3Volume) >= 1e-3);
  // an unfinished descent is reported as such, whatever its audit says
  if (!m.converged) {
    o.code = kNonConvergence;
  } else if (!m.audit_passed || m.anomaly || characterized) {
    o.code = kInvariantViolation;
  }

  if (format == "csv") {
    std::string s = "iteration,volume,defect,step\n";
    for (std::size_t k = 0; k < m.objective_trace.size(); ++k) {
      s += std::to_string(fc.grid_iteration + k) + "," + csv_number(m.objective_trace[k]) + "," +
           csv_number(m.defect_trace[k]) + "," + (k == 0 ? std::string("0") : csv_number(m.step_history[k - 1])) +
           "\n";
    }
    o.text = s;
    return o;
  }
  json j = header("minimize", r);
  j["mesh"] = {{"n_phi", m.grid.n_phi()},
               {"n_lambda", m.grid.n_lambda()},
               {"epsilon", m.grid.epsilon()},
               {"winding", m.grid.winding()}};
  j["status"] = to_string(m.status);
  j["converged"] = m.converged;
  j["exploratory"] = m.exploratory;
  j["anomaly"] = m.anomaly;
  j["iterations"] = m.iterations;
  j["start_iteration"] = fc.grid_iteration;
  j["final_volume"] = {{"value", m.final_volume},
                       {"distance_to_reference", std::abs(m.final_volume - kS3Volume)},
                       {"anchor", "minimum attained by loxodromic fields, = 2 pi^2"}};
  j["loxodromy_defect"] = {{"value", m.loxodromy_defect},
                           {"anchor", "minimizer condition theta_v = theta_vperp = 0"}};
  j["gradient_norm"] = m.gradient_norm;
  j["audit"] = {{"volume", m.audit_volume}, {"discrepancy", m.audit_discrepancy}, {"passed", m.audit_passed}};
  j["objective_trace"] = m.objective_trace;
  j["defect_trace"] = m.defect_trace;
  j["step_history"] = m.step_history;
  if (!checkpoint.empty()) j["checkpoint"] = checkpoint;
  o.text = j.dump(2) + "\n";
  return o;
}

Output cmd_verify(Resolved& r, std::ostream& err) {
  AcceptanceOptions options;
  options.quick = r.flag("quick");
  options.seed = static_cast<std::uint64_t>(r.count("seed", options.seed, 0));
  const std::string format = format_of(r, "json");
  const std::vector<CriterionResult> results = run_acceptance(options);
  bool all = true;
  for (const CriterionResult& c : results) {
    err << format_result(c) << '\n';
    all = all && c.passed;
  }
  Output o;
  o.code = all ? kOk : kInvariantViolation;
  if (format == "csv") {
    std::string s = "id,name,passed\n";
    for (const CriterionResult& c : results) {
      s += std::to_string(c.id) + "," + c.name + "," + (c.passed ? "true" : "false") + "\n";
    }
    o.text = s;
    return o;
  }
  json j = header("verify", r);
  json list = json::array();
  for (const CriterionResult& c : results) {
    list.push_back({{"id", c.id}, {"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  j["criteria"] = std::move(list);
  j["passed"] = all;
  o.text = j.dump(2) + "\n";
  return o;
}

void load_config_file(const std::string& path, Settings& settings) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file " + path + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known_key(key)) throw ConfigError("config file " + path + ": unknown key '" + key + "'");
    if (value.is_string()) {
      settings.set(key, value.get<std::string>());
    } else if (value.is_number() || value.is_boolean()) {
      settings.set(key, value.dump());
    } else {
      throw ConfigError("config file " + path + ": key '" + key + "' must be a string, number or boolean");
    }
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Volume, curvature, index and minimization experiments for unit vector fields on the punctured sphere"};
  app.name(kToolName);
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::map<std::string, std::string> flag_values;
  std::map<std::string, CLI::Option*> flag_options;
  for (const Key& key : kKeys) {
    const std::string name = std::string("--") + key.name;
    if (key.is_flag) {
      flag_options[key.name] = app.add_flag(name, key.help);
    } else {
      flag_options[key.name] = app.add_option(name, flag_values[key.name], key.help);
    }
  }
  std::string config_path;
  app.add_option("--config", config_path, std::string("JSON config file (default: $") + kConfigEnv + ")");

  const char* commands[][2] = {
      {"volume", "total and hemisphere volumes, index bound and sharpness residuals"},
      {"curvature-map", "kappa and tau on a latitude/longitude grid"},
      {"index", "indices at both poles by winding and by the connection form"},
      {"trace", "rhumb line polyline"},
      {"minimize", "gradient descent on a theta grid, with checkpoint output"},
      {"verify", "run the acceptance suite"},
  };
  for (const auto& c : commands) app.add_subcommand(c[0], c[1]);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    Settings settings;
    if (config_path.empty()) {
      if (const char* env = std::getenv(kConfigEnv); env && *env) config_path = env;
    }
    if (!config_path.empty()) load_config_file(config_path, settings);
    for (const Key& key : kKeys) {
      if (flag_options[key.name]->count() == 0) continue;
      settings.set(key.name, key.is_flag ? "true" : flag_values[key.name]);
    }

    Resolved resolved(settings);
    Output result;
    if (command == "volume") {
      result = cmd_volume(resolved);
    } else if (command == "curvature-map") {
      result = cmd_curvature_map(resolved);
    } else if (command == "index") {
      result = cmd_index(resolved);
    } else if (command == "trace") {
      result = cmd_trace(resolved);
    } else if (command == "minimize") {
      result = cmd_minimize(resolved);
    } else {
      result = cmd_verify(resolved, err);
    }

    if (const auto path = resolved.raw("out"); path && !path->empty()) {
      std::ofstream file(*path, std::ios::binary);
      if (!file) throw ConfigError("cannot write " + *path);
      file << result.text;
    } else {
      out << result.text;
    }
    if (result.code == kNonConvergence) err << kToolName << ": numerical procedure did not converge\n";
    if (result.code == kInvariantViolation) err << kToolName << ": invariant violated\n";
    return result.code;
  } catch (const ConfigError& e) {
    err << kToolName << ": " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    err << kToolName << ": " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalError& e) {
    err << kToolName << ": " << e.what() << '\n';
    return kNonConvergence;
  } catch (const std::exception& e) {
    err << kToolName << ": " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace vfield::cli
