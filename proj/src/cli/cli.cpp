#include "cartan/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include <Eigen/LU>

#include "CLI11.hpp"
#include "cartan/holonomy.hpp"
#include "cartan/json_io.hpp"
#include "cartan/statmanifold.hpp"

namespace cartan::cli {

namespace {

using Json = nlohmann::json;

enum class FieldType { string, number, integer, boolean, numbers, points, domain };

// Config schema: every key the CLI understands and its JSON type.
const std::map<std::string, FieldType>& schema() {
  static const std::map<std::string, FieldType> fields = {
      {"command", FieldType::string},     {"matrix", FieldType::string},    {"k", FieldType::string},
      {"p", FieldType::string},           {"family", FieldType::string},    {"form", FieldType::string},
      {"frame", FieldType::string},       {"curve", FieldType::string},     {"loop", FieldType::string},
      {"vector", FieldType::string},      {"out", FieldType::string},       {"format", FieldType::string},
      {"samples_out", FieldType::string}, {"alpha", FieldType::number},     {"tol", FieldType::number},
      {"max_side", FieldType::number},    {"fd_step", FieldType::number},   {"steps", FieldType::integer},
      {"seed", FieldType::integer},       {"count", FieldType::integer},    {"samples_per_side", FieldType::integer},
      {"closure", FieldType::boolean},    {"base", FieldType::numbers},     {"point", FieldType::numbers},
      {"v", FieldType::numbers},          {"w", FieldType::numbers},        {"alphas", FieldType::numbers},
      {"points", FieldType::points},      {"domain", FieldType::domain},
  };
  return fields;
}

const char* type_name(FieldType t) {
  switch (t) {
    case FieldType::string: return "a string";
    case FieldType::number: return "a finite number";
    case FieldType::integer: return "an integer";
    case FieldType::boolean: return "a boolean";
    case FieldType::numbers: return "an array of numbers";
    case FieldType::points: return "an array of number arrays";
    case FieldType::domain: return "an object {lower, upper}";
  }
  return "?";
}

bool finite_number(const Json& j) { return j.is_number() && std::isfinite(j.get<double>()); }

bool number_array(const Json& j) {
  if (!j.is_array() || j.empty()) return false;
  for (const Json& x : j) {
    if (!finite_number(x)) return false;
  }
  return true;
}

// Returns the value normalized to its schema type, or throws with the field name.
Json check_field(const std::string& key, const Json& value) {
  const auto it = schema().find(key);
  if (it == schema().end()) throw Error(ErrorKind::input, "config field '" + key + "' is not recognized");
  const FieldType t = it->second;
  bool ok = false;
  Json normalized = value;
  switch (t) {
    case FieldType::string: ok = value.is_string(); break;
    case FieldType::number:
      ok = finite_number(value);
      if (ok) normalized = value.get<double>();
      break;
    case FieldType::integer:
      ok = value.is_number_integer() || (finite_number(value) && std::floor(value.get<double>()) == value.get<double>());
      if (ok) normalized = static_cast<std::int64_t>(value.get<double>());
      break;
    case FieldType::boolean: ok = value.is_boolean(); break;
    case FieldType::numbers:
      ok = number_array(value);
      if (ok) {
        normalized = Json::array();
        for (const Json& x : value) normalized.push_back(x.get<double>());
      }
      break;
    case FieldType::points:
      ok = value.is_array() && !value.empty();
      if (ok) {
        normalized = Json::array();
        for (const Json& p : value) {
          if (!number_array(p)) {
            ok = false;
            break;
          }
          Json row = Json::array();
          for (const Json& x : p) row.push_back(x.get<double>());
          normalized.push_back(std::move(row));
        }
      }
      break;
    case FieldType::domain:
      ok = value.is_object() && value.contains("lower") && value.contains("upper") && number_array(value["lower"]) &&
           number_array(value["upper"]) && value.size() == 2;
      if (ok) normalized = io::to_json(io::domain_from_json(value));
      break;
  }
  if (!ok) throw Error(ErrorKind::input, "config field '" + key + "' must be " + type_name(t) + ", got " + value.dump());
  return normalized;
}

bool is_input_path(const std::string& key) {
  return key == "matrix" || key == "k" || key == "p" || key == "form" || key == "curve" || key == "loop" ||
         key == "vector";
}

void append_number(std::string& out, double x) {
  if (!std::isfinite(x)) {
    out += std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
    return;
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  out.append(buf, res.ptr);
}

void flatten(const Json& j, const std::string& prefix, std::string& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(*it, prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else if (j.is_string()) {
    std::string text = j.get<std::string>();
    if (text.find_first_of(",\"\n") != std::string::npos) {
      std::string quoted = "\"";
      for (char ch : text) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      text = quoted + "\"";
    }
    out += prefix + "," + text + "\n";
  } else if (j.is_boolean()) {
    out += prefix + "," + (j.get<bool>() ? "true" : "false") + "\n";
  } else if (j.is_number_integer()) {
    out += prefix + "," + std::to_string(j.get<std::int64_t>()) + "\n";
  } else if (j.is_number()) {
    out += prefix + ",";
    append_number(out, j.get<double>());
    out += "\n";
  }
}

// Resolved parameters with typed accessors.
class Config {
 public:
  explicit Config(Json values) : values_(std::move(values)) {}

  const Json& json() const { return values_; }
  bool has(const std::string& key) const { return values_.contains(key); }
  void set_default(const std::string& key, Json value) {
    if (!has(key)) values_[key] = check_field(key, value);
  }
  const Json& require(const std::string& key, const std::string& command) const {
    if (!has(key)) throw Error(ErrorKind::input, command + " requires '" + key + "' (flag --" + flag_of(key) + ")");
    return values_.at(key);
  }
  std::string str(const std::string& key) const { return values_.at(key).get<std::string>(); }
  double num(const std::string& key) const { return values_.at(key).get<double>(); }
  std::int64_t integer(const std::string& key) const { return values_.at(key).get<std::int64_t>(); }
  bool flag(const std::string& key) const { return values_.at(key).get<bool>(); }
  Vector vec(const std::string& key) const { return io::vector_from_json(values_.at(key), key); }

  static std::string flag_of(std::string key) {
    for (char& c : key) {
      if (c == '_') c = '-';
    }
    return key;
  }

 private:
  Json values_;
};

void require_positive(const Config& c, const std::string& key) {
  if (c.has(key) && c.integer(key) < 1) throw Error(ErrorKind::input, "'" + key + "' must be at least 1");
}

Domain default_domain(const std::string& family) {
  if (family == "gaussian1d") return Domain(Vector{{-1.0, 0.5}}, Vector{{1.0, 2.0}});
  if (family == "bernoulli") return Domain(Vector{{0.05}}, Vector{{0.95}});
  throw Error(ErrorKind::input, "unknown family '" + family + "' (expected gaussian1d or bernoulli)");
}

Frame frame_of(const Config& c) {
  const std::string f = c.str("frame");
  if (f == "coordinate") return Frame::coordinate;
  if (f == "orthonormal") return Frame::orthonormal;
  throw Error(ErrorKind::input, "frame must be 'coordinate' or 'orthonormal', got '" + f + "'");
}

unsigned threads_from_env() {
  const char* env = std::getenv("CARTAN_DUAL_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  unsigned value = 0;
  const char* end = env + std::char_traits<char>::length(env);
  const auto res = std::from_chars(env, end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    throw Error(ErrorKind::input, std::string("CARTAN_DUAL_THREADS must be a non-negative integer, got '") + env + "'");
  }
  return value;
}

struct Check {
  std::string name;
  double value;
  double tol;
};

struct Outcome {
  Json results = Json::object();
  std::vector<Check> checks;
};

// Family-or-grid connection form, with its domain recorded in the config.
ConnectionForm resolve_form(Config& c, const std::string& command, Frame default_frame) {
  if (c.has("form")) {
    auto grid = std::make_shared<const FormGrid>(io::grid_from_json(io::read_file(c.str("form"))));
    return grid_form(std::move(grid));
  }
  const std::string family_key = c.require("family", command).get<std::string>();
  auto family = make_family(family_key);
  c.set_default("domain", io::to_json(default_domain(family_key)));
  c.set_default("alpha", 0.0);
  c.set_default("frame", default_frame == Frame::coordinate ? "coordinate" : "orthonormal");
  c.set_default("fd_step", kDefaultFdStep);
  return connection_form_of(family, c.num("alpha"), io::domain_from_json(c.json().at("domain")), frame_of(c),
                            c.num("fd_step"));
}

Outcome cmd_split(Config& c) {
  const AlgebraElement x(io::matrix_from_json(io::read_file(c.require("matrix", "split").get<std::string>()), "matrix"));
  const CartanSplit s = cartan_split(x);
  Outcome o;
  o.results["input"] = io::to_json(x.matrix());
  o.results["kPart"] = io::to_json(s.kPart.matrix());
  o.results["pPart"] = io::to_json(s.pPart.matrix());
  o.results["theta"] = io::to_json(theta(x).matrix());
  o.results["reconstructionResidual"] = (s.kPart.matrix() + s.pPart.matrix() - x.matrix()).norm();
  o.results["kSkewResidual"] = skew_residual(s.kPart.matrix());
  o.results["pSymmetricResidual"] = symmetric_residual(s.pPart.matrix());
  return o;
}

Outcome cmd_polar(Config& c) {
  const GroupElement m(io::matrix_from_json(io::read_file(c.require("matrix", "polar").get<std::string>()), "matrix"));
  c.set_default("tol", 1e-10);
  const double tol = c.num("tol");
  const Matrix& a = m.matrix();
  const Index n = m.order();
  const PolarFactors pf = polar_decompose(m);
  const Matrix& o_mat = pf.orthogonal.matrix();
  const Matrix& p_mat = pf.positive.matrix();
  const double scale = std::max(1.0, a.norm());

  Outcome out;
  out.results["orthogonal"] = io::to_json(o_mat);
  out.results["positive"] = io::to_json(p_mat);
  const double orth = (o_mat.transpose() * o_mat - Matrix::Identity(n, n)).norm();
  const double recon = (o_mat * p_mat - a).norm() / scale;
  const double sym = symmetric_residual(p_mat);
  out.results["orthogonalityResidual"] = orth;
  out.results["polarReconstructionResidual"] = recon;
  out.results["positiveSymmetryResidual"] = sym;
  out.checks = {{"orthogonalityResidual", orth, tol},
                {"polarReconstructionResidual", recon, tol},
                {"positiveSymmetryResidual", sym, tol}};

  // An orthogonal factor with det -1 has no real logarithm; report the polar
  // factors alone in that case.
  if (o_mat.determinant() < 0.0) {
    out.results["exponentialFactors"] = "unavailable: orthogonal factor has determinant -1";
    return out;
  }
  const GroupSplit gs = group_factorize(m);
  out.results["kLog"] = io::to_json(gs.kLog.matrix());
  out.results["pLog"] = io::to_json(gs.pLog.matrix());
  const double factor = (matrix_exp(gs.kLog).matrix() * matrix_exp(gs.pLog).matrix() - a).norm() / scale;
  // Theta(M) must factor as (k, -p).
  const GroupSplit dual = group_factorize(dual_group_element(m));
  const double dual_res =
      (dual.kLog.matrix() - gs.kLog.matrix()).norm() + (dual.pLog.matrix() + gs.pLog.matrix()).norm();
  out.results["factorReconstructionResidual"] = factor;
  out.results["dualFactorResidual"] = dual_res;
  out.checks.push_back({"factorReconstructionResidual", factor, tol});
  out.checks.push_back({"dualFactorResidual", dual_res, tol});
  return out;
}

Outcome cmd_dual_check(Config& c) {
  const Matrix k = io::matrix_from_json(io::read_file(c.require("k", "dual-check").get<std::string>()), "k");
  const Matrix p = io::matrix_from_json(io::read_file(c.require("p", "dual-check").get<std::string>()), "p");
  c.set_default("tol", 1e-8);
  const double tol = c.num("tol");
  if (k.rows() != p.rows() || k.rows() != k.cols() || p.rows() != p.cols()) {
    throw Error(ErrorKind::order_mismatch, "k and p must be square of equal order");
  }
  if (skew_residual(k) > 1e-12 * std::max(1.0, k.norm())) throw Error(ErrorKind::input, "k must be skew-symmetric");
  if (symmetric_residual(p) > 1e-12 * std::max(1.0, p.norm())) throw Error(ErrorKind::input, "p must be symmetric");
  const AlgebraElement ka(k);
  const AlgebraElement pa(p);
  const GroupElement forward = matrix_exp(ka + pa);
  const GroupSplit split = group_factorize(forward);
  const Matrix lhs = matrix_exp(ka - pa).matrix();
  const Matrix rhs = matrix_exp(split.kLog).matrix() * matrix_exp(-split.pLog).matrix();
  const double defect = (lhs - rhs).norm();
  const double theta_defect = (group_involution(forward).matrix() - matrix_exp(theta(ka + pa)).matrix()).norm();

  Outcome o;
  o.results["kPrime"] = io::to_json(split.kLog.matrix());
  o.results["pPrime"] = io::to_json(split.pLog.matrix());
  o.results["dualityDefect"] = defect;
  o.results["thetaCompatibilityDefect"] = theta_defect;
  o.checks = {{"dualityDefect", defect, tol}, {"thetaCompatibilityDefect", theta_defect, tol}};
  return o;
}

Outcome cmd_transport(Config& c) {
  const Curve curve = io::curve_from_json(io::read_file(c.require("curve", "transport").get<std::string>()));
  const ConnectionForm form = resolve_form(c, "transport", Frame::coordinate);
  c.set_default("steps", 1024);
  require_positive(c, "steps");
  const int steps = static_cast<int>(c.integer("steps"));
  Outcome o;
  const GroupElement h = transport_matrix(curve, form, steps);
  o.results["transportMatrix"] = io::to_json(h.matrix());
  if (c.has("vector")) {
    const Vector v0 = io::vector_from_json(io::read_file(c.str("vector")), "vector");
    o.results["transported"] = io::to_json(transport(curve, form, v0, steps));
  }
  const bool closed = (curve.end() - curve.start()).cwiseAbs().maxCoeff() <= Loop::kClosureTolerance;
  o.results["closed"] = closed;
  const Matrix& hm = h.matrix();
  o.results["orthogonalityResidual"] = (hm.transpose() * hm - Matrix::Identity(hm.rows(), hm.cols())).norm();
  return o;
}

Outcome cmd_holonomy(Config& c) {
  const ConnectionForm form = resolve_form(c, "holonomy", Frame::orthonormal);
  const Domain& domain = form.domain();
  c.set_default("base", io::to_json(Vector(0.5 * (domain.lower() + domain.upper()))));
  c.set_default("count", 100);
  c.set_default("max_side", 0.2);
  c.set_default("seed", 1);
  c.set_default("steps", 1024);
  c.set_default("samples_per_side", 4);
  c.set_default("tol", 1e-6);
  c.set_default("closure", true);
  for (const char* key : {"count", "steps", "samples_per_side"}) require_positive(c, key);
  if (c.integer("seed") < 0) throw Error(ErrorKind::input, "'seed' must be non-negative");

  SamplingOptions opts;
  opts.count = static_cast<int>(c.integer("count"));
  opts.max_side = c.num("max_side");
  opts.seed = static_cast<std::uint64_t>(c.integer("seed"));
  opts.steps = static_cast<int>(c.integer("steps"));
  opts.samples_per_side = static_cast<int>(c.integer("samples_per_side"));
  opts.threads = threads_from_env();
  const std::vector<HolonomySample> samples = sample_holonomy(form, c.vec("base"), opts);
  const AlgebraEstimate est = estimate_algebra(std::span<const HolonomySample>(samples), c.flag("closure"), c.num("tol"));

  Outcome o;
  Json dump = Json::array();
  double max_orth = 0.0;
  for (const HolonomySample& s : samples) {
    dump.push_back(io::to_json(s));
    const Matrix& h = s.element.matrix();
    max_orth = std::max(max_orth, (h.transpose() * h - Matrix::Identity(h.rows(), h.cols())).norm());
  }
  if (c.has("samples_out")) {
    std::ofstream lines(c.str("samples_out"), std::ios::binary);
    if (!lines) throw Error(ErrorKind::input, "cannot write samples to '" + c.str("samples_out") + "'");
    for (const Json& s : dump) lines << s.dump() << '\n';
  }
  o.results["samples"] = std::move(dump);
  o.results["estimate"] = io::to_json(est);
  o.results["maxOrthogonalityResidual"] = max_orth;
  return o;
}

Outcome cmd_duality(Config& c) {
  c.set_default("family", "gaussian1d");
  c.set_default("alpha", 1.0);
  c.set_default("frame", "orthonormal");
  if (c.str("frame") != "orthonormal") throw Error(ErrorKind::input, "duality works in the orthonormal frame only");
  const std::string family_key = c.str("family");
  auto family = make_family(family_key);
  const Loop loop(io::curve_from_json(io::read_file(c.require("loop", "duality").get<std::string>())));
  const ConnectionForm form = resolve_form(c, "duality", Frame::orthonormal);
  c.set_default("steps", 4096);
  c.set_default("tol", 1e-6);
  require_positive(c, "steps");
  const int steps = static_cast<int>(c.integer("steps"));
  const double tol = c.num("tol");
  const MetricField metric = fisher_metric_field(family);
  const Index n = form.fiber_dim();

  std::vector<std::pair<Vector, Vector>> pairs;
  if (c.has("v") || c.has("w")) {
    pairs.emplace_back(c.vec(c.has("v") ? "v" : "w"), c.vec(c.has("w") ? "w" : "v"));
  } else {
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) pairs.emplace_back(Vector::Unit(n, i), Vector::Unit(n, j));
    }
  }
  auto max_defect = [&](int s) {
    double worst = 0.0;
    for (const auto& [v, w] : pairs) worst = std::max(worst, std::abs(pairing_defect(loop, form, metric, v, w, s)));
    return worst;
  };
  Outcome o;
  const double at_steps = max_defect(steps);
  o.results["pairingDefect"] = at_steps;
  o.results["pairCount"] = static_cast<std::int64_t>(pairs.size());
  if (steps >= 2) {
    const double at_half = max_defect(steps / 2);
    o.results["pairingDefectHalfSteps"] = at_half;
    o.results["convergenceRatio"] = at_steps > 0.0 ? at_half / at_steps : 0.0;
  }
  o.checks = {{"pairingDefect", at_steps, tol}};
  return o;
}

Outcome cmd_stat_report(Config& c) {
  const std::string family_key = c.require("family", "stat-report").get<std::string>();
  auto family = make_family(family_key);
  c.set_default("domain", io::to_json(default_domain(family_key)));
  c.set_default("alphas", Json::array({-1.0, -0.5, 0.0, 0.5, 1.0}));
  c.set_default("tol", 1e-6);
  c.set_default("fd_step", kDefaultFdStep);
  const Domain domain = io::domain_from_json(c.json().at("domain"));
  if (!c.has("points")) {
    Json pts = Json::array();
    if (c.has("point")) {
      pts.push_back(c.json().at("point"));
    } else if (domain.dim() == 1) {
      for (int a = 0; a < 5; ++a) pts.push_back({domain.lower()(0) + (domain.upper()(0) - domain.lower()(0)) * a / 4.0});
    } else {
      for (int a = 0; a < 5; ++a) {
        for (int b = 0; b < 5; ++b) {
          pts.push_back({domain.lower()(0) + (domain.upper()(0) - domain.lower()(0)) * a / 4.0,
                         domain.lower()(1) + (domain.upper()(1) - domain.lower()(1)) * b / 4.0});
        }
      }
    }
    c.set_default("points", pts);
  }
  const double fd = c.num("fd_step");
  const double tol = c.num("tol");
  const Vector alphas = c.vec("alphas");
  const Index d = family->param_dim();

  Outcome o;
  Json report_points = Json::array();
  double worst = 0.0;
  for (const Json& pj : c.json().at("points")) {
    const Vector x = io::vector_from_json(pj, "point");
    const FisherMetricValue g = fisher_metric(*family, x);
    Json entry = {{"point", io::to_json(x)},
                  {"fisher", io::to_json(g.g)},
                  {"amari", io::to_json(amari_tensor(*family, x).t)},
                  {"leviCivita", io::to_json(levi_civita(*family, x, fd).gamma)}};
    Json per_alpha = Json::array();
    for (Index a = 0; a < alphas.size(); ++a) {
      double local = 0.0;
      for (Index i = 0; i < d; ++i) {
        for (Index j = 0; j < d; ++j) {
          for (Index k = 0; k < d; ++k) {
            local = std::max(local, std::abs(metric_duality_defect(*family, alphas(a), x, i, j, k, fd)));
          }
        }
      }
      worst = std::max(worst, local);
      per_alpha.push_back({{"alpha", alphas(a)},
                           {"christoffel", io::to_json(alpha_christoffel(*family, alphas(a), x, fd).gamma)},
                           {"maxDualityDefect", local}});
    }
    entry["alphaConnections"] = std::move(per_alpha);
    report_points.push_back(std::move(entry));
  }
  o.results["points"] = std::move(report_points);
  o.results["maxDualityDefect"] = worst;
  o.results["christoffelIndexOrder"] = "gamma[k][i][j] = Gamma^k_ij, upper index outermost";
  o.checks = {{"maxDualityDefect", worst, tol}};
  return o;
}

using Handler = std::function<Outcome(Config&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table = {
      {"split", cmd_split},         {"polar", cmd_polar},       {"dual-check", cmd_dual_check},
      {"transport", cmd_transport}, {"holonomy", cmd_holonomy}, {"duality", cmd_duality},
      {"stat-report", cmd_stat_report},
  };
  return table;
}

void write_output(const std::string& text, const Config& c, std::ostream& out) {
  if (!c.has("out")) {
    out << text;
    return;
  }
  std::ofstream file(c.str("out"), std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorKind::input, "cannot write report to '" + c.str("out") + "'");
  file << text;
  if (!file) throw Error(ErrorKind::input, "failed writing report to '" + c.str("out") + "'");
}

}  // namespace

std::string results_csv(const Json& results) {
  std::string out = "key,value\n";
  flatten(results, "", out);
  return out;
}

std::string emit_report(const Json& report, Format format) {
  if (format == Format::json) return report.dump(2) + "\n";
  std::string out = "# " + std::string(kToolName) + " " + std::string(kVersion) + "\n";
  if (report.contains("config")) out += "# config " + report.at("config").dump() + "\n";
  out += results_csv(report.contains("results") ? report.at("results") : Json::object());
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cartan decompositions, dual connections and holonomy checks", std::string(kToolName)};
  app.set_version_flag("--version", std::string(kVersion));
  app.fallthrough();
  app.require_subcommand(0, 1);

  std::map<std::string, std::string> str_flags;
  std::map<std::string, double> num_flags;
  std::map<std::string, std::int64_t> int_flags;
  std::map<std::string, std::vector<double>> vec_flags;
  std::string config_path;
  bool closure_flag = false;
  std::map<std::string, CLI::Option*> given;

  app.add_option("--config", config_path, "JSON config file; flags override its fields");
  for (const char* key : {"matrix", "k", "p", "family", "form", "frame", "curve", "loop", "vector", "out", "format",
                          "samples_out"}) {
    given[key] = app.add_option("--" + Config::flag_of(key), str_flags[key]);
  }
  for (const char* key : {"alpha", "tol", "max_side", "fd_step"}) {
    given[key] = app.add_option("--" + Config::flag_of(key), num_flags[key]);
  }
  for (const char* key : {"steps", "seed", "count", "samples_per_side"}) {
    given[key] = app.add_option("--" + Config::flag_of(key), int_flags[key]);
  }
  for (const char* key : {"base", "point", "v", "w", "alphas"}) {
    given[key] = app.add_option("--" + Config::flag_of(key), vec_flags[key], "comma-separated numbers")->delimiter(',');
  }
  given["closure"] = app.add_flag("--closure,!--no-closure", closure_flag, "close the holonomy algebra under brackets");

  std::map<std::string, CLI::App*> subcommands;
  for (const auto& [name, handler] : handlers()) subcommands[name] = app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolName << " " << kVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    Json values = Json::object();
    if (!config_path.empty()) {
      const Json file = io::read_file(config_path);
      if (!file.is_object()) throw Error(ErrorKind::input, "config '" + config_path + "' must be a JSON object");
      const std::filesystem::path config_dir = std::filesystem::absolute(config_path).parent_path();
      for (auto it = file.begin(); it != file.end(); ++it) {
        Json value = check_field(it.key(), it.value());
        // Input files named in a config are relative to the config's directory.
        if (is_input_path(it.key())) {
          const std::filesystem::path path(value.get<std::string>());
          if (path.is_relative()) value = (config_dir / path).lexically_normal().string();
        }
        values[it.key()] = std::move(value);
      }
    }
    for (const auto& [key, opt] : given) {
      if (opt->count() == 0) continue;
      if (str_flags.count(key)) values[key] = str_flags[key];
      else if (num_flags.count(key)) values[key] = check_field(key, num_flags[key]);
      else if (int_flags.count(key)) values[key] = int_flags[key];
      else if (vec_flags.count(key)) values[key] = check_field(key, vec_flags[key]);
      else if (key == "closure") values[key] = closure_flag;
    }
    for (const auto& [name, sub] : subcommands) {
      if (sub->parsed()) values["command"] = name;
    }
    if (!values.contains("command")) throw Error(ErrorKind::input, "no command given (subcommand or config 'command')");
    const std::string command = values["command"].get<std::string>();
    const auto handler = handlers().find(command);
    if (handler == handlers().end()) throw Error(ErrorKind::input, "unknown command '" + command + "'");

    Config config(std::move(values));
    config.set_default("format", "json");
    const std::string format_name = config.str("format");
    if (format_name != "json" && format_name != "csv") throw Error(ErrorKind::input, "format must be json or csv");

    Outcome outcome = handler->second(config);

    bool pass = true;
    Json checks = Json::array();
    for (const Check& ch : outcome.checks) {
      const bool ok = std::isfinite(ch.value) && ch.value <= ch.tol;
      pass = pass && ok;
      checks.push_back({{"name", ch.name}, {"value", ch.value}, {"tol", ch.tol}, {"pass", ok}});
    }
    if (!checks.empty()) outcome.results["checks"] = checks;
    outcome.results["pass"] = pass;

    const Json report = {{"tool", kToolName},
                         {"version", kVersion},
                         {"command", command},
                         {"config", config.json()},
                         {"results", std::move(outcome.results)}};
    write_output(emit_report(report, format_name == "csv" ? Format::csv : Format::json), config, out);
    if (!pass) {
      for (const Check& ch : outcome.checks) {
        if (!(std::isfinite(ch.value) && ch.value <= ch.tol)) {
          err << "check failed: " << ch.name << " = " << ch.value << " exceeds " << ch.tol << "\n";
        }
      }
      return kNumericFailure;
    }
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace cartan::cli
