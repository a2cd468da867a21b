#include "cartan/statmanifold.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <cmath>
#include <numbers>
#include <sstream>

#include "cartan/kernels.hpp"

namespace cartan {

namespace {

std::string describe(const Vector& x) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x(i);
  os << ")";
  return os.str();
}

void require_dim(const StatFamily& family, const Vector& params) {
  if (params.size() != family.param_dim() || !params.allFinite()) {
    throw Error(ErrorKind::input, std::string(family.name()) + " expects " + std::to_string(family.param_dim()) +
                                      " finite parameters");
  }
}

// Scores over the expectation nodes, one contiguous array per parameter.
struct ScoreTable {
  QuadratureRule rule;
  std::vector<std::vector<double>> score;
};

ScoreTable score_table(const StatFamily& family, const Vector& params) {
  require_dim(family, params);
  family.require_domain(params, "expectation");
  ScoreTable table{family.expectation_rule(params), {}};
  const Index d = family.param_dim();
  const std::size_t q_count = table.rule.nodes.size();
  table.score.assign(static_cast<std::size_t>(d), std::vector<double>(q_count));
  for (std::size_t q = 0; q < q_count; ++q) {
    const Vector s = family.score(params, table.rule.nodes[q]);
    for (Index i = 0; i < d; ++i) table.score[static_cast<std::size_t>(i)][q] = s(i);
  }
  return table;
}

Matrix metric_at(const StatFamily& family, const Vector& params) { return fisher_metric(family, params).g; }

// dg[l] = d_l g by central differences.
std::vector<Matrix> metric_derivatives(const StatFamily& family, const Vector& params, double fd_step) {
  if (!(fd_step > 0.0)) throw Error(ErrorKind::input, "finite-difference step must be positive");
  const Index d = family.param_dim();
  std::vector<Matrix> dg;
  dg.reserve(static_cast<std::size_t>(d));
  for (Index l = 0; l < d; ++l) {
    Vector plus = params;
    Vector minus = params;
    plus(l) += fd_step;
    minus(l) -= fd_step;
    if (!family.in_domain(plus) || !family.in_domain(minus)) {
      throw Error(ErrorKind::domain, "finite-difference stencil around " + describe(params) + " leaves the " +
                                         std::string(family.name()) + " parameter domain");
    }
    dg.push_back((metric_at(family, plus) - metric_at(family, minus)) / (2.0 * fd_step));
  }
  return dg;
}

Matrix cholesky_lower(const Matrix& g) {
  const Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::domain, "Fisher metric is not positive definite");
  return llt.matrixL();
}

}  // namespace

void StatFamily::require_domain(const Vector& params, std::string_view context) const {
  if (!in_domain(params)) {
    throw Error(ErrorKind::domain, std::string(context) + ": " + describe(params) + " lies outside the " +
                                       std::string(name()) + " parameter domain");
  }
}

Gaussian1d::Gaussian1d(int nodes) : hermite_(gauss_hermite(nodes)) {}

bool Gaussian1d::in_domain(const Vector& params) const {
  return params.size() == 2 && params.allFinite() && params(1) >= kSigmaFloor;
}

double Gaussian1d::log_density(const Vector& params, double x) const {
  const double z = (x - params(0)) / params(1);
  return -0.5 * z * z - std::log(params(1)) - 0.5 * std::log(2.0 * std::numbers::pi);
}

Vector Gaussian1d::score(const Vector& params, double x) const {
  const double sigma = params(1);
  const double z = (x - params(0)) / sigma;
  Vector s(2);
  s << z / sigma, (z * z - 1.0) / sigma;
  return s;
}

QuadratureRule Gaussian1d::expectation_rule(const Vector& params) const {
  // x = mu + sqrt(2) sigma u against exp(-u^2) / sqrt(pi).
  QuadratureRule rule;
  const std::size_t n = hermite_.nodes.size();
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double scale = std::numbers::sqrt2 * params(1);
  for (std::size_t q = 0; q < n; ++q) {
    rule.nodes[q] = params(0) + scale * hermite_.nodes[q];
    rule.weights[q] = hermite_.weights[q] / std::sqrt(std::numbers::pi);
  }
  return rule;
}

QuadratureRule Gaussian1d::integration_rule(const Vector& params) const {
  QuadratureRule rule = expectation_rule(params);
  const double scale = std::numbers::sqrt2 * params(1);
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double u = hermite_.nodes[q];
    rule.weights[q] = hermite_.weights[q] * std::exp(u * u) * scale;
  }
  return rule;
}

bool Bernoulli::in_domain(const Vector& params) const {
  return params.size() == 1 && params.allFinite() && params(0) >= kEdge && params(0) <= 1.0 - kEdge;
}

double Bernoulli::log_density(const Vector& params, double x) const {
  const double p = params(0);
  return x != 0.0 ? std::log(p) : std::log1p(-p);
}

Vector Bernoulli::score(const Vector& params, double x) const {
  const double p = params(0);
  Vector s(1);
  s(0) = x != 0.0 ? 1.0 / p : -1.0 / (1.0 - p);
  return s;
}

QuadratureRule Bernoulli::expectation_rule(const Vector& params) const {
  return QuadratureRule{{0.0, 1.0}, {1.0 - params(0), params(0)}};
}

QuadratureRule Bernoulli::integration_rule(const Vector&) const { return QuadratureRule{{0.0, 1.0}, {1.0, 1.0}}; }

std::shared_ptr<const StatFamily> make_family(std::string_view key) {
  if (key == "gaussian1d") return std::make_shared<const Gaussian1d>();
  if (key == "bernoulli") return std::make_shared<const Bernoulli>();
  throw Error(ErrorKind::input, "unknown family '" + std::string(key) + "' (expected gaussian1d or bernoulli)");
}

double expectation_mass(const StatFamily& family, const Vector& params) {
  require_dim(family, params);
  family.require_domain(params, "expectation");
  const QuadratureRule rule = family.integration_rule(params);
  std::vector<double> density(rule.nodes.size());
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) density[q] = std::exp(family.log_density(params, rule.nodes[q]));
  return kernels::weighted_sum(rule.weights, density);
}

Vector score_mean(const StatFamily& family, const Vector& params) {
  const ScoreTable table = score_table(family, params);
  const Index d = family.param_dim();
  Vector mean(d);
  for (Index i = 0; i < d; ++i) mean(i) = kernels::weighted_sum(table.rule.weights, table.score[static_cast<std::size_t>(i)]);
  return mean;
}

FisherMetricValue fisher_metric(const StatFamily& family, const Vector& params) {
  const ScoreTable table = score_table(family, params);
  const Index d = family.param_dim();
  Matrix g(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = i; j < d; ++j) {
      g(i, j) = kernels::weighted_dot(table.rule.weights, table.score[static_cast<std::size_t>(i)],
                                      table.score[static_cast<std::size_t>(j)]);
      g(j, i) = g(i, j);
    }
  }
  return {std::move(g)};
}

AmariTensorValue amari_tensor(const StatFamily& family, const Vector& params) {
  const ScoreTable table = score_table(family, params);
  const Index d = family.param_dim();
  Tensor3 t(d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = i; j < d; ++j) {
      for (Index k = j; k < d; ++k) {
        const double value = kernels::weighted_dot3(table.rule.weights, table.score[static_cast<std::size_t>(i)],
                                                    table.score[static_cast<std::size_t>(j)],
                                                    table.score[static_cast<std::size_t>(k)]);
        t(i, j, k) = t(i, k, j) = t(j, i, k) = t(j, k, i) = t(k, i, j) = t(k, j, i) = value;
      }
    }
  }
  return {std::move(t)};
}

ChristoffelValue levi_civita(const StatFamily& family, const Vector& params, double fd_step) {
  require_dim(family, params);
  family.require_domain(params, "levi_civita");
  const Index d = family.param_dim();
  const Matrix g_inv = metric_at(family, params).inverse();
  const std::vector<Matrix> dg = metric_derivatives(family, params, fd_step);
  Tensor3 gamma(d);
  for (Index k = 0; k < d; ++k) {
    for (Index i = 0; i < d; ++i) {
      for (Index j = 0; j < d; ++j) {
        double acc = 0.0;
        for (Index l = 0; l < d; ++l) {
          acc += g_inv(k, l) * (dg[static_cast<std::size_t>(i)](j, l) + dg[static_cast<std::size_t>(j)](i, l) -
                                dg[static_cast<std::size_t>(l)](i, j));
        }
        gamma(k, i, j) = 0.5 * acc;
      }
    }
  }
  return {std::move(gamma)};
}

ChristoffelValue alpha_christoffel(const StatFamily& family, double alpha, const Vector& params, double fd_step) {
  if (!std::isfinite(alpha)) throw Error(ErrorKind::input, "alpha must be finite");
  ChristoffelValue lc = levi_civita(family, params, fd_step);
  if (alpha == 0.0) return lc;
  const Index d = family.param_dim();
  const Matrix g_inv = metric_at(family, params).inverse();
  const Tensor3 t = amari_tensor(family, params).t;
  for (Index k = 0; k < d; ++k) {
    for (Index i = 0; i < d; ++i) {
      for (Index j = 0; j < d; ++j) {
        double contraction = 0.0;
        for (Index l = 0; l < d; ++l) contraction += g_inv(k, l) * t(i, j, l);
        lc.gamma(k, i, j) -= 0.5 * alpha * contraction;
      }
    }
  }
  return lc;
}

GaugeField orthonormal_gauge(std::shared_ptr<const StatFamily> family) {
  return [family](const ChartPoint& x) {
    const Matrix l = cholesky_lower(metric_at(*family, x));
    const Index d = l.rows();
    // L^{-T}
    return Matrix(l.transpose().triangularView<Eigen::Upper>().solve(Matrix::Identity(d, d)));
  };
}

MetricField fisher_metric_field(std::shared_ptr<const StatFamily> family) {
  return MetricField([family](const ChartPoint& x) { return metric_at(*family, x); });
}

ConnectionForm connection_form_of(std::shared_ptr<const StatFamily> family, double alpha, const Domain& domain,
                                  Frame frame, double fd_step) {
  const Index d = family->param_dim();
  if (domain.dim() != d) throw Error(ErrorKind::input, "domain dimension differs from the family's parameter count");
  if (!family->in_domain(domain.lower()) || !family->in_domain(domain.upper())) {
    throw Error(ErrorKind::domain, "chart box " + describe(domain.lower()) + " - " + describe(domain.upper()) +
                                       " leaves the " + std::string(family->name()) + " parameter domain");
  }
  auto eval = [family, alpha, fd_step, d](const ChartPoint& x) {
    const ChristoffelValue c = alpha_christoffel(*family, alpha, x, fd_step);
    std::vector<Matrix> omega(static_cast<std::size_t>(d), Matrix(d, d));
    for (Index i = 0; i < d; ++i) {
      for (Index k = 0; k < d; ++k) {
        for (Index j = 0; j < d; ++j) omega[static_cast<std::size_t>(i)](k, j) = c.gamma(k, i, j);
      }
    }
    return omega;
  };
  std::ostringstream label;
  label << family->name() << "(alpha=" << alpha << ")";
  ConnectionForm coordinate(d, d, domain, std::move(eval), FormKind::closed_form, label.str());
  if (frame == Frame::coordinate) return coordinate;
  return frame_change(coordinate, orthonormal_gauge(family), fd_step);
}

ConnectionForm amari_form(std::shared_ptr<const StatFamily> family, const Domain& domain) {
  const Index d = family->param_dim();
  auto eval = [family, d](const ChartPoint& x) {
    const Matrix l = cholesky_lower(metric_at(*family, x));
    const Tensor3 t = amari_tensor(*family, x).t;
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(d));
    for (Index i = 0; i < d; ++i) {
      Matrix ti(d, d);
      for (Index j = 0; j < d; ++j) {
        for (Index k = 0; k < d; ++k) ti(j, k) = t(i, j, k);
      }
      const Matrix left = l.triangularView<Eigen::Lower>().solve(ti);
      Matrix di = l.triangularView<Eigen::Lower>().solve(Matrix(left.transpose())).transpose();
      out.push_back(0.5 * (di + di.transpose()));
    }
    return out;
  };
  return ConnectionForm(d, d, domain, std::move(eval), FormKind::closed_form, std::string(family->name()) + "|amari");
}

double metric_duality_defect(const StatFamily& family, double alpha, const Vector& params, Index i, Index j, Index k,
                             double fd_step) {
  const Index d = family.param_dim();
  if (i < 0 || j < 0 || k < 0 || i >= d || j >= d || k >= d) throw Error(ErrorKind::input, "index out of range");
  const Matrix g = metric_at(family, params);
  const std::vector<Matrix> dg = metric_derivatives(family, params, fd_step);
  const ChristoffelValue plus = alpha_christoffel(family, alpha, params, fd_step);
  const ChristoffelValue minus = alpha_christoffel(family, -alpha, params, fd_step);
  double defect = dg[static_cast<std::size_t>(k)](i, j);
  for (Index l = 0; l < d; ++l) defect -= g(l, j) * plus.gamma(l, k, i) + g(i, l) * minus.gamma(l, k, j);
  return defect;
}

}  // namespace cartan
