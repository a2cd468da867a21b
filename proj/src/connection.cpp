#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>

#include "cartan/connection.hpp"

namespace cartan {

ConnectionForm::ConnectionForm(Index base_dim, Index fiber_dim, Domain domain, Evaluator eval, FormKind kind,
                               std::string label)
    : base_dim_(base_dim),
      fiber_dim_(fiber_dim),
      domain_(std::move(domain)),
      eval_(std::make_shared<const Evaluator>(std::move(eval))),
      kind_(kind),
      label_(std::move(label)) {
  if (base_dim_ < 1 || fiber_dim_ < 1) throw Error(ErrorKind::input, "connection form dimensions must be positive");
  if (domain_.dim() != base_dim_) throw Error(ErrorKind::input, "domain dimension differs from base dimension");
}

ConnectionForm ConnectionForm::zero(Index fiber_dim, Domain domain) {
  const Index d = domain.dim();
  return ConnectionForm(
      d, fiber_dim, std::move(domain),
      [d, fiber_dim](const ChartPoint&) { return std::vector<Matrix>(d, Matrix::Zero(fiber_dim, fiber_dim)); },
      FormKind::closed_form, "zero");
}

ConnectionForm ConnectionForm::constant(std::vector<Matrix> values, Domain domain) {
  if (values.empty()) throw Error(ErrorKind::input, "constant form needs at least one matrix");
  const Index d = static_cast<Index>(values.size());
  const Index n = values.front().rows();
  return ConnectionForm(
      d, n, std::move(domain), [values = std::move(values)](const ChartPoint&) { return values; },
      FormKind::closed_form, "constant");
}

std::vector<Matrix> ConnectionForm::operator()(const ChartPoint& x) const {
  domain_.require(x, label_.empty() ? "connection form" : label_);
  std::vector<Matrix> omega = (*eval_)(x);
  if (static_cast<Index>(omega.size()) != base_dim_) {
    throw Error(ErrorKind::input, "connection form returned " + std::to_string(omega.size()) + " matrices, expected " +
                                      std::to_string(base_dim_));
  }
  for (const Matrix& m : omega) {
    if (m.rows() != fiber_dim_ || m.cols() != fiber_dim_) {
      throw Error(ErrorKind::order_mismatch, "connection form value has the wrong order");
    }
    if (!m.allFinite()) throw Error(ErrorKind::input, "connection form value is not finite");
  }
  return omega;
}

Matrix ConnectionForm::contract(const ChartPoint& x, const Vector& velocity) const {
  const std::vector<Matrix> omega = (*this)(x);
  Matrix out = Matrix::Zero(fiber_dim_, fiber_dim_);
  for (Index i = 0; i < base_dim_; ++i) {
    if (velocity(i) != 0.0) out.noalias() += velocity(i) * omega[static_cast<std::size_t>(i)];
  }
  return out;
}

ConnectionForm ConnectionForm::map_pointwise(std::function<Matrix(const Matrix&)> fn, std::string label) const {
  auto inner = eval_;
  return ConnectionForm(
      base_dim_, fiber_dim_, domain_,
      [inner, fn = std::move(fn)](const ChartPoint& x) {
        std::vector<Matrix> omega = (*inner)(x);
        for (Matrix& m : omega) m = fn(m);
        return omega;
      },
      kind_, std::move(label));
}

ConnectionForm grid_form(std::shared_ptr<const FormGrid> grid) {
  const Index d = grid->base_dim;
  const Index n = grid->fiber_dim;
  if (grid->domain.dim() != d || static_cast<Index>(grid->shape.size()) != d) {
    throw Error(ErrorKind::input, "grid shape and domain must match the base dimension");
  }
  std::size_t total = 1;
  for (Index s : grid->shape) {
    if (s < 2) throw Error(ErrorKind::input, "every grid axis needs at least two nodes");
    total *= static_cast<std::size_t>(s);
  }
  if (grid->nodes.size() != total) {
    throw Error(ErrorKind::input, "grid holds " + std::to_string(grid->nodes.size()) + " nodes, shape requires " +
                                      std::to_string(total));
  }
  for (const auto& node : grid->nodes) {
    if (static_cast<Index>(node.size()) != d) throw Error(ErrorKind::input, "grid node has the wrong matrix count");
    for (const Matrix& m : node) {
      if (m.rows() != n || m.cols() != n || !m.allFinite()) throw Error(ErrorKind::input, "grid node matrix malformed");
    }
  }

  auto eval = [grid, d, n](const ChartPoint& x) {
    std::vector<Index> base(static_cast<std::size_t>(d));
    std::vector<double> frac(static_cast<std::size_t>(d));
    for (Index a = 0; a < d; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      const Index cells = grid->shape[ua] - 1;
      const double lo = grid->domain.lower()(a);
      const double hi = grid->domain.upper()(a);
      double u = hi > lo ? (x(a) - lo) / (hi - lo) * static_cast<double>(cells) : 0.0;
      // Snap onto nodes so that node values are reproduced exactly.
      if (std::abs(u - std::round(u)) < 1e-9) u = std::round(u);
      Index i0 = std::clamp<Index>(static_cast<Index>(std::floor(u)), 0, cells - 1);
      base[ua] = i0;
      frac[ua] = std::clamp(u - static_cast<double>(i0), 0.0, 1.0);
    }
    std::vector<Matrix> out(static_cast<std::size_t>(d), Matrix::Zero(n, n));
    for (unsigned corner = 0; corner < (1u << d); ++corner) {
      double weight = 1.0;
      std::size_t flat = 0;
      for (Index a = 0; a < d; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        const bool upper = (corner >> a) & 1u;
        weight *= upper ? frac[ua] : 1.0 - frac[ua];
        flat = flat * static_cast<std::size_t>(grid->shape[ua]) + static_cast<std::size_t>(base[ua] + (upper ? 1 : 0));
      }
      if (weight == 0.0) continue;
      const auto& node = grid->nodes[flat];
      for (std::size_t i = 0; i < out.size(); ++i) out[i].noalias() += weight * node[i];
    }
    return out;
  };
  return ConnectionForm(d, n, grid->domain, std::move(eval), FormKind::grid_sampled, "grid");
}

FormGrid sample_form(const ConnectionForm& form, const std::vector<Index>& shape) {
  const Index d = form.base_dim();
  if (static_cast<Index>(shape.size()) != d) throw Error(ErrorKind::input, "grid shape must match the base dimension");
  FormGrid grid;
  grid.base_dim = d;
  grid.fiber_dim = form.fiber_dim();
  grid.domain = form.domain();
  grid.shape = shape;
  std::size_t total = 1;
  for (Index s : shape) {
    if (s < 2) throw Error(ErrorKind::input, "every grid axis needs at least two nodes");
    total *= static_cast<std::size_t>(s);
  }
  grid.nodes.reserve(total);
  std::vector<Index> idx(static_cast<std::size_t>(d), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    ChartPoint x(d);
    for (Index a = 0; a < d; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      const double lo = form.domain().lower()(a);
      const double hi = form.domain().upper()(a);
      x(a) = idx[ua] == shape[ua] - 1 ? hi : lo + (hi - lo) * static_cast<double>(idx[ua]) / static_cast<double>(shape[ua] - 1);
    }
    grid.nodes.push_back(form(x));
    for (Index a = d - 1; a >= 0; --a) {
      const auto ua = static_cast<std::size_t>(a);
      if (++idx[ua] < shape[ua]) break;
      idx[ua] = 0;
    }
  }
  return grid;
}

MetricField::MetricField(Evaluator eval) : eval_(std::make_shared<const Evaluator>(std::move(eval))) {}

MetricField MetricField::euclidean(Index n) {
  return MetricField([n](const ChartPoint&) { return Matrix(Matrix::Identity(n, n)); });
}

Matrix MetricField::operator()(const ChartPoint& x) const {
  Matrix g = (*eval_)(x);
  if (g.rows() != g.cols() || !g.allFinite()) throw Error(ErrorKind::input, "metric value must be a finite square matrix");
  if (symmetric_residual(g) > 1e-12 * std::max(1.0, g.norm())) throw Error(ErrorKind::input, "metric value is not symmetric");
  const Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::domain, "metric value is not positive definite");
  return g;
}

ConnectionForm frame_change(const ConnectionForm& form, GaugeField gauge, double fd_step) {
  if (!(fd_step > 0.0)) throw Error(ErrorKind::input, "frame change needs a positive finite-difference step");
  const Index d = form.base_dim();
  const Index n = form.fiber_dim();
  auto eval = [form, gauge = std::move(gauge), fd_step, d, n](const ChartPoint& x) {
    const std::vector<Matrix> omega = form(x);
    const Matrix a = gauge(x);
    if (a.rows() != n || a.cols() != n || !a.allFinite()) throw Error(ErrorKind::input, "gauge value malformed");
    const Eigen::JacobiSVD<Matrix> svd(a);
    const Vector& s = svd.singularValues();
    if (!(s(n - 1) > 1e-13 * s(0))) throw Error(ErrorKind::singularity, "gauge-singularity: frame matrix is not invertible");
    const Eigen::PartialPivLU<Matrix> lu(a);
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(d));
    for (Index i = 0; i < d; ++i) {
      ChartPoint xp = x;
      ChartPoint xm = x;
      xp(i) += fd_step;
      xm(i) -= fd_step;
      const Matrix da = (gauge(xp) - gauge(xm)) / (2.0 * fd_step);
      out.push_back(lu.solve(omega[static_cast<std::size_t>(i)] * a + da));
    }
    return out;
  };
  return ConnectionForm(d, n, form.domain(), std::move(eval), FormKind::closed_form, form.label() + "|frame");
}

ConnectionForm dual_form(const ConnectionForm& form) {
  return form.map_pointwise([](const Matrix& m) { return Matrix(-m.transpose()); }, form.label() + "|dual");
}

ConnectionForm omega_minus(const ConnectionForm& form) {
  return form.map_pointwise([](const Matrix& m) { return Matrix(0.5 * (m + m.transpose())); }, form.label() + "|minus");
}

ConnectionForm omega_plus(const ConnectionForm& form) {
  return form.map_pointwise([](const Matrix& m) { return Matrix(0.5 * (m - m.transpose())); }, form.label() + "|plus");
}

ConnectionForm alpha_form(const ConnectionForm& form, double alpha) {
  if (!std::isfinite(alpha)) throw Error(ErrorKind::input, "alpha must be finite");
  if (alpha == 1.0) return form;
  return form.map_pointwise(
      [alpha](const Matrix& m) {
        const Matrix plus = 0.5 * (m - m.transpose());
        const Matrix minus = 0.5 * (m + m.transpose());
        return Matrix(plus + alpha * minus);
      },
      form.label() + "|alpha");
}

double pairing_defect(const Loop& loop, const ConnectionForm& form, const MetricField& metric, const Vector& v,
                      const Vector& w, int steps) {
  const Index n = form.fiber_dim();
  if (v.size() != n || w.size() != n || !v.allFinite() || !w.allFinite()) {
    throw Error(ErrorKind::input, "pairing vectors must be finite with the fiber dimension");
  }
  const Matrix g = metric(loop.base());
  if (g.rows() != n) throw Error(ErrorKind::order_mismatch, "metric order differs from fiber dimension");
  const Eigen::LLT<Matrix> llt(g);
  const Matrix lt = llt.matrixU();
  const Vector ev = lt * v;
  const Vector ew = lt * w;
  const Vector dual_v = transport(loop.curve(), dual_form(form), ev, steps);
  const Vector primal_w = transport(loop.curve(), form, ew, steps);
  return dual_v.dot(primal_w) - ev.dot(ew);
}

}  // namespace cartan
