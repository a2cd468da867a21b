#include "cartan/holonomy.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <optional>
#include <random>
#include <sstream>

#include "cartan/parallel.hpp"

namespace cartan {

namespace {

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Vector vectorize(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix unvectorize(const Vector& v, Index n) { return Eigen::Map<const Matrix>(v.data(), n, n); }

// Left singular vectors above the relative threshold.
std::vector<Matrix> span_basis(const std::vector<Vector>& columns, Index n, double tol) {
  if (columns.empty()) return {};
  Matrix stacked(n * n, static_cast<Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) stacked.col(static_cast<Index>(c)) = columns[c];
  const Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  std::vector<Matrix> basis;
  if (s.size() == 0 || !(s(0) > 0.0)) return basis;
  for (Index r = 0; r < s.size(); ++r) {
    if (s(r) > tol * s(0)) basis.push_back(unvectorize(svd.matrixU().col(r), n));
  }
  return basis;
}

}  // namespace

Loop rectangle_loop(const RectangleLoopSpec& spec, int samples_per_side, const Domain& domain) {
  const Index d = domain.dim();
  const auto [i, j] = spec.axes;
  if (spec.base.size() != d) throw Error(ErrorKind::input, "rectangle base has the wrong dimension");
  if (i == j || i < 0 || j < 0 || i >= d || j >= d) throw Error(ErrorKind::input, "rectangle axes must be distinct valid indices");
  if (!(spec.sides[0] > 0.0) || !(spec.sides[1] > 0.0) || !std::isfinite(spec.sides[0]) ||
      !std::isfinite(spec.sides[1])) {
    throw Error(ErrorKind::input, "rectangle sides must be positive and finite");
  }
  if (samples_per_side < 2) throw Error(ErrorKind::input, "rectangle needs at least two samples per side");

  const ChartPoint& p0 = spec.base;
  ChartPoint p1 = p0;
  p1(i) += spec.sides[0];
  ChartPoint p2 = p1;
  p2(j) += spec.sides[1];
  ChartPoint p3 = p0;
  p3(j) += spec.sides[1];
  for (const ChartPoint* corner : std::array<const ChartPoint*, 4>{&p0, &p1, &p2, &p3}) domain.require(*corner, "rectangle corner");

  const std::array<const ChartPoint*, 5> corners{&p0, &p1, &p2, &p3, &p0};
  std::vector<CurveSample> samples;
  samples.reserve(static_cast<std::size_t>(4 * samples_per_side + 1));
  double t = 0.0;
  samples.push_back({t, p0});
  for (int side = 0; side < 4; ++side) {
    const ChartPoint& a = *corners[static_cast<std::size_t>(side)];
    const ChartPoint& b = *corners[static_cast<std::size_t>(side + 1)];
    const double length = spec.sides[static_cast<std::size_t>(side % 2)];
    const double t_side = t;
    for (int k = 1; k <= samples_per_side; ++k) {
      const double u = static_cast<double>(k) / samples_per_side;
      ChartPoint x = k == samples_per_side ? b : ChartPoint(a + u * (b - a));
      samples.push_back({t_side + u * length, std::move(x)});
    }
    t = t_side + length;
  }
  return Loop(Curve::polyline(std::move(samples)));
}

std::vector<HolonomySample> sample_holonomy(const ConnectionForm& form, const ChartPoint& base,
                                            const SamplingOptions& options) {
  const Index d = form.base_dim();
  if (options.count < 1) throw Error(ErrorKind::input, "sample count must be at least 1");
  if (!(options.max_side > 0.0) || !std::isfinite(options.max_side)) throw Error(ErrorKind::input, "maxSide must be positive");
  if (options.steps < 1) throw Error(ErrorKind::input, "steps must be at least 1");
  if (d < 2) throw Error(ErrorKind::input, "holonomy sampling needs a base of dimension at least 2");
  form.domain().require(base, "holonomy base point");

  // Draw every spec up front so the result is independent of scheduling.
  std::mt19937_64 rng(options.seed);
  std::vector<RectangleLoopSpec> specs;
  specs.reserve(static_cast<std::size_t>(options.count));
  for (int c = 0; c < options.count; ++c) {
    RectangleLoopSpec spec;
    spec.base = base;
    const auto i = static_cast<Index>(rng() % static_cast<std::uint64_t>(d));
    auto j = static_cast<Index>(rng() % static_cast<std::uint64_t>(d - 1));
    if (j >= i) ++j;
    spec.axes = {i, j};
    spec.sides = {(1.0 - unit_uniform(rng)) * options.max_side, (1.0 - unit_uniform(rng)) * options.max_side};
    specs.push_back(std::move(spec));
  }

  std::vector<std::optional<HolonomySample>> slots(specs.size());
  parallel_for(specs.size(), options.threads, [&](std::size_t idx) {
    RectangleLoopSpec spec = specs[idx];
    for (int attempt = 0;; ++attempt) {
      const Loop loop = rectangle_loop(spec, options.samples_per_side, form.domain());
      GroupElement h = loop_holonomy(loop, form, options.steps);
      try {
        AlgebraElement log = matrix_log(h);
        slots[idx].emplace(HolonomySample{spec, std::move(h), std::move(log)});
        return;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::branch) throw;
        if (attempt >= options.max_retries) {
          std::ostringstream os;
          os << "sample " << idx << " stayed off the principal branch after " << options.max_retries
             << " halvings; use a smaller maxSide";
          throw Error(ErrorKind::sampling, os.str());
        }
      }
      spec.sides[0] *= 0.5;
      spec.sides[1] *= 0.5;
    }
  });

  std::vector<HolonomySample> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

AlgebraEstimate estimate_algebra(std::span<const AlgebraElement> logs, bool closure, double tol) {
  if (logs.empty()) throw Error(ErrorKind::input, "estimate_algebra needs at least one sample");
  const Index n = logs.front().order();
  std::vector<Vector> columns;
  columns.reserve(logs.size());
  for (const AlgebraElement& x : logs) {
    if (x.order() != n) throw Error(ErrorKind::order_mismatch, "holonomy samples have mixed orders");
    columns.push_back(vectorize(x.matrix()));
  }

  AlgebraEstimate est;
  std::vector<Matrix> basis = span_basis(columns, n, tol);
  if (closure) {
    est.closed = false;
    for (int round = 1; round <= kMaxClosureRounds; ++round) {
      std::vector<Vector> extended;
      for (const Matrix& b : basis) extended.push_back(vectorize(b));
      for (std::size_t a = 0; a < basis.size(); ++a) {
        for (std::size_t b = a + 1; b < basis.size(); ++b) {
          extended.push_back(vectorize(basis[a] * basis[b] - basis[b] * basis[a]));
        }
      }
      std::vector<Matrix> grown = span_basis(extended, n, tol);
      est.closure_rounds = round;
      const bool stable = grown.size() == basis.size();
      basis = std::move(grown);
      if (stable) {
        est.closed = true;
        break;
      }
    }
  }

  est.dimension = static_cast<Index>(basis.size());
  for (Matrix& b : basis) {
    est.so_residual = std::max(est.so_residual, (0.5 * (b + b.transpose())).norm());
    est.sl_residual = std::max(est.sl_residual, std::abs(b.trace()));
    est.basis.emplace_back(std::move(b));
  }
  est.in_so = est.so_residual <= tol;
  est.in_sl = est.sl_residual <= tol;
  return est;
}

AlgebraEstimate estimate_algebra(std::span<const HolonomySample> samples, bool closure, double tol) {
  std::vector<AlgebraElement> logs;
  logs.reserve(samples.size());
  for (const HolonomySample& s : samples) logs.push_back(s.log);
  return estimate_algebra(std::span<const AlgebraElement>(logs), closure, tol);
}

AlgebraElement curvature_probe(const ConnectionForm& form, const ChartPoint& x, Index i, Index j, double fd_step) {
  const Index d = form.base_dim();
  if (i == j || i < 0 || j < 0 || i >= d || j >= d) throw Error(ErrorKind::input, "curvature needs two distinct valid directions");
  if (!(fd_step > 0.0)) throw Error(ErrorKind::input, "finite-difference step must be positive");
  auto shifted = [&](Index axis, double delta) {
    ChartPoint y = x;
    y(axis) += delta;
    form.domain().require(y, "curvature stencil");
    return form(y);
  };
  const auto ui = static_cast<std::size_t>(i);
  const auto uj = static_cast<std::size_t>(j);
  const Matrix di_omega_j = (shifted(i, fd_step)[uj] - shifted(i, -fd_step)[uj]) / (2.0 * fd_step);
  const Matrix dj_omega_i = (shifted(j, fd_step)[ui] - shifted(j, -fd_step)[ui]) / (2.0 * fd_step);
  const std::vector<Matrix> omega = form(x);
  return AlgebraElement(Matrix(di_omega_j - dj_omega_i + omega[ui] * omega[uj] - omega[uj] * omega[ui]));
}

}  // namespace cartan
