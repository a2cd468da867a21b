#pragma once

// Chart-local connection forms, curves and loops, parallel transport, and the
// dual / alpha constructions.
//
// A connection form on a chart of dimension d with fiber dimension n assigns
// d matrices omega_1(x), ..., omega_d(x) to each point. Parallel vectors along
// a curve gamma satisfy
//
//     dV/dt + sum_i omega_i(gamma(t)) dgamma^i/dt V = 0,
//
// so skew-valued forms generate rotations. dual_form, omega_minus and
// alpha_form act pointwise through the Cartan split and presuppose a form
// written in a frame that is orthonormal for the fiber metric.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cartan/liealg.hpp"

namespace cartan {

using ChartPoint = Vector;

/// Axis-aligned box of admissible chart coordinates.
class Domain {
 public:
  Domain(Vector lower, Vector upper);

  Index dim() const noexcept { return lower_.size(); }
  const Vector& lower() const noexcept { return lower_; }
  const Vector& upper() const noexcept { return upper_; }
  bool contains(const ChartPoint& x, double slack = 1e-12) const;
  /// Throws Error{domain} naming the offending point.
  void require(const ChartPoint& x, std::string_view context) const;

 private:
  Vector lower_;
  Vector upper_;
};

enum class FormKind { closed_form, grid_sampled };

class ConnectionForm {
 public:
  using Evaluator = std::function<std::vector<Matrix>(const ChartPoint&)>;

  ConnectionForm(Index base_dim, Index fiber_dim, Domain domain, Evaluator eval,
                 FormKind kind = FormKind::closed_form, std::string label = {});

  static ConnectionForm zero(Index fiber_dim, Domain domain);
  /// omega_i(x) = values[i] everywhere.
  static ConnectionForm constant(std::vector<Matrix> values, Domain domain);

  Index base_dim() const noexcept { return base_dim_; }
  Index fiber_dim() const noexcept { return fiber_dim_; }
  const Domain& domain() const noexcept { return domain_; }
  FormKind kind() const noexcept { return kind_; }
  const std::string& label() const noexcept { return label_; }

  /// Domain-checked evaluation; the result holds base_dim finite matrices of
  /// order fiber_dim.
  std::vector<Matrix> operator()(const ChartPoint& x) const;
  /// sum_i omega_i(x) velocity^i
  Matrix contract(const ChartPoint& x, const Vector& velocity) const;

  /// New form with fn applied to every omega_i(x). Keeps domain and kind.
  ConnectionForm map_pointwise(std::function<Matrix(const Matrix&)> fn, std::string label) const;

 private:
  Index base_dim_;
  Index fiber_dim_;
  Domain domain_;
  std::shared_ptr<const Evaluator> eval_;
  FormKind kind_;
  std::string label_;
};

/// Node values of a grid-sampled form, row-major over the grid (last axis
/// fastest). Each node holds base_dim matrices.
struct FormGrid {
  Index base_dim = 0;
  Index fiber_dim = 0;
  Domain domain{Vector(), Vector()};
  std::vector<Index> shape;
  std::vector<std::vector<Matrix>> nodes;
};

/// Multilinear interpolant of the grid; exact at the nodes.
ConnectionForm grid_form(std::shared_ptr<const FormGrid> grid);
/// Samples form on a regular grid covering its domain.
FormGrid sample_form(const ConnectionForm& form, const std::vector<Index>& shape);

struct CurveSample {
  double t;
  ChartPoint point;
};

/// Piecewise-smooth path in chart coordinates. Polylines keep their samples;
/// each segment is a smooth piece with constant velocity.
class Curve {
 public:
  using PathFn = std::function<Vector(double)>;

  struct Piece {
    double t0;
    double t1;
    PathFn position;
    PathFn velocity;
  };

  /// Strictly increasing t, at least two samples, equal dimensions.
  static Curve polyline(std::vector<CurveSample> samples);
  static Curve parametric(double t0, double t1, PathFn position, PathFn velocity);

  double t_begin() const noexcept { return pieces_.front().t0; }
  double t_end() const noexcept { return pieces_.back().t1; }
  Index dim() const noexcept { return dim_; }
  ChartPoint start() const;
  ChartPoint end() const;
  ChartPoint position(double t) const;
  Vector velocity(double t) const;

  const std::vector<Piece>& pieces() const noexcept { return pieces_; }
  const std::optional<std::vector<CurveSample>>& samples() const noexcept { return samples_; }

  /// Same path traversed backwards over the same parameter interval.
  Curve reversed() const;
  /// first, then second (shifted in t); endpoints must agree to 1e-12.
  friend Curve concatenate(const Curve& first, const Curve& second);

 private:
  Curve() = default;
  const Piece& piece_at(double t) const;

  Index dim_ = 0;
  std::vector<Piece> pieces_;
  std::optional<std::vector<CurveSample>> samples_;
};

Curve concatenate(const Curve& first, const Curve& second);

/// Curve whose endpoints coincide to 1e-12 in every coordinate.
class Loop {
 public:
  static constexpr double kClosureTolerance = 1e-12;

  /// Throws Error{closure} if the curve is open.
  explicit Loop(Curve curve);

  const Curve& curve() const noexcept { return curve_; }
  const ChartPoint& base() const noexcept { return base_; }
  Loop reversed() const { return Loop(curve_.reversed()); }
  /// this loop first, then next.
  Loop then(const Loop& next) const { return Loop(concatenate(curve_, next.curve_)); }

 private:
  Curve curve_;
  ChartPoint base_;
};

/// Fiber inner product G(x), symmetric positive definite.
class MetricField {
 public:
  using Evaluator = std::function<Matrix(const ChartPoint&)>;

  explicit MetricField(Evaluator eval);
  static MetricField euclidean(Index n);

  /// Validates symmetry (1e-12) and positive definiteness.
  Matrix operator()(const ChartPoint& x) const;

 private:
  std::shared_ptr<const Evaluator> eval_;
};

/// Invertible change of fiber frame A(x): new frame vectors are the columns of A.
using GaugeField = std::function<Matrix(const ChartPoint&)>;

Vector transport(const Curve& curve, const ConnectionForm& form, const Vector& v0, int steps);
GroupElement transport_matrix(const Curve& curve, const ConnectionForm& form, int steps);
GroupElement loop_holonomy(const Loop& loop, const ConnectionForm& form, int steps);
/// Throws Error{closure} for open curves.
GroupElement loop_holonomy(const Curve& curve, const ConnectionForm& form, int steps);

/// omega~_i = A^{-1} omega_i A + A^{-1} d_i A with central differences of step fd_step.
ConnectionForm frame_change(const ConnectionForm& form, GaugeField gauge, double fd_step);

/// omega*_i = theta(omega_i)
ConnectionForm dual_form(const ConnectionForm& form);
/// Symmetric (dilation) part of each omega_i.
ConnectionForm omega_minus(const ConnectionForm& form);
/// Skew (rotation) part of each omega_i.
ConnectionForm omega_plus(const ConnectionForm& form);
/// omega^alpha_i = omega+_i + alpha omega-_i
ConnectionForm alpha_form(const ConnectionForm& form, double alpha);

/// <transport of v under dual_form(form), transport of w under form> - <v, w>,
/// with v, w given in chart coordinates at the loop base and G taken there.
/// form must be written in the G-orthonormal frame obtained from the Cholesky
/// factor of G; vectors are converted with the same factor.
double pairing_defect(const Loop& loop, const ConnectionForm& form, const MetricField& metric, const Vector& v,
                      const Vector& w, int steps);

}  // namespace cartan
