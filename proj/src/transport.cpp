// Fixed-step classical RK4 for dY/dt = -Omega(t) Y with
// Omega(t) = sum_i omega_i(gamma(t)) gamma'^i(t).
//
// The step budget is shared among the smooth pieces of the curve in
// proportion to their parameter length (largest remainder, at least one step
// per piece), so that no step straddles a corner.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cartan/connection.hpp"

namespace cartan {

namespace {

std::vector<int> allocate_steps(const Curve& curve, int steps) {
  const auto& pieces = curve.pieces();
  const std::size_t count = pieces.size();
  const double total = curve.t_end() - curve.t_begin();
  const int budget = std::max<int>(steps, static_cast<int>(count));
  std::vector<int> alloc(count, 1);
  int remaining = budget - static_cast<int>(count);
  std::vector<std::pair<double, std::size_t>> remainders;
  remainders.reserve(count);
  int assigned = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double share = static_cast<double>(remaining) * (pieces[k].t1 - pieces[k].t0) / total;
    const int whole = static_cast<int>(std::floor(share));
    alloc[k] += whole;
    assigned += whole;
    remainders.emplace_back(share - whole, k);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int r = 0; r < remaining - assigned; ++r) ++alloc[remainders[static_cast<std::size_t>(r)].second];
  return alloc;
}

Matrix generator(const Curve::Piece& piece, const ConnectionForm& form, double t) {
  return form.contract(piece.position(t), piece.velocity(t));
}

template <class State>
void require_finite(const State& y, double t) {
  if (!y.allFinite()) {
    std::ostringstream os;
    os.precision(17);
    os << "transported state became non-finite at t = " << t;
    throw Error(ErrorKind::blow_up, os.str());
  }
}

template <class State>
State integrate(const Curve& curve, const ConnectionForm& form, State y, int steps) {
  if (steps < 1) throw Error(ErrorKind::input, "transport needs at least one step");
  if (curve.dim() != form.base_dim()) {
    throw Error(ErrorKind::order_mismatch, "curve dimension differs from the form's base dimension");
  }
  const std::vector<int> alloc = allocate_steps(curve, steps);
  const auto& pieces = curve.pieces();
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const Curve::Piece& piece = pieces[k];
    const int n = alloc[k];
    const double h = (piece.t1 - piece.t0) / n;
    Matrix g0 = generator(piece, form, piece.t0);
    for (int m = 0; m < n; ++m) {
      const double t = piece.t0 + m * h;
      const double t_next = m + 1 == n ? piece.t1 : piece.t0 + (m + 1) * h;
      const Matrix gm = generator(piece, form, t + 0.5 * h);
      const Matrix g1 = generator(piece, form, t_next);
      const State k1 = -(g0 * y);
      const State k2 = -(gm * (y + (0.5 * h) * k1));
      const State k3 = -(gm * (y + (0.5 * h) * k2));
      const State k4 = -(g1 * (y + h * k3));
      y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      require_finite(y, t_next);
      g0 = g1;
    }
  }
  return y;
}

}  // namespace

Vector transport(const Curve& curve, const ConnectionForm& form, const Vector& v0, int steps) {
  if (v0.size() != form.fiber_dim() || !v0.allFinite()) {
    throw Error(ErrorKind::input, "initial vector must be finite with the fiber dimension");
  }
  return integrate<Vector>(curve, form, v0, steps);
}

GroupElement transport_matrix(const Curve& curve, const ConnectionForm& form, int steps) {
  const Index n = form.fiber_dim();
  return GroupElement(integrate<Matrix>(curve, form, Matrix::Identity(n, n), steps));
}

GroupElement loop_holonomy(const Loop& loop, const ConnectionForm& form, int steps) {
  return transport_matrix(loop.curve(), form, steps);
}

GroupElement loop_holonomy(const Curve& curve, const ConnectionForm& form, int steps) {
  return loop_holonomy(Loop(curve), form, steps);
}

}  // namespace cartan
