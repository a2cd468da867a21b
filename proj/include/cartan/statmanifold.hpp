#pragma once

// Statistical families as Riemannian manifolds: Fisher metric, Amari-Chentsov
// tensor, Levi-Civita and alpha-Christoffel symbols, and the resulting
// connection forms in coordinate or metric-orthonormal frames.
//
// Expectations use each family's quadrature rule; Christoffel symbols come
// from central differences of the quadrature metric, not from closed forms.

#include <memory>
#include <string_view>
#include <vector>

#include "cartan/connection.hpp"
#include "cartan/quadrature.hpp"

namespace cartan {

class StatFamily {
 public:
  virtual ~StatFamily() = default;

  virtual std::string_view name() const noexcept = 0;
  virtual Index param_dim() const noexcept = 0;
  /// Parameter-domain guard (sigma >= 1e-3 for gaussian1d, p in [1e-6, 1 - 1e-6]
  /// for bernoulli).
  virtual bool in_domain(const Vector& params) const = 0;
  virtual double log_density(const Vector& params, double x) const = 0;
  /// Gradient of the log-density with respect to the parameters.
  virtual Vector score(const Vector& params, double x) const = 0;
  /// Observations and probabilities whose weighted sums are expectations
  /// under params.
  virtual QuadratureRule expectation_rule(const Vector& params) const = 0;
  /// Rule for plain integration over observations (Lebesgue measure for
  /// continuous families, counting measure for discrete ones).
  virtual QuadratureRule integration_rule(const Vector& params) const = 0;

  /// Throws Error{domain} when params fail the guard.
  void require_domain(const Vector& params, std::string_view context) const;
};

/// N(mu, sigma^2), params (mu, sigma).
class Gaussian1d final : public StatFamily {
 public:
  static constexpr int kDefaultNodes = 64;
  static constexpr double kSigmaFloor = 1e-3;

  explicit Gaussian1d(int nodes = kDefaultNodes);

  std::string_view name() const noexcept override { return "gaussian1d"; }
  Index param_dim() const noexcept override { return 2; }
  bool in_domain(const Vector& params) const override;
  double log_density(const Vector& params, double x) const override;
  Vector score(const Vector& params, double x) const override;
  QuadratureRule expectation_rule(const Vector& params) const override;
  QuadratureRule integration_rule(const Vector& params) const override;

 private:
  QuadratureRule hermite_;
};

/// Bernoulli(p), params (p).
class Bernoulli final : public StatFamily {
 public:
  static constexpr double kEdge = 1e-6;

  std::string_view name() const noexcept override { return "bernoulli"; }
  Index param_dim() const noexcept override { return 1; }
  bool in_domain(const Vector& params) const override;
  double log_density(const Vector& params, double x) const override;
  Vector score(const Vector& params, double x) const override;
  QuadratureRule expectation_rule(const Vector& params) const override;
  QuadratureRule integration_rule(const Vector& params) const override;
};

/// Registry: "gaussian1d" or "bernoulli". Throws Error{input} otherwise.
std::shared_ptr<const StatFamily> make_family(std::string_view key);

/// d x d x d array; element (a, b, c) at index (a * d + b) * d + c.
class Tensor3 {
 public:
  explicit Tensor3(Index dim = 0) : dim_(dim), data_(static_cast<std::size_t>(dim * dim * dim), 0.0) {}

  Index dim() const noexcept { return dim_; }
  double& operator()(Index a, Index b, Index c) { return data_[flat(a, b, c)]; }
  double operator()(Index a, Index b, Index c) const { return data_[flat(a, b, c)]; }

 private:
  std::size_t flat(Index a, Index b, Index c) const {
    return static_cast<std::size_t>((a * dim_ + b) * dim_ + c);
  }
  Index dim_;
  std::vector<double> data_;
};

struct FisherMetricValue {
  Matrix g;
};

/// T(i, j, k) = E[d_i l d_j l d_k l]
struct AmariTensorValue {
  Tensor3 t;
};

/// gamma(k, i, j) = Gamma^k_{ij}; k is the upper index.
struct ChristoffelValue {
  Tensor3 gamma;
};

enum class Frame { coordinate, orthonormal };

inline constexpr double kDefaultFdStep = 1e-5;

/// Integral of exp(l) under the family's integration rule; 1 for a normalized density.
double expectation_mass(const StatFamily& family, const Vector& params);
/// E[d_i l] for every i.
Vector score_mean(const StatFamily& family, const Vector& params);

FisherMetricValue fisher_metric(const StatFamily& family, const Vector& params);
AmariTensorValue amari_tensor(const StatFamily& family, const Vector& params);
ChristoffelValue levi_civita(const StatFamily& family, const Vector& params, double fd_step = kDefaultFdStep);
/// Gamma^(alpha)k_ij = Gamma^LC k_ij - (alpha / 2) g^{kl} T_ijl
ChristoffelValue alpha_christoffel(const StatFamily& family, double alpha, const Vector& params,
                                   double fd_step = kDefaultFdStep);

/// Frame that is orthonormal for the Fisher metric: A = L^{-T} with g = L L^T.
GaugeField orthonormal_gauge(std::shared_ptr<const StatFamily> family);
/// Fisher metric as a fiber metric on the tangent bundle.
MetricField fisher_metric_field(std::shared_ptr<const StatFamily> family);

/// Coordinate frame: (omega_i)_{kj} = Gamma^(alpha)k_ij. Orthonormal frame:
/// the coordinate form under frame_change with orthonormal_gauge.
ConnectionForm connection_form_of(std::shared_ptr<const StatFamily> family, double alpha, const Domain& domain,
                                  Frame frame, double fd_step = kDefaultFdStep);

/// Symmetric-valued form (D_i)_{jk} = (L^{-1} T_i L^{-T})_{jk} with
/// (T_i)_{jk} = T_ijk. In the orthonormal frame, omega_minus of the alpha form
/// equals -alpha/2 times this.
ConnectionForm amari_form(std::shared_ptr<const StatFamily> family, const Domain& domain);

/// d_k g_ij - g_lj Gamma^(alpha)l_ki - g_il Gamma^(-alpha)l_kj
double metric_duality_defect(const StatFamily& family, double alpha, const Vector& params, Index i, Index j,
                             Index k, double fd_step = kDefaultFdStep);

}  // namespace cartan
