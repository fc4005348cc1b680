#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bandit_subspace/domain.hpp"
#include "bandit_subspace/error.hpp"
#include "bandit_subspace/random.hpp"
#include "bandit_subspace/spectral.hpp"

namespace bandit_subspace {

struct SupportPoint {
  Vector x;
  double p = 0.0;
};

/// Parameters of the biased-coin construction, kept with the distribution so
/// the identified-coin metric can be evaluated against it.
struct CoinMetadata {
  int k = 1;
  double alpha = 0.0;
  std::vector<int> signs;    // b_j in {-1, +1}, length k
  std::vector<Vector> basis; // u_1..u_2k
};

/// Finite-support distribution over instances. Immutable once built.
class DistributionSpec {
 public:
  int dim() const noexcept { return d_; }
  const std::vector<SupportPoint>& support() const noexcept { return support_; }
  const std::string& tag() const noexcept { return tag_; }
  const std::optional<CoinMetadata>& coin() const noexcept { return coin_; }

  /// Index of the support point selected by a uniform draw u in [0, 1).
  std::size_t locate(double u) const {
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) {
      // u beyond the rounded total: take the last point with positive mass.
      std::size_t i = support_.size();
      while (i > 0 && support_[i - 1].p <= 0.0) --i;
      return i - 1;
    }
    return static_cast<std::size_t>(it - cdf_.begin());
  }

  const Vector& draw(CounterRng& rng) const { return support_[locate(rng.uniform01())].x; }

 private:
  friend DistributionSpec make_finite_support(std::vector<SupportPoint>, const DomainSpec&,
                                              std::string);
  friend DistributionSpec with_coin_metadata(DistributionSpec, CoinMetadata);

  int d_ = 0;
  std::vector<SupportPoint> support_;
  std::vector<double> cdf_;
  std::string tag_;
  std::optional<CoinMetadata> coin_;
};

/// Validates every point against `spec` (dimension d, bound G) and the
/// probabilities against the simplex (sum 1 within 1e-12).
inline DistributionSpec make_finite_support(std::vector<SupportPoint> points,
                                            const DomainSpec& spec,
                                            std::string tag = "finite") {
  if (points.empty()) throw Error(ErrorCode::BadProbabilities, "empty support");
  double total = 0.0;
  for (const auto& pt : points) {
    validate_instance(pt.x, spec);
    if (!(pt.p >= 0.0) || !std::isfinite(pt.p)) {
      throw Error(ErrorCode::BadProbabilities, "negative or non-finite probability");
    }
    total += pt.p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorCode::BadProbabilities, "probabilities sum to " + std::to_string(total));
  }
  DistributionSpec dist;
  dist.d_ = spec.d;
  dist.tag_ = std::move(tag);
  dist.cdf_.reserve(points.size());
  double acc = 0.0;
  for (const auto& pt : points) {
    acc += pt.p;
    dist.cdf_.push_back(acc);
  }
  dist.support_ = std::move(points);
  return dist;
}

inline DistributionSpec with_coin_metadata(DistributionSpec dist, CoinMetadata meta) {
  dist.coin_ = std::move(meta);
  return dist;
}

/// Validation domain for fixtures: only d and G matter to validate_instance.
inline DomainSpec fixture_domain(int d, double G) {
  DomainSpec s;
  s.d = d;
  s.k = 1;
  s.r = 1;
  s.G = G;
  return s;
}

inline DistributionSpec point_mass(const Vector& x, double G) {
  return make_finite_support({{x, 1.0}}, fixture_domain(static_cast<int>(x.size()), G),
                             "point-mass");
}

/// Uniform over {u_s, -u_s} with u_s = sqrt(G/d) (sum_{j != s} e_j - e_s).
/// Every single coordinate is uniform on {+-sqrt(G/d)} whatever s is.
inline DistributionSpec impossibility_fixture(int d, double G, int s) {
  if (d < 1) throw Error(ErrorCode::BadParams, "d must be positive");
  if (s < 0 || s >= d) throw Error(ErrorCode::BadIndex, "planted index out of range");
  if (!(G > 0.0) || G > d) throw Error(ErrorCode::BadParams, "need 0 < G <= d");
  const double a = std::sqrt(G / d);
  Vector u = Vector::Constant(d, a);
  u[s] = -a;
  return make_finite_support({{u, 0.5}, {Vector(-u), 0.5}}, fixture_domain(d, G),
                             "impossibility(s=" + std::to_string(s + 1) + ")");
}

/// Zero vector with probability 1 - c*eps, e_s with probability c*eps.
inline DistributionSpec dyadic_fixture(int d, int s, double eps, double c = 4.0) {
  if (d < 1) throw Error(ErrorCode::BadParams, "d must be positive");
  if (s < 0 || s >= d) throw Error(ErrorCode::BadIndex, "planted index out of range");
  if (!(eps > 0.0) || eps > 0.25) throw Error(ErrorCode::BadParams, "need 0 < eps <= 1/4");
  if (!(c > 2.0)) throw Error(ErrorCode::BadParams, "need c > 2");
  const double mass = c * eps;
  if (mass > 1.0 + 1e-15) throw Error(ErrorCode::BadParams, "need c*eps <= 1");
  Vector spike = Vector::Zero(d);
  spike[s] = 1.0;
  const double p = std::min(mass, 1.0);
  char buf[96];
  std::snprintf(buf, sizeof buf, "dyadic(s=%d,eps=%.17g,c=%.17g)", s + 1, eps, c);
  return make_finite_support({{Vector::Zero(d), 1.0 - p}, {spike, p}}, fixture_domain(d, 1.0),
                             buf);
}

/// 2k orthogonal vectors with ||u_j||^2 = G and ||u_j||_inf <= 1. For G <= 1
/// these are scaled standard basis vectors; otherwise rows of a Sylvester
/// Hadamard matrix of order 2^p >= 2k, tiled across d (2^p must divide d) and
/// scaled by sqrt(G/d).
inline std::vector<Vector> default_coin_basis(int d, int k, double G) {
  if (k < 1 || 2 * k > d) throw Error(ErrorCode::BadParams, "need 1 <= k and 2k <= d");
  if (!(G > 0.0)) throw Error(ErrorCode::BadParams, "need G > 0");
  if (G > d) throw Error(ErrorCode::InfeasibleBasis, "G > d cannot satisfy ||u||_inf <= 1");
  std::vector<Vector> basis;
  basis.reserve(2 * k);
  if (G <= 1.0) {
    for (int j = 0; j < 2 * k; ++j) {
      Vector u = Vector::Zero(d);
      u[j] = std::sqrt(G);
      basis.push_back(std::move(u));
    }
    return basis;
  }
  int order = 1;
  while (order < 2 * k) order *= 2;
  if (d % order != 0) {
    throw Error(ErrorCode::InfeasibleBasis, "d = " + std::to_string(d) +
                                                " is not a multiple of Hadamard order " +
                                                std::to_string(order));
  }
  const double a = std::sqrt(G / d);
  for (int j = 0; j < 2 * k; ++j) {
    Vector u(d);
    for (int i = 0; i < d; ++i) {
      // Sylvester entry H[j][c] = (-1)^{popcount(j & c)}.
      const int col = i % order;
      u[i] = (__builtin_popcount(static_cast<unsigned>(j & col)) % 2 == 0) ? a : -a;
    }
    basis.push_back(std::move(u));
  }
  return basis;
}

/// k coins with biases (1 +- alpha)/2: coin j is picked uniformly, then u_j
/// with probability (1 + b_j alpha)/2 and u_{j+k} otherwise.
inline DistributionSpec coin_fixture(int d, int k, double G, double alpha,
                                     const std::vector<int>& signs,
                                     const std::vector<Vector>& basis) {
  if (k < 1 || 2 * k > d) throw Error(ErrorCode::BadParams, "need 1 <= k and 2k <= d");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::BadParams, "need alpha in (0,1)");
  if (static_cast<int>(signs.size()) != k) throw Error(ErrorCode::BadParams, "need k signs");
  for (int b : signs) {
    if (b != 1 && b != -1) throw Error(ErrorCode::BadParams, "signs must be +-1");
  }
  if (static_cast<int>(basis.size()) != 2 * k) throw Error(ErrorCode::BadBasis, "need 2k vectors");
  for (int i = 0; i < 2 * k; ++i) {
    if (basis[i].size() != d) throw Error(ErrorCode::BadBasis, "basis vector has wrong length");
    if (std::abs(basis[i].squaredNorm() - G) > 1e-9) {
      throw Error(ErrorCode::BadBasis, "basis vector norm^2 differs from G");
    }
    if (basis[i].cwiseAbs().maxCoeff() > 1.0 + 1e-12) {
      throw Error(ErrorCode::BadBasis, "basis vector violates ||u||_inf <= 1");
    }
    for (int j = 0; j < i; ++j) {
      if (std::abs(basis[i].dot(basis[j])) > 1e-9 * std::max(1.0, G)) {
        throw Error(ErrorCode::BadBasis, "basis vectors are not orthogonal");
      }
    }
  }
  std::vector<SupportPoint> pts;
  pts.reserve(2 * k);
  for (int j = 0; j < k; ++j) pts.push_back({basis[j], (1.0 + signs[j] * alpha) / (2.0 * k)});
  for (int j = 0; j < k; ++j) {
    pts.push_back({basis[j + k], (1.0 - signs[j] * alpha) / (2.0 * k)});
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "coin(k=%d,alpha=%.17g)", k, alpha);
  auto dist = make_finite_support(std::move(pts), fixture_domain(d, G), buf);
  return with_coin_metadata(std::move(dist), CoinMetadata{k, alpha, signs, basis});
}

/// C = E[x x^T] and E||x||^2 of a distribution.
struct Moments {
  SymMatrix C;
  double mean_sq_norm = 0.0;
};

inline Moments exact_moments(const DistributionSpec& dist) {
  Matrix c = Matrix::Zero(dist.dim(), dist.dim());
  double sq = 0.0;
  for (const auto& pt : dist.support()) {
    c.noalias() += pt.p * (pt.x * pt.x.transpose());
    sq += pt.p * pt.x.squaredNorm();
  }
  return Moments{SymMatrix(c), sq};
}

/// Values of the requested coordinates of one fresh draw; duplicates allowed.
struct PartialObservation {
  std::vector<int> indices;
  std::vector<double> values;
};

inline PartialObservation observe(const DistributionSpec& dist, std::span<const int> indices,
                                  CounterRng& rng) {
  for (int i : indices) {
    if (i < 0 || i >= dist.dim()) {
      throw Error(ErrorCode::BadIndex, "coordinate " + std::to_string(i) + " outside [0, " +
                                           std::to_string(dist.dim()) + ")");
    }
  }
  const Vector& x = dist.draw(rng);
  PartialObservation obs;
  obs.indices.assign(indices.begin(), indices.end());
  obs.values.reserve(indices.size());
  for (int i : indices) obs.values.push_back(x[i]);
  return obs;
}

/// Oracle handle owned by one learner run. Counts queries; never hands out x.
class Oracle {
 public:
  explicit Oracle(const DistributionSpec& dist) : dist_(&dist) {}

  int dim() const noexcept { return dist_->dim(); }
  std::uint64_t queries() const noexcept { return queries_; }

  PartialObservation observe(std::span<const int> indices, CounterRng& rng) {
    ++queries_;
    return bandit_subspace::observe(*dist_, indices, rng);
  }

 private:
  const DistributionSpec* dist_;
  std::uint64_t queries_ = 0;
};

// JSON document: {"d": ..., "tag": ..., "support": [{"x": [...], "p": ...}]}
// plus an optional "coin" object for coin fixtures.

inline nlohmann::json to_json(const DistributionSpec& dist) {
  nlohmann::json j;
  j["d"] = dist.dim();
  j["tag"] = dist.tag();
  auto& sup = j["support"] = nlohmann::json::array();
  for (const auto& pt : dist.support()) {
    sup.push_back({{"x", std::vector<double>(pt.x.data(), pt.x.data() + pt.x.size())},
                   {"p", pt.p}});
  }
  if (const auto& coin = dist.coin()) {
    nlohmann::json c;
    c["k"] = coin->k;
    c["alpha"] = coin->alpha;
    c["signs"] = coin->signs;
    auto& b = c["basis"] = nlohmann::json::array();
    for (const auto& u : coin->basis) b.push_back(std::vector<double>(u.data(), u.data() + u.size()));
    j["coin"] = std::move(c);
  }
  return j;
}

namespace detail {
inline Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}
}  // namespace detail

/// Parses and validates a distribution document. Points are checked against
/// G (defaults to d, i.e. only the infinity-norm cap).
inline DistributionSpec distribution_from_json(const nlohmann::json& j,
                                               std::optional<double> G = std::nullopt) {
  try {
    const int d = j.at("d").get<int>();
    std::vector<SupportPoint> pts;
    for (const auto& e : j.at("support")) {
      pts.push_back({detail::to_vector(e.at("x").get<std::vector<double>>()),
                     e.at("p").get<double>()});
    }
    const std::string tag = j.value("tag", std::string("finite"));
    auto dist = make_finite_support(std::move(pts), fixture_domain(d, G.value_or(d)), tag);
    if (j.contains("coin")) {
      const auto& c = j.at("coin");
      CoinMetadata meta;
      meta.k = c.at("k").get<int>();
      meta.alpha = c.at("alpha").get<double>();
      meta.signs = c.at("signs").get<std::vector<int>>();
      for (const auto& u : c.at("basis")) meta.basis.push_back(detail::to_vector(u.get<std::vector<double>>()));
      dist = with_coin_metadata(std::move(dist), std::move(meta));
    }
    return dist;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadConfig, std::string("distribution JSON: ") + e.what());
  }
}

}  // namespace bandit_subspace
