#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "ioc/errors.hpp"

namespace ioc {

using StateVector = Eigen::VectorXd;
using ControlVector = Eigen::VectorXd;

enum class TimeRegime { kDiscrete, kContinuous };

inline std::string to_string(TimeRegime regime) {
  return regime == TimeRegime::kDiscrete ? "discrete" : "continuous";
}

namespace detail {

inline void require_finite(const Eigen::Ref<const Eigen::MatrixXd>& m,
                           const char* what) {
  if (!m.allFinite()) {
    throw DimensionError(std::string(what) + " has non-finite entries");
  }
}

inline void require_length(const Eigen::VectorXd& v, Eigen::Index n,
                           const char* what) {
  if (v.size() != n) {
    throw DimensionError(std::string(what) + " has length " +
                         std::to_string(v.size()) + ", expected " +
                         std::to_string(n));
  }
  require_finite(v, what);
}

}  // namespace detail

// Validated symmetric positive definite weight matrix P of the quadratic
// value function. Symmetry is accepted within 1e-12 relative and the stored
// matrix is the symmetric part (P + P^T)/2; definiteness is established by a
// Cholesky factorization with strictly positive pivots.
class WeightMatrix {
 public:
  explicit WeightMatrix(const Eigen::MatrixXd& raw) {
    if (raw.rows() != raw.cols()) {
      throw DimensionError("weight matrix must be square, got " +
                           std::to_string(raw.rows()) + "x" +
                           std::to_string(raw.cols()));
    }
    if (raw.rows() == 0) {
      throw DimensionError("weight matrix must be non-empty");
    }
    detail::require_finite(raw, "weight matrix");

    const double scale = std::max(1.0, raw.cwiseAbs().maxCoeff());
    const double asym = (raw - raw.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale) {
      throw NotSymmetricError("weight matrix is not symmetric (max |P - P^T| = " +
                              std::to_string(asym) + ")");
    }

    p_ = 0.5 * (raw + raw.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(p_);
    if (llt.info() != Eigen::Success) {
      throw NotPositiveDefiniteError(
          "weight matrix is not positive definite (Cholesky factorization "
          "failed)");
    }
  }

  const Eigen::MatrixXd& matrix() const { return p_; }
  Eigen::Index size() const { return p_.rows(); }

 private:
  Eigen::MatrixXd p_;
};

// Same check exposed as the free-function entry point.
inline WeightMatrix validate_weight(const Eigen::MatrixXd& raw) {
  return WeightMatrix(raw);
}

// <a,b>_P = b^T P a. Symmetric in (a,b) since P is.
inline double p_inner(const StateVector& a, const StateVector& b,
                      const WeightMatrix& p) {
  detail::require_length(a, p.size(), "first vector");
  detail::require_length(b, p.size(), "second vector");
  return b.dot(p.matrix() * a);
}

// ||a||_P = sqrt(a^T P a); the tiny negative roundoff near a = 0 is clamped.
inline double p_norm(const StateVector& a, const WeightMatrix& p) {
  return std::sqrt(std::max(0.0, p_inner(a, a, p)));
}

// V*(x) = x^T P x with gradient 2 P x.
class QuadraticValueFunction {
 public:
  explicit QuadraticValueFunction(WeightMatrix p) : p_(std::move(p)) {}

  double operator()(const StateVector& x) const {
    detail::require_length(x, p_.size(), "state");
    return x.dot(p_.matrix() * x);
  }

  StateVector gradient(const StateVector& x) const {
    detail::require_length(x, p_.size(), "state");
    return 2.0 * (p_.matrix() * x);
  }

  const WeightMatrix& weight() const { return p_; }

 private:
  WeightMatrix p_;
};

// Discount factor with its regime-dependent admissible range:
// discrete time needs 0 < gamma <= 1, continuous time needs gamma >= 0.
struct DiscountFactor {
  double value;
  TimeRegime regime;

  static DiscountFactor checked(double value, TimeRegime regime) {
    if (!std::isfinite(value)) {
      throw ConfigError("discount factor must be finite");
    }
    if (regime == TimeRegime::kDiscrete && (value <= 0.0 || value > 1.0)) {
      throw ConfigError("discrete-time discount factor must satisfy 0 < gamma <= 1, got " +
                        std::to_string(value));
    }
    if (regime == TimeRegime::kContinuous && value < 0.0) {
      throw ConfigError("continuous-time discount factor must satisfy gamma >= 0, got " +
                        std::to_string(value));
    }
    return DiscountFactor{value, regime};
  }
};

}  // namespace ioc
