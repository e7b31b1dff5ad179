#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace coopadapt {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

/// Number of inertial parameters of one planar rigid body (m, hx, hy, izz).
inline constexpr int kParamsPerBody = 4;

/// Raised when H (or another matrix that must be inverted) is numerically singular.
class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by scenario parsing and validation.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when the integrator produces non-finite or runaway states.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double t) : std::runtime_error(what), time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline void require_size(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want) {
    throw std::invalid_argument(std::string(what) + ": expected size " + std::to_string(want) +
                                ", got " + std::to_string(got));
  }
}

}  // namespace detail

/// True when `m` is square, symmetric to 1e-12 relative, and has strictly positive eigenvalues.
bool is_spd(const Mat& m);

/// Throws std::invalid_argument naming `what` unless `m` is symmetric positive definite.
void require_spd(const Mat& m, const std::string& what);

/// Same as require_spd but also admits the exact zero matrix (decoupled networks use K = 0).
void require_spd_or_zero(const Mat& m, const std::string& what);

}  // namespace coopadapt
