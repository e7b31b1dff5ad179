#include "coopadapt/types.hpp"

#include <cmath>

namespace coopadapt {

bool is_spd(const Mat& m) {
  if (m.rows() == 0 || m.rows() != m.cols() || !m.allFinite()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) return false;
  Eigen::SelfAdjointEigenSolver<Mat> eig(m, Eigen::EigenvaluesOnly);
  return eig.info() == Eigen::Success && eig.eigenvalues().minCoeff() > 0.0;
}

void require_spd(const Mat& m, const std::string& what) {
  if (!is_spd(m)) throw std::invalid_argument(what + " must be symmetric positive definite");
}

void require_spd_or_zero(const Mat& m, const std::string& what) {
  if (m.rows() > 0 && m.rows() == m.cols() && m.isZero(0.0)) return;
  require_spd(m, what);
}

}  // namespace coopadapt
