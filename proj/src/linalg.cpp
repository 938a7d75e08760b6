#include "focal/linalg.hpp"

namespace focal {

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double symmetry_defect(const Matrix& m) {
  if (m.rows() != m.cols()) throw Error("symmetry_defect: matrix not square");
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

Matrix orthonormalize(const Matrix& m, double drop_tol) {
  if (m.cols() == 0) return m;
  double scale = 0.0;
  for (int j = 0; j < m.cols(); ++j) scale = std::max(scale, m.col(j).norm());
  if (scale == 0.0) throw Error("orthonormalize: all columns vanish");

  Matrix q = m;
  for (int j = 0; j < q.cols(); ++j) {
    for (int i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
    // second pass for numerical orthogonality
    for (int i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
    double nrm = q.col(j).norm();
    if (nrm <= drop_tol * scale)
      throw Error("orthonormalize: columns are not linearly independent");
    q.col(j) /= nrm;
  }
  return q;
}

Matrix complement_basis(const Matrix& basis, int dim) {
  const int m = static_cast<int>(basis.cols());
  if (m == 0) return Matrix::Identity(dim, dim);
  if (m == dim) return Matrix(dim, 0);
  Eigen::HouseholderQR<Matrix> qr(basis);
  Matrix q = qr.householderQ();
  return q.rightCols(dim - m);
}

Vector pinv_solve(const Matrix& a, const Vector& b, double cut) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  Vector coeff = svd.matrixU().transpose() * b;
  for (int i = 0; i < sv.size(); ++i)
    coeff(i) = sv(i) > cut ? coeff(i) / sv(i) : 0.0;
  return svd.matrixV() * coeff;
}

}  // namespace focal
