#include "cgrem/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "cgrem/error.hpp"

namespace cgrem {

double asymmetry(const Eigen::MatrixXd& c) {
  if (c.rows() != c.cols()) throw DimensionError("matrix is not square");
  return (c - c.transpose()).cwiseAbs().maxCoeff();
}

PivotedCholesky pivoted_cholesky(const Eigen::MatrixXd& c, double truncation) {
  if (c.rows() != c.cols()) throw DimensionError("matrix is not square");
  const Eigen::Index dim = c.rows();
  PivotedCholesky out;
  out.max_diagonal = dim == 0 ? 0.0 : c.diagonal().cwiseAbs().maxCoeff();
  const double threshold = truncation * out.max_diagonal;

  Eigen::MatrixXd residual = c;
  Eigen::MatrixXd factor(dim, dim);
  std::vector<bool> done(dim, false);
  out.min_pivot = std::numeric_limits<double>::infinity();

  for (Eigen::Index step = 0; step < dim; ++step) {
    Eigen::Index pivot = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (!done[i] && residual(i, i) > best) {
        best = residual(i, i);
        pivot = i;
      }
    }
    if (pivot < 0 || !(best > threshold) || best <= 0.0) break;
    Eigen::VectorXd column = residual.col(pivot) / std::sqrt(best);
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (done[i]) column(i) = 0.0;
    }
    residual.noalias() -= column * column.transpose();
    done[pivot] = true;
    residual.row(pivot).setZero();
    residual.col(pivot).setZero();
    factor.col(out.rank) = column;
    ++out.rank;
    out.min_pivot = std::min(out.min_pivot, best);
  }
  if (out.rank == 0) out.min_pivot = 0.0;
  out.factor = factor.leftCols(out.rank);

  out.residual_min_diagonal = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (done[i]) continue;
    out.residual_min_diagonal = std::min(out.residual_min_diagonal, residual(i, i));
    for (Eigen::Index j = 0; j < dim; ++j) {
      if (!done[j]) {
        out.residual_max_abs = std::max(out.residual_max_abs, std::abs(residual(i, j)));
      }
    }
  }
  if (out.rank == dim) out.residual_min_diagonal = 0.0;
  return out;
}

}  // namespace cgrem
