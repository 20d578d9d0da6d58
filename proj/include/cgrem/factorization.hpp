#pragma once

#include <Eigen/Dense>

namespace cgrem {

// Rank-revealing Cholesky with diagonal pivoting. Stops once every
// remaining diagonal entry of the Schur complement is at or below
// truncation * max_diagonal; the columns produced so far satisfy
// C ~= factor * factor^T, rows in the original order.
struct PivotedCholesky {
  Eigen::MatrixXd factor;
  int rank = 0;
  double max_diagonal = 0.0;
  double min_pivot = 0.0;  // smallest accepted pivot (0 when rank == 0)
  // Untreated Schur complement summary; both ~0 for a PSD input.
  double residual_min_diagonal = 0.0;
  double residual_max_abs = 0.0;
};

PivotedCholesky pivoted_cholesky(const Eigen::MatrixXd& c, double truncation);

// Largest |C - C^T| entry.
double asymmetry(const Eigen::MatrixXd& c);

}  // namespace cgrem
