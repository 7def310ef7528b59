#pragma once

#include <Eigen/Dense>
#include <complex>

namespace axihelm {

/// Singular values of a dense complex matrix, descending.
Eigen::VectorXd singular_values(const Eigen::MatrixXcd& A);

/// 2-norm condition number from the full singular value decomposition.
double cond2(const Eigen::MatrixXcd& A);

struct SmallestSingular {
    double sigma_min = 0.0;
    double sigma_second = 0.0;  // second-smallest, for degeneracy checks
    double sigma_max = 0.0;
    Eigen::VectorXcd right_vector;
};

/// Right singular vector of the smallest singular value.
SmallestSingular smallest_singular_triplet(const Eigen::MatrixXcd& A);

}  // namespace axihelm
