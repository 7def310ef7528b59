#include "axihelm/linalg.hpp"

#include <stdexcept>
#include <vector>

#define LAPACK_COMPLEX_CPP
#include <lapacke.h>

namespace axihelm {

Eigen::VectorXd singular_values(const Eigen::MatrixXcd& A) {
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    Eigen::MatrixXcd work = A;
    Eigen::VectorXd s(std::min(m, n));
    const int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n,
                                    reinterpret_cast<lapack_complex_double*>(work.data()), m,
                                    s.data(), nullptr, 1, nullptr, 1);
    if (info != 0) throw std::runtime_error("zgesdd (values) failed, info=" + std::to_string(info));
    return s;
}

double cond2(const Eigen::MatrixXcd& A) {
    Eigen::VectorXd s = singular_values(A);
    const double smin = s(s.size() - 1);
    if (smin == 0.0) return std::numeric_limits<double>::infinity();
    return s(0) / smin;
}

SmallestSingular smallest_singular_triplet(const Eigen::MatrixXcd& A) {
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    Eigen::MatrixXcd work = A;
    Eigen::VectorXd s(std::min(m, n));
    Eigen::MatrixXcd U(m, std::min(m, n));
    Eigen::MatrixXcd VT(std::min(m, n), n);
    const int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', m, n,
                                    reinterpret_cast<lapack_complex_double*>(work.data()), m,
                                    s.data(),
                                    reinterpret_cast<lapack_complex_double*>(U.data()), m,
                                    reinterpret_cast<lapack_complex_double*>(VT.data()),
                                    std::min(m, n));
    if (info != 0) throw std::runtime_error("zgesdd (vectors) failed, info=" + std::to_string(info));
    SmallestSingular out;
    const int last = static_cast<int>(s.size()) - 1;
    out.sigma_min = s(last);
    out.sigma_second = s(std::max(0, last - 1));
    out.sigma_max = s(0);
    out.right_vector = VT.row(last).conjugate().transpose();
    return out;
}

}  // namespace axihelm
