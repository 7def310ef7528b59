#pragma once

#include <functional>
#include <vector>

#include "axihelm/assembly.hpp"

namespace axihelm {

struct EigenSearchResult {
    double k_low = 0.0, k_up = 0.0;
    double k_star = 0.0;
    double cond_at_star = 0.0;
    std::vector<std::pair<double, double>> trace;  // (k, cond) in evaluation order
    Eigen::VectorXcd rho;                          // homogeneous density at k_star
    double sigma_min = 0.0, sigma_second = 0.0;
    bool converged = false;
    bool degenerate_warning = false;
};

/// 2-norm condition number of the system matrix at one wavenumber.
double condition_objective(const GeneratingCurve& curve, int n_pan, int mode_n, double k,
                           int N_ratio, const AssemblyOptions& opts = AssemblyOptions{});

/// Golden-section maximization of a scalar objective on [k_low, k_up] down to
/// bracket width tol_k. Throws if the interior values dip below both ends
/// (non-unimodal bracket).
EigenSearchResult golden_section_max(const std::function<double(double)>& objective,
                                     double k_low, double k_up, double tol_k);

/// Full search: maximize cond over the bracket, then extract the right
/// singular vector of the smallest singular value at the located wavenumber.
EigenSearchResult find_eigenwavenumber(const GeneratingCurve& curve, int n_pan, int mode_n,
                                       double k_low, double k_up, int N_ratio,
                                       double tol_k = 0.0,
                                       const AssemblyOptions& opts = AssemblyOptions{});

/// Homogeneous density at an assembled (near-singular) system.
EigenSearchResult extract_homogeneous_density(const SystemMatrix& system);

class EigenSearchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace axihelm
