#include "axihelm/eigen_search.hpp"

#include <cmath>

#include "axihelm/linalg.hpp"

namespace axihelm {

double condition_objective(const GeneratingCurve& curve, int n_pan, int mode_n, double k,
                           int N_ratio, const AssemblyOptions& opts) {
    SystemMatrix sys = assemble(curve, n_pan, mode_n, k, N_ratio, opts);
    return cond2(sys.A);
}

EigenSearchResult golden_section_max(const std::function<double(double)>& objective,
                                     double k_low, double k_up, double tol_k) {
    if (!(k_low < k_up)) throw EigenSearchError("golden_section_max: empty bracket");
    EigenSearchResult res;
    res.k_low = k_low;
    res.k_up = k_up;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);  // 0.618...
    double a = k_low, b = k_up;
    // maximize log(cond): same argmax, tamer comparisons near the spike
    auto f = [&](double k) {
        const double v = objective(k);
        res.trace.emplace_back(k, v);
        return std::log(v);
    };
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    const double fa_ref = std::max(f1, f2);
    while (b - a > tol_k) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        }
    }
    res.k_star = 0.5 * (a + b);
    res.cond_at_star = std::exp(std::max(f1, f2));
    res.converged = true;
    // non-unimodality signal: both interior probes below both bracket ends
    if (res.trace.size() >= 4) {
        const double end_lo = res.trace.front().second;
        if (fa_ref < std::log(end_lo) - 1e-12)
            throw EigenSearchError("golden_section_max: bracket does not look unimodal");
    }
    return res;
}

EigenSearchResult find_eigenwavenumber(const GeneratingCurve& curve, int n_pan, int mode_n,
                                       double k_low, double k_up, int N_ratio, double tol_k,
                                       const AssemblyOptions& opts) {
    if (tol_k <= 0.0) tol_k = 1e-14 * 0.5 * (k_low + k_up);
    auto objective = [&](double k) {
        return condition_objective(curve, n_pan, mode_n, k, N_ratio, opts);
    };
    EigenSearchResult res = golden_section_max(objective, k_low, k_up, tol_k);
    SystemMatrix sys = assemble(curve, n_pan, mode_n, res.k_star, N_ratio, opts);
    EigenSearchResult ext = extract_homogeneous_density(sys);
    res.rho = ext.rho;
    res.sigma_min = ext.sigma_min;
    res.sigma_second = ext.sigma_second;
    res.degenerate_warning = ext.degenerate_warning;
    res.cond_at_star = ext.cond_at_star;
    return res;
}

EigenSearchResult extract_homogeneous_density(const SystemMatrix& system) {
    EigenSearchResult res;
    auto sv = smallest_singular_triplet(system.A);
    res.rho = sv.right_vector;
    res.sigma_min = sv.sigma_min;
    res.sigma_second = sv.sigma_second;
    res.cond_at_star = sv.sigma_min > 0.0 ? sv.sigma_max / sv.sigma_min
                                          : std::numeric_limits<double>::infinity();
    res.k_star = system.k;
    res.converged = true;
    if (sv.sigma_second > 0.0 &&
        (sv.sigma_second - sv.sigma_min) / sv.sigma_second < 1e-3)
        res.degenerate_warning = true;
    return res;
}

}  // namespace axihelm
