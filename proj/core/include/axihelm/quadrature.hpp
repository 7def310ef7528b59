#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "axihelm/geometry.hpp"

namespace axihelm {

/// Canonical product-integration weight matrices on [-1, 1].
/// Row i of WL applied to samples of a polynomial p of degree < n_pt gives
/// int_{-1}^{1} p(t) log|t_i - t| dt; row i of WC gives the principal value
/// int_{-1}^{1} p(t) / (t - t_i) dt.
struct CanonicalWeightMatrices {
    Eigen::MatrixXd WL;
    Eigen::MatrixXd WC;
    std::vector<double> nodes;
};

CanonicalWeightMatrices build_canonical_matrices(std::span<const double> nodes);

/// Product-integration row factory for one canonical node set. Rows are valid
/// for targets inside [-1, 1], outside on the real line, and at complex
/// canonical coordinates (off-curve targets).
class ProductIntegration {
public:
    explicit ProductIntegration(int n_pt);

    int n_pt() const { return n_pt_; }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }
    const CanonicalWeightMatrices& canonical() const { return canon_; }

    /// Weights for int_{-1}^{1} g(t) log|x - t| dt = row . g(nodes).
    std::vector<double> log_row(double x) const;
    std::vector<double> log_row(cplx x) const;

    /// Weights for int_{-1}^{1} g(t) / (t - x) dt (principal value when x is
    /// real inside); complex row for complex x.
    std::vector<double> cauchy_row(double x) const;
    std::vector<cplx> cauchy_row(cplx x) const;

    /// Shared instance for a node count (16 and 32 are used throughout).
    static const ProductIntegration& get(int n_pt);

private:
    int n_pt_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    Eigen::MatrixXd vander_;                         // vander_(j,k) = P_k(node_j)
    Eigen::PartialPivLU<Eigen::MatrixXd> vander_t_;  // factorization of vander^T
    CanonicalWeightMatrices canon_;

    std::vector<double> solve_rowT(const std::vector<double>& rhs) const;
};

/// Legendre functions of the second kind Q_k(x), k = 0..K-1, on the cut
/// (|x| < 1, principal value sense) or off it (real |x| > 1 or complex).
/// Stable for all target locations used by the weight rows.
std::vector<double> legendre_q_cut(double x, int K);
std::vector<cplx> legendre_q_offcut(cplx x, int K);

/// Logarithmic weight corrections for on-grid targets, Appendix-style:
/// same-panel pairs depend only on canonical quantities, the diagonal adds
/// log|Delta s_i|; neighbor-panel pairs are built by mapping the target into
/// the source panel's canonical coordinate.
/// Returns w^corr such that the close-panel contribution is
///   sum_j G(r_i,r_j) rho_j s_j w_j + sum_j G1(r_i,r_j) rho_j s_j w_j w^corr_j.
std::vector<double> log_corrections_on_grid(const Panel& source_panel, double target_t,
                                            int target_local_index, double target_speed);

/// Cauchy compensation weights for on-grid targets (mu = tau case).
/// target_local_index >= 0 marks the same-panel diagonal case.
/// Returns w^cmp applied as sum_j G2(r_i,r_j) rho_j w^cmp_j.
std::vector<double> cauchy_compensation_on_grid(const Panel& source_panel,
                                                const CurvePoint& target,
                                                std::span<const CurvePoint> source_points,
                                                int target_local_index);

/// On-the-fly near weights for a target off the curve.
struct NearWeights {
    std::vector<double> wL;  // sum_j wL_j g_j s_j ~ int log|r-r'| g dgamma'
    std::vector<double> wC;  // sum_j wC_j g_j     ~ int mu.(r-r')/|r-r'|^2 g dgamma'
    cplx preimage;           // canonical coordinate of the target
};

NearWeights near_weights_offgrid(const Panel& panel, std::span<const CurvePoint> panel_points,
                                 Vec2 target, Vec2 mu);

/// Complex canonical preimage of a point near a panel, via Newton on the
/// interpolated chart. Throws if the iteration leaves the panel neighborhood.
cplx panel_preimage(const Panel& panel, std::span<const CurvePoint> panel_points, Vec2 target);

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace axihelm
