#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "axihelm/assembly.hpp"
#include "axihelm/geometry.hpp"

namespace axihelm {

struct FieldPoint {
    Vec2 r;
    bool inside = false;
    double panel_distance = 0.0;  // distance to the nearest panel
    int nearest_panel = -1;
};

/// Field targets in the half-plane, tagged by the inside test against the
/// region bounded by the curve and the axis segment. Points within 1e-12 of
/// the curve count as boundary and are excluded (inside = false).
struct FieldGrid {
    std::vector<FieldPoint> points;
};

FieldGrid make_field_grid(const GeneratingCurve& curve, const Mesh& mesh,
                          std::span<const Vec2> candidates);

/// Modal field u_n at the grid targets (NaN at points not inside).
/// Near panels use the kernel-split route with on-the-fly product-integration
/// weights at the target's complex canonical coordinate; distant panels use
/// plain quadrature of transform-route values.
Eigen::VectorXcd eval_field(const GeneratingCurve& curve, const ModalSolution& solution,
                            const FieldGrid& targets, int N,
                            const AssemblyOptions& opts = AssemblyOptions{});

/// Boundary-value map matrices on the global grid:
/// u|gamma = sqrt(2 pi) Op_S rho and tau.grad u = sqrt(2 pi) Op_tau rho.
Eigen::MatrixXcd boundary_map_matrix(KernelKind kind, const GeneratingCurve& curve,
                                     const Mesh& mesh, int mode_n, double k, int N,
                                     const AssemblyOptions& opts = AssemblyOptions{});

/// Tangential derivative of the represented field at the grid points.
Eigen::VectorXcd eval_tangential_derivative(const GeneratingCurve& curve,
                                            const ModalSolution& solution, int N,
                                            const AssemblyOptions& opts = AssemblyOptions{});

struct NormalizedEigenfunction {
    int mode_n = 0;
    double k = 0.0;
    Eigen::VectorXcd u_gamma;       // boundary values, unit volume norm, real-rotated
    Eigen::VectorXcd tdu_gamma;     // tangential derivative on the boundary
    double norm_constant = 0.0;     // volume L2 norm of the unnormalized field
    cplx phase = 1.0;               // unit-modulus rotation applied
    Eigen::VectorXcd rho;           // density rescaled consistently with u
};

/// Volume L2 norm of a homogeneous-mode field from boundary data only,
/// via the boundary formula with the (k^2 - n^2/rc^2) weight.
double boundary_norm_integral(const Mesh& mesh, const Eigen::VectorXcd& u_gamma,
                              const Eigen::VectorXcd& tdu_gamma, double k, int mode_n);

NormalizedEigenfunction normalize_eigenfunction(const Eigen::VectorXcd& u_gamma,
                                                const Eigen::VectorXcd& tdu_gamma,
                                                const Eigen::VectorXcd& rho, double k, int mode_n,
                                                const Mesh& mesh);

class FieldError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace axihelm
