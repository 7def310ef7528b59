#pragma once

#include <complex>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "axihelm/geometry.hpp"
#include "axihelm/kernels.hpp"

namespace axihelm {

struct AssemblyOptions {
    int n_pt_close = 32;       // close-zone discretization order, folded back to 16
    int axis_refine_levels = 11;
    double subpanel_constant = 0.35;
    int subpanel_cap = 4;
};

/// Number of equal subpanels (1..cap) used when product-integrating a source
/// piece of the given parameter width at azimuthal index n.
int subpanel_refine_rule(int mode_n, double piece_width,
                         const AssemblyOptions& opts = AssemblyOptions{});

/// Nystrom matrix A = I + 2 sqrt(2 pi) K for one mode and wavenumber, with
/// the block-tridiagonal close part assembled by kernel-split product
/// integration. Entries outside the block tridiagonal come from plain
/// quadrature of transform-route kernel values.
struct SystemMatrix {
    int mode_n = 0;
    double k = 0.0;
    int n_pan = 0;
    int N = 0;
    Eigen::MatrixXcd A;
    std::shared_ptr<const Mesh> mesh;

    int size() const { return static_cast<int>(A.rows()); }
    bool is_close_block(int pi, int pj) const { return std::abs(pi - pj) <= 1; }
};

/// Discretized integral operator for one of the three kernels:
/// (Op rho)_i ~ int_gamma kernel_n(r_i, r') rho(r') rc' dgamma'.
Eigen::MatrixXcd assemble_operator(KernelKind kind, const GeneratingCurve& curve,
                                   const Mesh& mesh, int mode_n, double k, int N,
                                   const AssemblyOptions& opts = AssemblyOptions{});

SystemMatrix assemble(const GeneratingCurve& curve, int n_pan, int mode_n, double k,
                      int N_ratio = 4, const AssemblyOptions& opts = AssemblyOptions{});

struct ModalSolution {
    int mode_n = 0;
    double k = 0.0;
    Eigen::VectorXcd rho;
    Eigen::VectorXcd f;
    std::shared_ptr<const Mesh> mesh;
};

/// Direct dense solve of (I + 2K) rho = 2 f.
ModalSolution solve_neumann(const SystemMatrix& system, const Eigen::VectorXcd& f_n);

/// Panel refinement lists used for the close zone (axis panels are graded
/// toward the axis); exposed for the field evaluator.
std::vector<Panel> close_zone_pieces(const Mesh& mesh, int panel_index,
                                     const AssemblyOptions& opts = AssemblyOptions{});

class AssemblyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace axihelm
