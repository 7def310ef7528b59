#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "axihelm/geometry.hpp"
#include "axihelm/specfun.hpp"

namespace axihelm {

/// A target/source point pair in the half-plane with the scaled distance
/// variable chi = 1 + |r-r'|^2 / (2 rc rc'), chi-1 kept exactly.
struct PointPair {
    CurvePoint target;
    CurvePoint source;
    double k = 0.0;
    double dist2 = 0.0;
    double dist = 0.0;
    double chi = 1.0;
    double chim1 = 0.0;
};

PointPair make_point_pair(const CurvePoint& target, const CurvePoint& source, double k);

/// A point on the rotated surface with its unit normal and tangent.
struct SurfacePoint3 {
    double x[3];
    double nu[3];
    double tau[3];
};

/// Place a generating-curve point at azimuthal angle theta.
SurfacePoint3 rotate_to_3d(const CurvePoint& p, double theta);

struct Kernels3D {
    cplx S, Knu, Ktau;
    double Z, Dnu, Dtau;
    double H1, H2, H3, H4;
};

/// All kernel factors at a separated pair of surface points. The identities
/// S = Z (H1 + i H2) and Knu = Dnu (H3 + i H4) hold by construction.
Kernels3D full_kernels_3d(const SurfacePoint3& r, const SurfacePoint3& rp, double k);

/// Azimuthal transform plan for one truncation level N: the (2N+1)-point
/// trapezoidal rule with equispaced angles theta_m = 2 pi m / (2N+1).
class AzimuthalTransform {
public:
    explicit AzimuthalTransform(int N);

    int N() const { return N_; }
    /// Angles theta_j, j = 0..N (the rest follow by evenness).
    const Eigen::ArrayXd& half_angles() const { return theta_; }
    /// Transform of an even real integrand sampled at half_angles():
    /// returns coefficients n = 0..N (they are even in n).
    Eigen::VectorXd transform_even(const Eigen::ArrayXd& samples) const;
    /// Row form: coefficient n of an even real integrand = row(n) . samples.
    Eigen::RowVectorXd coefficient_row(int n) const;
    /// Matrix mapping half-angle samples to coefficients 0..N.
    const Eigen::MatrixXd& half_matrix() const { return cosmat_; }

    static const AzimuthalTransform& get(int N);

private:
    int N_;
    Eigen::ArrayXd theta_;
    Eigen::MatrixXd cosmat_;
};

/// General (trapezo)-rule transform of a complex 2*pi-periodic integrand:
/// coefficients for n = -N..N, stored at index n+N. Direct summation.
std::vector<cplx> modal_transform_fft(const std::function<cplx(double)>& integrand, int N);

/// Truncated convolution: (1/sqrt(2 pi)) sum over the clamped window of
/// g_m h_{n-m}; g and h are coefficient vectors for indices -N..N stored at
/// index + N.
cplx convolve_truncated(std::span<const cplx> g, std::span<const cplx> h, int n);

/// Symmetric-table variant for coefficients that are even in the index:
/// g[m] for m = 0..N, h likewise.
double convolve_truncated_even(std::span<const double> g, std::span<const double> h, int n,
                               int N);

/// Semi-analytic modal kernels for one pair: Z_n, Dnu_n, Dtau_n for
/// n = 0..n_max (all even in n).
struct ModalZD {
    std::vector<double> Z, Dnu, Dtau;
};
ModalZD modal_Z_Dnu_Dtau(const PointPair& pair, int n_max);

/// Split of a near-diagonal kernel factor into
///   G_full = log|r-r'| G_log + [mu.(r-r')/|r-r'|^2] G_cauchy + smooth,
/// with the smooth part's value at r' = r supplied for diagonal use.
struct SingularSplit {
    double G_log = 0.0;
    double G_cauchy = 0.0;
    double G_full = 0.0;
    double diagonal_value = 0.0;
};

/// Split of Q_{n-1/2}(chi(r,r')) using the truncated hypergeometric factor.
SingularSplit q_log_split(const PointPair& pair, int n);

/// Split of d_tau(r,r') R_n(chi): log part, unit Cauchy part (G_cauchy = -1),
/// both smooth factors vanishing at r' = r.
SingularSplit dtau_R_split(const PointPair& pair, int n);

enum class KernelKind { SingleLayer, NormalDerivative, TangentialDerivative };

/// One close-pair kernel evaluation: the kernel value (convolution route for
/// the non-smooth part, transform route for the smooth part), and the smooth
/// cofactors of its log and Cauchy singularities for product integration.
struct CloseKernelValue {
    cplx full;
    double g_log = 0.0;
    double g_cauchy = 0.0;
};

/// Batched close-route evaluation against a set of source points sharing one
/// target. diag_index marks the source that coincides with the target (-1 if
/// none); there the returned `full` holds the smooth remainder value.
class CloseKernelEvaluator {
public:
    CloseKernelEvaluator(KernelKind kind, int mode_n, double k, const AzimuthalTransform& plan);

    std::vector<CloseKernelValue> evaluate(const CurvePoint& target,
                                           std::span<const CurvePoint> sources,
                                           int diag_index) const;

    /// Transform-route value of the modal kernel at a separated pair
    /// (plain quadrature path for distant interactions).
    cplx distant_value(const CurvePoint& target, const CurvePoint& source) const;
    /// Same for a target off the curve (SingleLayer only).
    cplx distant_value_offcurve(Vec2 target, const CurvePoint& source) const;

    KernelKind kind() const { return kind_; }
    int mode() const { return n_; }
    double wavenumber() const { return k_; }
    const AzimuthalTransform& plan() const { return plan_; }

private:
    KernelKind kind_;
    int n_;
    double k_;
    const AzimuthalTransform& plan_;
    Eigen::RowVectorXd row_n_;  // single-coefficient slice of the transform
};

/// Close-route modal kernel at one pair (kind S, Knu or Ktau).
cplx modal_kernel_close(KernelKind kind, const PointPair& pair, int n, int N);

class KernelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace axihelm
