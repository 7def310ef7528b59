#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace axihelm {

using cplx = std::complex<double>;

struct Vec2 {
    double rc = 0.0;
    double z = 0.0;
};

inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.rc - b.rc, a.z - b.z}; }
inline double dot(Vec2 a, Vec2 b) { return a.rc * b.rc + a.z * b.z; }
inline double norm2(Vec2 a) { return a.rc * a.rc + a.z * a.z; }
inline double norm(Vec2 a) { return std::sqrt(norm2(a)); }

/// Curve sample with first and second parameter derivatives and unit frame.
/// The outward normal is nu = (-dz, drc)/speed, the tangent tau = (nu_z, -nu_rc).
struct CurvePoint {
    double t = 0.0;
    double rc = 0.0, z = 0.0;
    double drc = 0.0, dz = 0.0;
    double d2rc = 0.0, d2z = 0.0;
    double speed = 0.0;
    double nu_rc = 0.0, nu_z = 0.0;

    Vec2 pos() const { return {rc, z}; }
    Vec2 normal() const { return {nu_rc, nu_z}; }
    Vec2 tangent() const { return {nu_z, -nu_rc}; }
};

/// Generating curve r(t) = (rc(t), z(t)), t in [0, t_end], meeting the
/// rotation axis (rc = 0) exactly at both parameter endpoints.
class GeneratingCurve {
public:
    virtual ~GeneratingCurve() = default;
    virtual CurvePoint at(double t) const = 0;
    virtual double t_end() const { return M_PI; }
    virtual std::string name() const = 0;
};

/// Sphere of given radius: r(t) = R (sin t, cos t).
class SphereCurve final : public GeneratingCurve {
public:
    explicit SphereCurve(double radius = 1.0) : radius_(radius) {}
    CurvePoint at(double t) const override;
    std::string name() const override { return "sphere"; }
    double radius() const { return radius_; }

private:
    double radius_;
};

/// Wavy generator r(t) = (1 + amp cos(freq t)) (sin t, cos t).
class StarCurve final : public GeneratingCurve {
public:
    StarCurve(double amplitude = 0.25, double frequency = 5.0)
        : amp_(amplitude), freq_(frequency) {}
    CurvePoint at(double t) const override;
    std::string name() const override { return "star"; }
    double amplitude() const { return amp_; }
    double frequency() const { return freq_; }

private:
    double amp_, freq_;
};

/// Curve supplied as a closure returning (rc, z) and its first two t-derivatives.
class CallableCurve final : public GeneratingCurve {
public:
    using Eval = std::function<void(double t, double out[6])>;  // rc,z,drc,dz,d2rc,d2z
    CallableCurve(Eval eval, double t_end = M_PI, std::string label = "custom")
        : eval_(std::move(eval)), t_end_(t_end), label_(std::move(label)) {}
    CurvePoint at(double t) const override;
    double t_end() const override { return t_end_; }
    std::string name() const override { return label_; }

private:
    Eval eval_;
    double t_end_;
    std::string label_;
};

/// Gauss-Legendre nodes/weights on [-1, 1].
struct CanonicalRule {
    std::vector<double> nodes;    // ascending
    std::vector<double> weights;  // sum = 2
};

const CanonicalRule& canonical_rule(int n_pt);

/// One quadrature panel [t_a, t_b] referencing a canonical rule of n_pt points.
/// Node/weight relations: t_j = (t_b+t_a)/2 + half_length * cnode_j,
/// w_j = half_length * cweight_j.
struct Panel {
    double t_a = 0.0, t_b = 0.0;
    int n_pt = 16;

    double half_length() const { return 0.5 * (t_b - t_a); }
    double center() const { return 0.5 * (t_b + t_a); }
    double node(int j) const { return center() + half_length() * canonical_rule(n_pt).nodes[j]; }
    double weight(int j) const { return half_length() * canonical_rule(n_pt).weights[j]; }
    /// Canonical coordinate of a parameter value.
    double to_canonical(double t) const { return (t - center()) / half_length(); }
    bool contains(double t) const { return t >= t_a && t <= t_b; }
};

enum class RefineDirection { TowardStart, TowardEnd };

/// Repeated halving of the sub-panel nearest the chosen end; returns
/// levels+1 panels in ascending parameter order whose union is the input.
std::vector<Panel> refine_panel_binary(const Panel& panel, int levels, RefineDirection dir);

/// The Nystrom point set: n_pt points per panel, panel-ordered.
struct GlobalGrid {
    int n_pan = 0;
    int n_pt = 0;
    std::vector<CurvePoint> points;
    std::vector<double> weights;      // parameter-space quadrature weights
    std::vector<int> panel_of;
    std::vector<int> index_in_panel;

    int size() const { return static_cast<int>(points.size()); }
};

struct Mesh {
    std::vector<Panel> panels;
    GlobalGrid grid;
};

/// Uniform-in-parameter panel mesh with n_pt Gauss-Legendre points per panel.
Mesh build_mesh(const GeneratingCurve& curve, int n_pan, int n_pt = 16);

/// Polynomial interpolation matrix taking values at from_nodes to values at
/// to_nodes (barycentric Lagrange form). Exact on polynomials of degree
/// < |from_nodes|.
Eigen::MatrixXd panel_interpolation_matrix(std::span<const double> from_nodes,
                                           std::span<const double> to_nodes);

/// Barycentric weights for a node set.
std::vector<double> barycentric_weights(std::span<const double> nodes);

/// Evaluate the Lagrange interpolant through (nodes, values) at x.
double lagrange_eval(std::span<const double> nodes, std::span<const double> bary,
                     std::span<const double> values, double x);

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace axihelm
