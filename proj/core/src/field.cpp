#include "axihelm/field.hpp"

#include <cmath>
#include <limits>

#include "axihelm/quadrature.hpp"

namespace axihelm {

namespace {

const double sqrt_2pi = std::sqrt(2.0 * M_PI);

double panel_arclength(const GeneratingCurve& curve, const Panel& panel) {
    double len = 0.0;
    for (int j = 0; j < panel.n_pt; ++j) len += curve.at(panel.node(j)).speed * panel.weight(j);
    return len;
}

double distance_to_panel(const GeneratingCurve& curve, const Panel& panel, Vec2 r) {
    // coarse scan plus golden-section refinement of |r - r(t)|^2
    const int M = 24;
    double best_t = panel.t_a, best = std::numeric_limits<double>::max();
    for (int j = 0; j <= M; ++j) {
        const double t = panel.t_a + (panel.t_b - panel.t_a) * j / M;
        const auto p = curve.at(t);
        const double d = norm2(r - p.pos());
        if (d < best) {
            best = d;
            best_t = t;
        }
    }
    const double w = (panel.t_b - panel.t_a) / M;
    double a = std::max(panel.t_a, best_t - w), b = std::min(panel.t_b, best_t + w);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = norm2(r - curve.at(x1).pos()), f2 = norm2(r - curve.at(x2).pos());
    for (int it = 0; it < 40; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = norm2(r - curve.at(x1).pos());
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = norm2(r - curve.at(x2).pos());
        }
    }
    return std::sqrt(std::min(std::min(f1, f2), best));
}

}  // namespace

FieldGrid make_field_grid(const GeneratingCurve& curve, const Mesh& mesh,
                          std::span<const Vec2> candidates) {
    // dense polyline of the curve closed by the axis segment
    const int M = std::max(4096, 128 * mesh.grid.n_pan);
    std::vector<Vec2> poly(M + 1);
    for (int j = 0; j <= M; ++j) poly[j] = curve.at(curve.t_end() * j / M).pos();

    FieldGrid grid;
    grid.points.resize(candidates.size());
#pragma omp parallel for schedule(static)
    for (long idx = 0; idx < static_cast<long>(candidates.size()); ++idx) {
        FieldPoint fp;
        fp.r = candidates[idx];
        if (fp.r.rc <= 0.0) {
            // on or behind the axis: inside only if strictly between the two
            // axis endpoints and rc == 0 is excluded as boundary
            fp.inside = false;
            grid.points[idx] = fp;
            continue;
        }
        // even-odd crossing test with a ray in the +z direction
        int crossings = 0;
        for (int j = 0; j < M; ++j) {
            const Vec2 a = poly[j], b = poly[j + 1];
            if ((a.rc > fp.r.rc) == (b.rc > fp.r.rc)) continue;
            const double zc = a.z + (b.z - a.z) * (fp.r.rc - a.rc) / (b.rc - a.rc);
            if (zc > fp.r.z) ++crossings;
        }
        // closing axis segment has rc = 0 < target rc: never crossed
        fp.inside = (crossings % 2) == 1;

        double best = std::numeric_limits<double>::max();
        for (size_t p = 0; p < mesh.panels.size(); ++p) {
            double coarse = std::numeric_limits<double>::max();
            for (int j = 0; j < mesh.grid.n_pt; ++j) {
                const auto& gp = mesh.grid.points[p * mesh.grid.n_pt + j];
                coarse = std::min(coarse, norm2(fp.r - gp.pos()));
            }
            if (coarse < best * 4.0 + 1e-30) {
                const double d = distance_to_panel(curve, mesh.panels[p], fp.r);
                if (d < std::sqrt(best)) {
                    best = d * d;
                    fp.nearest_panel = static_cast<int>(p);
                }
            }
        }
        fp.panel_distance = std::sqrt(best);
        if (fp.panel_distance < 1e-12) fp.inside = false;  // boundary band
        grid.points[idx] = fp;
    }
    return grid;
}

Eigen::VectorXcd eval_field(const GeneratingCurve& curve, const ModalSolution& solution,
                            const FieldGrid& targets, int N, const AssemblyOptions& opts) {
    const Mesh& mesh = *solution.mesh;
    const int n_pt = mesh.grid.n_pt;
    const int n_pan = mesh.grid.n_pan;
    const auto& plan = AzimuthalTransform::get(N);
    CloseKernelEvaluator eval(KernelKind::SingleLayer, solution.mode_n, solution.k, plan);

    std::vector<double> arclen(n_pan);
    for (int p = 0; p < n_pan; ++p) arclen[p] = panel_arclength(curve, mesh.panels[p]);

    // close-zone pieces (axis panels graded) and their density interpolation
    std::vector<std::vector<Panel>> pieces(n_pan);
    std::vector<std::vector<std::vector<CurvePoint>>> piece_pts(n_pan);
    std::vector<Eigen::MatrixXd> fold(n_pan);
    const auto& c16 = canonical_rule(n_pt).nodes;
    for (int p = 0; p < n_pan; ++p) {
        pieces[p] = close_zone_pieces(mesh, p, opts);
        piece_pts[p].resize(pieces[p].size());
        std::vector<double> eval_pts;
        for (size_t q = 0; q < pieces[p].size(); ++q) {
            piece_pts[p][q].resize(pieces[p][q].n_pt);
            for (int j = 0; j < pieces[p][q].n_pt; ++j) {
                piece_pts[p][q][j] = curve.at(pieces[p][q].node(j));
                eval_pts.push_back(mesh.panels[p].to_canonical(pieces[p][q].node(j)));
            }
        }
        fold[p] = panel_interpolation_matrix(c16, eval_pts);
    }

    Eigen::VectorXcd out(targets.points.size());
    out.setConstant(cplx(std::numeric_limits<double>::quiet_NaN(), 0.0));

#pragma omp parallel for schedule(dynamic, 16)
    for (long idx = 0; idx < static_cast<long>(targets.points.size()); ++idx) {
        const FieldPoint& fp = targets.points[idx];
        if (!fp.inside) continue;
        cplx acc = 0.0;
        for (int p = 0; p < n_pan; ++p) {
            const bool near = distance_to_panel(curve, mesh.panels[p], fp.r) < arclen[p];
            if (!near) {
                for (int j = 0; j < n_pt; ++j) {
                    const int g = p * n_pt + j;
                    const auto& sp = mesh.grid.points[g];
                    acc += eval.distant_value_offcurve(fp.r, sp) * solution.rho(g) * sp.rc *
                           sp.speed * mesh.grid.weights[g];
                }
                continue;
            }
            // density at the piece nodes
            const int npc = opts.n_pt_close;
            Eigen::VectorXcd rho16(n_pt);
            for (int j = 0; j < n_pt; ++j) rho16(j) = solution.rho(p * n_pt + j);
            Eigen::VectorXcd rho_pieces = fold[p].cast<cplx>() * rho16;
            CurvePoint fake;
            fake.rc = fp.r.rc;
            fake.z = fp.r.z;
            fake.speed = 1.0;
            for (size_t q = 0; q < pieces[p].size(); ++q) {
                const Panel& Q = pieces[p][q];
                const auto& qpts = piece_pts[p][q];
                const double qlen = panel_arclength(curve, Q);
                const double qdist = distance_to_panel(curve, Q, fp.r);
                cplx piece_acc = 0.0;
                if (qdist >= qlen) {
                    // transform-route values are fine at this separation
                    for (int j = 0; j < npc; ++j)
                        piece_acc += eval.distant_value_offcurve(fp.r, qpts[j]) *
                                     rho_pieces(q * npc + j) * qpts[j].rc * qpts[j].speed *
                                     Q.weight(j);
                } else {
                    auto vals = eval.evaluate(fake, qpts, -1);
                    auto nw = near_weights_offgrid(Q, qpts, fp.r, {1.0, 0.0});
                    const auto& pi = ProductIntegration::get(npc);
                    for (int j = 0; j < npc; ++j) {
                        const double corr =
                            nw.wL[j] - std::log(norm(fp.r - qpts[j].pos())) * Q.weight(j);
                        piece_acc += (vals[j].full * Q.weight(j) + vals[j].g_log * corr) *
                                     rho_pieces(q * npc + j) * qpts[j].rc * qpts[j].speed;
                    }
                    (void)pi;
                }
                acc += piece_acc;
            }
        }
        out(idx) = sqrt_2pi * acc;
    }
    return out;
}

Eigen::MatrixXcd boundary_map_matrix(KernelKind kind, const GeneratingCurve& curve,
                                     const Mesh& mesh, int mode_n, double k, int N,
                                     const AssemblyOptions& opts) {
    return sqrt_2pi * assemble_operator(kind, curve, mesh, mode_n, k, N, opts);
}

Eigen::VectorXcd eval_tangential_derivative(const GeneratingCurve& curve,
                                            const ModalSolution& solution, int N,
                                            const AssemblyOptions& opts) {
    Eigen::MatrixXcd T = boundary_map_matrix(KernelKind::TangentialDerivative, curve,
                                             *solution.mesh, solution.mode_n, solution.k, N, opts);
    return T * solution.rho;
}

double boundary_norm_integral(const Mesh& mesh, const Eigen::VectorXcd& u_gamma,
                              const Eigen::VectorXcd& tdu_gamma, double k, int mode_n) {
    double acc = 0.0;
    const int m = mesh.grid.size();
    for (int i = 0; i < m; ++i) {
        const auto& p = mesh.grid.points[i];
        const double rdotnu = p.rc * p.nu_rc + p.z * p.nu_z;
        const double w = p.speed * mesh.grid.weights[i] * p.rc;
        const double u2 = std::norm(u_gamma(i));
        const double t2 = std::norm(tdu_gamma(i));
        acc += rdotnu * ((k * k - double(mode_n) * mode_n / (p.rc * p.rc)) * u2 - t2) * w;
    }
    return acc / (2.0 * k * k);
}

NormalizedEigenfunction normalize_eigenfunction(const Eigen::VectorXcd& u_gamma,
                                                const Eigen::VectorXcd& tdu_gamma,
                                                const Eigen::VectorXcd& rho, double k, int mode_n,
                                                const Mesh& mesh) {
    const double nrm2 = boundary_norm_integral(mesh, u_gamma, tdu_gamma, k, mode_n);
    if (!(nrm2 > 0.0))
        throw FieldError("normalize_eigenfunction: non-positive volume norm (wrong k or "
                         "unconverged eigenvector)");
    NormalizedEigenfunction out;
    out.mode_n = mode_n;
    out.k = k;
    out.norm_constant = std::sqrt(nrm2);

    // least-squares phase: minimize the L2 norm of Im(e^{i phi} u) on gamma
    cplx corr = 0.0;
    for (int i = 0; i < u_gamma.size(); ++i) {
        const auto& p = mesh.grid.points[i];
        corr += u_gamma(i) * u_gamma(i) * p.speed * mesh.grid.weights[i];
    }
    const double phi = -0.5 * std::arg(corr);
    cplx rot = std::polar(1.0, phi);

    Eigen::VectorXcd u = (rot / out.norm_constant) * u_gamma;
    // fix the remaining sign freedom deterministically
    int imax = 0;
    for (int i = 1; i < u.size(); ++i)
        if (std::abs(u(i)) > std::abs(u(imax))) imax = i;
    if (u(imax).real() < 0.0) rot = -rot;

    out.phase = rot;
    out.u_gamma = (rot / out.norm_constant) * u_gamma;
    out.tdu_gamma = (rot / out.norm_constant) * tdu_gamma;
    out.rho = (rot / out.norm_constant) * rho;
    return out;
}

}  // namespace axihelm
