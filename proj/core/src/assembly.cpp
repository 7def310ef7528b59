#include "axihelm/assembly.hpp"

#include <cmath>

#include "axihelm/quadrature.hpp"

namespace axihelm {

namespace {

const double sqrt_2pi = std::sqrt(2.0 * M_PI);

bool share_edge_or_same(const Panel& a, const Panel& b) {
    const double tol = 1e-12 * (std::abs(a.t_b - a.t_a) + std::abs(b.t_b - b.t_a));
    if (std::abs(a.t_a - b.t_a) < tol && std::abs(a.t_b - b.t_b) < tol) return true;
    return std::abs(a.t_b - b.t_a) < tol || std::abs(b.t_b - a.t_a) < tol;
}

struct PieceNodes {
    Panel panel;
    std::vector<CurvePoint> points;  // n_pt_close nodes
};

std::vector<PieceNodes> materialize(const GeneratingCurve& curve, const std::vector<Panel>& pieces) {
    std::vector<PieceNodes> out(pieces.size());
    for (size_t p = 0; p < pieces.size(); ++p) {
        out[p].panel = pieces[p];
        out[p].points.resize(pieces[p].n_pt);
        for (int j = 0; j < pieces[p].n_pt; ++j)
            out[p].points[j] = curve.at(pieces[p].node(j));
    }
    return out;
}

}  // namespace

int subpanel_refine_rule(int mode_n, double piece_width, const AssemblyOptions& opts) {
    const double load = std::abs(mode_n) * piece_width / opts.subpanel_constant;
    const int count = static_cast<int>(std::ceil(load));
    return std::clamp(count, 1, opts.subpanel_cap);
}

std::vector<Panel> close_zone_pieces(const Mesh& mesh, int panel_index,
                                     const AssemblyOptions& opts) {
    const int n_pan = mesh.grid.n_pan;
    Panel base = mesh.panels[panel_index];
    base.n_pt = opts.n_pt_close;
    if (opts.axis_refine_levels > 0) {
        if (panel_index < 2 && panel_index < n_pan - 2)
            return refine_panel_binary(base, opts.axis_refine_levels, RefineDirection::TowardStart);
        if (panel_index >= n_pan - 2 && panel_index >= 2)
            return refine_panel_binary(base, opts.axis_refine_levels, RefineDirection::TowardEnd);
    }
    return {base};
}

namespace {

/// Close-zone rows for the three-panel neighborhood of one target panel,
/// computed on the upsampled (and axis-refined) meshes and folded back to the
/// global grid in both the target and the source direction.
class ClosePanelWorker {
public:
    ClosePanelWorker(const GeneratingCurve& curve, const Mesh& mesh, KernelKind kind, int mode_n,
                     double k, int N, const AssemblyOptions& opts)
        : curve_(curve),
          mesh_(mesh),
          kind_(kind),
          mode_n_(mode_n),
          opts_(opts),
          evaluator_(kind, mode_n, k, AzimuthalTransform::get(N)) {
        const int n_pan = mesh.grid.n_pan;
        pieces_.resize(n_pan);
        source_fold_.resize(n_pan);
        const auto& c16 = canonical_rule(mesh.grid.n_pt).nodes;
        for (int p = 0; p < n_pan; ++p) {
            auto list = close_zone_pieces(mesh, p, opts);
            pieces_[p] = materialize(curve, list);
            // density interpolation: global n_pt nodes of panel p -> piece nodes
            const Panel& parent = mesh.panels[p];
            std::vector<double> eval_pts;
            for (const auto& pc : pieces_[p])
                for (int j = 0; j < pc.panel.n_pt; ++j)
                    eval_pts.push_back(parent.to_canonical(pc.panel.node(j)));
            source_fold_[p] = panel_interpolation_matrix(c16, eval_pts);
        }
    }

    /// Rows of the operator for all global nodes of target panel pt against
    /// the global nodes of panels pt-1..pt+1. Output block is
    /// n_pt x (3 n_pt) laid out per source panel.
    void target_panel_rows(int pt, Eigen::MatrixXcd& out) const {
        const int n_pt = mesh_.grid.n_pt;
        const int npc = opts_.n_pt_close;
        const int n_pan = mesh_.grid.n_pan;
        const Panel& tparent = mesh_.panels[pt];
        const auto& tpieces = pieces_[pt];

        // target sample points: pieces that contain global nodes
        std::vector<int> piece_of_node(n_pt, -1);
        std::vector<char> piece_used(tpieces.size(), 0);
        for (int i = 0; i < n_pt; ++i) {
            const double ti = tparent.node(i);
            for (size_t q = 0; q < tpieces.size(); ++q) {
                if (tpieces[q].panel.contains(ti)) {
                    piece_of_node[i] = static_cast<int>(q);
                    piece_used[q] = 1;
                    break;
                }
            }
        }

        const int ps_lo = std::max(0, pt - 1), ps_hi = std::min(n_pan - 1, pt + 1);
        out.setZero(n_pt, 3 * n_pt);

        // rows at refined target nodes, per used piece
        for (size_t q = 0; q < tpieces.size(); ++q) {
            if (!piece_used[q]) continue;
            Eigen::MatrixXcd piece_rows(npc, 3 * n_pt);
            piece_rows.setZero();
            for (int a = 0; a < npc; ++a) {
                const CurvePoint& tau = tpieces[q].points[a];
                for (int ps = ps_lo; ps <= ps_hi; ++ps) {
                    Eigen::RowVectorXcd row16 =
                        source_panel_row(tau, tpieces[q].panel, a, ps);
                    piece_rows.block(a, (ps - pt + 1) * n_pt, 1, n_pt) = row16;
                }
            }
            // fold the target direction: evaluate the piece interpolant at the
            // global nodes that live inside this piece
            const auto& cn = canonical_rule(npc).nodes;
            for (int i = 0; i < n_pt; ++i) {
                if (piece_of_node[i] != static_cast<int>(q)) continue;
                const double xi = tpieces[q].panel.to_canonical(tparent.node(i));
                std::vector<double> pt_eval = {xi};
                Eigen::MatrixXd E = panel_interpolation_matrix(cn, pt_eval);
                for (int c = 0; c < 3 * n_pt; ++c) {
                    cplx acc = 0.0;
                    for (int a = 0; a < npc; ++a) acc += E(0, a) * piece_rows(a, c);
                    out(i, c) = acc;
                }
            }
        }
    }

private:
    /// Row of the close-zone operator at one refined target node against the
    /// global nodes of source panel ps.
    Eigen::RowVectorXcd source_panel_row(const CurvePoint& tau, const Panel& tau_piece,
                                         int tau_local, int ps) const {
        const int n_pt = mesh_.grid.n_pt;
        const int npc = opts_.n_pt_close;
        const auto& spieces = pieces_[ps];
        Eigen::RowVectorXcd acc_pieces(static_cast<int>(spieces.size()) * npc);
        acc_pieces.setZero();

        for (size_t sp = 0; sp < spieces.size(); ++sp) {
            const Panel& SP = spieces[sp].panel;
            const auto& spts = spieces[sp].points;
            Eigen::RowVectorXcd row(npc);
            row.setZero();
            if (!share_edge_or_same(tau_piece, SP)) {
                auto vals = evaluator_.evaluate(tau, spts, -1);
                for (int j = 0; j < npc; ++j)
                    row(j) = vals[j].full * spts[j].rc * spts[j].speed * SP.weight(j);
            } else {
                const int count = subpanel_refine_rule(mode_n_, SP.t_b - SP.t_a, opts_);
                const bool same_piece = std::abs(tau_piece.t_a - SP.t_a) < 1e-14 &&
                                        std::abs(tau_piece.t_b - SP.t_b) < 1e-14;
                if (count == 1) {
                    const int diag = same_piece ? tau_local : -1;
                    row = pi_rows(tau, SP, spts, diag);
                } else {
                    // split into equal subpanels with their own auxiliary nodes
                    const auto& cn = canonical_rule(npc).nodes;
                    std::vector<double> sub_canon;
                    std::vector<cplx> sub_rows(count * npc);
                    for (int c = 0; c < count; ++c) {
                        Panel sub{SP.t_a + (SP.t_b - SP.t_a) * c / count,
                                  SP.t_a + (SP.t_b - SP.t_a) * (c + 1) / count, npc};
                        std::vector<CurvePoint> subpts(npc);
                        for (int j = 0; j < npc; ++j) subpts[j] = curve_.at(sub.node(j));
                        Eigen::RowVectorXcd sub_row = pi_rows(tau, sub, subpts, -1);
                        for (int j = 0; j < npc; ++j) {
                            sub_canon.push_back(SP.to_canonical(sub.node(j)));
                            sub_rows[c * npc + j] = sub_row(j);
                        }
                    }
                    Eigen::MatrixXd P = panel_interpolation_matrix(cn, sub_canon);
                    for (int j = 0; j < npc; ++j) {
                        cplx s = 0.0;
                        for (int a = 0; a < count * npc; ++a) s += sub_rows[a] * P(a, j);
                        row(j) = s;
                    }
                }
            }
            acc_pieces.segment(static_cast<int>(sp) * npc, npc) = row;
        }

        // fold the source direction back to the global nodes of panel ps
        Eigen::RowVectorXcd row16(n_pt);
        const Eigen::MatrixXd& P = source_fold_[ps];
        for (int b = 0; b < n_pt; ++b) {
            cplx s = 0.0;
            for (int a = 0; a < P.rows(); ++a) s += acc_pieces(a) * P(a, b);
            row16(b) = s;
        }
        return row16;
    }

    /// Product-integration row over one source piece for one target point.
    Eigen::RowVectorXcd pi_rows(const CurvePoint& tau, const Panel& SP,
                                std::span<const CurvePoint> spts, int diag) const {
        const int npc = SP.n_pt;
        auto vals = evaluator_.evaluate(tau, spts, diag);
        auto corr = log_corrections_on_grid(SP, tau.t, diag, tau.speed);
        std::vector<double> cmp;
        if (kind_ == KernelKind::TangentialDerivative)
            cmp = cauchy_compensation_on_grid(SP, tau, spts, diag);
        Eigen::RowVectorXcd row(npc);
        for (int j = 0; j < npc; ++j) {
            const double wj = SP.weight(j);
            const double meas = spts[j].rc * spts[j].speed;
            cplx v = vals[j].full * meas * wj + vals[j].g_log * meas * wj * corr[j];
            if (!cmp.empty()) v += vals[j].g_cauchy * spts[j].rc * cmp[j];
            row(j) = v;
        }
        return row;
    }

    const GeneratingCurve& curve_;
    const Mesh& mesh_;
    KernelKind kind_;
    int mode_n_;
    AssemblyOptions opts_;
    CloseKernelEvaluator evaluator_;
    std::vector<std::vector<PieceNodes>> pieces_;
    std::vector<Eigen::MatrixXd> source_fold_;
};

}  // namespace

Eigen::MatrixXcd assemble_operator(KernelKind kind, const GeneratingCurve& curve,
                                   const Mesh& mesh, int mode_n, double k, int N,
                                   const AssemblyOptions& opts) {
    const int n_pt = mesh.grid.n_pt;
    const int n_pan = mesh.grid.n_pan;
    const int m = mesh.grid.size();
    Eigen::MatrixXcd Op(m, m);
    Op.setZero();

    const CloseKernelEvaluator dist_eval(kind, mode_n, k, AzimuthalTransform::get(N));

    // distant entries: plain quadrature of transform-route values
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < m; ++i) {
        const int pi_ = mesh.grid.panel_of[i];
        const CurvePoint& ti = mesh.grid.points[i];
        for (int j = 0; j < m; ++j) {
            const int pj = mesh.grid.panel_of[j];
            if (std::abs(pi_ - pj) <= 1) continue;
            const CurvePoint& sj = mesh.grid.points[j];
            Op(i, j) = dist_eval.distant_value(ti, sj) * sj.rc * sj.speed * mesh.grid.weights[j];
        }
    }

    // close zone
    ClosePanelWorker worker(curve, mesh, kind, mode_n, k, N, opts);
#pragma omp parallel for schedule(dynamic, 1)
    for (int pt = 0; pt < n_pan; ++pt) {
        Eigen::MatrixXcd block;
        worker.target_panel_rows(pt, block);
        for (int dp = -1; dp <= 1; ++dp) {
            const int ps = pt + dp;
            if (ps < 0 || ps >= n_pan) continue;
            Op.block(pt * n_pt, ps * n_pt, n_pt, n_pt) =
                block.block(0, (dp + 1) * n_pt, n_pt, n_pt);
        }
    }
    return Op;
}

SystemMatrix assemble(const GeneratingCurve& curve, int n_pan, int mode_n, double k, int N_ratio,
                      const AssemblyOptions& opts) {
    SystemMatrix sys;
    sys.mode_n = mode_n;
    sys.k = k;
    sys.n_pan = n_pan;
    sys.N = N_ratio * n_pan;
    auto mesh = std::make_shared<Mesh>(build_mesh(curve, n_pan));
    sys.mesh = mesh;
    Eigen::MatrixXcd Op = assemble_operator(KernelKind::NormalDerivative, curve, *mesh, mode_n, k,
                                            sys.N, opts);
    sys.A = 2.0 * sqrt_2pi * Op;
    sys.A.diagonal().array() += 1.0;
    return sys;
}

ModalSolution solve_neumann(const SystemMatrix& system, const Eigen::VectorXcd& f_n) {
    if (f_n.size() != system.A.rows())
        throw AssemblyError("solve_neumann: right-hand side size mismatch");
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(system.A);
    const double rc = lu.rcond();
    if (rc < 1e-15)
        throw AssemblyError("solve_neumann: matrix numerically singular (rcond ~ " +
                            std::to_string(rc) + "), wavenumber near a resonance");
    ModalSolution sol;
    sol.mode_n = system.mode_n;
    sol.k = system.k;
    sol.mesh = system.mesh;
    sol.f = f_n;
    sol.rho = lu.solve(2.0 * f_n);
    // one refinement step tightens the residual to the spec contract
    Eigen::VectorXcd r = 2.0 * f_n - system.A * sol.rho;
    sol.rho += lu.solve(r);
    return sol;
}

}  // namespace axihelm
