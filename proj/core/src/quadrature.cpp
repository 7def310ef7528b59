#include "axihelm/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace axihelm {

namespace {

// P_k(x) for k = 0..K-1.
std::vector<double> legendre_p(double x, int K) {
    std::vector<double> P(K);
    P[0] = 1.0;
    if (K > 1) P[1] = x;
    for (int k = 1; k + 1 < K; ++k) P[k + 1] = ((2 * k + 1) * x * P[k] - k * P[k - 1]) / (k + 1);
    return P;
}

}  // namespace

std::vector<double> legendre_q_cut(double x, int K) {
    if (!(std::abs(x) < 1.0)) throw QuadratureError("legendre_q_cut: |x| must be < 1");
    std::vector<double> Q(K);
    Q[0] = 0.5 * (std::log1p(x) - std::log1p(-x));
    if (K > 1) Q[1] = x * Q[0] - 1.0;
    for (int k = 1; k + 1 < K; ++k) Q[k + 1] = ((2 * k + 1) * x * Q[k] - k * Q[k - 1]) / (k + 1);
    return Q;
}

std::vector<cplx> legendre_q_offcut(cplx x, int K) {
    const cplx sq = std::sqrt(x - 1.0) * std::sqrt(x + 1.0);
    double rho = std::abs(x + sq);
    if (rho < 1.0) rho = 1.0 / rho;
    const cplx q0 = 0.5 * std::log((x + 1.0) / (x - 1.0));
    std::vector<cplx> Q(K);
    if (rho > 1.08) {
        // The wanted solution decays upward at rate 1/rho: run the recursion
        // downward from far enough above and normalize on the closed form.
        const int L = static_cast<int>(std::ceil(42.0 / std::log(rho))) + 8;
        std::vector<cplx> q(K + L + 2);
        q[K + L + 1] = 0.0;
        q[K + L] = 1.0;
        for (int k = K + L - 1; k >= 0; --k)
            q[k] = ((2.0 * k + 3.0) * x * q[k + 1] - (k + 2.0) * q[k + 2]) / (k + 1.0);
        const cplx scale = q0 / q[0];
        for (int k = 0; k < K; ++k) Q[k] = q[k] * scale;
    } else {
        // Close to the cut the competing solution grows at most like rho^k,
        // so the upward recursion is harmless.
        Q[0] = q0;
        if (K > 1) Q[1] = x * Q[0] - 1.0;
        for (int k = 1; k + 1 < K; ++k)
            Q[k + 1] = ((2.0 * k + 1.0) * x * Q[k] - double(k) * Q[k - 1]) / (k + 1.0);
    }
    return Q;
}

namespace {

// q_k(x) = int_{-1}^1 P_k(t) log|x-t| dt via q_k = 2 (Q_{k+1}-Q_{k-1})/(2k+1).
std::vector<double> qk_log_cut(double x, int K) {
    auto Q = legendre_q_cut(x, K + 1);
    std::vector<double> q(K);
    q[0] = (1.0 - x) * std::log1p(-x) + (1.0 + x) * std::log1p(x) - 2.0;
    for (int k = 1; k < K; ++k) q[k] = 2.0 * (Q[k + 1] - Q[k - 1]) / (2.0 * k + 1.0);
    return q;
}

std::vector<double> qk_log_offcut(cplx x, int K) {
    auto Q = legendre_q_offcut(x, K + 1);
    std::vector<double> q(K);
    q[0] = std::real((x + 1.0) * std::log(x + 1.0) - (x - 1.0) * std::log(x - 1.0)) - 2.0;
    for (int k = 1; k < K; ++k) q[k] = 2.0 * std::real(Q[k + 1] - Q[k - 1]) / (2.0 * k + 1.0);
    return q;
}

// log(x-1) and log(x+1) need |.| for real x < 1; package the real variants.
double log_abs(double v) { return std::log(std::abs(v)); }

std::vector<double> qk_log_real_outside(double x, int K) {
    auto Qc = legendre_q_offcut(cplx(x, 0.0), K + 1);
    std::vector<double> q(K);
    q[0] = (x + 1.0) * log_abs(x + 1.0) - (x - 1.0) * log_abs(x - 1.0) - 2.0;
    for (int k = 1; k < K; ++k) q[k] = 2.0 * std::real(Qc[k + 1] - Qc[k - 1]) / (2.0 * k + 1.0);
    return q;
}

}  // namespace

ProductIntegration::ProductIntegration(int n_pt) : n_pt_(n_pt) {
    const auto& rule = canonical_rule(n_pt);
    nodes_ = rule.nodes;
    weights_ = rule.weights;
    vander_.resize(n_pt, n_pt);
    for (int j = 0; j < n_pt; ++j) {
        auto P = legendre_p(nodes_[j], n_pt);
        for (int k = 0; k < n_pt; ++k) vander_(j, k) = P[k];
    }
    vander_t_.compute(vander_.transpose());
    canon_.nodes = nodes_;
    canon_.WL.resize(n_pt, n_pt);
    canon_.WC.resize(n_pt, n_pt);
    for (int i = 0; i < n_pt; ++i) {
        auto lr = log_row(nodes_[i]);
        auto cr = cauchy_row(nodes_[i]);
        for (int j = 0; j < n_pt; ++j) {
            canon_.WL(i, j) = lr[j];
            canon_.WC(i, j) = cr[j];
        }
    }
}

std::vector<double> ProductIntegration::solve_rowT(const std::vector<double>& rhs) const {
    Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n_pt_);
    Eigen::VectorXd w = vander_t_.solve(b);
    return std::vector<double>(w.data(), w.data() + n_pt_);
}

std::vector<double> ProductIntegration::log_row(double x) const {
    std::vector<double> q;
    if (std::abs(x) < 1.0)
        q = qk_log_cut(x, n_pt_);
    else
        q = qk_log_real_outside(x, n_pt_);
    return solve_rowT(q);
}

std::vector<double> ProductIntegration::log_row(cplx x) const {
    if (x.imag() == 0.0) return log_row(x.real());
    return solve_rowT(qk_log_offcut(x, n_pt_));
}

std::vector<double> ProductIntegration::cauchy_row(double x) const {
    // int P_k(t)/(t-x) dt = -2 Q_k(x) in both the on-cut (principal value)
    // and real-outside senses.
    std::vector<double> c(n_pt_);
    if (std::abs(x) < 1.0) {
        auto Q = legendre_q_cut(x, n_pt_);
        for (int k = 0; k < n_pt_; ++k) c[k] = -2.0 * Q[k];
    } else {
        auto Q = legendre_q_offcut(cplx(x, 0.0), n_pt_);
        for (int k = 0; k < n_pt_; ++k) c[k] = -2.0 * std::real(Q[k]);
    }
    return solve_rowT(c);
}

std::vector<cplx> ProductIntegration::cauchy_row(cplx x) const {
    auto Q = legendre_q_offcut(x, n_pt_);
    std::vector<double> re(n_pt_), im(n_pt_);
    for (int k = 0; k < n_pt_; ++k) {
        re[k] = -2.0 * Q[k].real();
        im[k] = -2.0 * Q[k].imag();
    }
    auto wre = solve_rowT(re);
    auto wim = solve_rowT(im);
    std::vector<cplx> out(n_pt_);
    for (int j = 0; j < n_pt_; ++j) out[j] = cplx(wre[j], wim[j]);
    return out;
}

const ProductIntegration& ProductIntegration::get(int n_pt) {
    static std::mutex mu;
    static std::map<int, ProductIntegration> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n_pt);
    if (it == cache.end()) it = cache.emplace(n_pt, ProductIntegration(n_pt)).first;
    return it->second;
}

CanonicalWeightMatrices build_canonical_matrices(std::span<const double> nodes) {
    const int n = static_cast<int>(nodes.size());
    if (n > 40) throw QuadratureError("canonical matrices limited to 40 nodes");
    for (int i = 0; i < n; ++i)
        if (!(std::abs(nodes[i]) < 1.0)) throw QuadratureError("canonical nodes must lie in (-1,1)");
    // Build a one-off context when the node set is not a cached rule.
    Eigen::MatrixXd V(n, n);
    for (int j = 0; j < n; ++j) {
        auto P = legendre_p(nodes[j], n);
        for (int k = 0; k < n; ++k) V(j, k) = P[k];
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(V.transpose());
    CanonicalWeightMatrices out;
    out.nodes.assign(nodes.begin(), nodes.end());
    out.WL.resize(n, n);
    out.WC.resize(n, n);
    for (int i = 0; i < n; ++i) {
        auto q = qk_log_cut(nodes[i], n);
        auto Q = legendre_q_cut(nodes[i], n);
        Eigen::Map<const Eigen::VectorXd> qb(q.data(), n);
        Eigen::VectorXd wl = lu.solve(qb);
        Eigen::VectorXd cb(n);
        for (int k = 0; k < n; ++k) cb(k) = -2.0 * Q[k];
        Eigen::VectorXd wc = lu.solve(cb);
        for (int j = 0; j < n; ++j) {
            out.WL(i, j) = wl(j);
            out.WC(i, j) = wc(j);
        }
    }
    return out;
}

std::vector<double> log_corrections_on_grid(const Panel& source_panel, double target_t,
                                            int target_local_index, double target_speed) {
    const auto& pi = ProductIntegration::get(source_panel.n_pt);
    const int n = source_panel.n_pt;
    const double x = source_panel.to_canonical(target_t);
    std::vector<double> corr(n);
    if (target_local_index >= 0) {
        const auto& WL = pi.canonical().WL;
        const auto& tj = pi.nodes();
        const auto& wj = pi.weights();
        const int i = target_local_index;
        for (int j = 0; j < n; ++j) {
            if (j == i)
                corr[j] = WL(i, i) / wj[i] + std::log(std::abs(source_panel.half_length() * target_speed));
            else
                corr[j] = WL(i, j) / wj[j] - std::log(std::abs(tj[i] - tj[j]));
        }
    } else {
        auto row = pi.log_row(x);
        const auto& tj = pi.nodes();
        const auto& wj = pi.weights();
        for (int j = 0; j < n; ++j) corr[j] = row[j] / wj[j] - std::log(std::abs(x - tj[j]));
    }
    return corr;
}

std::vector<double> cauchy_compensation_on_grid(const Panel& source_panel,
                                                const CurvePoint& target,
                                                std::span<const CurvePoint> source_points,
                                                int target_local_index) {
    const auto& pi = ProductIntegration::get(source_panel.n_pt);
    const int n = source_panel.n_pt;
    const auto& tj = pi.nodes();
    const auto& wj = pi.weights();
    std::vector<double> cmp(n);
    const Vec2 nu_i = target.normal();
    if (target_local_index >= 0) {
        const int i = target_local_index;
        const auto& WC = pi.canonical().WC;
        for (int j = 0; j < n; ++j) {
            if (j == i) {
                // Re(zeta''/zeta') = s'/s = (r'.r'')/s^2; the parameter weight
                // carries the panel half-length.
                const cplx zdot(target.drc, target.dz);
                const cplx zddot(target.d2rc, target.d2z);
                const double wi = source_panel.half_length() * wj[i];
                cmp[j] = -WC(i, i) - std::real(zddot / (2.0 * zdot)) * wi;
            } else {
                const Vec2 nu_j = source_points[j].normal();
                cmp[j] = -dot(nu_i, nu_j) * (WC(i, j) - wj[j] / (tj[j] - tj[i]));
            }
        }
    } else {
        const double x = source_panel.to_canonical(target.t);
        auto row = pi.cauchy_row(x);
        for (int j = 0; j < n; ++j) {
            const Vec2 nu_j = source_points[j].normal();
            cmp[j] = -dot(nu_i, nu_j) * (row[j] - wj[j] / (tj[j] - x));
        }
    }
    return cmp;
}

cplx panel_preimage(const Panel& panel, std::span<const CurvePoint> panel_points, Vec2 target) {
    const auto& pi = ProductIntegration::get(panel.n_pt);
    const int n = panel.n_pt;
    const auto& tj = pi.nodes();
    auto bary = barycentric_weights(tj);
    std::vector<cplx> zeta(n), dzeta(n);
    for (int j = 0; j < n; ++j) {
        zeta[j] = cplx(panel_points[j].rc, panel_points[j].z);
        dzeta[j] = panel.half_length() * cplx(panel_points[j].drc, panel_points[j].dz);
    }
    auto eval = [&](const std::vector<cplx>& vals, cplx x) -> cplx {
        cplx num = 0.0, den = 0.0;
        for (int j = 0; j < n; ++j) {
            const cplx d = x - tj[j];
            if (std::abs(d) < 1e-14) return vals[j];
            const cplx c = bary[j] / d;
            num += c * vals[j];
            den += c;
        }
        return num / den;
    };
    const cplx z0(target.rc, target.z);
    const cplx za = eval(zeta, cplx(-1.0, 0.0)), zb = eval(zeta, cplx(1.0, 0.0));
    cplx x = (2.0 * z0 - (za + zb)) / (zb - za);
    for (int it = 0; it < 40; ++it) {
        const cplx f = eval(zeta, x) - z0;
        const cplx fp = eval(dzeta, x);
        const cplx dx = f / fp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
        if (std::abs(x) > 4.0)
            throw QuadratureError("panel_preimage: target too far from panel");
    }
    return x;
}

NearWeights near_weights_offgrid(const Panel& panel, std::span<const CurvePoint> panel_points,
                                 Vec2 target, Vec2 mu) {
    const auto& pi = ProductIntegration::get(panel.n_pt);
    const int n = panel.n_pt;
    const auto& tj = pi.nodes();
    const double Delta = panel.half_length();

    NearWeights out;
    out.preimage = panel_preimage(panel, panel_points, target);
    const cplx x = out.preimage;
    const cplx z0(target.rc, target.z);

    // log weights: log|r-r'| = log|x - t'| + log|(r-r')/(x - t')| with the
    // second factor smooth; its node values fold into plain quadrature.
    auto lrow = (x.imag() == 0.0 && std::abs(x.real()) < 1.0)
                    ? pi.log_row(x.real())
                    : pi.log_row(x);
    out.wL.resize(n);
    for (int j = 0; j < n; ++j) {
        const cplx zj(panel_points[j].rc, panel_points[j].z);
        const double ratio = std::abs((z0 - zj) / (x - tj[j]));
        out.wL[j] = Delta * (lrow[j] + std::log(ratio) * pi.weights()[j]);
    }

    // Cauchy weights: mu.(r-r')/|r-r'|^2 = Re(M/(z0-zeta')), and
    // 1/(z0-zeta(t')) = -phi(t')/(t'-x) with phi = (x-t')/(z0-zeta(t')) smooth.
    const cplx M(mu.rc, mu.z);
    std::vector<cplx> crow = pi.cauchy_row(x);
    out.wC.resize(n);
    for (int j = 0; j < n; ++j) {
        const cplx zj(panel_points[j].rc, panel_points[j].z);
        const cplx phi = (x - tj[j]) / (z0 - zj);
        out.wC[j] = std::real(-M * Delta * phi * panel_points[j].speed * crow[j]);
    }
    return out;
}

}  // namespace axihelm
