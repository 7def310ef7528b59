#include "axihelm/geometry.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace axihelm {

namespace {

CurvePoint finish(double t, double rc, double z, double drc, double dz,
                  double d2rc, double d2z) {
    CurvePoint p;
    p.t = t;
    p.rc = rc;
    p.z = z;
    p.drc = drc;
    p.dz = dz;
    p.d2rc = d2rc;
    p.d2z = d2z;
    p.speed = std::hypot(drc, dz);
    if (!(p.speed > 0.0) || !std::isfinite(p.speed))
        throw GeometryError("curve evaluation produced non-finite or zero-speed point at t=" +
                            std::to_string(t));
    p.nu_rc = -dz / p.speed;
    p.nu_z = drc / p.speed;
    return p;
}

}  // namespace

CurvePoint SphereCurve::at(double t) const {
    const double st = (t == 0.0 || t == M_PI) ? 0.0 : std::sin(t);
    const double ct = std::cos(t);
    return finish(t, radius_ * st, radius_ * ct, radius_ * ct, -radius_ * st,
                  -radius_ * st, -radius_ * ct);
}

CurvePoint StarCurve::at(double t) const {
    const double st = (t == 0.0 || t == M_PI) ? 0.0 : std::sin(t);
    const double ct = std::cos(t);
    const double a = 1.0 + amp_ * std::cos(freq_ * t);
    const double ap = -amp_ * freq_ * std::sin(freq_ * t);
    const double app = -amp_ * freq_ * freq_ * std::cos(freq_ * t);
    return finish(t, a * st, a * ct,
                  ap * st + a * ct, ap * ct - a * st,
                  app * st + 2.0 * ap * ct - a * st, app * ct - 2.0 * ap * st - a * ct);
}

CurvePoint CallableCurve::at(double t) const {
    double v[6];
    eval_(t, v);
    if ((t == 0.0 || t == t_end_) && std::abs(v[0]) < 1e-13) v[0] = 0.0;
    return finish(t, v[0], v[1], v[2], v[3], v[4], v[5]);
}

namespace {

CanonicalRule compute_rule(int n) {
    CanonicalRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Newton from the Chebyshev-based initial guess
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 1; k < n; ++k) {
                double p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    return r;
}

}  // namespace

const CanonicalRule& canonical_rule(int n_pt) {
    static std::mutex mu;
    static std::map<int, CanonicalRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n_pt);
    if (it == cache.end()) it = cache.emplace(n_pt, compute_rule(n_pt)).first;
    return it->second;
}

std::vector<Panel> refine_panel_binary(const Panel& panel, int levels, RefineDirection dir) {
    if (levels < 0 || levels > 11)
        throw GeometryError("binary refinement levels must be in [0, 11]");
    std::vector<Panel> out;
    out.reserve(levels + 1);
    double a = panel.t_a, b = panel.t_b;
    for (int l = 0; l < levels; ++l) {
        const double mid = 0.5 * (a + b);
        if (dir == RefineDirection::TowardStart) {
            out.push_back({mid, b, panel.n_pt});
            b = mid;
        } else {
            out.push_back({a, mid, panel.n_pt});
            a = mid;
        }
    }
    out.push_back({a, b, panel.n_pt});
    std::sort(out.begin(), out.end(), [](const Panel& p, const Panel& q) { return p.t_a < q.t_a; });
    return out;
}

Mesh build_mesh(const GeneratingCurve& curve, int n_pan, int n_pt) {
    if (n_pan < 1) throw GeometryError("build_mesh requires n_pan >= 1");
    Mesh mesh;
    mesh.panels.reserve(n_pan);
    const double te = curve.t_end();
    for (int p = 0; p < n_pan; ++p) {
        mesh.panels.push_back({te * p / n_pan, te * (p + 1) / n_pan, n_pt});
    }
    auto& g = mesh.grid;
    g.n_pan = n_pan;
    g.n_pt = n_pt;
    g.points.reserve(n_pan * n_pt);
    g.weights.reserve(n_pan * n_pt);
    g.panel_of.reserve(n_pan * n_pt);
    g.index_in_panel.reserve(n_pan * n_pt);
    for (int p = 0; p < n_pan; ++p) {
        for (int j = 0; j < n_pt; ++j) {
            CurvePoint cp = curve.at(mesh.panels[p].node(j));
            if (!(cp.rc > 0.0))
                throw GeometryError("grid point off the open half-plane (rc <= 0)");
            g.points.push_back(cp);
            g.weights.push_back(mesh.panels[p].weight(j));
            g.panel_of.push_back(p);
            g.index_in_panel.push_back(j);
        }
    }
    return mesh;
}

std::vector<double> barycentric_weights(std::span<const double> nodes) {
    const int n = static_cast<int>(nodes.size());
    std::vector<double> w(n, 1.0);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            if (k == j) continue;
            const double d = nodes[j] - nodes[k];
            if (d == 0.0) throw GeometryError("coincident interpolation nodes");
            w[j] /= d;
        }
    }
    return w;
}

Eigen::MatrixXd panel_interpolation_matrix(std::span<const double> from_nodes,
                                           std::span<const double> to_nodes) {
    if (from_nodes.size() > 32) throw GeometryError("interpolation limited to 32 source nodes");
    const auto bary = barycentric_weights(from_nodes);
    const int nf = static_cast<int>(from_nodes.size());
    const int nt = static_cast<int>(to_nodes.size());
    Eigen::MatrixXd L(nt, nf);
    for (int i = 0; i < nt; ++i) {
        const double x = to_nodes[i];
        int hit = -1;
        for (int j = 0; j < nf; ++j)
            if (x == from_nodes[j]) hit = j;
        if (hit >= 0) {
            for (int j = 0; j < nf; ++j) L(i, j) = (j == hit) ? 1.0 : 0.0;
            continue;
        }
        double denom = 0.0;
        for (int j = 0; j < nf; ++j) denom += bary[j] / (x - from_nodes[j]);
        for (int j = 0; j < nf; ++j) L(i, j) = (bary[j] / (x - from_nodes[j])) / denom;
    }
    return L;
}

double lagrange_eval(std::span<const double> nodes, std::span<const double> bary,
                     std::span<const double> values, double x) {
    const int n = static_cast<int>(nodes.size());
    double num = 0.0, den = 0.0;
    for (int j = 0; j < n; ++j) {
        if (x == nodes[j]) return values[j];
        const double c = bary[j] / (x - nodes[j]);
        num += c * values[j];
        den += c;
    }
    return num / den;
}

}  // namespace axihelm
