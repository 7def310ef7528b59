#include "axihelm/kernels.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace axihelm {

namespace {

constexpr double four_pi = 4.0 * M_PI;
const double pref_norm = 1.0 / std::sqrt(8.0 * M_PI * M_PI * M_PI);
const double sqrt_2pi = std::sqrt(2.0 * M_PI);

// (sin x - x cos x)/x^3, stable through x = 0.
double h4_over_cube(double x) {
    if (std::abs(x) < 1e-2) {
        const double x2 = x * x;
        return (1.0 / 3.0) + x2 * (-1.0 / 30.0 + x2 * (1.0 / 840.0 - x2 / 45360.0));
    }
    return (std::sin(x) - x * std::cos(x)) / (x * x * x);
}

// sin(x)/x, stable through x = 0.
double sinc(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
    }
    return std::sin(x) / x;
}

}  // namespace

PointPair make_point_pair(const CurvePoint& target, const CurvePoint& source, double k) {
    PointPair p;
    p.target = target;
    p.source = source;
    p.k = k;
    const double drc = target.rc - source.rc;
    const double dz = target.z - source.z;
    p.dist2 = drc * drc + dz * dz;
    p.dist = std::sqrt(p.dist2);
    p.chim1 = p.dist2 / (2.0 * target.rc * source.rc);
    p.chi = 1.0 + p.chim1;
    return p;
}

SurfacePoint3 rotate_to_3d(const CurvePoint& p, double theta) {
    SurfacePoint3 s;
    const double c = std::cos(theta), sn = std::sin(theta);
    s.x[0] = p.rc * c;
    s.x[1] = p.rc * sn;
    s.x[2] = p.z;
    s.nu[0] = p.nu_rc * c;
    s.nu[1] = p.nu_rc * sn;
    s.nu[2] = p.nu_z;
    s.tau[0] = p.nu_z * c;
    s.tau[1] = p.nu_z * sn;
    s.tau[2] = -p.nu_rc;
    return s;
}

Kernels3D full_kernels_3d(const SurfacePoint3& r, const SurfacePoint3& rp, double k) {
    double d[3];
    for (int i = 0; i < 3; ++i) d[i] = r.x[i] - rp.x[i];
    const double R2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
    if (R2 == 0.0) throw KernelError("full_kernels_3d: coincident points");
    const double R = std::sqrt(R2);
    Kernels3D out;
    const double kr = k * R;
    out.H1 = std::cos(kr);
    out.H2 = std::sin(kr);
    out.H3 = std::cos(kr) + kr * std::sin(kr);
    out.H4 = std::sin(kr) - kr * std::cos(kr);
    out.Z = 1.0 / (four_pi * R);
    const double nu_dot = r.nu[0] * d[0] + r.nu[1] * d[1] + r.nu[2] * d[2];
    const double tau_dot = r.tau[0] * d[0] + r.tau[1] * d[1] + r.tau[2] * d[2];
    out.Dnu = -nu_dot / (four_pi * R2 * R);
    out.Dtau = -tau_dot / (four_pi * R2 * R);
    out.S = out.Z * cplx(out.H1, out.H2);
    out.Knu = out.Dnu * cplx(out.H3, out.H4);
    out.Ktau = out.Dtau * cplx(out.H3, out.H4);
    return out;
}

AzimuthalTransform::AzimuthalTransform(int N) : N_(N) {
    theta_.resize(N + 1);
    for (int j = 0; j <= N; ++j) theta_(j) = 2.0 * M_PI * j / (2.0 * N + 1.0);
    cosmat_.resize(N + 1, N + 1);
    const double scale = sqrt_2pi / (2.0 * N + 1.0);
    for (int n = 0; n <= N; ++n)
        for (int j = 0; j <= N; ++j)
            cosmat_(n, j) = scale * std::cos(n * theta_(j)) * (j == 0 ? 1.0 : 2.0);
}

Eigen::VectorXd AzimuthalTransform::transform_even(const Eigen::ArrayXd& samples) const {
    return cosmat_ * samples.matrix();
}

Eigen::RowVectorXd AzimuthalTransform::coefficient_row(int n) const {
    return cosmat_.row(std::abs(n));
}

const AzimuthalTransform& AzimuthalTransform::get(int N) {
    static std::mutex mu;
    static std::map<int, AzimuthalTransform> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(N);
    if (it == cache.end()) it = cache.emplace(N, AzimuthalTransform(N)).first;
    return it->second;
}

std::vector<cplx> modal_transform_fft(const std::function<cplx(double)>& integrand, int N) {
    const int M = 2 * N + 1;
    std::vector<cplx> samples(M);
    for (int m = 0; m < M; ++m) {
        const double th = 2.0 * M_PI * m / M;
        samples[m] = integrand(th);
        if (!std::isfinite(samples[m].real()) || !std::isfinite(samples[m].imag()))
            throw KernelError("modal_transform_fft: singular integrand at a quadrature angle");
    }
    std::vector<cplx> out(M);
    const double scale = sqrt_2pi / M;
    for (int n = -N; n <= N; ++n) {
        cplx acc = 0.0;
        for (int m = 0; m < M; ++m) {
            const double th = 2.0 * M_PI * m / M;
            acc += std::polar(1.0, -n * th) * samples[m];
        }
        out[n + N] = scale * acc;
    }
    return out;
}

cplx convolve_truncated(std::span<const cplx> g, std::span<const cplx> h, int n) {
    const int N = (static_cast<int>(g.size()) - 1) / 2;
    cplx acc = 0.0;
    const int lo = std::max(n - N, -N);
    const int hi = std::min(N, N + n);
    for (int m = lo; m <= hi; ++m) acc += g[m + N] * h[n - m + N];
    return acc / sqrt_2pi;
}

double convolve_truncated_even(std::span<const double> g, std::span<const double> h, int n,
                               int N) {
    double acc = 0.0;
    const int lo = std::max(n - N, -N);
    const int hi = std::min(N, N + n);
    for (int m = lo; m <= hi; ++m) acc += g[std::abs(m)] * h[std::abs(n - m)];
    return acc / sqrt_2pi;
}

ModalZD modal_Z_Dnu_Dtau(const PointPair& pair, int n_max) {
    if (!(pair.chim1 > 0.0))
        throw KernelError("modal_Z_Dnu_Dtau: coincident points (chi must exceed 1)");
    if (!(pair.target.rc > 0.0 && pair.source.rc > 0.0))
        throw KernelError("modal_Z_Dnu_Dtau: points must lie off the axis");
    const auto tab = legendre_q(pair.chi, pair.chim1, std::max(n_max, 1));
    const double pref = pref_norm / std::sqrt(pair.target.rc * pair.source.rc);
    const Vec2 dd = pair.target.pos() - pair.source.pos();
    const double dnu = dot(pair.target.normal(), dd) / pair.dist2;
    const double dtau = dot(pair.target.tangent(), dd) / pair.dist2;
    const double a = pair.target.nu_rc / (2.0 * pair.target.rc);
    const double b = pair.target.nu_z / (2.0 * pair.target.rc);
    ModalZD out;
    out.Z.resize(n_max + 1);
    out.Dnu.resize(n_max + 1);
    out.Dtau.resize(n_max + 1);
    for (int n = 0; n <= n_max; ++n) {
        out.Z[n] = pref * tab.Q[n];
        out.Dnu[n] = pref * ((dnu - a) * tab.R[n] - a * tab.Q[n]);
        out.Dtau[n] = pref * (dtau * tab.R[n] - b * (tab.R[n] + tab.Q[n]));
    }
    return out;
}

namespace {

double expansion_variable(const CurvePoint& target, const CurvePoint& source, double dist2) {
    const double u = (target.rc - source.rc) / target.rc;
    return dist2 / (4.0 * target.rc * target.rc) * (1.0 + u * (1.0 + u * (1.0 + u)));
}

}  // namespace

SingularSplit q_log_split(const PointPair& pair, int n) {
    SingularSplit s;
    const double rc = pair.target.rc;
    s.diagonal_value = std::log(2.0 * rc) - euler_gamma - digamma_half_integer(std::abs(n));
    if (pair.dist2 == 0.0) {
        s.G_log = -1.0;
        s.G_full = s.diagonal_value;
        return s;
    }
    const double T = expansion_variable(pair.target, pair.source, pair.dist2);
    const int na = std::abs(n);
    s.G_log = -hyper_2f1_truncated(0.5 - na, 0.5 + na, -T);
    s.G_full = legendre_q(pair.chi, pair.chim1, std::max(na, 1)).Q[na];
    return s;
}

SingularSplit dtau_R_split(const PointPair& pair, int n) {
    SingularSplit s;
    s.G_cauchy = -1.0;
    if (pair.dist2 == 0.0) return s;  // both smooth factors vanish at r' = r
    const int na = std::abs(n);
    const double T = expansion_variable(pair.target, pair.source, pair.dist2);
    const double Fn = hyper_2f1_truncated(0.5 - na, 0.5 + na, -T);
    const double Fn1 = hyper_2f1_truncated(1.5 - na, na - 0.5, -T);
    const Vec2 dd = pair.target.pos() - pair.source.pos();
    const double dtau = dot(pair.target.tangent(), dd) / pair.dist2;
    s.G_log = -dtau * (2.0 * na - 1.0) / (pair.chi + 1.0) * (pair.chi * Fn - Fn1);
    s.G_full = dtau * legendre_q(pair.chi, pair.chim1, std::max(na, 1)).R[na];
    return s;
}

CloseKernelEvaluator::CloseKernelEvaluator(KernelKind kind, int mode_n, double k,
                                           const AzimuthalTransform& plan)
    : kind_(kind), n_(mode_n), k_(k), plan_(plan), row_n_(plan.coefficient_row(mode_n)) {}

namespace {

struct SampleSet {
    Eigen::ArrayXd osc;     // H1 or H3 samples over half angles
    Eigen::ArrayXd smooth;  // ZH2, DnuH4 or DtauH4 samples
};

SampleSet sample_pair(KernelKind kind, const CurvePoint& tgt, const CurvePoint& src, double k,
                      const Eigen::ArrayXd& theta) {
    SampleSet out;
    const int M = static_cast<int>(theta.size());
    out.osc.resize(M);
    out.smooth.resize(M);
    const double drc = tgt.rc - src.rc;
    const double dz = tgt.z - src.z;
    const double d2 = drc * drc + dz * dz;
    for (int j = 0; j < M; ++j) {
        const double sh = std::sin(0.5 * theta(j));
        const double R2 = d2 + 4.0 * tgt.rc * src.rc * sh * sh;
        const double R = std::sqrt(R2);
        const double kr = k * R;
        const double ckr = std::cos(kr);
        const double skr = std::sin(kr);
        switch (kind) {
            case KernelKind::SingleLayer:
                out.osc(j) = ckr;
                out.smooth(j) = k * sinc(kr) / four_pi;
                break;
            case KernelKind::NormalDerivative: {
                out.osc(j) = ckr + kr * skr;
                const double num = tgt.nu_rc * (tgt.rc - src.rc * std::cos(theta(j))) +
                                   tgt.nu_z * (tgt.z - src.z);
                out.smooth(j) = -num * k * k * k * h4_over_cube(kr) / four_pi;
                break;
            }
            case KernelKind::TangentialDerivative: {
                out.osc(j) = ckr + kr * skr;
                const double num = tgt.nu_z * (tgt.rc - src.rc * std::cos(theta(j))) -
                                   tgt.nu_rc * (tgt.z - src.z);
                out.smooth(j) = -num * k * k * k * h4_over_cube(kr) / four_pi;
                break;
            }
        }
    }
    return out;
}

}  // namespace

std::vector<CloseKernelValue> CloseKernelEvaluator::evaluate(const CurvePoint& target,
                                                             std::span<const CurvePoint> sources,
                                                             int diag_index) const {
    const int N = plan_.N();
    const int nsrc = static_cast<int>(sources.size());
    const int n = std::abs(n_);
    std::vector<CloseKernelValue> out(nsrc);

    const double rc_t = target.rc;
    const double a = target.nu_rc / (2.0 * rc_t);
    const double b = target.nu_z / (2.0 * rc_t);
    const double pref_diag = pref_norm / rc_t;

    std::vector<double> G0(N + 1), G1(N + 1), Gval(N + 1), Ftab(N + 1);

    for (int j = 0; j < nsrc; ++j) {
        const CurvePoint& src = sources[j];
        const auto samp = sample_pair(kind_, target, src, k_, plan_.half_angles());
        Eigen::VectorXd Hc = plan_.half_matrix() * samp.osc.matrix();
        const double smooth_n = row_n_.dot(samp.smooth.matrix());

        if (j == diag_index) {
            // Smooth remainder values replace the (undefined) kernel value.
            const double dnu_diag =
                -(target.nu_rc * target.d2rc + target.nu_z * target.d2z) /
                (2.0 * target.speed * target.speed);
            const double lg = std::log(2.0 * rc_t) - euler_gamma;
            double g1c = 0.0, g2c = 0.0;
            for (int m = 0; m <= N; ++m) {
                const double Rt = lg - digamma_half_integer(m);
                switch (kind_) {
                    case KernelKind::SingleLayer:
                        G0[m] = pref_diag * Rt;
                        break;
                    case KernelKind::NormalDerivative:
                        G0[m] = pref_diag * (-(dnu_diag - a) - a * Rt);
                        break;
                    case KernelKind::TangentialDerivative:
                        G0[m] = -pref_diag * b * (Rt - 1.0);
                        break;
                }
            }
            switch (kind_) {
                case KernelKind::SingleLayer:
                    g1c = -pref_diag;
                    break;
                case KernelKind::NormalDerivative:
                    g1c = pref_diag * a;
                    break;
                case KernelKind::TangentialDerivative:
                    g1c = pref_diag * b;
                    g2c = -pref_diag;
                    break;
            }
            std::vector<double> ones(N + 1, 1.0);
            const double hsum = convolve_truncated_even(ones, {Hc.data(), size_t(N + 1)}, n_, N);
            out[j].full = cplx(convolve_truncated_even(G0, {Hc.data(), size_t(N + 1)}, n_, N),
                               smooth_n);
            out[j].g_log = g1c * hsum;
            out[j].g_cauchy = g2c * hsum;
            continue;
        }

        const auto pair = make_point_pair(target, src, k_);
        const auto tab = legendre_q(pair.chi, pair.chim1, std::max(N, 1));
        const double pref = pref_norm / std::sqrt(rc_t * src.rc);
        const Vec2 dd = target.pos() - src.pos();
        const double dnu = dot(target.normal(), dd) / pair.dist2;
        const double dtau = dot(target.tangent(), dd) / pair.dist2;
        const double T = expansion_variable(target, src, pair.dist2);

        for (int m = 0; m <= N; ++m) Ftab[m] = hyper_2f1_truncated(0.5 - m, 0.5 + m, -T);
        auto Fprev = [&](int m) { return Ftab[m == 0 ? 1 : m - 1]; };

        switch (kind_) {
            case KernelKind::SingleLayer:
                for (int m = 0; m <= N; ++m) {
                    Gval[m] = pref * tab.Q[m];
                    G1[m] = -pref * Ftab[m];
                }
                break;
            case KernelKind::NormalDerivative:
                for (int m = 0; m <= N; ++m) {
                    const double g1R =
                        -(2.0 * m - 1.0) / (pair.chi + 1.0) * (pair.chi * Ftab[m] - Fprev(m));
                    Gval[m] = pref * ((dnu - a) * tab.R[m] - a * tab.Q[m]);
                    G1[m] = pref * ((dnu - a) * g1R + a * Ftab[m]);
                }
                break;
            case KernelKind::TangentialDerivative:
                for (int m = 0; m <= N; ++m) {
                    const double g1R =
                        -(2.0 * m - 1.0) / (pair.chi + 1.0) * (pair.chi * Ftab[m] - Fprev(m));
                    Gval[m] = pref * (dtau * tab.R[m] - b * (tab.R[m] + tab.Q[m]));
                    G1[m] = pref * (dtau * g1R - b * (g1R - Ftab[m]));
                }
                break;
        }

        std::span<const double> Hspan{Hc.data(), size_t(N + 1)};
        out[j].full = cplx(convolve_truncated_even(Gval, Hspan, n_, N), smooth_n);
        out[j].g_log = convolve_truncated_even(G1, Hspan, n_, N);
        if (kind_ == KernelKind::TangentialDerivative) {
            std::vector<double> ones(N + 1, 1.0);
            out[j].g_cauchy = -pref * convolve_truncated_even(ones, Hspan, n_, N);
        }
    }
    return out;
}

cplx CloseKernelEvaluator::distant_value(const CurvePoint& target,
                                         const CurvePoint& source) const {
    const int M = plan_.N() + 1;
    const auto& theta = plan_.half_angles();
    Eigen::ArrayXd re(M), im(M);
    const double drc = target.rc - source.rc;
    const double dz = target.z - source.z;
    const double d2 = drc * drc + dz * dz;
    if (d2 == 0.0) throw KernelError("distant_value: coincident points");
    for (int j = 0; j < M; ++j) {
        const double sh = std::sin(0.5 * theta(j));
        const double R2 = d2 + 4.0 * target.rc * source.rc * sh * sh;
        const double R = std::sqrt(R2);
        const double kr = k_ * R;
        switch (kind_) {
            case KernelKind::SingleLayer:
                re(j) = std::cos(kr) / (four_pi * R);
                im(j) = k_ * sinc(kr) / four_pi;
                break;
            case KernelKind::NormalDerivative: {
                const double num = target.nu_rc * (target.rc - source.rc * std::cos(theta(j))) +
                                   target.nu_z * (target.z - source.z);
                re(j) = -num * (std::cos(kr) + kr * std::sin(kr)) / (four_pi * R2 * R);
                im(j) = -num * k_ * k_ * k_ * h4_over_cube(kr) / four_pi;
                break;
            }
            case KernelKind::TangentialDerivative: {
                const double num = target.nu_z * (target.rc - source.rc * std::cos(theta(j))) -
                                   target.nu_rc * (target.z - source.z);
                re(j) = -num * (std::cos(kr) + kr * std::sin(kr)) / (four_pi * R2 * R);
                im(j) = -num * k_ * k_ * k_ * h4_over_cube(kr) / four_pi;
                break;
            }
        }
    }
    return cplx(row_n_.dot(re.matrix()), row_n_.dot(im.matrix()));
}

cplx CloseKernelEvaluator::distant_value_offcurve(Vec2 target, const CurvePoint& source) const {
    if (kind_ != KernelKind::SingleLayer)
        throw KernelError("off-curve targets support the single-layer kernel only");
    CurvePoint fake;
    fake.rc = target.rc;
    fake.z = target.z;
    fake.speed = 1.0;
    return distant_value(fake, source);
}

cplx modal_kernel_close(KernelKind kind, const PointPair& pair, int n, int N) {
    CloseKernelEvaluator ev(kind, n, pair.k, AzimuthalTransform::get(N));
    const CurvePoint src[1] = {pair.source};
    return ev.evaluate(pair.target, {src, 1}, pair.dist2 == 0.0 ? 0 : -1)[0].full;
}

}  // namespace axihelm
