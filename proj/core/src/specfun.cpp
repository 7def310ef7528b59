#include "axihelm/specfun.hpp"

#include <cmath>

namespace axihelm {

namespace {

// Carlson symmetric forms by duplication; tolerances sized for double.
double carlson_rf(double x, double y, double z) {
    constexpr double errtol = 5e-4;
    double xt = x, yt = y, zt = z;
    double mu = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double sx = std::sqrt(xt), sy = std::sqrt(yt), sz = std::sqrt(zt);
        const double lam = sx * (sy + sz) + sy * sz;
        xt = 0.25 * (xt + lam);
        yt = 0.25 * (yt + lam);
        zt = 0.25 * (zt + lam);
        mu = (xt + yt + zt) / 3.0;
        const double dx = (mu - xt) / mu, dy = (mu - yt) / mu, dz = (mu - zt) / mu;
        if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) < errtol) {
            const double e2 = dx * dy - dz * dz;
            const double e3 = dx * dy * dz;
            return (1.0 + (e2 / 24.0 - 0.1 - 3.0 * e3 / 44.0) * e2 + e3 / 14.0) / std::sqrt(mu);
        }
    }
    throw SpecfunError("carlson_rf failed to converge");
}

double carlson_rd(double x, double y, double z) {
    constexpr double errtol = 5e-4;
    double xt = x, yt = y, zt = z;
    double sum = 0.0, fac = 1.0, mu = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double sx = std::sqrt(xt), sy = std::sqrt(yt), sz = std::sqrt(zt);
        const double lam = sx * (sy + sz) + sy * sz;
        sum += fac / (sz * (zt + lam));
        fac *= 0.25;
        xt = 0.25 * (xt + lam);
        yt = 0.25 * (yt + lam);
        zt = 0.25 * (zt + lam);
        mu = 0.2 * (xt + yt + 3.0 * zt);
        const double dx = (mu - xt) / mu, dy = (mu - yt) / mu, dz = (mu - zt) / mu;
        if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) < errtol) {
            constexpr double c1 = 3.0 / 14.0, c2 = 1.0 / 6.0, c3 = 9.0 / 22.0;
            constexpr double c4 = 3.0 / 26.0, c5 = 0.25 * c3, c6 = 1.5 * c4;
            const double ea = dx * dy, eb = dz * dz, ec = ea - eb;
            const double ed = ea - 6.0 * eb, ee = ed + ec + ec;
            return 3.0 * sum +
                   fac * (1.0 + ed * (-c1 + c5 * ed - c6 * dz * ee) +
                          dz * (c2 * ec + dz * (-c3 * ec + dz * c4 * ea))) /
                       (mu * std::sqrt(mu));
        }
    }
    throw SpecfunError("carlson_rd failed to converge");
}

}  // namespace

EllipticKE elliptic_KE(double m, double m1) {
    if (!(m1 > 0.0)) throw SpecfunError("elliptic_KE: m1 must be positive (K diverges at m = 1)");
    EllipticKE out;
    out.K = carlson_rf(0.0, m1, 1.0);
    if (m <= 0.5) {
        out.E = out.K - (m / 3.0) * carlson_rd(0.0, m1, 1.0);
    } else {
        // Legendre relation, with K' - E' = (m1/3) R_D(0, m, 1); all terms
        // positive, so full relative accuracy survives m -> 1.
        const double Kp = carlson_rf(0.0, m, 1.0);
        const double KpmEp = (m1 / 3.0) * carlson_rd(0.0, m, 1.0);
        out.E = 0.5 * M_PI / Kp + out.K * KpmEp / Kp;
    }
    return out;
}

namespace {

struct Seeds {
    double q0, q1;
};

Seeds initializers(double chi, double chim1) {
    const double m = 2.0 / (chi + 1.0);
    const double m1 = chim1 / (chi + 1.0);
    const auto ke = elliptic_KE(m, m1);
    const double f = std::sqrt(2.0 / (chi + 1.0));
    return {f * ke.K, chi * f * ke.K - std::sqrt(2.0 * (chi + 1.0)) * ke.E};
}

void fill_R(ToroidalHarmonicTable& t) {
    const int N = t.max_index();
    t.R.resize(N + 1);
    if (N >= 1) {
        // index symmetry Q_{-3/2} = Q_{+1/2} supplies the n = 0 value
        t.R[0] = -(t.chi * t.Q[0] - t.Q[1]) / (t.chi + 1.0);
        for (int n = 1; n <= N; ++n)
            t.R[n] = (2.0 * n - 1.0) / (t.chi + 1.0) * (t.chi * t.Q[n] - t.Q[n - 1]);
    } else {
        const double m = 2.0 / (t.chi + 1.0);
        const double m1 = t.chim1 / (t.chi + 1.0);
        t.R[0] = -std::sqrt(m) * elliptic_KE(m, m1).E;
    }
}

}  // namespace

ToroidalHarmonicTable legendre_q_forward(double chi, double chim1, int N) {
    if (!(chim1 > 0.0)) throw SpecfunError("legendre_q_forward: requires chi > 1");
    ToroidalHarmonicTable t;
    t.chi = chi;
    t.chim1 = chim1;
    t.method = RecursionMethod::Forward;
    t.Q.resize(N + 1);
    const auto s = initializers(chi, chim1);
    t.Q[0] = s.q0;
    if (N >= 1) t.Q[1] = s.q1;
    for (int n = 2; n <= N; ++n)
        t.Q[n] = ((4.0 * n - 4.0) * chi * t.Q[n - 1] - (2.0 * n - 3.0) * t.Q[n - 2]) /
                 (2.0 * n - 1.0);
    fill_R(t);
    return t;
}

ToroidalHarmonicTable legendre_q_backward(double chi, double chim1, int N, int M) {
    if (!(chim1 > 0.0)) throw SpecfunError("legendre_q_backward: requires chi > 1");
    if (M <= N) throw SpecfunError("legendre_q_backward: requires M > N");
    ToroidalHarmonicTable t;
    t.chi = chi;
    t.chim1 = chim1;
    t.method = RecursionMethod::Backward;
    t.Q.resize(N + 1);

    // Fixed seeds; the downward run grows into the wanted solution and the
    // final normalization removes any seed dependence. Rescale on overflow,
    // tracking per-index rescale epochs so all kept values end up on one scale.
    constexpr double huge = 1e280;
    constexpr double tiny = 1e-280;
    std::vector<double> q(M + 3, 0.0);
    std::vector<int> epoch_of(M + 3, 0);
    q[M + 1] = 1.0;
    int epoch = 0;
    for (int n = M + 2; n >= 2; --n) {
        q[n - 2] = ((4.0 * n - 4.0) * chi * q[n - 1] - (2.0 * n - 1.0) * q[n]) / (2.0 * n - 3.0);
        if (std::abs(q[n - 2]) > huge) {
            q[n - 2] *= tiny;
            q[n - 1] *= tiny;
            ++epoch;
        }
        epoch_of[n - 2] = epoch;
    }
    const auto s = initializers(chi, chim1);
    const double scale = s.q0 / q[0];
    for (int n = 0; n <= N; ++n) {
        double v = q[n];
        for (int d = epoch - epoch_of[n]; d > 0; --d) v *= tiny;
        t.Q[n] = v * scale;
    }
    fill_R(t);
    return t;
}

ToroidalHarmonicTable legendre_q(double chi, double chim1, int N) {
    if (chi >= 1.008) return legendre_q_backward(chi, chim1, N, N + 80);
    return legendre_q_forward(chi, chim1, N);
}

ToroidalHarmonicTable legendre_q(double chi, int N) { return legendre_q(chi, chi - 1.0, N); }

double hyper_2f1_truncated(double a, double b, double x) {
    // (k!)^2 denominators: the unit third parameter of the underlying Gauss
    // series contributes the second factorial.
    double term1 = a * b * x;
    double term2 = (a * (a + 1.0)) * (b * (b + 1.0)) * x * x / 4.0;
    double term3 = (a * (a + 1.0) * (a + 2.0)) * (b * (b + 1.0) * (b + 2.0)) * x * x * x / 36.0;
    return 1.0 + term1 + term2 + term3;
}

double digamma_half_integer(int n) {
    if (n < 0) throw SpecfunError("digamma_half_integer: n must be >= 0");
    double v = -euler_gamma - 2.0 * M_LN2;
    for (int k = 1; k <= n; ++k) v += 2.0 / (2.0 * k - 1.0);
    return v;
}

}  // namespace axihelm
