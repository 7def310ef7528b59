#pragma once

#include <stdexcept>
#include <vector>

namespace axihelm {

class SpecfunError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct EllipticKE {
    double K = 0.0;
    double E = 0.0;
};

/// Complete elliptic integrals of the first and second kind at parameter m,
/// with the complement m1 = 1-m supplied independently so that full relative
/// accuracy is kept when m is close to 1. Computed from m1 with Carlson
/// symmetric forms (duplication iteration).
EllipticKE elliptic_KE(double m, double m1);

enum class RecursionMethod { Forward, Backward };

/// Half-integer Legendre functions of the second kind Q_{n-1/2}(chi) for
/// n = 0..N, plus the derived combination
///   R_n(chi) = (2n-1)/(chi+1) * (chi Q_{n-1/2} - Q_{n-3/2}),
/// which is even in n and finite at chi = 1. chi is carried together with
/// chi-1, which callers compute directly from |r-r'|^2/(2 rc rc') to avoid
/// cancellation.
struct ToroidalHarmonicTable {
    double chi = 0.0;
    double chim1 = 0.0;
    std::vector<double> Q;  // Q[n] = Q_{n-1/2}(chi), n = 0..N
    std::vector<double> R;  // R[n], n = 0..N
    RecursionMethod method = RecursionMethod::Forward;

    int max_index() const { return static_cast<int>(Q.size()) - 1; }
};

/// Three-term forward recursion seeded by the elliptic-integral values of
/// Q_{-1/2} and Q_{+1/2}. Cheap; loses accuracy for high n unless chi is
/// very close to 1.
ToroidalHarmonicTable legendre_q_forward(double chi, double chim1, int N);

/// Downward recursion from index M with fixed seeds, rescaled on the fly to
/// avoid overflow and normalized so Q[0] matches the elliptic-integral value.
ToroidalHarmonicTable legendre_q_backward(double chi, double chim1, int N, int M);

/// Method dispatch: backward with M = N+80 for chi >= 1.008, forward below.
ToroidalHarmonicTable legendre_q(double chi, double chim1, int N);

/// Convenience overload computing chim1 = chi - 1 (tests, distant points).
ToroidalHarmonicTable legendre_q(double chi, int N);

/// Four-term truncation of the Gauss series with unit third parameter:
/// sum_{k=0}^{3} (a)_k (b)_k x^k / (k!)^2.
double hyper_2f1_truncated(double a, double b, double x);

/// psi(n + 1/2) for integer n >= 0, via psi(1/2) = -gamma - 2 ln 2 and the
/// recurrence psi(x+1) = psi(x) + 1/x.
double digamma_half_integer(int n);

inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

}  // namespace axihelm
