#include <doctest.h>

#include <cmath>

#include "axihelm/geometry.hpp"

using namespace axihelm;

TEST_CASE("canonical rule integrates polynomials exactly") {
    for (int npt : {16, 32}) {
        const auto& r = canonical_rule(npt);
        double wsum = 0.0;
        for (double w : r.weights) wsum += w;
        CHECK(std::abs(wsum - 2.0) < 1e-14);
        // t^p over [-1,1] for p <= 2 n_pt - 1
        for (int p = 0; p < 2 * npt; ++p) {
            double acc = 0.0;
            for (int j = 0; j < npt; ++j) acc += r.weights[j] * std::pow(r.nodes[j], p);
            const double exact = (p % 2 == 0) ? 2.0 / (p + 1.0) : 0.0;
            CHECK(std::abs(acc - exact) < 1e-14 * (1.0 + std::abs(exact)));
        }
    }
}

TEST_CASE("unit sphere mesh basics") {
    SphereCurve c;
    auto mesh = build_mesh(c, 1);
    CHECK(mesh.grid.size() == 16);
    for (int j = 0; j < 16; ++j) {
        const auto& p = mesh.grid.points[j];
        CHECK(p.rc == doctest::Approx(std::sin(p.t)).epsilon(1e-15));
        CHECK(p.speed == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("star mesh matches the reported grid size") {
    StarCurve c;
    auto mesh = build_mesh(c, 17);
    CHECK(mesh.grid.size() == 272);
}

TEST_CASE("axis contact at panel edges") {
    StarCurve c;
    auto mesh = build_mesh(c, 2);
    CHECK(mesh.panels.front().t_a == 0.0);
    CHECK(mesh.panels.back().t_b == doctest::Approx(M_PI));
    CHECK(c.at(0.0).rc == 0.0);
    CHECK(c.at(M_PI).rc == 0.0);
}

TEST_CASE("grid frame is orthonormal and outward") {
    StarCurve c;
    auto mesh = build_mesh(c, 7);
    for (const auto& p : mesh.grid.points) {
        const Vec2 nu = p.normal(), tau = p.tangent();
        CHECK(std::abs(norm(nu) - 1.0) < 1e-14);
        CHECK(std::abs(dot(nu, tau)) < 1e-14);
        // nu . dr/dt = 0
        CHECK(std::abs(nu.rc * p.drc + nu.z * p.dz) / p.speed < 1e-13);
        // outward against an interior reference point
        const Vec2 inward{p.rc - 0.05, p.z - (p.z > 0 ? 0.05 : -0.05)};
        (void)inward;
        CHECK(dot(nu, {p.rc, p.z}) > 0.0);  // star is radially star-shaped about the origin
    }
}

TEST_CASE("binary refinement") {
    Panel p{0.0, 1.0, 16};
    auto r0 = refine_panel_binary(p, 0, RefineDirection::TowardStart);
    CHECK(r0.size() == 1);
    CHECK(r0[0].t_a == 0.0);
    CHECK(r0[0].t_b == 1.0);

    auto r2 = refine_panel_binary(p, 2, RefineDirection::TowardStart);
    REQUIRE(r2.size() == 3);
    CHECK(r2[0].t_a == doctest::Approx(0.0));
    CHECK(r2[0].t_b == doctest::Approx(0.25));
    CHECK(r2[1].t_b == doctest::Approx(0.5));
    CHECK(r2[2].t_b == doctest::Approx(1.0));

    auto r11 = refine_panel_binary(p, 11, RefineDirection::TowardStart);
    REQUIRE(r11.size() == 12);
    CHECK(r11[0].t_b - r11[0].t_a == doctest::Approx(1.0 / 2048.0));
    // union preserved
    double cover = 0.0;
    for (const auto& q : r11) cover += q.t_b - q.t_a;
    CHECK(cover == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS(refine_panel_binary(p, 12, RefineDirection::TowardStart));
}

TEST_CASE("interpolation matrix") {
    const auto& from = canonical_rule(16).nodes;
    const auto& to = canonical_rule(32).nodes;

    SUBCASE("identity when nodes coincide") {
        auto I = panel_interpolation_matrix(from, from);
        for (int i = 0; i < 16; ++i)
            for (int j = 0; j < 16; ++j)
                CHECK(std::abs(I(i, j) - (i == j ? 1.0 : 0.0)) < 1e-12);
    }
    SUBCASE("constants reproduce") {
        auto L = panel_interpolation_matrix(from, to);
        for (int i = 0; i < 32; ++i) {
            double s = 0.0;
            for (int j = 0; j < 16; ++j) s += L(i, j);
            CHECK(std::abs(s - 1.0) < 1e-13);
        }
    }
    SUBCASE("degree-15 polynomial to 1e-13") {
        auto L = panel_interpolation_matrix(from, to);
        // Chebyshev-like test polynomial of degree 15
        auto poly = [](double x) {
            double acc = 0.0, c = 1.0;
            for (int p = 0; p <= 15; ++p) {
                acc += c * std::pow(x, p);
                c = -0.8 * c;
            }
            return acc;
        };
        Eigen::VectorXd v(16);
        for (int j = 0; j < 16; ++j) v(j) = poly(from[j]);
        Eigen::VectorXd w = L * v;
        double maxerr = 0.0;
        for (int i = 0; i < 32; ++i) maxerr = std::max(maxerr, std::abs(w(i) - poly(to[i])));
        CHECK(maxerr < 1e-13);
    }
    SUBCASE("coincident nodes rejected") {
        std::vector<double> bad = {0.0, 0.0, 0.5};
        CHECK_THROWS(panel_interpolation_matrix(bad, to));
    }
}

TEST_CASE("refine then interpolate back is identity on polynomials") {
    Panel p{0.3, 0.9, 16};
    auto pieces = refine_panel_binary(p, 3, RefineDirection::TowardEnd);
    const auto& c16 = canonical_rule(16).nodes;
    auto poly = [](double t) { return 1.0 + t * (2.0 + t * (-1.5 + t * 0.25)); };
    // sample on the parent nodes, interpolate to the pieces, then back
    std::vector<double> parent_nodes(16), piece_canon;
    for (int j = 0; j < 16; ++j) parent_nodes[j] = p.node(j);
    std::vector<double> vals16(16);
    for (int j = 0; j < 16; ++j) vals16[j] = poly(parent_nodes[j]);
    double maxerr = 0.0;
    for (const auto& q : pieces) {
        std::vector<double> qc(16);
        for (int j = 0; j < 16; ++j) qc[j] = p.to_canonical(q.node(j));
        auto L = panel_interpolation_matrix(c16, qc);
        for (int i = 0; i < 16; ++i) {
            double acc = 0.0;
            for (int j = 0; j < 16; ++j) acc += L(i, j) * vals16[j];
            maxerr = std::max(maxerr, std::abs(acc - poly(q.node(i))));
        }
    }
    CHECK(maxerr < 1e-12);
}

TEST_CASE("non-finite curve evaluation is a geometry error") {
    CallableCurve c([](double t, double out[6]) {
        out[0] = std::sin(t);
        out[1] = std::cos(t);
        out[2] = std::cos(t);
        out[3] = -std::sin(t);
        out[4] = t > 1.0 ? std::numeric_limits<double>::quiet_NaN() : -std::sin(t);
        out[5] = -std::cos(t);
        (void)t;
    });
    // NaN in a second derivative does not hurt speed, so probe a harder case:
    CallableCurve bad([](double, double out[6]) {
        for (int i = 0; i < 6; ++i) out[i] = std::numeric_limits<double>::quiet_NaN();
    });
    CHECK_THROWS_AS(build_mesh(bad, 4), GeometryError);
}
