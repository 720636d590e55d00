#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "qgp/fixtures.hpp"
#include "qgp/spectral.hpp"

using namespace qgp;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("secular matrix closed forms") {
    MetricGraph nn = fixtures::interval(1.0);
    for (double k : {0.5, 1.3, 2.9}) {
        CHECK(assemble_secular(nn, k).determinant() == doctest::Approx(-std::sin(k)).epsilon(1e-12));
    }
    MetricGraph dn = fixtures::interval(1.0, true, false);
    for (double k : {0.5, 1.3, 2.9}) {
        CHECK(assemble_secular(dn, k).determinant() == doctest::Approx(-std::cos(k)).epsilon(1e-12));
    }
    MetricGraph loop = fixtures::loop(1.0);
    for (double k : {0.5, 1.3, 2.9}) {
        CHECK(assemble_secular(loop, k).determinant() == doctest::Approx(2.0 - 2.0 * std::cos(k)).epsilon(1e-12));
    }
    CHECK(std::abs(assemble_secular(loop, 2.0 * kPi).determinant()) < 1e-12);
}

TEST_CASE("eigenvalues of model graphs") {
    SpectralResult interval = eigenvalues(fixtures::interval(1.0), 4);
    CHECK(interval.values[0] == doctest::Approx(0.0));
    CHECK(interval.values[1] == doctest::Approx(kPi * kPi).epsilon(1e-10));
    CHECK(interval.values[2] == doctest::Approx(4 * kPi * kPi).epsilon(1e-10));
    CHECK(interval.values[3] == doctest::Approx(9 * kPi * kPi).epsilon(1e-10));

    SpectralResult pk = eigenvalues(fixtures::pumpkin({1, 1, 1}), 4);
    CHECK(pk.values[1] == doctest::Approx(kPi * kPi).epsilon(1e-10));
    CHECK(pk.values[2] == doctest::Approx(kPi * kPi).epsilon(1e-10));
    CHECK(pk.values[3] == doctest::Approx(kPi * kPi).epsilon(1e-10));
    CHECK(pk.kernel_dim[1] == 3);

    SpectralResult lp = eigenvalues(fixtures::loop(1.0), 5);
    CHECK(lp.values[1] == doctest::Approx(4 * kPi * kPi).epsilon(1e-10));
    CHECK(lp.values[2] == doctest::Approx(4 * kPi * kPi).epsilon(1e-10));
    CHECK(lp.kernel_dim[1] == 2);
    CHECK(lp.values[3] == doctest::Approx(16 * kPi * kPi).epsilon(1e-10));

    CHECK(lambda1(fixtures::interval(1.0, true, false)) == doctest::Approx(kPi * kPi / 4).epsilon(1e-10));
    CHECK(mu2(fixtures::star({1, 1, 1})) == doctest::Approx(kPi * kPi / 4).epsilon(1e-10));
    CHECK(mu2(fixtures::lasso(1.0, 1.0, 1.0)) == doctest::Approx(kPi * kPi / 4).epsilon(1e-10));
}

TEST_CASE("pumpkin H spectrum") {
    SpectralResult sp = eigenvalues(fixtures::pumpkin_H(), 5);
    CHECK(sp.values[0] == doctest::Approx(0.0));
    CHECK(sp.values[1] == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(sp.values[2] == doctest::Approx(std::pow(std::acos(-1.0 / 3.0) / kPi, 2)).epsilon(1e-10));
    CHECK(sp.values[3] == doctest::Approx(std::pow(std::acos(-2.0 / 3.0) / kPi, 2)).epsilon(1e-10));
    CHECK(sp.values[4] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(sp.kernel_dim[4] == 1);
}

TEST_CASE("fem and cross-check") {
    SpectralResult f = eigenvalues(fixtures::interval(1.0), 3, EigMethod::fem);
    CHECK(f.values[1] == doctest::Approx(kPi * kPi).epsilon(1e-6));
    CHECK(std::abs(f.values[1] - kPi * kPi) < 5 * f.error[1] + 1e-9);

    CHECK_NOTHROW(eigenvalues(fixtures::pumpkin({1, 1, 1}), 4, EigMethod::cross_check));
    CHECK_NOTHROW(eigenvalues(fixtures::lasso(2.0, 1.0, 1.0), 5, EigMethod::cross_check));

    // randomized corpus: secular and fem agree within combined estimates
    std::mt19937_64 rng(5150);
    for (int t = 0; t < 6; ++t) {
        MetricGraph g = fixtures::random_connected(rng, 5);
        CHECK_NOTHROW(eigenvalues(g, 4, EigMethod::cross_check));
    }
}

TEST_CASE("eigenfunctions") {
    MetricGraph e = fixtures::interval(1.0);
    auto basis = eigenfunction(e, kPi * kPi);
    REQUIRE(basis.size() == 1);
    CHECK(wave_residual(e, basis[0]) < 1e-9);
    // cos(pi x) up to sign: vanishes at the midpoint
    const auto& w = basis[0];
    double mid = w.coeff[0][0] * std::cos(kPi * 0.5) + w.coeff[0][1] * std::sin(kPi * 0.5);
    CHECK(std::abs(mid) < 1e-9);
    CHECK(wave_inner_product(e, w, w) == doctest::Approx(1.0).epsilon(1e-10));

    MetricGraph pk = fixtures::pumpkin({1, 1, 1});
    auto pb = eigenfunction(pk, kPi * kPi);
    CHECK(pb.size() == 3);
    for (const auto& f : pb) CHECK(wave_residual(pk, f) < 1e-8);
    // orthonormality
    for (std::size_t i = 0; i < pb.size(); ++i)
        for (std::size_t j = 0; j < pb.size(); ++j)
            CHECK(wave_inner_product(pk, pb[i], pb[j]) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-8));

    CHECK_THROWS_AS(eigenfunction(e, 5.0), std::invalid_argument);
}

TEST_CASE("solve_fork") {
    CHECK(solve_fork(1e-9) == doctest::Approx(kPi / 2).epsilon(1e-6));
    CHECK(solve_fork(1.0 - 1e-12) == doctest::Approx(std::atan(1.0 / std::sqrt(2.0))).epsilon(1e-9));
    for (double a : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        double w = solve_fork(a);
        CHECK(w < kPi / 2);
        CHECK(2 * std::tan(a * w) == doctest::Approx(1.0 / std::tan(w)).epsilon(1e-10));
        // agrees with the generic lambda_1 of the cut 3-star
        MetricGraph star = fixtures::star({a, 1.0, 1.0});
        star.dirichlet[star.vertex_index("p1")] = 1;
        star.validate();
        CHECK(lambda1(star) == doctest::Approx(w * w).epsilon(1e-10));
    }
    CHECK_THROWS_AS(solve_fork(1.5), std::invalid_argument);
}

TEST_CASE("von Below oracle") {
    // loop realised as two arcs of length 1: spectrum (n pi)^2 with mult 2
    MetricGraph cyc = fixtures::pumpkin({1.0, 1.0});
    SpectralResult vb = von_below_equilateral(cyc, 5);
    CHECK(vb.values[0] == doctest::Approx(0.0));
    CHECK(vb.values[1] == doctest::Approx(kPi * kPi));
    CHECK(vb.values[2] == doctest::Approx(kPi * kPi));
    CHECK(vb.values[3] == doctest::Approx(4 * kPi * kPi));
    SpectralResult sec = eigenvalues(cyc, 5);
    for (int i = 0; i < 5; ++i) CHECK(sec.values[i] == doctest::Approx(vb.values[i]).epsilon(1e-10));

    // equilateral path: interval spectrum
    MetricGraph p2 = fixtures::path({1.0, 1.0});
    SpectralResult vbp = von_below_equilateral(p2, 4);
    for (int i = 0; i < 4; ++i) CHECK(vbp.values[i] == doctest::Approx(i * i * kPi * kPi / 4.0).epsilon(1e-12));

    CHECK_THROWS_AS(von_below_equilateral(fixtures::path({1.0, 2.0}), 3), std::invalid_argument);
}

TEST_CASE("random equilateral graphs match the transition-matrix oracle") {
    std::mt19937_64 rng(60601);
    for (int t = 0; t < 10; ++t) {
        MetricGraph g = fixtures::random_connected(rng, 6);
        for (auto& e : g.edges) e.length = 1.0;
        g.validate();
        SpectralResult vb = von_below_equilateral(g, 8);
        SpectralResult sec = eigenvalues(g, 8);
        for (int j = 0; j < 8; ++j)
            CHECK(sec.values[j] == doctest::Approx(vb.values[j]).epsilon(1e-8));
    }
}

TEST_CASE("eigenvalue continuity under edge collapse") {
    // 3-pumpkin with one shrinking edge degenerates to the figure-8
    auto collapsed = collapse_zero_edges(fixtures::pumpkin({1, 1, 1}), {2});
    double target = mu2(collapsed.graph);
    double prev_gap = 1e9;
    for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
        double v = mu2(fixtures::pumpkin({1.0, 1.0, eps}));
        double gap = std::abs(v - target);
        // decreasing down to the solver's resolution floor
        CHECK(gap < std::max(prev_gap, 1e-10) + 1e-10);
        prev_gap = gap;
    }
    CHECK(prev_gap < 1e-6);
}

TEST_CASE("Weyl count sanity") {
    std::mt19937_64 rng(9090);
    for (int t = 0; t < 8; ++t) {
        MetricGraph g = fixtures::random_connected(rng, 5);
        int count = 8;
        SpectralResult sp = eigenvalues(g, count);
        double K = std::sqrt(sp.values.back());
        double expected = g.total_length() * K / kPi;
        CHECK(std::abs(count - expected) <= g.num_vertices() + 2);
    }
}
