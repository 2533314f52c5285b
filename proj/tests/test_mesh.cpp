#include <varmp/mesh.hpp>
#include <varmp/spectrum.hpp>

#include "oracles/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace varmp;

TEST(Mesh, IntervalTwoCells)
{
    const Mesh m = build_interval_mesh(2, 1.0);
    ASSERT_EQ(m.n_nodes(), 3u);
    EXPECT_DOUBLE_EQ(m.nodes()[0].x, 0.0);
    EXPECT_DOUBLE_EQ(m.nodes()[1].x, 0.5);
    EXPECT_DOUBLE_EQ(m.nodes()[2].x, 1.0);
    EXPECT_TRUE(m.boundary_mask()[0]);
    EXPECT_FALSE(m.boundary_mask()[1]);
    EXPECT_TRUE(m.boundary_mask()[2]);
}

TEST(Mesh, IntervalMeasures)
{
    const Mesh m = build_interval_mesh(4);
    for (double h : m.element_measures())
        EXPECT_DOUBLE_EQ(h, 0.25);
    EXPECT_NEAR(build_interval_mesh(100, 2.0).total_measure(), 2.0, 1e-12);
    EXPECT_THROW(build_interval_mesh(1), std::invalid_argument);
    EXPECT_THROW(build_interval_mesh(4, 0.0), std::invalid_argument);
}

TEST(Mesh, SquareCounts)
{
    const Mesh m = build_rect_mesh(2, 2);
    EXPECT_EQ(m.n_nodes(), 9u);
    EXPECT_EQ(m.n_elements(), 8u);
    EXPECT_NEAR(m.total_measure(), 1.0, 1e-14);
    const Mesh m3 = build_rect_mesh(3, 3);
    int boundary = 0;
    for (std::size_t i = 0; i < m3.n_nodes(); ++i) {
        const Point p = m3.nodes()[i];
        const bool on_edge = p.x == 0.0 || p.y == 0.0 || p.x == 1.0 || p.y == 1.0;
        EXPECT_EQ(m3.boundary_mask()[i], on_edge);
        boundary += m3.boundary_mask()[i];
    }
    EXPECT_EQ(boundary, 12);
    EXPECT_NEAR(build_rect_mesh(32, 32).total_measure(), 1.0, 1e-12);
    EXPECT_THROW(build_rect_mesh(1, 4), std::invalid_argument);
}

TEST(Mesh, GradientOfLinearFunctions)
{
    const Mesh m1 = build_interval_mesh(10);
    for (const Vec2& g : element_gradient(m1, m1.interpolate([](Point x) { return x.x; })))
        EXPECT_NEAR(g[0], 1.0, 1e-12);
    for (const Vec2& g : element_gradient(m1, m1.interpolate([](Point) { return 3.0; })))
        EXPECT_NEAR(g[0], 0.0, 1e-12);
    const Mesh m2 = build_rect_mesh(5, 4);
    for (const Vec2& g : element_gradient(m2, m2.interpolate([](Point x) { return x.x + 2.0 * x.y; }))) {
        EXPECT_NEAR(g[0], 1.0, 1e-12);
        EXPECT_NEAR(g[1], 2.0, 1e-12);
    }
    EXPECT_THROW(element_gradient(m2, Field::Zero(3)), std::invalid_argument);
}

TEST(Mesh, NormWOfSine)
{
    const Mesh m = build_interval_mesh(200);
    EXPECT_EQ(norm_W(m, m.zero_field(), 2.0), 0.0);
    const Field f = m.interpolate_dirichlet([](Point x) { return std::sin(M_PI * x.x); });
    EXPECT_NEAR(norm_W(m, f, 2.0), std::sqrt(M_PI * M_PI / 2.0), 0.005 * std::sqrt(M_PI * M_PI / 2.0));
    EXPECT_THROW(norm_W(m, f, 1.0), std::invalid_argument);
}

TEST(Mesh, NormWAgainstQuadrature)
{
    const Mesh m = build_interval_mesh(400);
    const Field f = m.interpolate_dirichlet([](Point x) { return x.x * (1.0 - x.x); });
    const double integral = oracle::integrate([](double x) { return std::pow(std::abs(1.0 - 2.0 * x), 3.0); }, 0, 1);
    EXPECT_NEAR(integral, 0.25, 1e-10);
    EXPECT_NEAR(norm_W(m, f, 3.0), std::cbrt(integral), 0.005 * std::cbrt(integral));
}

TEST(Mesh, LebesgueNorms)
{
    const Mesh m = build_interval_mesh(200);
    const Field one = m.interpolate([](Point) { return 1.0; });
    EXPECT_NEAR(norm_Lr(m, one, 2.0), 1.0, 1e-12);
    EXPECT_NEAR(norm_Lr(m, one, 5.0), 1.0, 1e-12);
    const Field s = m.interpolate_dirichlet([](Point x) { return std::sin(M_PI * x.x); });
    EXPECT_NEAR(norm_Lr(m, s, 2.0), std::sqrt(0.5), 1e-3);
    EXPECT_THROW(norm_Lr(m, s, 0.5), std::invalid_argument);

    const Mesh m3 = build_interval_mesh(3);
    Field f(4);
    f << 0, -3, 2, 0;
    EXPECT_DOUBLE_EQ(norm_Linf(m3, f), 3.0);
}

TEST(Mesh, NormProperties)
{
    const Mesh m = build_rect_mesh(8, 8);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    auto random_field = [&] { return m.interpolate_dirichlet([&](Point) { return unif(rng); }); };
    for (int k = 0; k < 50; ++k) {
        const Field f = random_field(), g = random_field();
        const double c = 4.0 * unif(rng);
        for (double p : {1.5, 2.0, 3.0}) {
            EXPECT_NEAR(norm_W(m, c * f, p), std::abs(c) * norm_W(m, f, p), 1e-12 * (1 + norm_W(m, f, p)));
            EXPECT_LE(norm_W(m, f + g, p), norm_W(m, f, p) + norm_W(m, g, p) + 1e-12);
        }
        EXPECT_NEAR(norm_Lr(m, c * f, 3.0), std::abs(c) * norm_Lr(m, f, 3.0), 1e-12);
    }
}

TEST(Mesh, Poincare)
{
    const Mesh m = build_interval_mesh(64);
    const double tau = embedding_constant(2.0, 2.0, m);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        const Field f = m.interpolate_dirichlet([&](Point) { return unif(rng); });
        EXPECT_LE(norm_Lr(m, f, 2.0), tau * norm_W(m, f, 2.0) * (1 + 1e-8));
    }
}

TEST(Mesh, RefinementConvergence)
{
    const double exact = std::sqrt(M_PI * M_PI / 2.0);
    double prev = infinity;
    for (int n : {25, 50, 100, 200, 400}) {
        const Mesh m = build_interval_mesh(n);
        const double err = std::abs(norm_W(m, m.interpolate_dirichlet([](Point x) { return std::sin(M_PI * x.x); }), 2.0)
                                    - exact);
        EXPECT_LT(err, prev);
        if (std::isfinite(prev)) {
            EXPECT_GT(prev / err, 3.5); // second order
        }
        prev = err;
    }
}

TEST(Mesh, TextRoundTrip)
{
    for (const Mesh& m : {build_interval_mesh(7, 1.5), build_rect_mesh(3, 4)}) {
        std::stringstream ss;
        write_mesh(ss, m);
        const Mesh back = read_mesh(ss);
        ASSERT_EQ(back.n_nodes(), m.n_nodes());
        ASSERT_EQ(back.n_elements(), m.n_elements());
        EXPECT_EQ(back.dimension(), m.dimension());
        EXPECT_EQ(back.boundary_mask(), m.boundary_mask());
        for (std::size_t i = 0; i < m.n_nodes(); ++i) {
            EXPECT_EQ(back.nodes()[i].x, m.nodes()[i].x);
            EXPECT_EQ(back.nodes()[i].y, m.nodes()[i].y);
        }
        const Field f = m.interpolate([](Point x) { return std::exp(x.x) - x.y / 3.0; });
        std::stringstream fs;
        write_field(fs, f);
        EXPECT_EQ(read_field(fs), f);
    }
}

TEST(Mesh, SpecStrings)
{
    EXPECT_EQ(mesh_from_spec("interval:10").n_elements(), 10u);
    EXPECT_NEAR(mesh_from_spec("interval:10:3").total_measure(), 3.0, 1e-12);
    EXPECT_EQ(mesh_from_spec("square:4x3").n_elements(), 24u);
    EXPECT_THROW(mesh_from_spec("interval:abc"), ConfigError);
    EXPECT_THROW(mesh_from_spec("square:4"), ConfigError);
    EXPECT_THROW(mesh_from_spec("/nonexistent/mesh.txt"), ConfigError);
}
