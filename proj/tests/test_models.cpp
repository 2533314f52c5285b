#include <varmp/model_set.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace varmp;

namespace {

const Point x0{0.5, 0.5};

ModelSpec parse(const std::string& text)
{
    std::istringstream in(text);
    return parse_model_spec(in);
}

const std::string cor1_text = "family = power\np1 = 2\np2 = 2\nq1 = 4\nq2 = 4\n"
                              "gamma1 = 1.5\ngamma2 = 1.5\ngamma3 = 2\ngamma4 = 2.1\nc_star = 1\nN = 3\n";

// central difference with a step matched to the magnitude of t
double fd(const std::function<double(double)>& f, double t)
{
    const double h = 1e-6 * std::max(1.0, std::abs(t));
    return (f(t + h) - f(t - h)) / (2.0 * h);
}

} // namespace

TEST(Models, SobolevConjugate)
{
    EXPECT_DOUBLE_EQ(sobolev_conjugate(2.0, 3), 6.0);
    EXPECT_TRUE(std::isinf(sobolev_conjugate(2.0, 2)));
    EXPECT_TRUE(std::isinf(sobolev_conjugate(3.0, 1)));
    EXPECT_NEAR(sobolev_conjugate(1.5, 2), 6.0, 1e-12);
}

TEST(Models, PowerCoefficientValues)
{
    const auto A = power_coefficient(1.0, 1.0, 2.0);
    EXPECT_DOUBLE_EQ(A(x0, 3.0), 10.0);
    EXPECT_DOUBLE_EQ(A.derivative(x0, 3.0), 6.0);
    const auto B = power_coefficient(2.0, 1.0, 1.5);
    EXPECT_NEAR(B(x0, -4.0), 10.0, 1e-12);
    EXPECT_NEAR(B.derivative(x0, -4.0), -3.0, 1e-12);
    EXPECT_DOUBLE_EQ(B(x0, 0.0), 2.0);
    EXPECT_DOUBLE_EQ(B.derivative(x0, 0.0), 0.0);
    EXPECT_EQ(B.mu0, 2.0);
}

TEST(Models, PowerCoefficientRejects)
{
    try {
        power_coefficient(1.0, 1.0, 1.0);
        FAIL() << "gamma = 1 accepted";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("ex05"), std::string::npos);
    }
    EXPECT_THROW(power_coefficient(0.0, 1.0, 1.5), std::invalid_argument);
    EXPECT_THROW(power_coefficient(1.0, -0.5, 1.5), std::invalid_argument);
}

TEST(Models, PowerNonlinearityValues)
{
    const auto G = power_nonlinearity(4, 4, 2, 2, 1.0, 0.25, 0.25, 1.0);
    EXPECT_DOUBLE_EQ(G(x0, 1, 1), 3.0);
    EXPECT_DOUBLE_EQ(G.gu(x0, 1, 1), 6.0);
    EXPECT_DOUBLE_EQ(G.gv(x0, 1, 1), 6.0);
    EXPECT_EQ(G(x0, 0, 0), 0.0);
    EXPECT_EQ(G.gu(x0, 0, 0), 0.0);
    const auto H = power_nonlinearity(4, 4, 2, 2.1, 1.0, 0.25, 0.25, 1.0);
    EXPECT_NEAR(H.s1, 3.15, 1e-12);
    const auto U = power_nonlinearity(4, 4, 2, 2, 0.0, 0.25, 0.25, 1.0);
    EXPECT_EQ(U.s1, 0.0);
    EXPECT_EQ(U.s2, 0.0);
    EXPECT_THROW(power_nonlinearity(4, 4, 4, 2, 1, 0.25, 0.25, 1), std::invalid_argument);
    EXPECT_THROW(power_nonlinearity(4, 4, 1, 2, 1, 0.25, 0.25, 1), std::invalid_argument);
}

TEST(Models, LogNonlinearityValues)
{
    const auto G = log_nonlinearity(4, 4, 3.2, 3.2, 0.3, 0.3, 1.0);
    EXPECT_DOUBLE_EQ(G(x0, 1, 0), 1.0);
    EXPECT_DOUBLE_EQ(G.gu(x0, 1, 0), 4.0);
    EXPECT_DOUBLE_EQ(G.gv(x0, 1, 0), 0.0);
    const auto L = log_nonlinearity(4, 4, 2, 2, 0.3, 0.3, 1.0);
    EXPECT_NEAR(L.gu(x0, 1, 1), 5.0 + 2.0 * std::log(2.0), 1e-12);
    EXPECT_EQ(L(x0, 0, 0), 0.0);
}

TEST(Models, DerivedExponents)
{
    const auto e = derive_exponents(2, 2, 3, 4, 4, 1, 1);
    EXPECT_NEAR(e.s3, 11.0 / 3.0, 1e-12);
    EXPECT_NEAR(e.s4, 11.0 / 8.0, 1e-12);
    EXPECT_GE(e.qbar1, 4.0);
    const auto z = derive_exponents(2, 2, 3, 4, 4, 0, 0);
    EXPECT_EQ(z.s4, 0.0);
    try {
        derive_exponents(2, 2, 3, 4, 4, 4, 1);
        FAIL() << "s1 = 4 accepted";
    } catch (const WindowEmptyError& err) {
        EXPECT_EQ(err.condition(), "crit_expi");
    }
    EXPECT_THROW(derive_exponents(2, 2, 3, 6, 4, 0, 0), WindowEmptyError);
}

TEST(Models, DerivativesMatchFiniteDifferences)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    const auto P = power_nonlinearity(4, 4, 2, 2.1, 1.0, 0.25, 0.25, 1.0);
    const auto L = log_nonlinearity(5, 5, 3.2, 3.2, 0.3, 0.3, 1.0);
    const auto A = power_coefficient(1.0, 0.7, 1.5);
    for (int k = 0; k < 1000; ++k) {
        const double u = unif(rng), v = unif(rng);
        for (const NonlinearityModel* G : {&P, &L}) {
            const double du = fd([&](double t) { return G->g(x0, t, v); }, u);
            const double dv = fd([&](double t) { return G->g(x0, u, t); }, v);
            EXPECT_NEAR(G->gu(x0, u, v), du, 1e-6 * (1 + std::abs(du)));
            EXPECT_NEAR(G->gv(x0, u, v), dv, 1e-6 * (1 + std::abs(dv)));
        }
        const double da = fd([&](double t) { return A(x0, t); }, u);
        EXPECT_NEAR(A.derivative(x0, u), da, 1e-6 * (1 + std::abs(da)));
    }
}

TEST(Models, Evenness)
{
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> unif(-5.0, 5.0);
    const auto P = power_nonlinearity(4, 4, 2, 2.1, 1.0, 0.25, 0.25, 1.0);
    const auto L = log_nonlinearity(5, 5, 3.2, 3.2, 0.3, 0.3, 1.0);
    const auto A = power_coefficient(1.0, 1.0, 1.5);
    for (int k = 0; k < 1000; ++k) {
        const double u = unif(rng), v = unif(rng);
        EXPECT_EQ(P(x0, -u, -v), P(x0, u, v));
        EXPECT_EQ(L(x0, -u, -v), L(x0, u, v));
        EXPECT_EQ(A(x0, -u), A(x0, u));
    }
}

TEST(Models, ParseModelFile)
{
    const ModelSpec s = parse("# comment\n" + cor1_text + "theta1 = 0.26  # inline\n");
    EXPECT_EQ(s.family, "power");
    EXPECT_EQ(s.gamma4, 2.1);
    EXPECT_EQ(s.c_star, 1.0);
    EXPECT_EQ(s.N, 3);
    ASSERT_TRUE(s.theta1.has_value());
    EXPECT_EQ(*s.theta1, 0.26);
    EXPECT_FALSE(s.theta2.has_value());

    EXPECT_THROW(parse(cor1_text + "bogus = 1\n"), ConfigError);
    EXPECT_THROW(parse(cor1_text + "q1 = 5\n"), ConfigError);
    EXPECT_THROW(parse(cor1_text + "R = abc\n"), ConfigError);
    EXPECT_THROW(parse(cor1_text + "R = 0.5\n"), ConfigError);
    EXPECT_THROW(parse("family = power\np1 = 2\n"), ConfigError);
    EXPECT_THROW(parse("family = cubic\n"), ConfigError);
    EXPECT_THROW(load_model_spec("/nonexistent.model"), ConfigError);
}

TEST(Models, BuildFromSpec)
{
    const ModelSet m = build_models(parse(cor1_text));
    const auto [t1, t2] = resolved_theta(m.spec);
    EXPECT_NEAR(t1, 0.5 * (0.25 + 1.0 / 3.5), 1e-12);
    EXPECT_EQ(m.G.theta1, t1);
    EXPECT_EQ(m.G.theta2, t2);
    EXPECT_DOUBLE_EQ(m.A(x0, 1.0), 2.0);
    EXPECT_EQ(m.G.family_tag, "power");
    ModelSpec bad = parse(cor1_text);
    bad.gamma1 = 0.9;
    EXPECT_THROW(build_models(bad), std::invalid_argument);
}
