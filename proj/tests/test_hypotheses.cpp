#include <varmp/model_set.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace varmp;

namespace {

bool has(const std::vector<std::string>& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

ModelSpec cor1()
{
    ModelSpec s;
    s.gamma4 = 2.1;
    s.c_star = 1.0;
    return s;
}

NonlinearityModel quadratic(double lambda)
{
    NonlinearityModel G;
    G.g = [lambda](Point, double u, double v) { return lambda * (u * u + v * v); };
    G.gu = [lambda](Point, double u, double) { return 2 * lambda * u; };
    G.gv = [lambda](Point, double, double v) { return 2 * lambda * v; };
    G.q1 = G.q2 = 2.0;
    G.theta1 = G.theta2 = 0.5;
    G.even = true;
    return G;
}

} // namespace

TEST(Hypotheses, ThetaWindows)
{
    const auto w = theta_window(2, 1.5, 4);
    EXPECT_DOUBLE_EQ(w.lo, 0.25);
    EXPECT_DOUBLE_EQ(w.hi, 1.0 / 3.5);
    EXPECT_TRUE(w.contains(0.25));
    EXPECT_FALSE(w.contains(w.hi));
    EXPECT_TRUE(theta_window(2, 1.5, 3.5).empty());
    const auto v = theta_window(2, 2, 5);
    EXPECT_DOUBLE_EQ(v.lo, 0.2);
    EXPECT_DOUBLE_EQ(v.hi, 0.25);
}

TEST(Hypotheses, StructureOfPowerCoefficients)
{
    const auto A = power_coefficient(1.0, 1.0, 1.5);
    const auto rep = check_structure(A, A, 2, 2, 0.25, 0.25);
    EXPECT_TRUE(rep.overall());
    EXPECT_EQ(rep.verdicts.at("h41"), Verdict::pass);
    EXPECT_DOUBLE_EQ(rep.witnesses.at("h41").values.at(0), 0.125);
    EXPECT_DOUBLE_EQ(rep.derived.mu2, 0.125);
    EXPECT_DOUBLE_EQ(rep.derived.mu0, 1.0);
    EXPECT_DOUBLE_EQ(rep.derived.mu1, 1.0);

    const auto bad = check_structure(A, A, 2, 2, 0.3, 0.25);
    EXPECT_EQ(bad.verdicts.at("h41"), Verdict::fail);
    EXPECT_EQ(bad.failed(), std::vector<std::string>{"h41"});

    // without the |u|^gamma part the window widens to 1/p
    const auto flat = power_coefficient(1.0, 0.0, 1.5);
    EXPECT_TRUE(check_structure(flat, flat, 2, 2, 0.4, 0.4).overall());
}

TEST(Hypotheses, CustomCoefficientNeedsBox)
{
    CoefficientModel A;
    A.evaluate = [](Point, double u) { return 2.0 + std::cos(u); };
    A.derivative = [](Point, double u) { return -std::sin(u); };
    A.mu0 = 1.0;
    EXPECT_THROW(check_structure(A, A, 2, 2, 0.25, 0.25), ConfigError);
    const auto rep = check_structure(A, A, 2, 2, 0.25, 0.25, SamplingBox{});
    EXPECT_EQ(rep.verdicts.at("h21"), Verdict::sampled_pass);
    EXPECT_EQ(rep.verdicts.at("h51"), Verdict::sampled_pass);
}

TEST(Hypotheses, PowerFamilyConditions)
{
    const auto pass = check_power_family(family_params(cor1()));
    EXPECT_TRUE(pass.overall()) << pass.failed().size();

    auto q = cor1();
    q.q1 = 6;
    const auto rq = check_power_family(family_params(q));
    EXPECT_TRUE(has(rq.failed(), "cor11"));
    EXPECT_NE(rq.witnesses.at("cor11").note.find("q1"), std::string::npos);

    auto g = cor1();
    g.gamma4 = 2.5;
    const auto rg = check_power_family(family_params(g));
    EXPECT_EQ(rg.failed(), std::vector<std::string>{"cor12"});
}

TEST(Hypotheses, LogFamilyConditions)
{
    FamilyParams c;
    c.gamma1 = c.gamma2 = 1.1;
    c.gamma3 = c.gamma4 = 3.2;
    c.q1 = c.q2 = 5;
    EXPECT_TRUE(check_log_family(c).overall());
    c.gamma3 = 3.4;
    EXPECT_EQ(check_log_family(c).failed(), std::vector<std::string>{"cor22"});
    c.gamma3 = 3.0;
    EXPECT_EQ(check_log_family(c).failed(), std::vector<std::string>{"cor21"});
}

TEST(Hypotheses, AmbrosettiRabinowitzSampled)
{
    const auto G = power_nonlinearity(4, 5, 2, 2, 0.0, 0.25, 0.2, 1.0);
    const auto ok = check_AR_sampled(G, SamplingBox{});
    EXPECT_EQ(ok.verdict, Verdict::sampled_pass);
    EXPECT_GT(ok.checked, 1000u);

    const auto H = power_nonlinearity(4, 5, 2, 2, 0.0, 0.5 / 4, 0.2, 1.0);
    const auto bad = check_AR_sampled(H, SamplingBox{});
    ASSERT_EQ(bad.verdict, Verdict::fail);
    EXPECT_EQ(bad.witness.values.at(2), 0.0); // fails on the u-axis
    EXPECT_GE(std::abs(bad.witness.values.at(1)), 1.0);

    SamplingBox big;
    big.n_samples = 10000;
    const ModelSet m = build_models(cor1());
    EXPECT_EQ(check_AR_sampled(m.G, big).verdict, Verdict::sampled_pass);
}

TEST(Hypotheses, Superhomogeneity)
{
    const ModelSet m = build_models(cor1());
    const auto pts = sample_outside_ball(m.G.R, 10.0, 1000, 7);
    const auto one = check_superhomogeneity(m.G, {1.0}, pts);
    EXPECT_EQ(one.verdict, Verdict::sampled_pass);
    const auto many = check_superhomogeneity(m.G, {1.0, 2.0, 4.0, 8.0}, pts);
    EXPECT_EQ(many.verdict, Verdict::sampled_pass);
    EXPECT_GE(many.checked, 4000u);

    auto low = cor1();
    low.theta1 = 0.2;
    const ModelSet w = build_models(low);
    EXPECT_EQ(check_superhomogeneity(w.G, {2.0}, pts).verdict, Verdict::fail);
}

TEST(Hypotheses, G3Margin)
{
    const double lambda = M_PI * M_PI;
    const auto G = power_nonlinearity(4, 4, 2, 2, 0.0, 0.25, 0.25, 1.0);
    const auto m = check_g3_margin(G, 1.0, 2, 2, lambda, lambda);
    EXPECT_EQ(m.verdict, Verdict::sampled_pass);
    EXPECT_DOUBLE_EQ(m.bound, lambda / 2);
    EXPECT_NEAR(m.lambda_bar, m.bound / 2, 1e-9);

    EXPECT_EQ(check_g3_margin(quadratic(5.0), 1.0, 2, 2, lambda, lambda).verdict, Verdict::fail);
    EXPECT_EQ(check_g3_margin(quadratic(4.0), 1.0, 2, 2, lambda, lambda).verdict, Verdict::sampled_pass);
}

TEST(Hypotheses, NonlinearityReport)
{
    const ModelSet m = build_models(cor1());
    const auto rep = check_nonlinearity(m.G, 2, 2, 3, default_box(1.0));
    EXPECT_TRUE(rep.overall()) << rep.failed().size();
    EXPECT_GT(rep.derived.sigma_hat, 0.0);
    ASSERT_TRUE(rep.derived.exponents.has_value());
    EXPECT_TRUE(rep.informational.count("g6"));

    const auto q = check_nonlinearity(quadratic(1.0), 2, 2, 3, default_box(1.0));
    EXPECT_TRUE(has(q.failed(), "g3"));
}

TEST(Hypotheses, ModelReports)
{
    EXPECT_TRUE(check_model(cor1()).overall());

    auto q = cor1();
    q.q1 = 6;
    const auto rq = check_model(q);
    EXPECT_TRUE(has(rq.failed(), "cor11"));
    EXPECT_TRUE(has(rq.failed(), "g1"));

    auto lo = cor1();
    lo.theta1 = 0.2;
    const auto rlo = check_model(lo);
    EXPECT_TRUE(has(rlo.failed(), "g2"));
    EXPECT_FALSE(has(rlo.failed(), "h41"));

    auto hi = cor1();
    hi.theta1 = 0.3;
    const auto rhi = check_model(hi);
    EXPECT_TRUE(has(rhi.failed(), "h41"));
    EXPECT_FALSE(has(rhi.failed(), "g2"));
}

TEST(Hypotheses, SymbolicAgreesWithSampling)
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    SamplingBox box;
    box.n_samples = 300;
    for (int k = 0; k < 100; ++k) {
        const double p = 1.5 + 2.0 * unif(rng);
        const double gamma = 1.1 + 2.0 * unif(rng);
        const double q = p + 0.2 + 3.0 * unif(rng);
        const double theta = 0.9 / p * unif(rng) + 0.01;
        const auto A = power_coefficient(0.5 + unif(rng), 0.1 + unif(rng), gamma);
        const auto sym = check_structure(A, A, p, p, theta, theta);
        const auto smp = check_structure_sampled(A, A, p, p, theta, theta, box);
        EXPECT_EQ(sym.passes("h41"), smp.passes("h41")) << "p " << p << " gamma " << gamma << " theta " << theta;

        const double t1 = 0.5 / q + unif(rng) / q, t2 = 0.5 / q + unif(rng) / q;
        const auto G = power_nonlinearity(q, q, 1.05, 1.05, 0.0, t1, t2, 1.0);
        const auto rep = check_nonlinearity(G, p, p, 1, box);
        EXPECT_EQ(rep.passes("g2"), check_AR_sampled(G, box).verdict != Verdict::fail) << "theta q " << t1 * q;
    }
}

TEST(Hypotheses, ReportBookkeeping)
{
    HypothesisReport r;
    EXPECT_FALSE(r.overall());
    r.set("a", Verdict::pass);
    r.set("b", Verdict::fail);
    EXPECT_EQ(r.witnesses.at("b").note, "condition violated");
    EXPECT_FALSE(r.overall());
    r.informational.insert("b");
    EXPECT_TRUE(r.overall());
    EXPECT_EQ(verdict_from_string(to_string(Verdict::sampled_pass)), Verdict::sampled_pass);
    EXPECT_THROW(verdict_from_string("maybe"), ConfigError);
}
