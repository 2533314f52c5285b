#pragma once

// Shared fixtures: model families, random smooth states, finite-difference probes.

#include <varmp/varmp.hpp>

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace varmp::fixtures {

struct Family {
    std::string name;
    ModelSpec spec;
};

inline ModelSpec cor1_spec()
{
    ModelSpec s;
    s.gamma4 = 2.1;
    s.c_star = 1.0;
    return s;
}

inline ModelSpec cubic_spec()
{
    ModelSpec s;
    s.a2 = s.b2 = 0.0;
    s.g_scale = 0.25;
    s.N = 1;
    return s;
}

/// Power and log families across a few (p1, p2) pairs.
inline std::vector<Family> families()
{
    std::vector<Family> out{{"cor1", cor1_spec()}, {"cubic", cubic_spec()}};
    ModelSpec lg;
    lg.family = "log";
    lg.gamma1 = lg.gamma2 = 1.1;
    lg.gamma3 = lg.gamma4 = 3.2;
    lg.q1 = lg.q2 = 5;
    out.push_back({"log", lg});
    ModelSpec mixed = cor1_spec();
    mixed.p1 = 3.0;
    mixed.p2 = 1.5;
    mixed.q1 = 4.8;
    mixed.q2 = 3.4;
    mixed.gamma3 = 2.0;
    mixed.gamma4 = 1.6;
    mixed.N = 1;
    out.push_back({"mixed-p", mixed});
    return out;
}

/// Few-mode Dirichlet field with random coefficients, amplitude about `amp`.
inline Field random_smooth(const Mesh& m, std::mt19937_64& rng, double amp = 1.0, int modes = 4)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> a(static_cast<std::size_t>(modes * modes));
    for (double& c : a)
        c = normal(rng);
    return m.interpolate_dirichlet([&](Point x) {
        double s = 0.0;
        for (int i = 1; i <= modes; ++i) {
            if (m.dimension() == 1) {
                s += a[static_cast<std::size_t>(i - 1)] / i * std::sin(i * M_PI * x.x);
                continue;
            }
            for (int j = 1; j <= modes; ++j)
                s += a[static_cast<std::size_t>((i - 1) * modes + j - 1)] / (i * j) * std::sin(i * M_PI * x.x)
                     * std::sin(j * M_PI * x.y);
        }
        return amp * s;
    });
}

inline State random_state(const Problem& P, std::mt19937_64& rng, double amp = 1.0)
{
    return {random_smooth(P.mesh(), rng, amp), random_smooth(P.mesh(), rng, amp), P.p1(), P.p2()};
}

/// Relative mismatch between dJ(s)[d] and a central difference of J along d.
// five-point stencil, fourth order in h
inline double fd_mismatch(const Problem& P, const State& s, const State& d, double h = 1e-5)
{
    const double exact = differential(P, s).pair(d);
    const auto J = [&](double t) { return energy_value(P, s + d.scaled(t)); };
    const double fd = (8.0 * (J(h) - J(-h)) - (J(2.0 * h) - J(-2.0 * h))) / (12.0 * h);
    return std::abs(fd - exact) / std::max(std::abs(exact), 1e-8);
}

} // namespace varmp::fixtures
