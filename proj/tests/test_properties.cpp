// Randomised invariants. Each case draws its inputs from a fixed-seed
// std::mt19937_64 so failures are reproducible.
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "sparareal/parareal.hpp"
#include "sparareal/sparareal.hpp"
#include "sparareal/theory_bounds.hpp"
#include "support.hpp"

using namespace sparareal;

namespace {

double uniform(std::mt19937_64& g, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(g); }
std::size_t pick(std::mt19937_64& g, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(g);
}

// A random stable linear test problem with modest grid sizes.
struct RandomLinear {
    TimeGrid grid;
    SdeModel model;
    ThetaScheme fine, coarse;
};

RandomLinear random_linear(std::mt19937_64& g) {
    const State lambda(uniform(g, -30.0, -0.5), uniform(g, -3.0, 3.0));
    const State mu(uniform(g, -1.0, 1.0), uniform(g, -1.0, 1.0));
    const TimeGrid grid = build_grid(uniform(g, 0.5, 3.0), pick(g, 4, 24), pick(g, 1, 6));
    return {grid, model_library("dahlquist", DahlquistParams{lambda, mu, State(1.0, 0.0)}),
            ThetaScheme::theta_method(uniform(g, 0.5, 1.0)), ThetaScheme::theta_method(uniform(g, 0.5, 1.0))};
}

}  // namespace

TEST_CASE("property: coarse increments are sums of fine increments") {
    auto g = testing::rng(1);
    for (int trial = 0; trial < 200; ++trial) {
        const TimeGrid grid = build_grid(uniform(g, 0.1, 10.0), pick(g, 1, 30), pick(g, 1, 16));
        const auto table = generate_brownian_table(grid, g(), 1);
        for (std::size_t n = 0; n < grid.N; ++n) {
            double sum = 0.0;
            for (double v : table.fine_normals(0, n)) sum += std::sqrt(grid.dt) * v;
            REQUIRE(std::abs(std::sqrt(grid.dT) * table.coarse_normal(0, n) - sum) < 1e-14);
        }
    }
}

TEST_CASE("property: closed-form and stepwise linear propagators agree") {
    auto g = testing::rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const auto p = random_linear(g);
        const auto table = generate_brownian_table(p.grid, g(), 1);
        const State u(uniform(g, -2.0, 2.0), uniform(g, -2.0, 2.0));
        for (std::size_t n = 0; n < p.grid.N; ++n) {
            const State closed = fine_step(p.model, p.fine, table, 0, n, u);
            const State generic = fine_step_sequential(p.model, p.fine, table, 0, n, u);
            REQUIRE(std::abs(closed - generic) <= 1e-13 * std::max(1.0, std::abs(closed)));
        }
    }
}

TEST_CASE("property: theta = 0 steps equal Euler-Maruyama") {
    auto g = testing::rng(3);
    const auto model = model_library("ginzburg_landau", GinzburgLandauParams{});
    for (int trial = 0; trial < 500; ++trial) {
        const State u(uniform(g, -3.0, 3.0), 0.0);
        const double h = uniform(g, 1e-4, 0.05), dW = uniform(g, -0.3, 0.3);
        REQUIRE(theta_step(model, ThetaScheme{}, u, h, dW) == u + model.drift(u) * h + model.diffusion(u) * dW);
    }
}

TEST_CASE("property: projection never exceeds the radius") {
    auto g = testing::rng(4);
    for (int trial = 0; trial < 5000; ++trial) {
        const double h = std::pow(10.0, uniform(g, -6.0, 0.0));
        const State u(uniform(g, -1e6, 1e6) * std::pow(10.0, uniform(g, -6.0, 0.0)), uniform(g, -10.0, 10.0));
        REQUIRE(std::abs(project_state(u, h)) <= std::pow(h, -0.25) * (1.0 + 1e-15));
    }
}

TEST_CASE("property: converged prefix is maximal") {
    auto g = testing::rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t len = pick(g, 1, 20);
        std::vector<State> a(len), b(len);
        for (std::size_t i = 0; i < len; ++i) {
            a[i] = State(uniform(g, -1.0, 1.0), 0.0);
            b[i] = a[i] + State(uniform(g, 0.0, 1.0) < 0.8 ? 0.0 : uniform(g, -1.0, 1.0), 0.0);
        }
        const double eps = 1e-3;
        const std::size_t I = converged_prefix(a, b, eps, ErrorMeasure::modulus);
        if (std::abs(a[0] - b[0]) < eps) {
            for (std::size_t i = 0; i <= I; ++i) REQUIRE(std::abs(a[i] - b[i]) < eps);
            if (I + 1 < len) REQUIRE_FALSE(std::abs(a[I + 1] - b[I + 1]) < eps);
        } else {
            REQUIRE(I == 0);
        }
    }
}

TEST_CASE("property: Parareal histories on random linear problems") {
    auto g = testing::rng(6);
    for (int trial = 0; trial < 25; ++trial) {
        const auto p = random_linear(g);
        const auto table = generate_brownian_table(p.grid, g(), 1);
        const PathPropagators props(p.model, p.fine, p.coarse, table, 0);
        const auto u = serial_reference(p.model, p.fine, table, 0, 1.0);
        const auto h = parareal_run(props, 1.0, StoppingRule{1e-12, 100, ErrorMeasure::modulus});
        REQUIRE(h.k_stop.has_value());
        REQUIRE(*h.k_stop <= p.grid.N);
        for (std::size_t k = 0; k <= h.sweeps(); ++k) {
            for (std::size_t n = 0; n <= std::min(k, p.grid.N); ++n) {
                REQUIRE(std::abs(h.U[k][n] - u[n]) <= 1e-10 * (1.0 + std::abs(u[n])));
            }
        }
        REQUIRE(parareal_run(props, 1.0, StoppingRule{1e-12, 100, ErrorMeasure::modulus}, Execution{3}).U == h.U);
    }
}

TEST_CASE("property: one-sample SParareal is Parareal") {
    auto g = testing::rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        const auto p = random_linear(g);
        const auto table = generate_brownian_table(p.grid, g(), 1);
        const PathPropagators props(p.model, p.fine, p.coarse, table, 0);
        const auto rule = sampling_rule_from_id(static_cast<int>(pick(g, 1, 4)));
        REQUIRE(sparareal_run(props, 1.0, StoppingRule{}, SamplingOptions{1, rule, g()}).U ==
                parareal_run(props, 1.0, StoppingRule{}).U);
    }
}

TEST_CASE("property: SParareal terminates with exact prefixes and frozen entries") {
    auto g = testing::rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = random_linear(g);
        const auto table = generate_brownian_table(p.grid, g(), 1);
        const PathPropagators props(p.model, p.fine, p.coarse, table, 0);
        const auto u = serial_reference(p.model, p.fine, table, 0, 1.0);
        const SamplingOptions opts{pick(g, 2, 9), sampling_rule_from_id(static_cast<int>(pick(g, 1, 4))), g()};
        const auto h = sparareal_run(props, 1.0, StoppingRule{1e-12, 100, ErrorMeasure::modulus}, opts);
        REQUIRE(h.k_stop.has_value());
        REQUIRE(*h.k_stop <= p.grid.N);
        for (std::size_t k = 1; k <= h.sweeps(); ++k) {
            for (std::size_t n = 0; n <= h.converged_prefix[k - 1]; ++n) REQUIRE(h.U[k][n] == h.U[k - 1][n]);
            for (std::size_t n = 0; n <= std::min(k, p.grid.N); ++n) {
                REQUIRE(std::abs(h.U[k][n] - u[n]) <= 1e-10 * (1.0 + std::abs(u[n])));
            }
        }
        REQUIRE(sparareal_run(props, 1.0, StoppingRule{1e-12, 100, ErrorMeasure::modulus}, opts, Execution{4}).U == h.U);
    }
}

TEST_CASE("property: select_best returns a minimiser with the lowest index") {
    auto g = testing::rng(9);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<State> c(pick(g, 1, 8));
        // Coarse lattice values so that ties are common.
        for (auto& x : c) x = State(static_cast<double>(pick(g, 0, 4)), static_cast<double>(pick(g, 0, 2)));
        const State target(static_cast<double>(pick(g, 0, 4)), 0.0);
        const std::size_t J = select_best(c, target);
        for (std::size_t j = 0; j < c.size(); ++j) {
            REQUIRE(std::abs(c[J] - target) <= std::abs(c[j] - target));
            if (j < J) REQUIRE(std::abs(c[j] - target) > std::abs(c[J] - target));
        }
    }
}

TEST_CASE("property: recurrence bound is monotone and dominates the recurrence") {
    auto g = testing::rng(10);
    for (int trial = 0; trial < 500; ++trial) {
        const double A = uniform(g, 0.0, 2.0), B = uniform(g, 0.0, 2.0), e = uniform(g, 0.0, 5.0);
        const std::size_t k = pick(g, 0, 20);
        const double base = recurrence_bound(A, B, e, k);
        REQUIRE(recurrence_bound(A + 0.1, B, e, k) >= base);
        REQUIRE(recurrence_bound(A, B + 0.1, e, k) >= base);
        REQUIRE(recurrence_bound(A, B, e + 0.1, k) >= base);

        // Any sequence with e_j <= eps0 c^j for j = 0, 1 that obeys the
        // inequality stays below eps0 c^k, c = (A + sqrt(A^2 + 4B)) / 2.
        double prev = uniform(g, 0.0, e), curr = uniform(g, 0.0, recurrence_bound(A, B, e, 1));
        for (std::size_t j = 2; j <= 20; ++j) {
            const double next = uniform(g, 0.0, 1.0) * (A * curr + B * prev);
            REQUIRE(next <= recurrence_bound(A, B, e, j) * (1.0 + 1e-12) + 1e-300);
            prev = curr;
            curr = next;
        }
    }
}

TEST_CASE("property: both bound families are non-negative geometric sequences") {
    auto g = testing::rng(11);
    int defined = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const auto lambda = State(uniform(g, -60.0, -1.0), 0.0);
        const auto mu = State(uniform(g, 0.0, 1.5), 0.0);
        const auto k = theta_coefficients(uniform(g, 0.5, 1.0), uniform(g, 0.5, 1.0), lambda, mu,
                                          build_grid(uniform(g, 0.5, 5.0), 40, 2));
        for (auto family : {BoundFamily::rules_1_3, BoundFamily::rules_2_4}) {
            const auto p = bound_params(k, family);
            REQUIRE(p.gamma >= 0.0);
            REQUIRE(p.kappa >= 0.0);
            REQUIRE(p.alpha >= 0.0);
            REQUIRE(p.beta >= -1e-15);
            if (!p.contraction) continue;
            ++defined;
            const auto curve = bound_curve(p, 1.0, 10);
            for (std::size_t i = 1; i < curve.size(); ++i) {
                REQUIRE(curve[i] >= 0.0);
                REQUIRE(curve[i] == doctest::Approx(curve[i - 1] * *p.contraction).epsilon(1e-12));
            }
        }
    }
    CHECK(defined > 0);
}
