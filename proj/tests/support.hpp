#pragma once

#include <cstdint>
#include <random>

#include "sparareal/grid_paths.hpp"
#include "sparareal/models.hpp"
#include "sparareal/propagators.hpp"

namespace testing {

using namespace sparareal;

// Real-coefficient Dahlquist benchmark: lambda = -40, mu = 0.56 on [0, 3],
// 40 intervals, M = 2, Crank-Nicolson fine and implicit Euler coarse.
struct DahlquistCase {
    double T = 3.0;
    std::size_t N = 40;
    std::size_t M = 2;
    double theta_f = 0.5;
    double theta_g = 1.0;
    State lambda{-40.0, 0.0};
    State mu{0.56, 0.0};

    TimeGrid grid() const { return build_grid(T, N, M); }
    SdeModel model() const { return model_library("dahlquist", DahlquistParams{lambda, mu, {1.0, 0.0}}); }
    ThetaScheme fine() const { return ThetaScheme::theta_method(theta_f); }
    ThetaScheme coarse() const { return ThetaScheme::theta_method(theta_g); }
};

inline DahlquistCase case_real() { return {}; }

inline DahlquistCase case_extended() {
    DahlquistCase c;
    c.T = 9.0;
    c.theta_f = 1.0;
    c.theta_g = 0.5;
    return c;
}

inline DahlquistCase case_complex() {
    DahlquistCase c;
    c.mu = {0.56, 1.0};
    return c;
}

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64{seed}; }

}  // namespace testing
