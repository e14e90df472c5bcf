#pragma once

#include <cstddef>
#include <vector>

#include "sparareal/grid_paths.hpp"
#include "sparareal/models.hpp"
#include "sparareal/types.hpp"

namespace sparareal {

enum class StepMethod {
    theta,            ///< stochastic theta-method (theta = 0 is Euler-Maruyama)
    projected_euler,  ///< explicit Euler after clamping |u| to h^{-1/4}
};

/// One-step scheme used by a propagator. The Newton settings only matter
/// for drift-implicit steps (theta > 0) of nonlinear models.
struct ThetaScheme {
    double theta = 0.0;
    double newton_tol = 1e-14;
    int newton_max_iter = 50;
    StepMethod method = StepMethod::theta;

    static ThetaScheme theta_method(double theta) { return ThetaScheme{theta}; }
    static ThetaScheme projected_euler() { return ThetaScheme{0.0, 1e-14, 50, StepMethod::projected_euler}; }
};

/// Throws std::invalid_argument unless theta is in [0, 1].
void validate(const ThetaScheme& scheme);

/// Per-step multipliers of the theta-method on du = lambda u dt + mu u dW:
/// a fine step maps u to (a + b v) u, a coarse step to (A + B V) u.
struct DahlquistCoefficients {
    State a, b, A, B;
    std::size_t substeps = 1;  ///< M of the grid the coefficients were built on
};

/// a = (1 + (1 - th_f) dt l) / (1 - th_f dt l), b = sqrt(dt) mu / (1 - th_f dt l),
/// and A, B likewise with th_g and dT. Throws SingularSchemeError when a
/// denominator vanishes.
DahlquistCoefficients theta_coefficients(double theta_f, double theta_g, State lambda, State mu,
                                         const TimeGrid& grid);

/// One theta-method step of size h with Wiener increment dW:
///   X = U + th h f(X) + (1 - th) h f(U) + g(U) dW.
/// Drift-implicit steps use damped Newton started from the explicit
/// predictor. Throws NonlinearSolveError or OverflowError.
State theta_step(const SdeModel& model, const ThetaScheme& scheme, State u, double h, double dW);

/// min(1, h^{-1/4} / |u|) u, with 0 mapped to 0.
State project_state(State u, double h);

/// Projected explicit Euler: U' = P(U) + f(P(U)) h + g(P(U)) dW.
State projected_euler_step(State u, const SdeModel& model, double h, double dW);

/// Coarse propagator over interval n of a path: one step of size dT driven
/// by sqrt(dT) V_n. For the Dahlquist model with the theta-method this is
/// (A + B V_n) u.
State coarse_step(const SdeModel& model, const ThetaScheme& scheme_g, const BrownianTable& table,
                  std::size_t path, std::size_t n, State u);

/// Fine propagator over interval n: M steps of size dt driven by
/// sqrt(dt) v_{n,j}. For the Dahlquist model with the theta-method this is
/// prod_j (a + b v_{n,j}) u.
State fine_step(const SdeModel& model, const ThetaScheme& scheme_f, const BrownianTable& table,
                std::size_t path, std::size_t n, State u);

/// fine_step that always takes the M generic steps, even when a closed
/// form exists.
State fine_step_sequential(const SdeModel& model, const ThetaScheme& scheme_f, const BrownianTable& table,
                           std::size_t path, std::size_t n, State u);

/// Serial fine solution u_0..u_N at the coarse nodes; the fixed point both
/// iterative solvers converge to.
std::vector<State> serial_reference(const SdeModel& model, const ThetaScheme& scheme_f, const BrownianTable& table,
                                    std::size_t path, State u0);

/// Coarse and fine propagators bound to one Brownian path.
class PathPropagators {
public:
    PathPropagators(const SdeModel& model, const ThetaScheme& scheme_f, const ThetaScheme& scheme_g,
                    const BrownianTable& table, std::size_t path);

    State coarse(std::size_t n, State u) const;
    State fine(std::size_t n, State u) const;

    std::size_t intervals() const noexcept { return table_->grid().N; }
    const SdeModel& model() const noexcept { return *model_; }
    const BrownianTable& table() const noexcept { return *table_; }
    std::size_t path() const noexcept { return path_; }

private:
    const SdeModel* model_;
    ThetaScheme scheme_f_;
    ThetaScheme scheme_g_;
    const BrownianTable* table_;
    std::size_t path_;
};

}  // namespace sparareal
