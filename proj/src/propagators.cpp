#include "sparareal/propagators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sparareal/errors.hpp"

namespace sparareal {

namespace {

State checked(State value, const char* where) {
    if (!is_finite(value)) throw OverflowError(std::string(where) + ": non-finite state");
    return value;
}

State denominator(double theta, double h, State lambda) {
    const State d = 1.0 - theta * h * lambda;
    if (d == State(0.0, 0.0)) throw SingularSchemeError("theta scheme: 1 - theta*h*lambda vanishes");
    return d;
}

State drift_slope(const SdeModel& model, State x) {
    if (model.drift_derivative) return model.drift_derivative(x);
    const double h = std::cbrt(2.2e-16) * std::max(1.0, std::abs(x));
    return (model.drift(x + h) - model.drift(x - h)) / (2.0 * h);
}

// Solves X - th h f(X) = rhs.
State solve_implicit(const SdeModel& model, const ThetaScheme& scheme, double h, State rhs, State guess) {
    const double th = scheme.theta;
    auto residual = [&](State x) { return x - th * h * model.drift(x) - rhs; };
    State x = guess;
    State r = residual(x);
    for (int it = 0; it < scheme.newton_max_iter; ++it) {
        if (r == State(0.0, 0.0)) return x;
        const State jac = 1.0 - th * h * drift_slope(model, x);
        if (jac == State(0.0, 0.0) || !is_finite(jac)) break;
        const State delta = r / jac;
        double damping = 1.0;
        State trial = x - delta;
        State r_trial = residual(trial);
        while (!(is_finite(r_trial) && std::abs(r_trial) < std::abs(r)) && damping > 1e-10) {
            damping *= 0.5;
            trial = x - damping * delta;
            r_trial = residual(trial);
        }
        x = trial;
        r = r_trial;
        if (std::abs(damping * delta) <= scheme.newton_tol * (1.0 + std::abs(x))) return checked(x, "theta_step");
    }
    throw NonlinearSolveError("theta_step: Newton iteration did not converge in " +
                              std::to_string(scheme.newton_max_iter) + " iterations");
}

State step_once(const SdeModel& model, const ThetaScheme& scheme, State u, double h, double dW) {
    if (scheme.method == StepMethod::projected_euler) return projected_euler_step(u, model, h, dW);
    return theta_step(model, scheme, u, h, dW);
}

bool closed_form(const SdeModel& model, const ThetaScheme& scheme) {
    return scheme.method == StepMethod::theta && model.linear_coefficients().has_value();
}

State linear_multiplier(State lambda, State mu, double theta, double h, double normal) {
    const State d = denominator(theta, h, lambda);
    return (1.0 + (1.0 - theta) * h * lambda) / d + std::sqrt(h) * mu / d * normal;
}

}  // namespace

void validate(const ThetaScheme& scheme) {
    if (!(scheme.theta >= 0.0 && scheme.theta <= 1.0)) {
        throw std::invalid_argument("theta must lie in [0, 1], got " + std::to_string(scheme.theta));
    }
    if (scheme.newton_max_iter < 1 || !(scheme.newton_tol > 0.0)) {
        throw std::invalid_argument("Newton settings must be positive");
    }
}

DahlquistCoefficients theta_coefficients(double theta_f, double theta_g, State lambda, State mu,
                                         const TimeGrid& grid) {
    const State df = denominator(theta_f, grid.dt, lambda);
    const State dg = denominator(theta_g, grid.dT, lambda);
    DahlquistCoefficients c;
    c.a = (1.0 + (1.0 - theta_f) * grid.dt * lambda) / df;
    c.b = std::sqrt(grid.dt) * mu / df;
    c.A = (1.0 + (1.0 - theta_g) * grid.dT * lambda) / dg;
    c.B = std::sqrt(grid.dT) * mu / dg;
    c.substeps = grid.M;
    return c;
}

State theta_step(const SdeModel& model, const ThetaScheme& scheme, State u, double h, double dW) {
    const State fu = model.drift(u);
    const State explicit_part = u + (1.0 - scheme.theta) * h * fu + model.diffusion(u) * dW;
    if (scheme.theta == 0.0) return checked(explicit_part, "theta_step");
    const State rhs = checked(explicit_part, "theta_step");
    const State predictor = u + h * fu + model.diffusion(u) * dW;
    return solve_implicit(model, scheme, h, rhs, is_finite(predictor) ? predictor : u);
}

State project_state(State u, double h) {
    const double r = std::abs(u);
    if (r == 0.0) return u;
    const double radius = std::pow(h, -0.25);
    return r > radius ? (radius / r) * u : u;
}

State projected_euler_step(State u, const SdeModel& model, double h, double dW) {
    if (!(h > 0.0)) throw std::invalid_argument("projected_euler_step: step must be positive");
    const State p = project_state(u, h);
    return checked(p + model.drift(p) * h + model.diffusion(p) * dW, "projected_euler_step");
}

State coarse_step(const SdeModel& model, const ThetaScheme& scheme_g, const BrownianTable& table,
                  std::size_t path, std::size_t n, State u) {
    const TimeGrid& g = table.grid();
    const double v = table.coarse_normal(path, n);
    if (closed_form(model, scheme_g)) {
        const auto [lambda, mu] = *model.linear_coefficients();
        return checked(linear_multiplier(lambda, mu, scheme_g.theta, g.dT, v) * u, "coarse_step");
    }
    return step_once(model, scheme_g, u, g.dT, std::sqrt(g.dT) * v);
}

State fine_step_sequential(const SdeModel& model, const ThetaScheme& scheme_f, const BrownianTable& table,
                           std::size_t path, std::size_t n, State u) {
    const TimeGrid& g = table.grid();
    const double sqrt_dt = std::sqrt(g.dt);
    for (double v : table.fine_normals(path, n)) u = step_once(model, scheme_f, u, g.dt, sqrt_dt * v);
    return u;
}

State fine_step(const SdeModel& model, const ThetaScheme& scheme_f, const BrownianTable& table,
                std::size_t path, std::size_t n, State u) {
    if (!closed_form(model, scheme_f)) return fine_step_sequential(model, scheme_f, table, path, n, u);
    const auto [lambda, mu] = *model.linear_coefficients();
    State product(1.0, 0.0);
    for (double v : table.fine_normals(path, n)) {
        product *= linear_multiplier(lambda, mu, scheme_f.theta, table.grid().dt, v);
    }
    return checked(product * u, "fine_step");
}

std::vector<State> serial_reference(const SdeModel& model, const ThetaScheme& scheme_f, const BrownianTable& table,
                                    std::size_t path, State u0) {
    std::vector<State> u(table.grid().N + 1);
    u[0] = u0;
    for (std::size_t n = 0; n < table.grid().N; ++n) u[n + 1] = fine_step(model, scheme_f, table, path, n, u[n]);
    return u;
}

PathPropagators::PathPropagators(const SdeModel& model, const ThetaScheme& scheme_f, const ThetaScheme& scheme_g,
                                 const BrownianTable& table, std::size_t path)
    : model_(&model), scheme_f_(scheme_f), scheme_g_(scheme_g), table_(&table), path_(path) {
    validate(scheme_f_);
    validate(scheme_g_);
    if (path >= table.n_paths()) throw std::out_of_range("PathPropagators: path out of range");
}

State PathPropagators::coarse(std::size_t n, State u) const {
    return coarse_step(*model_, scheme_g_, *table_, path_, n, u);
}

State PathPropagators::fine(std::size_t n, State u) const {
    return fine_step(*model_, scheme_f_, *table_, path_, n, u);
}

}  // namespace sparareal
