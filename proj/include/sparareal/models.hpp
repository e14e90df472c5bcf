#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "sparareal/grid_paths.hpp"
#include "sparareal/types.hpp"

namespace sparareal {

/// du = lambda u dt + mu u dW. Complex coefficients are allowed.
struct DahlquistParams {
    State lambda{-40.0, 0.0};
    State mu{0.56, 0.0};
    State u0{1.0, 0.0};
};

/// dX = ((upsilon + sigma^2/2) X - lambda X^3) dt + sigma X dW.
struct GinzburgLandauParams {
    double upsilon = 25.0;
    double lambda = 0.1;
    double sigma = 0.5;
    double x0 = 1.0;
};

/// dX = (-8X + 12X^2 - 4X^3) dt + sigma dW, the gradient flow of
/// V(x) = x^2 (x - 2)^2 with additive noise.
struct DoubleWellParams {
    double sigma = 4.0;
    double x0 = 1.0;
};

/// dX = r X (K - X) dt + sigma X dW.
struct PopulationParams {
    double r = 0.5;
    double K = 100.0;
    double sigma = 0.05;
    double x0 = 1.0;
};

using ModelParams = std::variant<DahlquistParams, GinzburgLandauParams, DoubleWellParams, PopulationParams>;

enum class ExactKind { none, geometric, ginzburg_landau, logistic };

/// Scalar SDE du = f(u) dt + g(u) dW.
struct SdeModel {
    std::string name;
    bool complex_valued = false;  ///< some parameter has a nonzero imaginary part
    std::function<State(State)> drift;
    std::function<State(State)> diffusion;
    /// df/du, used by the drift-implicit Newton solve. May be empty.
    std::function<State(State)> drift_derivative;
    ModelParams params;
    ExactKind exact_kind = ExactKind::none;

    State initial_value() const;
    /// (lambda, mu) when the model is the linear Dahlquist equation.
    std::optional<std::pair<State, State>> linear_coefficients() const;
};

/// Builds one of "dahlquist", "ginzburg_landau", "double_well",
/// "population". Throws std::invalid_argument for an unknown name, a
/// parameter record of the wrong kind, or violated sign constraints.
SdeModel model_library(std::string_view name, const ModelParams& params);

/// Names accepted by model_library.
std::span<const std::string_view> model_names();

/// Closed-form solution evaluated along a sampled Wiener path W at the
/// given times (W[i] = W(times[i]), times[0] = 0). Time integrals are
/// approximated by the trapezoidal rule on the same nodes. Parameters are
/// not range-checked here. Throws UnsupportedError for the double well.
std::vector<State> exact_solution_on_path(const ModelParams& params, std::span<const double> times,
                                          std::span<const double> W);

/// exact_solution_on_path on the fine grid of one table path
/// (N*M + 1 values).
std::vector<State> exact_reference(const SdeModel& model, const BrownianTable& table, std::size_t path);

}  // namespace sparareal
