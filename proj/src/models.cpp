#include "sparareal/models.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "sparareal/errors.hpp"

namespace sparareal {

namespace {

constexpr std::array<std::string_view, 4> kModelNames{"dahlquist", "ginzburg_landau", "double_well", "population"};

template <typename P>
const P& expect_params(std::string_view name, const ModelParams& params) {
    const P* p = std::get_if<P>(&params);
    if (p == nullptr) throw std::invalid_argument("model '" + std::string(name) + "': wrong parameter record");
    return *p;
}

void require(bool ok, std::string_view model, std::string_view what) {
    if (!ok) throw std::invalid_argument("model '" + std::string(model) + "': " + std::string(what));
}

bool finite(double v) { return std::isfinite(v); }

SdeModel make_dahlquist(const DahlquistParams& p) {
    require(is_finite(p.lambda) && is_finite(p.mu) && is_finite(p.u0), "dahlquist", "parameters must be finite");
    SdeModel m;
    m.name = "dahlquist";
    m.complex_valued = p.lambda.imag() != 0.0 || p.mu.imag() != 0.0 || p.u0.imag() != 0.0;
    m.drift = [l = p.lambda](State u) { return l * u; };
    m.diffusion = [mu = p.mu](State u) { return mu * u; };
    m.drift_derivative = [l = p.lambda](State) { return l; };
    m.params = p;
    m.exact_kind = ExactKind::geometric;
    return m;
}

SdeModel make_ginzburg_landau(const GinzburgLandauParams& p) {
    require(finite(p.upsilon) && p.upsilon >= 0.0, "ginzburg_landau", "upsilon must be >= 0");
    require(finite(p.lambda) && p.lambda > 0.0, "ginzburg_landau", "lambda must be > 0");
    require(finite(p.sigma) && p.sigma > 0.0, "ginzburg_landau", "sigma must be > 0");
    require(finite(p.x0) && p.x0 > 0.0, "ginzburg_landau", "x0 must be > 0");
    const double growth = p.upsilon + 0.5 * p.sigma * p.sigma;
    SdeModel m;
    m.name = "ginzburg_landau";
    m.drift = [growth, l = p.lambda](State x) { return growth * x - l * x * x * x; };
    m.diffusion = [s = p.sigma](State x) { return s * x; };
    m.drift_derivative = [growth, l = p.lambda](State x) { return growth - 3.0 * l * x * x; };
    m.params = p;
    m.exact_kind = ExactKind::ginzburg_landau;
    return m;
}

SdeModel make_double_well(const DoubleWellParams& p) {
    require(finite(p.sigma) && p.sigma > 0.0, "double_well", "sigma must be > 0");
    require(finite(p.x0), "double_well", "x0 must be finite");
    SdeModel m;
    m.name = "double_well";
    m.drift = [](State x) { return -8.0 * x + 12.0 * x * x - 4.0 * x * x * x; };
    m.diffusion = [s = p.sigma](State) { return State(s, 0.0); };
    m.drift_derivative = [](State x) { return -8.0 + 24.0 * x - 12.0 * x * x; };
    m.params = p;
    m.exact_kind = ExactKind::none;
    return m;
}

SdeModel make_population(const PopulationParams& p) {
    require(finite(p.r) && p.r > 0.0, "population", "r must be > 0");
    require(finite(p.K) && p.K > 0.0, "population", "K must be > 0");
    require(finite(p.sigma) && p.sigma > 0.0, "population", "sigma must be > 0");
    require(finite(p.x0) && p.x0 >= 0.0, "population", "x0 must be >= 0");
    SdeModel m;
    m.name = "population";
    m.drift = [r = p.r, K = p.K](State x) { return r * x * (K - x); };
    m.diffusion = [s = p.sigma](State x) { return s * x; };
    m.drift_derivative = [r = p.r, K = p.K](State x) { return r * (K - 2.0 * x); };
    m.params = p;
    m.exact_kind = ExactKind::logistic;
    return m;
}

// Cumulative trapezoidal integral of integrand(i) over the nodes.
std::vector<double> cumulative_trapezoid(std::span<const double> times, const std::vector<double>& values) {
    std::vector<double> out(times.size(), 0.0);
    for (std::size_t i = 1; i < times.size(); ++i) {
        out[i] = out[i - 1] + 0.5 * (times[i] - times[i - 1]) * (values[i] + values[i - 1]);
    }
    return out;
}

}  // namespace

State SdeModel::initial_value() const {
    return std::visit(
        [](const auto& p) -> State {
            if constexpr (std::is_same_v<std::decay_t<decltype(p)>, DahlquistParams>) {
                return p.u0;
            } else {
                return State(p.x0, 0.0);
            }
        },
        params);
}

std::optional<std::pair<State, State>> SdeModel::linear_coefficients() const {
    if (const auto* p = std::get_if<DahlquistParams>(&params)) return std::pair{p->lambda, p->mu};
    return std::nullopt;
}

std::span<const std::string_view> model_names() { return kModelNames; }

SdeModel model_library(std::string_view name, const ModelParams& params) {
    if (name == "dahlquist") return make_dahlquist(expect_params<DahlquistParams>(name, params));
    if (name == "ginzburg_landau") return make_ginzburg_landau(expect_params<GinzburgLandauParams>(name, params));
    if (name == "double_well") return make_double_well(expect_params<DoubleWellParams>(name, params));
    if (name == "population") return make_population(expect_params<PopulationParams>(name, params));
    throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

std::vector<State> exact_solution_on_path(const ModelParams& params, std::span<const double> times,
                                          std::span<const double> W) {
    if (times.size() != W.size()) throw std::invalid_argument("exact_solution_on_path: size mismatch");
    const std::size_t count = times.size();
    std::vector<State> out(count);

    if (const auto* p = std::get_if<DahlquistParams>(&params)) {
        const State drift = p->lambda - 0.5 * p->mu * p->mu;
        for (std::size_t i = 0; i < count; ++i) out[i] = p->u0 * std::exp(drift * times[i] + p->mu * W[i]);
        return out;
    }
    if (const auto* p = std::get_if<GinzburgLandauParams>(&params)) {
        // X = X0 e^{u t + s W} / sqrt(1 + 2 X0^2 l * int_0^t e^{2 u s + 2 s W(s)} ds)
        std::vector<double> integrand(count);
        for (std::size_t i = 0; i < count; ++i) {
            integrand[i] = std::exp(2.0 * p->upsilon * times[i] + 2.0 * p->sigma * W[i]);
        }
        const auto integral = cumulative_trapezoid(times, integrand);
        for (std::size_t i = 0; i < count; ++i) {
            const double num = p->x0 * std::exp(p->upsilon * times[i] + p->sigma * W[i]);
            out[i] = num / std::sqrt(1.0 + 2.0 * p->x0 * p->x0 * p->lambda * integral[i]);
        }
        return out;
    }
    if (const auto* p = std::get_if<PopulationParams>(&params)) {
        // X = X0 e^{(rK - s^2/2) t + s W} / (1 + X0 r * int_0^t e^{(rK - s^2/2) s + s W(s)} ds)
        const double rate = p->r * p->K - 0.5 * p->sigma * p->sigma;
        std::vector<double> growth(count);
        for (std::size_t i = 0; i < count; ++i) growth[i] = std::exp(rate * times[i] + p->sigma * W[i]);
        const auto integral = cumulative_trapezoid(times, growth);
        for (std::size_t i = 0; i < count; ++i) {
            out[i] = p->x0 * growth[i] / (1.0 + p->x0 * p->r * integral[i]);
        }
        return out;
    }
    throw UnsupportedError("exact_solution_on_path: the double-well model has no closed-form solution");
}

std::vector<State> exact_reference(const SdeModel& model, const BrownianTable& table, std::size_t path) {
    if (model.exact_kind == ExactKind::none) {
        throw UnsupportedError("exact_reference: model '" + model.name + "' has no closed-form solution");
    }
    const TimeGrid& g = table.grid();
    const auto W = table.wiener_path(path);
    std::vector<double> times(W.size());
    for (std::size_t i = 0; i < times.size(); ++i) times[i] = static_cast<double>(i) * g.dt;
    return exact_solution_on_path(model.params, times, W);
}

}  // namespace sparareal
