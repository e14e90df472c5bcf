#include "sparareal/parareal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sparareal {

void validate(const StoppingRule& rule) {
    if (!(rule.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (rule.k_max < 1) throw std::invalid_argument("k_max must be at least 1");
}

std::size_t converged_prefix(std::span<const State> current, std::span<const State> previous, double epsilon,
                             ErrorMeasure measure) {
    if (current.size() != previous.size()) throw std::invalid_argument("converged_prefix: length mismatch");
    if (current.empty()) throw std::invalid_argument("converged_prefix: empty sequences");
    std::size_t prefix = 0;
    for (std::size_t i = 0; i < current.size(); ++i) {
        if (!(measured(std::abs(current[i] - previous[i]), measure) < epsilon)) break;
        prefix = i;
    }
    return prefix;
}

namespace detail {

double sup_difference(std::span<const State> a, std::span<const State> b) {
    double sup = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sup = std::max(sup, std::abs(a[i] - b[i]));
    return sup;
}

bool record_sweep(IterationHistory& history, std::vector<State> iterate, std::size_t& resolved,
                  std::size_t fine_evaluations, const StoppingRule& rule) {
    const std::size_t N = iterate.size() - 1;
    const auto& previous = history.U.back();
    const double residual = sup_difference(iterate, previous);
    const std::size_t by_tolerance = converged_prefix(iterate, previous, rule.epsilon, rule.measure);
    // Each sweep resolves at least one more interval exactly.
    resolved = std::min(N, std::max(by_tolerance, resolved + 1));

    history.U.push_back(std::move(iterate));
    history.residual_sup.push_back(residual);
    history.converged_prefix.push_back(resolved);
    history.fine_evaluations.push_back(fine_evaluations);

    const std::size_t k = history.sweeps();
    if (measured(residual, rule.measure) <= rule.epsilon) {
        history.k_stop = k;
        history.reason = StopReason::tolerance;
        return true;
    }
    if (resolved == N) {
        history.k_stop = k;
        history.reason = StopReason::all_resolved;
        return true;
    }
    return false;
}

}  // namespace detail

IterationHistory parareal_run(const PathPropagators& props, State u0, const StoppingRule& rule,
                              const Execution& exec) {
    validate(rule);
    const std::size_t N = props.intervals();

    IterationHistory history;
    std::vector<State> coarse(N + 1);  // G(U^k_n), indexed by destination n+1
    std::vector<State> U(N + 1);
    U[0] = u0;
    for (std::size_t n = 0; n < N; ++n) {
        coarse[n + 1] = props.coarse(n, U[n]);
        U[n + 1] = coarse[n + 1];
    }
    history.U.push_back(U);
    history.residual_sup.push_back(std::numeric_limits<double>::infinity());
    history.converged_prefix.push_back(0);
    history.fine_evaluations.push_back(0);

    std::size_t resolved = 0;
    std::vector<State> fine(N + 1);
    for (std::size_t k = 1; k <= rule.k_max; ++k) {
        const auto& prev = history.U.back();
        const std::size_t first = resolved;
        parallel_for(N - first, exec, [&](std::size_t i) {
            const std::size_t n = first + i;
            fine[n + 1] = props.fine(n, prev[n]);
        });

        std::vector<State> next = prev;
        for (std::size_t n = first; n < N; ++n) {
            const State coarse_new = props.coarse(n, next[n]);
            next[n + 1] = detail::correct(fine[n + 1], coarse_new, coarse[n + 1]);
            coarse[n + 1] = coarse_new;
        }
        if (detail::record_sweep(history, std::move(next), resolved, N - first, rule)) return history;
    }
    return history;
}

IterationHistory parareal_run(const SdeModel& model, const ThetaScheme& scheme_f, const ThetaScheme& scheme_g,
                              const BrownianTable& table, std::size_t path, State u0, const StoppingRule& rule,
                              const Execution& exec) {
    const PathPropagators props(model, scheme_f, scheme_g, table, path);
    return parareal_run(props, u0, rule, exec);
}

}  // namespace sparareal
