#include "sparareal/sparareal.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "sparareal/philox.hpp"

namespace sparareal {

SamplingRule sampling_rule_from_id(int id) {
    if (id < 1 || id > 4) throw std::invalid_argument("sampling rule must be 1..4, got " + std::to_string(id));
    return static_cast<SamplingRule>(id);
}

double marginal_std(const PathPropagators& props, std::size_t n, State current_prev_node,
                    State previous_prev_node) {
    if (n == 0) throw std::invalid_argument("marginal_std: interval 0 has no predecessor");
    return std::abs(props.coarse(n - 1, current_prev_node) - props.coarse(n - 1, previous_prev_node));
}

State draw_sample(SamplingRule rule, State mean_rule13, State mean_rule24, double sigma, const SampleKey& key) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("draw_sample: sigma must be non-negative");
    const State mean = centred_on_fine(rule) ? mean_rule13 : mean_rule24;
    const auto n = static_cast<std::uint32_t>(key.n);
    const auto j = static_cast<std::uint32_t>(key.j);
    double offset = 0.0;
    if (rule == SamplingRule::rule1 || rule == SamplingRule::rule2) {
        offset = sigma * KeyedStream(key.seed, StreamDomain::sample_normal).normal(key.k, n, j);
    } else {
        const double w = KeyedStream(key.seed, StreamDomain::sample_uniform).uniform(key.k, n, j);
        offset = std::numbers::sqrt3 * sigma * (2.0 * w - 1.0);
    }
    return mean + offset;
}

std::size_t select_best(std::span<const State> candidates, State incoming_fine) {
    if (candidates.empty()) throw std::invalid_argument("select_best: no candidates");
    std::size_t best = 0;
    double best_distance = std::abs(candidates[0] - incoming_fine);
    for (std::size_t j = 1; j < candidates.size(); ++j) {
        const double d = std::abs(candidates[j] - incoming_fine);
        if (d < best_distance) {
            best = j;
            best_distance = d;
        }
    }
    return best;
}

IterationHistory sparareal_run(const PathPropagators& props, State u0, const StoppingRule& rule,
                               const SamplingOptions& sampling, const Execution& exec) {
    validate(rule);
    if (sampling.samples < 1) throw std::invalid_argument("sparareal_run: at least one sample is required");
    const std::size_t N = props.intervals();
    const std::size_t m = sampling.samples;

    IterationHistory history;
    std::vector<State> U(N + 1);
    U[0] = u0;
    for (std::size_t n = 0; n < N; ++n) U[n + 1] = props.coarse(n, U[n]);
    history.U.push_back(U);
    history.residual_sup.push_back(std::numeric_limits<double>::infinity());
    history.converged_prefix.push_back(0);
    history.fine_evaluations.push_back(0);

    // fine_of_base[n] = F_n(U^{k-1}_n) for the iterate the last sweep started from.
    std::vector<State> fine_of_base(N);
    std::size_t resolved = 0;

    // Sweep 1: plain Parareal.
    {
        parallel_for(N, exec, [&](std::size_t n) { fine_of_base[n] = props.fine(n, U[n]); });
        std::vector<State> next = U;
        for (std::size_t n = 0; n < N; ++n) {
            next[n + 1] = detail::correct(fine_of_base[n], props.coarse(n, next[n]), props.coarse(n, U[n]));
        }
        if (detail::record_sweep(history, std::move(next), resolved, N, rule)) return history;
    }

    std::vector<SampleSet> sets(N);
    for (std::size_t k = 2; k <= rule.k_max; ++k) {
        const auto& prev = history.U[k - 1];
        const auto& before = history.U[k - 2];
        const std::size_t first = resolved;

        // Candidates: interval `first` starts from a resolved value and is
        // propagated as is; later intervals get m candidates.
        for (std::size_t n = first; n < N; ++n) {
            SampleSet& set = sets[n];
            const std::size_t count = (n == first) ? 1 : m;
            set.candidates.assign(count, prev[n]);
            set.propagated.assign(count, State{});
            set.selected = 0;
            if (count == 1) continue;
            const double sigma = marginal_std(props, n, prev[n - 1], before[n - 1]);
            for (std::size_t j = 1; j < count; ++j) {
                set.candidates[j] = draw_sample(sampling.rule, fine_of_base[n - 1], prev[n], sigma,
                                                SampleKey{sampling.seed, k, n, j});
            }
        }

        // Fine propagation of every candidate; independent across (n, j).
        const std::size_t slots = (N - first - 1) * m + 1;
        parallel_for(slots, exec, [&](std::size_t s) {
            const std::size_t n = (s == 0) ? first : first + 1 + (s - 1) / m;
            const std::size_t j = (s == 0) ? 0 : (s - 1) % m;
            sets[n].propagated[j] = props.fine(n, sets[n].candidates[j]);
        });

        // Chain the candidates that best continue the incoming fine value.
        State incoming = sets[first].propagated[0];
        for (std::size_t n = first + 1; n < N; ++n) {
            SampleSet& set = sets[n];
            set.selected = select_best(set.candidates, incoming);
            incoming = set.propagated[set.selected];
        }
        for (std::size_t n = first; n < N; ++n) fine_of_base[n] = sets[n].propagated[0];

        std::vector<State> next = prev;
        for (std::size_t n = first; n < N; ++n) {
            const SampleSet& set = sets[n];
            const State chosen = set.candidates[set.selected];
            next[n + 1] = detail::correct(set.propagated[set.selected], props.coarse(n, next[n]),
                                          props.coarse(n, chosen));
        }
        if (detail::record_sweep(history, std::move(next), resolved, slots, rule)) return history;
    }
    return history;
}

IterationHistory sparareal_run(const SdeModel& model, const ThetaScheme& scheme_f, const ThetaScheme& scheme_g,
                               const BrownianTable& table, std::size_t path, State u0, const StoppingRule& rule,
                               const SamplingOptions& sampling, const Execution& exec) {
    const PathPropagators props(model, scheme_f, scheme_g, table, path);
    return sparareal_run(props, u0, rule, sampling, exec);
}

}  // namespace sparareal
