#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sparareal/iteration.hpp"
#include "sparareal/parallel.hpp"
#include "sparareal/propagators.hpp"

namespace sparareal {

/// Perturbation distribution for the initial values of unresolved
/// intervals. Rules 1 and 3 are centred at F(U^{k-1}_{n-1}), rules 2 and 4
/// at U^k_n. Rules 1 and 2 are Gaussian; 3 and 4 are uniform, scaled by
/// sqrt(3) so the second moment is sigma^2.
enum class SamplingRule : int { rule1 = 1, rule2 = 2, rule3 = 3, rule4 = 4 };

/// Throws std::invalid_argument for ids outside 1..4.
SamplingRule sampling_rule_from_id(int id);

/// Which bound family applies to a rule.
inline bool centred_on_fine(SamplingRule rule) noexcept {
    return rule == SamplingRule::rule1 || rule == SamplingRule::rule3;
}

struct SamplingOptions {
    std::size_t samples = 2;  ///< m, including the unperturbed candidate
    SamplingRule rule = SamplingRule::rule1;
    std::uint64_t seed = 0;   ///< sampling stream, separate from the path
};

/// Address of one draw in the sampling stream.
struct SampleKey {
    std::uint64_t seed = 0;
    std::uint64_t k = 0;
    std::uint64_t n = 0;
    std::uint64_t j = 0;
};

/// Candidates for one interval and their fine images.
struct SampleSet {
    std::vector<State> candidates;   ///< candidates[0] is the predictor-corrector value
    std::vector<State> propagated;   ///< fine images, same order
    std::size_t selected = 0;        ///< 0-based index of the chosen candidate
};

/// sigma = |G_{n-1}(U^k_{n-1}) - G_{n-1}(U^{k-1}_{n-1})| for the interval
/// starting at T_n; both coarse steps use the same draw V_{n-1}. Requires n >= 1.
double marginal_std(const PathPropagators& props, std::size_t n, State current_prev_node, State previous_prev_node);

/// One perturbed candidate. The perturbation is a real offset, sigma * z or
/// sqrt(3) sigma (2 w - 1) with w ~ U[0, 1), added to the rule's mean.
State draw_sample(SamplingRule rule, State mean_rule13, State mean_rule24, double sigma, const SampleKey& key);

/// argmin_j |candidates[j] - incoming_fine|, lowest index on ties
/// (0-based). Throws std::invalid_argument for an empty set.
std::size_t select_best(std::span<const State> candidates, State incoming_fine);

/// Stochastic Parareal along one Brownian path. Sweep 0 is the coarse
/// prediction and sweep 1 a plain Parareal sweep. Later sweeps propagate m
/// candidates per unresolved interval (the predictor-corrector value plus
/// m - 1 perturbed draws), chain the candidates whose start best matches
/// the incoming fine value, and correct with
///   U^k_{n+1} = F(a_n) + G(U^k_n) - G(a_n)
/// for the selected candidates a_n. Resolved prefixes are frozen. With
/// m = 1 the history equals parareal_run's bit for bit.
IterationHistory sparareal_run(const PathPropagators& props, State u0, const StoppingRule& rule,
                               const SamplingOptions& sampling, const Execution& exec = {});

IterationHistory sparareal_run(const SdeModel& model, const ThetaScheme& scheme_f, const ThetaScheme& scheme_g,
                               const BrownianTable& table, std::size_t path, State u0, const StoppingRule& rule,
                               const SamplingOptions& sampling, const Execution& exec = {});

}  // namespace sparareal
