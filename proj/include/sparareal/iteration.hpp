#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sparareal/types.hpp"

namespace sparareal {

/// Stopping configuration shared by both solvers. A run stops after the
/// first sweep k whose residual max_n |U^k_n - U^{k-1}_n|, under `measure`,
/// is at most epsilon, once every interval is resolved, or at k_max.
struct StoppingRule {
    double epsilon = 1e-12;
    std::size_t k_max = 50;
    ErrorMeasure measure = ErrorMeasure::mean_square;
};

void validate(const StoppingRule& rule);

enum class StopReason { tolerance, all_resolved, max_iterations };

struct IterationHistory {
    /// U[k][n], k = 0..(last sweep), n = 0..N. U[k][0] is the initial value.
    std::vector<std::vector<State>> U;
    /// max_n |U^k_n - U^{k-1}_n| (plain modulus); +inf at k = 0.
    std::vector<double> residual_sup;
    /// Resolved prefix I after each sweep: entries 0..I are frozen.
    std::vector<std::size_t> converged_prefix;
    /// Fine propagations performed in each sweep.
    std::vector<std::size_t> fine_evaluations;
    /// First sweep meeting the stopping rule; empty if k_max ran out.
    std::optional<std::size_t> k_stop;
    StopReason reason = StopReason::max_iterations;

    std::size_t sweeps() const noexcept { return U.empty() ? 0 : U.size() - 1; }
    const std::vector<State>& final_iterate() const { return U.back(); }
};

/// Largest n such that the difference at every index i <= n, under
/// `measure`, is strictly below epsilon. Returns 0 when even index 0
/// differs (callers treat index 0 as always resolved). Throws
/// std::invalid_argument on a length mismatch or empty input.
std::size_t converged_prefix(std::span<const State> current, std::span<const State> previous, double epsilon,
                             ErrorMeasure measure = ErrorMeasure::mean_square);

namespace detail {

/// Predictor-corrector combination shared by both solvers so that they
/// round identically: fine + coarse_new - coarse_old.
inline State correct(State fine, State coarse_new, State coarse_old) noexcept {
    return fine + coarse_new - coarse_old;
}

double sup_difference(std::span<const State> a, std::span<const State> b);

/// Records sweep k and decides whether to stop. `resolved` is updated to
/// max(converged_prefix, resolved + 1), capped at N.
bool record_sweep(IterationHistory& history, std::vector<State> iterate, std::size_t& resolved,
                  std::size_t fine_evaluations, const StoppingRule& rule);

}  // namespace detail

}  // namespace sparareal
