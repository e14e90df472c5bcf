#pragma once

#include <cstddef>

#include "sparareal/iteration.hpp"
#include "sparareal/parallel.hpp"
#include "sparareal/propagators.hpp"

namespace sparareal {

/// Classical Parareal along one Brownian path:
///   U^0_{n+1} = G(U^0_n),
///   U^{k+1}_{n+1} = G(U^{k+1}_n) + F(U^k_n) - G(U^k_n).
/// The resolved prefix is frozen and copied forward; fine propagations of a
/// sweep run concurrently under `exec` with identical results for any
/// thread count. Propagator errors propagate; running out of sweeps is
/// reported through the history.
IterationHistory parareal_run(const PathPropagators& props, State u0, const StoppingRule& rule,
                              const Execution& exec = {});

IterationHistory parareal_run(const SdeModel& model, const ThetaScheme& scheme_f, const ThetaScheme& scheme_g,
                              const BrownianTable& table, std::size_t path, State u0, const StoppingRule& rule,
                              const Execution& exec = {});

}  // namespace sparareal
