#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sparareal/propagators.hpp"

namespace sparareal {

/// Solution bound of e_{k+1} <= At e_k + Bt e_{k-1} with e_0 = e_1 = eps0
/// taken as a worst case: eps0 * ((At + sqrt(At^2 + 4 Bt)) / 2)^k.
/// Throws std::invalid_argument for negative inputs.
double recurrence_bound(double A_t, double B_t, double eps0, std::size_t k);

struct ConditionCheck {
    double value = 0.0;  ///< Im(A conj(a)^2 + sqrt(2) B conj(a b))
    bool holds = false;  ///< |value| <= condition_tolerance
};

inline constexpr double condition_tolerance = 1e-12;

/// Realness condition on the Dahlquist coefficients under which the
/// mean-square bounds are derived.
ConditionCheck condition_check(const DahlquistCoefficients& coeffs);

/// Rules 2/4 centre samples at the corrected value, rules 1/3 at the fine image.
enum class BoundFamily { rules_2_4, rules_1_3 };

struct BoundParams {
    double gamma = 0.0;  ///< |A|^2 + |B|^2
    double kappa = 0.0;  ///< (|a|^2 + |b|^2)^2
    double alpha = 0.0;
    double beta = 0.0;
    /// beta with the cross term weighted by sqrt(2) instead of 2 sqrt(2).
    /// Reported only; bound_curve uses `beta`.
    double beta_alternate = 0.0;
    BoundFamily family = BoundFamily::rules_2_4;
    std::size_t substeps = 0;
    /// Per-iteration growth factor of the bound; empty when alpha >= 1.
    std::optional<double> contraction;

    /// Recurrence coefficients (At, Bt); requires alpha < 1.
    double recurrence_a() const;
    double recurrence_b() const;
};

BoundParams bound_params(const DahlquistCoefficients& coeffs, BoundFamily family);

/// eps0 * contraction^k for k = 0..K. Throws BoundUndefinedError when
/// alpha >= 1 and UnsupportedError unless the coefficients come from a
/// grid with M = 2.
std::vector<double> bound_curve(const BoundParams& params, double eps0, std::size_t K);

}  // namespace sparareal
