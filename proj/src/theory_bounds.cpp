#include "sparareal/theory_bounds.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "sparareal/errors.hpp"

namespace sparareal {

namespace {

double contraction_of(double A_t, double B_t) {
    return 0.5 * (A_t + std::sqrt(A_t * A_t + 4.0 * B_t));
}

void require_defined(const BoundParams& p) {
    if (!(p.alpha < 1.0)) {
        throw BoundUndefinedError("mean-square bound undefined: alpha = " + std::to_string(p.alpha) + " >= 1");
    }
}

}  // namespace

double recurrence_bound(double A_t, double B_t, double eps0, std::size_t k) {
    if (!(A_t >= 0.0) || !(B_t >= 0.0) || !(eps0 >= 0.0)) {
        throw std::invalid_argument("recurrence_bound: coefficients and eps0 must be non-negative");
    }
    return eps0 * std::pow(contraction_of(A_t, B_t), static_cast<double>(k));
}

ConditionCheck condition_check(const DahlquistCoefficients& c) {
    const State s = c.A * std::conj(c.a) * std::conj(c.a) + std::numbers::sqrt2 * c.B * std::conj(c.a * c.b);
    ConditionCheck out;
    out.value = s.imag();
    out.holds = std::abs(out.value) <= condition_tolerance;
    return out;
}

double BoundParams::recurrence_a() const {
    require_defined(*this);
    if (family == BoundFamily::rules_2_4) return 2.0 * beta * (1.0 + 2.0 * gamma) / (1.0 - alpha);
    return 4.0 * beta * gamma / (1.0 - alpha);
}

double BoundParams::recurrence_b() const {
    require_defined(*this);
    if (family == BoundFamily::rules_2_4) return 4.0 * beta * gamma / (1.0 - alpha);
    return (2.0 * beta * kappa + 4.0 * beta * gamma) / (1.0 - alpha);
}

BoundParams bound_params(const DahlquistCoefficients& c, BoundFamily family) {
    const double sqrt2 = std::numbers::sqrt2;
    BoundParams p;
    p.family = family;
    p.substeps = c.substeps;
    p.gamma = std::norm(c.A) + std::norm(c.B);
    const double fine_energy = std::norm(c.a) + std::norm(c.b);
    p.kappa = fine_energy * fine_energy;

    const State ab = c.a * c.b;
    const double coupling =
        std::abs(c.A * std::conj(c.a) * std::conj(c.a) - std::norm(c.B) - std::norm(c.A) + sqrt2 * c.B * std::conj(ab));
    p.alpha = p.gamma + coupling;

    const double base = -2.0 * (std::conj(c.A) * c.a * c.a).real() + p.gamma + p.kappa + coupling;
    const double cross = (std::conj(c.B) * ab).real();
    p.beta = base - 2.0 * sqrt2 * cross;
    p.beta_alternate = base - sqrt2 * cross;

    if (p.alpha < 1.0) p.contraction = contraction_of(p.recurrence_a(), p.recurrence_b());
    return p;
}

std::vector<double> bound_curve(const BoundParams& params, double eps0, std::size_t K) {
    require_defined(params);
    if (params.substeps != 2) {
        throw UnsupportedError("mean-square bound requires M = 2, got M = " + std::to_string(params.substeps));
    }
    const double A_t = params.recurrence_a();
    const double B_t = params.recurrence_b();
    std::vector<double> curve(K + 1);
    for (std::size_t k = 0; k <= K; ++k) curve[k] = recurrence_bound(A_t, B_t, eps0, k);
    return curve;
}

}  // namespace sparareal
