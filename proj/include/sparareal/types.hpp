#pragma once

#include <cmath>
#include <complex>

namespace sparareal {

/// Scalar SDE state. Real-valued models keep a zero imaginary part.
using State = std::complex<double>;

inline bool is_finite(State s) noexcept {
    return std::isfinite(s.real()) && std::isfinite(s.imag());
}

/// How successive-iterate differences and errors are compared against a
/// tolerance. `mean_square` compares |x|^2, `modulus` compares |x|.
enum class ErrorMeasure { mean_square, modulus };

inline double measured(double modulus, ErrorMeasure measure) noexcept {
    return measure == ErrorMeasure::mean_square ? modulus * modulus : modulus;
}

}  // namespace sparareal
