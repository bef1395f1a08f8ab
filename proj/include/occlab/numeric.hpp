/**
 * Scalar types and tolerances shared by every module.
 *
 * Every numerical routine in occlab is a template over the scalar type:
 * `Rational` (exact mode) or `double` (float mode). Tolerances are zero in
 * exact mode, so the same comparison code is exact there.
 */
#pragma once

#include <cmath>
#include <concepts>
#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>

namespace occlab {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

enum class Mode { exact, floating };

std::string to_string(Mode mode);
Mode parse_mode(std::string_view text);

template <class T>
concept Scalar = std::same_as<T, Rational> || std::same_as<T, double>;

template <Scalar T>
inline constexpr bool is_exact_v = std::same_as<T, Rational>;

template <Scalar T>
inline constexpr Mode mode_of_v = is_exact_v<T> ? Mode::exact : Mode::floating;

/// Parses "3", "-1/2", "0.125", "2.5e-3" exactly.
Rational parse_rational(std::string_view text);

/// Canonical "p" or "p/q" form.
std::string format_rational(const Rational& value);

/// Exact binary value of a finite double.
Rational rational_from_double(double value);

inline double to_double(const Rational& value) { return value.convert_to<double>(); }
inline double to_double(double value) { return value; }

template <Scalar T>
T scalar_from_rational(const Rational& value)
{
    if constexpr (is_exact_v<T>)
        return value;
    else
        return to_double(value);
}

template <Scalar T>
T scalar_from_double(double value)
{
    if constexpr (is_exact_v<T>)
        return rational_from_double(value);
    else
        return value;
}

inline Rational abs_value(const Rational& value) { return boost::multiprecision::abs(value); }
inline double abs_value(double value) { return std::fabs(value); }

/**
 * Tolerances used throughout. Field names follow their role:
 *   stochastic  row sums / simplex checks
 *   character   characteristic-equation residual
 *   support     threshold deciding membership in a support set
 *   fixpoint    value-iteration stop rule (span seminorm)
 *   rank_cutoff relative singular-value cutoff used by float rank/null space
 */
template <Scalar T>
struct Tolerances {
    T stochastic{};
    T character{};
    T support{};
    double fixpoint = 1e-12;
    double rank_cutoff = 1e-8;

    static Tolerances defaults()
    {
        Tolerances tol;
        if constexpr (!is_exact_v<T>) {
            tol.stochastic = 1e-9;
            tol.character = 1e-9;
            tol.support = 1e-11;
        }
        return tol;
    }
};

/// |value| <= tol (exact zero test when tol == 0).
template <Scalar T>
bool near_zero(const T& value, const T& tol)
{
    return abs_value(value) <= tol;
}

/// value > tol, i.e. "in the support".
template <Scalar T>
bool positive(const T& value, const T& tol)
{
    return value > tol;
}

}  // namespace occlab
