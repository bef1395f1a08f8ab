/**
 * Absorption certificates.
 *
 * A finite model is absorbing iff no end component lives inside the
 * transient states. When it is, the worst-case expected hitting time
 * v = 1 + max_a Q v (v = 0 on the absorbing set) is finite and the
 * worst-case N-step absorption probability eps (N = number of transient
 * states) is positive, which yields the tail bound
 *
 *     sup_pi sum_{t >= n} P_pi(T > t) <= N (1 - eps)^floor(n / N) / eps.
 *
 * The bound holds for history-dependent policies too: the N-step dynamic
 * program below minimizes over all of them.
 */
#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "occlab/errors.hpp"
#include "occlab/model.hpp"
#include "occlab/policy.hpp"

namespace occlab {

/// All maximal end components of the sub-model restricted to the transient states.
template <Scalar T>
std::vector<EndComponent> max_end_components(const Mdp<T>& model);

template <Scalar T>
struct HittingTime {
    std::vector<T> value;            // per state, 0 on the absorbing set
    T expected{};                    // eta(v)
    DeterministicPolicy worst;       // a maximizing selector
    std::size_t iterations = 0;      // sweeps (float) or improvement rounds (exact)
    double fixpoint_residual = 0.0;  // sup |v - (1 + max_a Q v)| on transient states
};

/**
 * Float mode: value iteration from 0, stopping when the span of successive
 * differences is <= fixpoint_tol; throws NumericError after max_sweeps.
 * Exact mode: policy iteration with exact linear solves.
 * Throws NotAbsorbingError carrying the end components when not absorbing.
 */
template <Scalar T>
HittingTime<T> max_expected_hitting_time(const Mdp<T>& model, double fixpoint_tol = 1e-12,
                                         std::size_t max_sweeps = 1'000'000);

template <Scalar T>
struct TailBound {
    std::size_t horizon = 1;  // N
    T epsilon{};              // worst-case probability of absorption within N steps

    /// N (1 - eps)^floor(n/N) / eps
    T operator()(std::size_t n) const;
};

template <Scalar T>
TailBound<T> uniform_tail_bound(const Mdp<T>& model);

template <Scalar T>
struct AbsorptionCertificate {
    bool absorbing = false;
    std::vector<EndComponent> mec_witness;
    std::optional<HittingTime<T>> hitting;
    std::optional<TailBound<T>> tail;
};

template <Scalar T>
AbsorptionCertificate<T> certify_absorption(const Mdp<T>& model, double fixpoint_tol = 1e-12,
                                            std::size_t max_sweeps = 1'000'000);

/// Throws NotAbsorbingError with the end-component witness.
template <Scalar T>
void require_absorbing(const Mdp<T>& model);

}  // namespace occlab
