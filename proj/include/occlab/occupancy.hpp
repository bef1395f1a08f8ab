/**
 * Occupancy measures of stationary policies.
 *
 * A measure is a vector over the transient pairs of the model (positions in
 * `PairIndex::transient_pairs()`); pairs at absorbing states carry no mass.
 * The characteristic equations read, for every transient state x,
 *
 *     mu^X(x) = eta(x) + sum_{(y,a)} mu(y,a) Q(x|y,a),
 *
 * and their nonnegative solutions are exactly the occupancy measures.
 */
#pragma once

#include <span>
#include <vector>

#include "occlab/model.hpp"
#include "occlab/policy.hpp"

namespace occlab {

template <Scalar T>
struct OccupancyMeasure {
    std::vector<T> mass;      // per transient pair
    std::vector<T> marginal;  // per transient state
    T residual{};             // characteristic-equation residual (sup norm)

    /// mu(X x A), the expected hitting time of the generating policy.
    T total() const;
};

/// mu^X over transient states.
template <Scalar T>
std::vector<T> state_marginal(const Mdp<T>& model, std::span<const T> mass);

/**
 * Per transient state: nu^X(x) - c*eta(x) - (nu Q)(x), with c = 1 for the
 * characteristic equations and c = 0 for the invariance equations of signed
 * measures.
 */
template <Scalar T>
std::vector<T> characteristic_defect(const Mdp<T>& model, std::span<const T> mass, bool include_initial);

/// || mu^X - (eta + mu Q) 1_{transient} ||_inf
template <Scalar T>
T characteristic_residual(const Mdp<T>& model, std::span<const T> mass);

/// || nu^X - nu Q 1_{transient} ||_inf
template <Scalar T>
T invariance_residual(const Mdp<T>& model, std::span<const T> mass);

/// Wraps a mass vector with its marginal and residual.
template <Scalar T>
OccupancyMeasure<T> make_measure(const Mdp<T>& model, std::vector<T> mass);

/**
 * Solves rho = eta + rho P_phi on the transient states and returns
 * mu(x,a) = rho(x) phi(a|x). Throws NotAbsorbingError when the policy keeps
 * mass inside the transient states forever (singular system).
 */
template <Scalar T>
OccupancyMeasure<T> occupancy_of_stationary(const Mdp<T>& model, const StationaryPolicy<T>& policy);

template <Scalar T>
OccupancyMeasure<T> occupancy_of_deterministic(const Mdp<T>& model, const DeterministicPolicy& selector);

/// sum_j weights_j * mu_{selector_j}
template <Scalar T>
OccupancyMeasure<T> occupancy_of_mixture(const Mdp<T>& model, const MixturePolicy<T>& mixture);

template <Scalar T>
OccupancyMeasure<T> occupancy_of_chattering(const Mdp<T>& model, const ChatteringKernel<T>& kernel);

/**
 * phi(a|x) = mu(x,a) / mu^X(x) where mu^X(x) > tol.support, default
 * selector elsewhere. Rejects negative entries and residuals above
 * tol.character with InvalidArgument.
 */
template <Scalar T>
StationaryPolicy<T> policy_from_measure(const Mdp<T>& model, std::span<const T> mass,
                                        const Tolerances<T>& tol = Tolerances<T>::defaults());

/// mu(r), componentwise.
template <Scalar T>
std::vector<T> performance(const Mdp<T>& model, std::span<const T> mass);

/// Positions (into the transient pairs) of entries above `threshold`.
template <Scalar T>
std::vector<std::size_t> support_of(std::span<const T> mass, const T& threshold);

/// Rejects measures with entries below -tol.support or residual above tol.character.
template <Scalar T>
void require_occupancy(const Mdp<T>& model, std::span<const T> mass, const Tolerances<T>& tol);

}  // namespace occlab
