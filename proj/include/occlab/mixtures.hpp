/**
 * Finite mixtures of deterministic stationary policies.
 *
 * The pipeline implemented here turns any occupancy measure into a mixture
 * of deterministic policies (`decompose_measure`), shrinks it with
 * Caratheodory elimination either in performance space (order <= d+1, same
 * performance vector) or in measure space (order <= dim F(mu) + 1, same
 * measure), and computes the minimal order p* + 1 for a performance vector,
 * where p* is the minimal dimension of V(mu) over the measures achieving it.
 */
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "occlab/geometry.hpp"
#include "occlab/model.hpp"
#include "occlab/policy.hpp"

namespace occlab {

/**
 * Canonicalizes a chattering kernel so every selector carries positive
 * weight at every state without changing the induced distributions.
 * At each state x with zero-weight indices Z(x) and first positive index
 * tau(x), the weight of tau(x) is split evenly over Z(x) + {tau(x)} and the
 * zero-weight selectors copy the action of tau(x). Weights <= zero_tol count
 * as zero.
 */
template <Scalar T>
ChatteringKernel<T> lissage(const ChatteringKernel<T>& kernel, const T& zero_tol = T(0));

/**
 * Writes mu as sum_j w_j mu_{gamma_j} with deterministic gamma_j by repeated
 * extraction: gamma picks the largest-mass action (lowest index on ties) at
 * every supported state, lambda = min mu/mu_gamma over supp(mu_gamma), and
 * the remainder (mu - lambda mu_gamma)/(1 - lambda) loses at least one pair
 * of support. Terminates in at most |supp mu| rounds.
 */
template <Scalar T>
MixturePolicy<T> decompose_measure(const Mdp<T>& model, std::span<const T> mu,
                                   const Tolerances<T>& tol = Tolerances<T>::defaults());

/**
 * Caratheodory reduction in R^d: returns weights (same length as the input)
 * with at most d+1 nonzero entries and the same barycentre. Inputs with
 * n <= d+1 points are returned unchanged. Rejects inputs whose barycentre
 * misses `target` by more than tol.character.
 */
template <Scalar T>
std::vector<T> caratheodory_reduce(const std::vector<std::vector<T>>& points, std::span<const T> weights,
                                   std::span<const T> target,
                                   const Tolerances<T>& tol = Tolerances<T>::defaults());

/// Removes affine dependencies among the weighted points until the active ones are affinely independent.
template <Scalar T>
std::vector<T> eliminate_affine_dependence(const std::vector<std::vector<T>>& points, std::vector<T> weights,
                                           const Tolerances<T>& tol = Tolerances<T>::defaults());

/// Same measure, at most dim F(mu) + 1 components.
template <Scalar T>
MixturePolicy<T> reduce_in_measure_space(const Mdp<T>& model, const MixturePolicy<T>& mixture,
                                         const Tolerances<T>& tol = Tolerances<T>::defaults());

template <Scalar T>
struct PerformanceDecomposition {
    MixturePolicy<T> mixture;
    std::vector<T> alpha;                            // target performance
    std::vector<std::vector<T>> component_performance;  // mu_{gamma_j}(r)
    std::vector<T> achieved;                         // sum_j w_j mu_{gamma_j}(r)
    T error{};                                       // sup |achieved - alpha|
    std::vector<T> source_measure;
};

/// Mixture of order <= d+1 with performance mu(r).
template <Scalar T>
PerformanceDecomposition<T> decompose_performance(const Mdp<T>& model, std::span<const T> mu,
                                                  const Tolerances<T>& tol = Tolerances<T>::defaults());

template <Scalar T>
PerformanceDecomposition<T> decompose_performance(const Mdp<T>& model, const StationaryPolicy<T>& policy,
                                                  const Tolerances<T>& tol = Tolerances<T>::defaults());

/**
 * Searches the polytope { nu >= 0 : nu in C, nu(r) = alpha } for a
 * certificate measure (its lexicographically smallest vertex) and
 * decomposes it. Throws InfeasibleError when alpha is not achievable.
 */
template <Scalar T>
PerformanceDecomposition<T> decompose_alpha(const Mdp<T>& model, std::span<const T> alpha,
                                            const PolytopeOptions& options = {},
                                            const Tolerances<T>& tol = Tolerances<T>::defaults());

template <Scalar T>
struct MinimalOrder {
    std::size_t p_star = 0;
    std::vector<T> witness;     // argmin vertex of O(r, alpha)
    FaceDims witness_dims;      // dim V = dim ker R + dim im R at the witness
    MixturePolicy<T> mixture;   // order <= p_star + 1, reproduces the witness
    std::size_t vertices_examined = 0;

    std::size_t order() const noexcept { return p_star + 1; }
};

/**
 * p* = min dim V(nu) over the vertices of { nu >= 0 : nu in C, nu(r) = alpha }.
 * dim V is monotone under support inclusion, so the minimum over the whole
 * polytope is attained at a minimal-support point, i.e. at a vertex. Ties
 * go to the lexicographically smallest vertex.
 */
template <Scalar T>
MinimalOrder<T> minimal_order(const Mdp<T>& model, std::span<const T> alpha, const PolytopeOptions& options = {},
                              const Tolerances<T>& tol = Tolerances<T>::defaults());

/**
 * Smallest n <= max_order such that alpha is a convex combination of n
 * deterministic performance vectors, by enumerating every deterministic
 * policy and every n-subset of distinct performance vectors. Only affinely
 * independent subsets are solved (their barycentric weights are unique);
 * a dependent subset's hull is covered by smaller subsets.
 */
template <Scalar T>
std::optional<std::size_t> brute_force_min_order(const Mdp<T>& model, std::span<const T> alpha,
                                                 std::size_t max_order, std::size_t policy_cap = 10'000,
                                                 const Tolerances<T>& tol = Tolerances<T>::defaults());

}  // namespace occlab
