/**
 * Stationary policy classes over a finite model.
 *
 * Actions are referenced by their index in A(x). Every policy type stores one
 * entry per state, absorbing states included (their entries never influence
 * an occupancy measure).
 */
#pragma once

#include <cstddef>
#include <vector>

#include "occlab/model.hpp"

namespace occlab {

/// Selector x -> a in A(x).
struct DeterministicPolicy {
    std::vector<std::size_t> choice;

    bool operator==(const DeterministicPolicy&) const = default;
    auto operator<=>(const DeterministicPolicy&) const = default;
};

/// phi(a|x), one distribution over A(x) per state.
template <Scalar T>
struct StationaryPolicy {
    std::vector<std::vector<T>> prob;

    bool operator==(const StationaryPolicy&) const = default;
};

/**
 * Chattering stationary policy of order p: per-state simplex weights
 * beta(x) over p deterministic selectors.
 */
template <Scalar T>
struct ChatteringKernel {
    std::vector<DeterministicPolicy> selectors;
    std::vector<std::vector<T>> beta;  // beta[x][i]

    std::size_t order() const noexcept { return selectors.size(); }
    bool operator==(const ChatteringKernel&) const = default;
};

/**
 * Finite mixture of deterministic stationary policies: one component is
 * drawn with probability weights[j] before the first action and followed
 * forever.
 */
template <Scalar T>
struct MixturePolicy {
    std::vector<T> weights;
    std::vector<DeterministicPolicy> selectors;

    std::size_t order() const noexcept { return selectors.size(); }
    bool operator==(const MixturePolicy&) const = default;
};

/// theta(x) = first listed action of A(x).
template <Scalar T>
DeterministicPolicy default_selector(const Mdp<T>& model)
{
    return DeterministicPolicy{std::vector<std::size_t>(model.num_states(), 0)};
}

template <Scalar T>
StationaryPolicy<T> as_stationary(const Mdp<T>& model, const DeterministicPolicy& selector)
{
    StationaryPolicy<T> out;
    for (std::size_t x = 0; x < model.num_states(); ++x) {
        out.prob.emplace_back(model.actions(x).size(), T(0));
        out.prob.back().at(selector.choice.at(x)) = T(1);
    }
    return out;
}

/// Per-state flattening phi(a|x) = sum_i beta_i(x) [phi_i(x) = a].
template <Scalar T>
StationaryPolicy<T> flatten(const Mdp<T>& model, const ChatteringKernel<T>& kernel)
{
    StationaryPolicy<T> out;
    for (std::size_t x = 0; x < model.num_states(); ++x) {
        out.prob.emplace_back(model.actions(x).size(), T(0));
        for (std::size_t i = 0; i < kernel.order(); ++i)
            out.prob.back().at(kernel.selectors[i].choice.at(x)) += kernel.beta.at(x).at(i);
    }
    return out;
}

/// Throws StructuralError / InvalidArgument on malformed or non-simplex input.
template <Scalar T>
void check_selector(const Mdp<T>& model, const DeterministicPolicy& selector);

template <Scalar T>
void check_policy(const Mdp<T>& model, const StationaryPolicy<T>& policy, const T& stochastic_tol);

template <Scalar T>
void check_kernel(const Mdp<T>& model, const ChatteringKernel<T>& kernel, const T& stochastic_tol);

template <Scalar T>
void check_mixture(const Mdp<T>& model, const MixturePolicy<T>& mixture, const T& stochastic_tol);

/// Number of deterministic selectors that differ on transient states.
template <Scalar T>
std::size_t count_deterministic_policies(const Mdp<T>& model);

/**
 * All selectors that differ on transient states (absorbing states keep the
 * default action), in lexicographic order of choices. Throws
 * CapExceededError when there are more than `cap`.
 */
template <Scalar T>
std::vector<DeterministicPolicy> enumerate_deterministic_policies(const Mdp<T>& model, std::size_t cap);

}  // namespace occlab
