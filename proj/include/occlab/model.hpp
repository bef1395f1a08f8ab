/**
 * Finite absorbing Markov control model.
 *
 * States are indexed 0..n-1 in file order; the admissible actions of each
 * state are indexed 0..|A(x)|-1 in file order. Feasible state-action pairs
 * are numbered by `PairIndex` in (state order, action order). Every numeric
 * field is stored in the model's scalar type: `Rational` for exact-mode
 * models and `double` for float-mode models.
 */
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "occlab/numeric.hpp"

namespace occlab {

/**
 * Bijection between the feasible pairs K and 0..|K|-1, plus the subset of
 * pairs whose state is transient (outside the absorbing set). Measures are
 * stored over the transient pairs only, indexed by their position in
 * `transient_pairs()`.
 */
class PairIndex {
public:
    PairIndex() = default;
    PairIndex(std::span<const std::size_t> action_counts, const std::vector<bool>& absorbing);

    std::size_t size() const noexcept { return pair_state_.size(); }
    std::size_t id(std::size_t state, std::size_t action) const { return first_[state] + action; }
    std::size_t state_of(std::size_t pair) const { return pair_state_[pair]; }
    std::size_t action_of(std::size_t pair) const { return pair - first_[pair_state_[pair]]; }
    std::size_t first(std::size_t state) const { return first_[state]; }
    std::size_t count(std::size_t state) const { return first_[state + 1] - first_[state]; }

    std::span<const std::size_t> transient_pairs() const noexcept { return transient_pairs_; }
    std::span<const std::size_t> transient_states() const noexcept { return transient_states_; }
    std::optional<std::size_t> transient_pair_position(std::size_t pair) const;
    std::optional<std::size_t> transient_state_position(std::size_t state) const;

    bool operator==(const PairIndex&) const = default;

private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::vector<std::size_t> first_{0};
    std::vector<std::size_t> pair_state_;
    std::vector<std::size_t> transient_pairs_;
    std::vector<std::size_t> transient_states_;
    std::vector<std::size_t> pair_position_;
    std::vector<std::size_t> state_position_;
};

template <Scalar T>
class Mdp {
public:
    using scalar_type = T;

    /// Throws StructuralError on duplicate names or unknown absorbing states.
    Mdp(std::vector<std::string> states, const std::vector<std::string>& absorbing,
        std::vector<std::vector<std::string>> actions, std::size_t reward_dim);

    static constexpr Mode mode() { return mode_of_v<T>; }

    std::size_t num_states() const noexcept { return states_.size(); }
    const std::vector<std::string>& states() const noexcept { return states_; }
    const std::string& state_name(std::size_t x) const { return states_.at(x); }
    std::size_t state_id(std::string_view name) const;
    bool is_absorbing(std::size_t x) const { return absorbing_.at(x); }
    const std::vector<bool>& absorbing() const noexcept { return absorbing_; }

    const std::vector<std::string>& actions(std::size_t x) const { return actions_.at(x); }
    std::size_t action_id(std::size_t x, std::string_view name) const;

    const PairIndex& pairs() const noexcept { return index_; }
    std::size_t pair_id(std::string_view state, std::string_view action) const;
    std::string pair_label(std::size_t pair) const;

    std::size_t reward_dim() const noexcept { return reward_dim_; }

    /// Q(.|x,a) as a dense row over states.
    std::vector<T>& transition_row(std::size_t pair) { return transition_.at(pair); }
    const std::vector<T>& transition_row(std::size_t pair) const { return transition_.at(pair); }
    T& transition(std::size_t pair, std::size_t target) { return transition_.at(pair).at(target); }
    const T& transition(std::size_t pair, std::size_t target) const { return transition_.at(pair).at(target); }

    std::vector<T>& initial() noexcept { return initial_; }
    const std::vector<T>& initial() const noexcept { return initial_; }

    std::vector<T>& reward(std::size_t pair) { return rewards_.at(pair); }
    const std::vector<T>& reward(std::size_t pair) const { return rewards_.at(pair); }

    bool operator==(const Mdp&) const = default;

private:
    std::vector<std::string> states_;
    std::vector<bool> absorbing_;
    std::vector<std::vector<std::string>> actions_;
    std::size_t reward_dim_;
    PairIndex index_;
    std::vector<std::vector<T>> transition_;
    std::vector<T> initial_;
    std::vector<std::vector<T>> rewards_;
};

using ExactMdp = Mdp<Rational>;
using FloatMdp = Mdp<double>;

/// Converts the numeric data of a model to another scalar type.
template <Scalar To, Scalar From>
Mdp<To> convert_model(const Mdp<From>& model);

enum class ViolationKind {
    empty_action_set,
    negative_probability,
    row_sum,
    absorbing_not_closed,
    absorbing_reward,
    initial_negative,
    initial_sum,
};

std::string to_string(ViolationKind kind);

struct Violation {
    std::string location;  // state name or "state/action"
    ViolationKind kind;
    double magnitude;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const noexcept { return violations.empty(); }
};

/**
 * Checks the standing assumptions: stochastic rows, stochastic initial law,
 * and for every absorbing state x and a in A(x): Q(absorbing|x,a) = 1 and
 * r(x,a) = 0. Throws StructuralError when row or reward lengths are wrong.
 */
template <Scalar T>
ValidationReport validate(const Mdp<T>& model, const T& stochastic_tol);

template <Scalar T>
ValidationReport validate(const Mdp<T>& model)
{
    return validate(model, Tolerances<T>::defaults().stochastic);
}

/// Throws InvalidArgument listing the violations when the report is not ok.
template <Scalar T>
void require_valid(const Mdp<T>& model, const T& stochastic_tol);

}  // namespace occlab
