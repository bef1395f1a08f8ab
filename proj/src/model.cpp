#include "occlab/model.hpp"

#include <algorithm>
#include <set>

#include "occlab/errors.hpp"
#include "occlab/matrix.hpp"

namespace occlab {

PairIndex::PairIndex(std::span<const std::size_t> action_counts, const std::vector<bool>& absorbing)
{
    first_.assign(1, 0);
    state_position_.assign(action_counts.size(), npos);
    for (std::size_t x = 0; x < action_counts.size(); ++x) {
        first_.push_back(first_.back() + action_counts[x]);
        if (!absorbing[x]) {
            state_position_[x] = transient_states_.size();
            transient_states_.push_back(x);
        }
        for (std::size_t a = 0; a < action_counts[x]; ++a)
            pair_state_.push_back(x);
    }
    pair_position_.assign(pair_state_.size(), npos);
    for (std::size_t k = 0; k < pair_state_.size(); ++k) {
        if (!absorbing[pair_state_[k]]) {
            pair_position_[k] = transient_pairs_.size();
            transient_pairs_.push_back(k);
        }
    }
}

std::optional<std::size_t> PairIndex::transient_pair_position(std::size_t pair) const
{
    std::size_t p = pair_position_.at(pair);
    if (p == npos)
        return std::nullopt;
    return p;
}

std::optional<std::size_t> PairIndex::transient_state_position(std::size_t state) const
{
    std::size_t p = state_position_.at(state);
    if (p == npos)
        return std::nullopt;
    return p;
}

template <Scalar T>
Mdp<T>::Mdp(std::vector<std::string> states, const std::vector<std::string>& absorbing,
            std::vector<std::vector<std::string>> actions, std::size_t reward_dim)
    : states_(std::move(states)), actions_(std::move(actions)), reward_dim_(reward_dim)
{
    if (actions_.size() != states_.size())
        throw StructuralError("action lists do not match the state list");
    if (reward_dim_ == 0)
        throw StructuralError("reward_dim must be positive");
    std::set<std::string> seen;
    for (const auto& s : states_)
        if (!seen.insert(s).second)
            throw StructuralError("duplicate state '" + s + "'");
    absorbing_.assign(states_.size(), false);
    for (const auto& name : absorbing)
        absorbing_[state_id(name)] = true;
    std::vector<std::size_t> counts;
    for (std::size_t x = 0; x < states_.size(); ++x) {
        std::set<std::string> names;
        for (const auto& a : actions_[x])
            if (!names.insert(a).second)
                throw StructuralError("duplicate action '" + a + "' at state '" + states_[x] + "'");
        counts.push_back(actions_[x].size());
    }
    index_ = PairIndex(counts, absorbing_);
    transition_.assign(index_.size(), std::vector<T>(states_.size(), T(0)));
    initial_.assign(states_.size(), T(0));
    rewards_.assign(index_.size(), std::vector<T>(reward_dim_, T(0)));
}

template <Scalar T>
std::size_t Mdp<T>::state_id(std::string_view name) const
{
    auto it = std::find(states_.begin(), states_.end(), name);
    if (it == states_.end())
        throw StructuralError("unknown state '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - states_.begin());
}

template <Scalar T>
std::size_t Mdp<T>::action_id(std::size_t x, std::string_view name) const
{
    const auto& list = actions_.at(x);
    auto it = std::find(list.begin(), list.end(), name);
    if (it == list.end())
        throw StructuralError("unknown action '" + std::string(name) + "' at state '" + states_[x] + "'");
    return static_cast<std::size_t>(it - list.begin());
}

template <Scalar T>
std::size_t Mdp<T>::pair_id(std::string_view state, std::string_view action) const
{
    std::size_t x = state_id(state);
    return index_.id(x, action_id(x, action));
}

template <Scalar T>
std::string Mdp<T>::pair_label(std::size_t pair) const
{
    std::size_t x = index_.state_of(pair);
    return states_[x] + "/" + actions_[x][index_.action_of(pair)];
}

template <Scalar To, Scalar From>
Mdp<To> convert_model(const Mdp<From>& model)
{
    std::vector<std::string> absorbing;
    std::vector<std::vector<std::string>> actions;
    for (std::size_t x = 0; x < model.num_states(); ++x) {
        if (model.is_absorbing(x))
            absorbing.push_back(model.state_name(x));
        actions.push_back(model.actions(x));
    }
    Mdp<To> out(model.states(), absorbing, actions, model.reward_dim());
    auto cast = [](const From& v) -> To {
        if constexpr (std::same_as<To, From>)
            return v;
        else if constexpr (is_exact_v<To>)
            return rational_from_double(v);
        else
            return to_double(v);
    };
    for (std::size_t k = 0; k < model.pairs().size(); ++k) {
        for (std::size_t y = 0; y < model.num_states(); ++y)
            out.transition(k, y) = cast(model.transition(k, y));
        for (std::size_t i = 0; i < model.reward_dim(); ++i)
            out.reward(k)[i] = cast(model.reward(k)[i]);
    }
    for (std::size_t x = 0; x < model.num_states(); ++x)
        out.initial()[x] = cast(model.initial()[x]);
    return out;
}

std::string to_string(ViolationKind kind)
{
    switch (kind) {
    case ViolationKind::empty_action_set:
        return "empty action set";
    case ViolationKind::negative_probability:
        return "negative transition probability";
    case ViolationKind::row_sum:
        return "row sum != 1";
    case ViolationKind::absorbing_not_closed:
        return "absorbing set not closed";
    case ViolationKind::absorbing_reward:
        return "nonzero reward on absorbing set";
    case ViolationKind::initial_negative:
        return "negative initial probability";
    case ViolationKind::initial_sum:
        return "initial distribution sum != 1";
    }
    return "unknown";
}

template <Scalar T>
ValidationReport validate(const Mdp<T>& model, const T& stochastic_tol)
{
    ValidationReport report;
    const auto& pairs = model.pairs();
    const std::size_t n = model.num_states();
    auto add = [&](std::string where, ViolationKind kind, const T& magnitude) {
        report.violations.push_back({std::move(where), kind, to_double(magnitude)});
    };
    if (model.initial().size() != n)
        throw StructuralError("initial distribution has wrong length");
    for (std::size_t x = 0; x < n; ++x)
        if (model.actions(x).empty())
            add(model.state_name(x), ViolationKind::empty_action_set, T(0));
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto& row = model.transition_row(k);
        if (row.size() != n)
            throw StructuralError("transition row of " + model.pair_label(k) + " has wrong length");
        if (model.reward(k).size() != model.reward_dim())
            throw StructuralError("reward vector of " + model.pair_label(k) + " has wrong length");
        T sum(0);
        T to_absorbing(0);
        for (std::size_t y = 0; y < n; ++y) {
            if (row[y] < T(0) && !near_zero(row[y], stochastic_tol))
                add(model.pair_label(k), ViolationKind::negative_probability, T(-row[y]));
            sum += row[y];
            if (model.is_absorbing(y))
                to_absorbing += row[y];
        }
        if (!near_zero(T(sum - T(1)), stochastic_tol))
            add(model.pair_label(k), ViolationKind::row_sum, T(abs_value(T(sum - T(1)))));
        if (model.is_absorbing(pairs.state_of(k))) {
            if (!near_zero(T(to_absorbing - T(1)), stochastic_tol))
                add(model.pair_label(k), ViolationKind::absorbing_not_closed,
                    T(abs_value(T(to_absorbing - T(1)))));
            T reward_norm = max_abs<T>(std::span<const T>(model.reward(k)));
            if (reward_norm != T(0))
                add(model.pair_label(k), ViolationKind::absorbing_reward, reward_norm);
        }
    }
    T initial_sum(0);
    for (std::size_t x = 0; x < n; ++x) {
        const T& p = model.initial()[x];
        if (p < T(0) && !near_zero(p, stochastic_tol))
            add(model.state_name(x), ViolationKind::initial_negative, T(-p));
        initial_sum += p;
    }
    if (!near_zero(T(initial_sum - T(1)), stochastic_tol))
        add("initial", ViolationKind::initial_sum, T(abs_value(T(initial_sum - T(1)))));
    return report;
}

template <Scalar T>
void require_valid(const Mdp<T>& model, const T& stochastic_tol)
{
    auto report = validate(model, stochastic_tol);
    if (report.ok())
        return;
    std::string message = "model violates standing assumptions:";
    for (const auto& v : report.violations)
        message += " [" + v.location + ": " + to_string(v.kind) + "]";
    throw InvalidArgument(message);
}

template class Mdp<Rational>;
template class Mdp<double>;
template Mdp<Rational> convert_model<Rational, Rational>(const Mdp<Rational>&);
template Mdp<Rational> convert_model<Rational, double>(const Mdp<double>&);
template Mdp<double> convert_model<double, Rational>(const Mdp<Rational>&);
template Mdp<double> convert_model<double, double>(const Mdp<double>&);
template ValidationReport validate(const Mdp<Rational>&, const Rational&);
template ValidationReport validate(const Mdp<double>&, const double&);
template void require_valid(const Mdp<Rational>&, const Rational&);
template void require_valid(const Mdp<double>&, const double&);

}  // namespace occlab
