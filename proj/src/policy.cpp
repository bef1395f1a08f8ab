#include "occlab/policy.hpp"

#include <limits>

#include "occlab/errors.hpp"

namespace occlab {

namespace {

template <Scalar T>
void check_simplex(std::span<const T> weights, const T& tol, const std::string& where)
{
    T sum(0);
    for (const auto& w : weights) {
        if (w < T(0) && !near_zero(w, tol))
            throw InvalidArgument(where + ": negative weight");
        sum += w;
    }
    if (!near_zero(T(sum - T(1)), tol))
        throw InvalidArgument(where + ": weights do not sum to 1");
}

}  // namespace

template <Scalar T>
void check_selector(const Mdp<T>& model, const DeterministicPolicy& selector)
{
    if (selector.choice.size() != model.num_states())
        throw StructuralError("selector has wrong number of states");
    for (std::size_t x = 0; x < model.num_states(); ++x)
        if (selector.choice[x] >= model.actions(x).size())
            throw StructuralError("selector picks an inadmissible action at '" + model.state_name(x) + "'");
}

template <Scalar T>
void check_policy(const Mdp<T>& model, const StationaryPolicy<T>& policy, const T& stochastic_tol)
{
    if (policy.prob.size() != model.num_states())
        throw StructuralError("policy has wrong number of states");
    for (std::size_t x = 0; x < model.num_states(); ++x) {
        if (policy.prob[x].size() != model.actions(x).size())
            throw StructuralError("policy row of '" + model.state_name(x) + "' has wrong length");
        check_simplex<T>(policy.prob[x], stochastic_tol, "policy at '" + model.state_name(x) + "'");
    }
}

template <Scalar T>
void check_kernel(const Mdp<T>& model, const ChatteringKernel<T>& kernel, const T& stochastic_tol)
{
    if (kernel.order() == 0)
        throw StructuralError("chattering kernel of order 0");
    for (const auto& s : kernel.selectors)
        check_selector(model, s);
    if (kernel.beta.size() != model.num_states())
        throw StructuralError("kernel weights have wrong number of states");
    for (std::size_t x = 0; x < model.num_states(); ++x) {
        if (kernel.beta[x].size() != kernel.order())
            throw StructuralError("kernel weights of '" + model.state_name(x) + "' have wrong length");
        check_simplex<T>(kernel.beta[x], stochastic_tol, "kernel at '" + model.state_name(x) + "'");
    }
}

template <Scalar T>
void check_mixture(const Mdp<T>& model, const MixturePolicy<T>& mixture, const T& stochastic_tol)
{
    if (mixture.weights.size() != mixture.selectors.size() || mixture.selectors.empty())
        throw StructuralError("mixture weights and selectors differ in length");
    for (const auto& s : mixture.selectors)
        check_selector(model, s);
    check_simplex<T>(mixture.weights, stochastic_tol, "mixture");
}

template <Scalar T>
std::size_t count_deterministic_policies(const Mdp<T>& model)
{
    std::size_t count = 1;
    for (auto x : model.pairs().transient_states()) {
        std::size_t n = model.actions(x).size();
        if (n != 0 && count > std::numeric_limits<std::size_t>::max() / n)
            return std::numeric_limits<std::size_t>::max();
        count *= n;
    }
    return count;
}

template <Scalar T>
std::vector<DeterministicPolicy> enumerate_deterministic_policies(const Mdp<T>& model, std::size_t cap)
{
    std::size_t total = count_deterministic_policies(model);
    if (total > cap)
        throw CapExceededError("model has " + std::to_string(total) +
                               " deterministic policies, above the cap of " + std::to_string(cap));
    std::vector<DeterministicPolicy> out;
    out.reserve(total);
    auto transient = model.pairs().transient_states();
    DeterministicPolicy current = default_selector(model);
    while (true) {
        out.push_back(current);
        // Odometer over transient states, last state fastest.
        std::size_t i = transient.size();
        while (i > 0) {
            std::size_t x = transient[i - 1];
            if (++current.choice[x] < model.actions(x).size())
                break;
            current.choice[x] = 0;
            --i;
        }
        if (i == 0)
            break;
    }
    return out;
}

#define OCCLAB_INSTANTIATE(T)                                                                           \
    template void check_selector(const Mdp<T>&, const DeterministicPolicy&);                            \
    template void check_policy(const Mdp<T>&, const StationaryPolicy<T>&, const T&);                    \
    template void check_kernel(const Mdp<T>&, const ChatteringKernel<T>&, const T&);                    \
    template void check_mixture(const Mdp<T>&, const MixturePolicy<T>&, const T&);                      \
    template std::size_t count_deterministic_policies(const Mdp<T>&);                                   \
    template std::vector<DeterministicPolicy> enumerate_deterministic_policies(const Mdp<T>&, std::size_t);

OCCLAB_INSTANTIATE(Rational)
OCCLAB_INSTANTIATE(double)

#undef OCCLAB_INSTANTIATE

}  // namespace occlab
