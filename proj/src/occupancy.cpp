#include "occlab/occupancy.hpp"

#include <algorithm>

#include "occlab/errors.hpp"
#include "occlab/matrix.hpp"

namespace occlab {

template <Scalar T>
T OccupancyMeasure<T>::total() const
{
    T sum(0);
    for (const auto& m : mass)
        sum += m;
    return sum;
}

template <Scalar T>
std::vector<T> state_marginal(const Mdp<T>& model, std::span<const T> mass)
{
    const auto& pairs = model.pairs();
    std::vector<T> out(pairs.transient_states().size(), T(0));
    auto tp = pairs.transient_pairs();
    for (std::size_t i = 0; i < tp.size(); ++i)
        out[*pairs.transient_state_position(pairs.state_of(tp[i]))] += mass[i];
    return out;
}

template <Scalar T>
std::vector<T> characteristic_defect(const Mdp<T>& model, std::span<const T> mass, bool include_initial)
{
    const auto& pairs = model.pairs();
    auto ts = pairs.transient_states();
    auto tp = pairs.transient_pairs();
    if (mass.size() != tp.size())
        throw StructuralError("measure has wrong length");
    std::vector<T> defect = state_marginal(model, mass);
    for (std::size_t j = 0; j < ts.size(); ++j) {
        if (include_initial)
            defect[j] -= model.initial()[ts[j]];
    }
    for (std::size_t i = 0; i < tp.size(); ++i) {
        if (mass[i] == T(0))
            continue;
        const auto& row = model.transition_row(tp[i]);
        for (std::size_t j = 0; j < ts.size(); ++j)
            if (row[ts[j]] != T(0))
                defect[j] -= mass[i] * row[ts[j]];
    }
    return defect;
}

template <Scalar T>
T characteristic_residual(const Mdp<T>& model, std::span<const T> mass)
{
    auto defect = characteristic_defect(model, mass, true);
    return max_abs<T>(defect);
}

template <Scalar T>
T invariance_residual(const Mdp<T>& model, std::span<const T> mass)
{
    auto defect = characteristic_defect(model, mass, false);
    return max_abs<T>(defect);
}

template <Scalar T>
OccupancyMeasure<T> make_measure(const Mdp<T>& model, std::vector<T> mass)
{
    OccupancyMeasure<T> out;
    out.marginal = state_marginal<T>(model, mass);
    out.residual = characteristic_residual<T>(model, mass);
    out.mass = std::move(mass);
    return out;
}

template <Scalar T>
OccupancyMeasure<T> occupancy_of_stationary(const Mdp<T>& model, const StationaryPolicy<T>& policy)
{
    check_policy(model, policy, Tolerances<T>::defaults().stochastic);
    const auto& pairs = model.pairs();
    auto ts = pairs.transient_states();
    auto tp = pairs.transient_pairs();
    const std::size_t n = ts.size();

    // (I - P_phi)^T rho = eta on the transient states.
    Matrix<T> system(n, n);
    std::vector<T> rhs(n);
    for (std::size_t j = 0; j < n; ++j) {
        system(j, j) = T(1);
        rhs[j] = model.initial()[ts[j]];
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t x = ts[i];
        for (std::size_t a = 0; a < model.actions(x).size(); ++a) {
            const T& p = policy.prob[x][a];
            if (p == T(0))
                continue;
            const auto& row = model.transition_row(pairs.id(x, a));
            for (std::size_t j = 0; j < n; ++j)
                if (row[ts[j]] != T(0))
                    system(j, i) -= p * row[ts[j]];
        }
    }
    auto rho = solve_square<T>(system, rhs);
    if (!rho)
        throw NotAbsorbingError("characteristic system is singular: the policy keeps mass in the transient "
                                "states forever (see the absorption check for an end-component witness)",
                                {});
    std::vector<T> mass(tp.size(), T(0));
    for (std::size_t i = 0; i < tp.size(); ++i) {
        std::size_t x = pairs.state_of(tp[i]);
        mass[i] = (*rho)[*pairs.transient_state_position(x)] * policy.prob[x][pairs.action_of(tp[i])];
    }
    return make_measure(model, std::move(mass));
}

template <Scalar T>
OccupancyMeasure<T> occupancy_of_deterministic(const Mdp<T>& model, const DeterministicPolicy& selector)
{
    check_selector(model, selector);
    return occupancy_of_stationary(model, as_stationary(model, selector));
}

template <Scalar T>
OccupancyMeasure<T> occupancy_of_mixture(const Mdp<T>& model, const MixturePolicy<T>& mixture)
{
    check_mixture(model, mixture, Tolerances<T>::defaults().stochastic);
    std::vector<T> mass(model.pairs().transient_pairs().size(), T(0));
    for (std::size_t j = 0; j < mixture.order(); ++j) {
        if (mixture.weights[j] == T(0))
            continue;
        auto component = occupancy_of_deterministic(model, mixture.selectors[j]);
        for (std::size_t i = 0; i < mass.size(); ++i)
            mass[i] += mixture.weights[j] * component.mass[i];
    }
    return make_measure(model, std::move(mass));
}

template <Scalar T>
OccupancyMeasure<T> occupancy_of_chattering(const Mdp<T>& model, const ChatteringKernel<T>& kernel)
{
    check_kernel(model, kernel, Tolerances<T>::defaults().stochastic);
    return occupancy_of_stationary(model, flatten(model, kernel));
}

template <Scalar T>
void require_occupancy(const Mdp<T>& model, std::span<const T> mass, const Tolerances<T>& tol)
{
    if (mass.size() != model.pairs().transient_pairs().size())
        throw StructuralError("measure has wrong length");
    for (std::size_t i = 0; i < mass.size(); ++i)
        if (mass[i] < T(0) && !near_zero(mass[i], tol.support))
            throw InvalidArgument("measure has a negative entry at " +
                                  model.pair_label(model.pairs().transient_pairs()[i]));
    T residual = characteristic_residual(model, mass);
    if (!near_zero(residual, tol.character))
        throw InvalidArgument("measure violates the characteristic equations (residual " +
                              std::to_string(to_double(residual)) + ")");
}

template <Scalar T>
StationaryPolicy<T> policy_from_measure(const Mdp<T>& model, std::span<const T> mass, const Tolerances<T>& tol)
{
    require_occupancy(model, mass, tol);
    const auto& pairs = model.pairs();
    auto marginal = state_marginal(model, mass);
    StationaryPolicy<T> out = as_stationary(model, default_selector(model));
    for (std::size_t j = 0; j < pairs.transient_states().size(); ++j) {
        if (!positive(marginal[j], tol.support))
            continue;
        std::size_t x = pairs.transient_states()[j];
        for (std::size_t a = 0; a < model.actions(x).size(); ++a) {
            T m = mass[*pairs.transient_pair_position(pairs.id(x, a))];
            out.prob[x][a] = m > T(0) ? T(m / marginal[j]) : T(0);
        }
    }
    return out;
}

template <Scalar T>
std::vector<T> performance(const Mdp<T>& model, std::span<const T> mass)
{
    auto tp = model.pairs().transient_pairs();
    if (mass.size() != tp.size())
        throw StructuralError("measure has wrong length");
    std::vector<T> out(model.reward_dim(), T(0));
    for (std::size_t i = 0; i < tp.size(); ++i) {
        if (mass[i] == T(0))
            continue;
        const auto& r = model.reward(tp[i]);
        for (std::size_t c = 0; c < out.size(); ++c)
            out[c] += mass[i] * r[c];
    }
    return out;
}

template <Scalar T>
std::vector<std::size_t> support_of(std::span<const T> mass, const T& threshold)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < mass.size(); ++i)
        if (positive(mass[i], threshold))
            out.push_back(i);
    return out;
}

#define OCCLAB_INSTANTIATE(T)                                                                            \
    template struct OccupancyMeasure<T>;                                                                 \
    template std::vector<T> state_marginal(const Mdp<T>&, std::span<const T>);                           \
    template std::vector<T> characteristic_defect(const Mdp<T>&, std::span<const T>, bool);              \
    template T characteristic_residual(const Mdp<T>&, std::span<const T>);                               \
    template T invariance_residual(const Mdp<T>&, std::span<const T>);                                   \
    template OccupancyMeasure<T> make_measure(const Mdp<T>&, std::vector<T>);                            \
    template OccupancyMeasure<T> occupancy_of_stationary(const Mdp<T>&, const StationaryPolicy<T>&);     \
    template OccupancyMeasure<T> occupancy_of_deterministic(const Mdp<T>&, const DeterministicPolicy&);  \
    template OccupancyMeasure<T> occupancy_of_mixture(const Mdp<T>&, const MixturePolicy<T>&);           \
    template OccupancyMeasure<T> occupancy_of_chattering(const Mdp<T>&, const ChatteringKernel<T>&);     \
    template StationaryPolicy<T> policy_from_measure(const Mdp<T>&, std::span<const T>,                  \
                                                     const Tolerances<T>&);                              \
    template std::vector<T> performance(const Mdp<T>&, std::span<const T>);                              \
    template std::vector<std::size_t> support_of(std::span<const T>, const T&);                          \
    template void require_occupancy(const Mdp<T>&, std::span<const T>, const Tolerances<T>&);

OCCLAB_INSTANTIATE(Rational)
OCCLAB_INSTANTIATE(double)

#undef OCCLAB_INSTANTIATE

}  // namespace occlab
