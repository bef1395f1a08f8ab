#include "occlab/mixtures.hpp"

#include <algorithm>
#include <limits>

#include "occlab/absorption.hpp"
#include "occlab/errors.hpp"
#include "occlab/matrix.hpp"
#include "occlab/occupancy.hpp"

namespace occlab {

template <Scalar T>
ChatteringKernel<T> lissage(const ChatteringKernel<T>& kernel, const T& zero_tol)
{
    const std::size_t p = kernel.order();
    if (p == 0)
        throw StructuralError("chattering kernel of order 0");
    const std::size_t n = kernel.beta.size();
    for (const auto& s : kernel.selectors)
        if (s.choice.size() != n)
            throw StructuralError("kernel selectors and weights disagree on the number of states");

    ChatteringKernel<T> out = kernel;
    for (std::size_t x = 0; x < n; ++x) {
        const auto& beta = kernel.beta[x];
        if (beta.size() != p)
            throw StructuralError("kernel weights have wrong length");
        std::vector<std::size_t> zero;
        std::optional<std::size_t> first_positive;
        T sum(0);
        for (std::size_t i = 0; i < p; ++i) {
            if (beta[i] < T(0) && !near_zero(beta[i], zero_tol))
                throw InvalidArgument("negative kernel weight");
            sum += beta[i];
            if (near_zero(beta[i], zero_tol))
                zero.push_back(i);
            else if (!first_positive)
                first_positive = i;
        }
        if (!first_positive)
            throw InvalidArgument("kernel weights at a state are all zero");
        if (zero.empty())
            continue;
        const std::size_t tau = *first_positive;
        T share = beta[tau] / T(static_cast<long>(zero.size() + 1));
        out.beta[x][tau] = share;
        for (auto i : zero) {
            out.beta[x][i] = share;
            out.selectors[i].choice[x] = kernel.selectors[tau].choice[x];
        }
    }
    return out;
}

template <Scalar T>
MixturePolicy<T> decompose_measure(const Mdp<T>& model, std::span<const T> mu, const Tolerances<T>& tol)
{
    require_occupancy(model, mu, tol);
    const auto& pairs = model.pairs();
    auto ts = pairs.transient_states();
    auto tp = pairs.transient_pairs();

    std::vector<T> remaining(mu.begin(), mu.end());
    for (auto& v : remaining)
        if (v < T(0) || near_zero(v, tol.support))
            v = T(0);
    T remaining_weight(1);
    MixturePolicy<T> out;
    const std::size_t max_rounds = support_of<T>(remaining, tol.support).size() + 1;

    for (std::size_t round = 0; round < max_rounds; ++round) {
        auto marginal = state_marginal<T>(model, remaining);
        DeterministicPolicy gamma = default_selector(model);
        for (std::size_t j = 0; j < ts.size(); ++j) {
            if (!positive(marginal[j], tol.support))
                continue;
            std::size_t x = ts[j];
            T best(0);
            for (std::size_t a = 0; a < model.actions(x).size(); ++a) {
                const T& m = remaining[*pairs.transient_pair_position(pairs.id(x, a))];
                if (m > best) {
                    best = m;
                    gamma.choice[x] = a;
                }
            }
        }
        auto component = occupancy_of_deterministic(model, gamma).mass;

        std::optional<T> lambda;
        std::size_t argmin = 0;
        for (std::size_t i = 0; i < tp.size(); ++i) {
            if (!positive(component[i], tol.support))
                continue;
            if (!positive(remaining[i], tol.support))
                throw NumericError("decompose_measure: extracted policy leaves the support at " +
                                   model.pair_label(tp[i]));
            T ratio = remaining[i] / component[i];
            if (!lambda || ratio < *lambda) {
                lambda = ratio;
                argmin = i;
            }
        }
        bool last = !lambda || *lambda >= T(1);
        if constexpr (!is_exact_v<T>) {
            if (!last) {
                double gap = 0.0, scale = 1.0;
                for (std::size_t i = 0; i < tp.size(); ++i) {
                    gap = std::max(gap, std::fabs(remaining[i] - component[i]));
                    scale = std::max(scale, std::fabs(component[i]));
                }
                last = gap <= tol.character * scale;
            }
        }
        if (last) {
            out.weights.push_back(remaining_weight);
            out.selectors.push_back(std::move(gamma));
            return out;
        }
        out.weights.push_back(*lambda * remaining_weight);
        out.selectors.push_back(std::move(gamma));
        T keep = T(1) - *lambda;
        for (std::size_t i = 0; i < tp.size(); ++i) {
            remaining[i] = (remaining[i] - *lambda * component[i]) / keep;
            if (remaining[i] < T(0) || near_zero(remaining[i], tol.support))
                remaining[i] = T(0);
        }
        remaining[argmin] = T(0);
        remaining_weight *= keep;
    }
    throw NumericError("decompose_measure: support did not shrink (numerical breakdown)");
}

template <Scalar T>
std::vector<T> eliminate_affine_dependence(const std::vector<std::vector<T>>& points, std::vector<T> weights,
                                           const Tolerances<T>& tol)
{
    if (points.size() != weights.size())
        throw InvalidArgument("points and weights differ in length");
    if (points.empty())
        return weights;
    const std::size_t dim = points.front().size();
    for (auto& w : weights)
        if (w < T(0) || near_zero(w, tol.support))
            w = T(0);

    while (true) {
        std::vector<std::size_t> active;
        for (std::size_t j = 0; j < weights.size(); ++j)
            if (weights[j] > T(0))
                active.push_back(j);
        if (active.size() <= 1)
            return weights;
        Matrix<T> lifted(dim + 1, active.size());
        for (std::size_t c = 0; c < active.size(); ++c) {
            for (std::size_t i = 0; i < dim; ++i)
                lifted(i, c) = points[active[c]][i];
            lifted(dim, c) = T(1);
        }
        auto deps = null_space(lifted, tol.rank_cutoff);
        if (deps.empty())
            return weights;
        auto& c = deps.front();
        T largest(0);
        for (const auto& v : c)
            largest = std::max(largest, T(abs_value(v)));
        T coefficient_floor(0);
        if constexpr (!is_exact_v<T>)
            coefficient_floor = 1e-12 * largest;
        if (std::none_of(c.begin(), c.end(), [&](const T& v) { return v > coefficient_floor; }))
            for (auto& v : c)
                v = -v;
        // Shift along the dependence until the first weight hits zero.
        std::optional<T> theta;
        std::size_t hit = 0;
        for (std::size_t k = 0; k < active.size(); ++k) {
            if (!positive(c[k], coefficient_floor))
                continue;
            T ratio = weights[active[k]] / c[k];
            if (!theta || ratio < *theta) {
                theta = ratio;
                hit = k;
            }
        }
        if (!theta)
            throw NumericError("affine dependence without a positive coefficient");
        for (std::size_t k = 0; k < active.size(); ++k) {
            T& w = weights[active[k]];
            w -= *theta * c[k];
            if (w < T(0) || near_zero(w, tol.support))
                w = T(0);
        }
        weights[active[hit]] = T(0);
    }
}

template <Scalar T>
std::vector<T> caratheodory_reduce(const std::vector<std::vector<T>>& points, std::span<const T> weights,
                                   std::span<const T> target, const Tolerances<T>& tol)
{
    if (points.size() != weights.size())
        throw InvalidArgument("points and weights differ in length");
    const std::size_t dim = target.size();
    std::vector<T> barycentre(dim, T(0));
    T total(0);
    for (std::size_t j = 0; j < points.size(); ++j) {
        if (points[j].size() != dim)
            throw InvalidArgument("point dimension differs from the target dimension");
        if (weights[j] < T(0) && !near_zero(weights[j], tol.stochastic))
            throw InvalidArgument("negative weight");
        total += weights[j];
        for (std::size_t i = 0; i < dim; ++i)
            barycentre[i] += weights[j] * points[j][i];
    }
    if (!near_zero(T(total - T(1)), tol.stochastic))
        throw InvalidArgument("weights do not sum to 1");
    for (std::size_t i = 0; i < dim; ++i)
        if (!near_zero(T(barycentre[i] - target[i]), tol.character))
            throw InvalidArgument("weighted points do not average to the target");
    std::vector<T> out(weights.begin(), weights.end());
    if (points.size() <= dim + 1)
        return out;
    return eliminate_affine_dependence(points, std::move(out), tol);
}

namespace {

template <Scalar T>
MixturePolicy<T> compact(const MixturePolicy<T>& mixture, const std::vector<T>& weights)
{
    MixturePolicy<T> out;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        if (weights[j] > T(0)) {
            out.weights.push_back(weights[j]);
            out.selectors.push_back(mixture.selectors[j]);
        }
    }
    return out;
}

}  // namespace

template <Scalar T>
MixturePolicy<T> reduce_in_measure_space(const Mdp<T>& model, const MixturePolicy<T>& mixture,
                                         const Tolerances<T>& tol)
{
    std::vector<std::vector<T>> points;
    for (const auto& s : mixture.selectors)
        points.push_back(occupancy_of_deterministic(model, s).mass);
    return compact(mixture, eliminate_affine_dependence(points, mixture.weights, tol));
}

template <Scalar T>
PerformanceDecomposition<T> decompose_performance(const Mdp<T>& model, std::span<const T> mu,
                                                  const Tolerances<T>& tol)
{
    require_absorbing(model);
    PerformanceDecomposition<T> out;
    out.source_measure.assign(mu.begin(), mu.end());
    out.alpha = performance(model, mu);
    auto full = decompose_measure(model, mu, tol);
    std::vector<std::vector<T>> perf;
    for (const auto& s : full.selectors)
        perf.push_back(performance<T>(model, occupancy_of_deterministic(model, s).mass));
    // The decomposition reproduces mu only up to tol.character in float mode.
    Tolerances<T> loose = tol;
    if constexpr (!is_exact_v<T>) {
        double scale = 1.0;
        for (auto pair : model.pairs().transient_pairs())
            scale = std::max(scale, max_abs<double>(model.reward(pair)));
        loose.character = tol.character * scale * static_cast<double>(std::max<std::size_t>(mu.size(), 1));
    }
    auto weights = caratheodory_reduce<T>(perf, full.weights, out.alpha, loose);
    out.mixture = compact(full, weights);
    for (std::size_t j = 0; j < weights.size(); ++j)
        if (weights[j] > T(0))
            out.component_performance.push_back(perf[j]);
    out.achieved.assign(model.reward_dim(), T(0));
    for (std::size_t j = 0; j < out.mixture.order(); ++j)
        for (std::size_t i = 0; i < model.reward_dim(); ++i)
            out.achieved[i] += out.mixture.weights[j] * out.component_performance[j][i];
    out.error = T(0);
    for (std::size_t i = 0; i < model.reward_dim(); ++i)
        out.error = std::max(out.error, T(abs_value(T(out.achieved[i] - out.alpha[i]))));
    return out;
}

template <Scalar T>
PerformanceDecomposition<T> decompose_performance(const Mdp<T>& model, const StationaryPolicy<T>& policy,
                                                  const Tolerances<T>& tol)
{
    require_absorbing(model);
    auto mu = occupancy_of_stationary(model, policy);
    return decompose_performance<T>(model, mu.mass, tol);
}

template <Scalar T>
PerformanceDecomposition<T> decompose_alpha(const Mdp<T>& model, std::span<const T> alpha,
                                            const PolytopeOptions& options, const Tolerances<T>& tol)
{
    require_absorbing(model);
    auto vertices = occupancy_polytope_vertices<T>(model, std::nullopt, std::vector<T>(alpha.begin(), alpha.end()),
                                                   options, tol);
    if (vertices.empty())
        throw InfeasibleError("performance vector is not achievable by any policy");
    auto out = decompose_performance<T>(model, vertices.front(), tol);
    out.alpha.assign(alpha.begin(), alpha.end());
    out.error = T(0);
    for (std::size_t i = 0; i < alpha.size(); ++i)
        out.error = std::max(out.error, T(abs_value(T(out.achieved[i] - alpha[i]))));
    return out;
}

template <Scalar T>
MinimalOrder<T> minimal_order(const Mdp<T>& model, std::span<const T> alpha, const PolytopeOptions& options,
                              const Tolerances<T>& tol)
{
    require_absorbing(model);
    auto vertices = occupancy_polytope_vertices<T>(model, std::nullopt, std::vector<T>(alpha.begin(), alpha.end()),
                                                   options, tol);
    if (vertices.empty())
        throw InfeasibleError("performance vector is not achievable by any policy");
    MinimalOrder<T> out;
    out.vertices_examined = vertices.size();
    std::optional<std::size_t> best;
    for (std::size_t v = 0; v < vertices.size(); ++v) {
        auto dim = parallel_subspace_basis<T>(model, vertices[v], tol).dimension;
        if (!best || dim < out.p_star) {
            best = v;
            out.p_star = dim;
        }
    }
    out.witness = vertices[*best];
    out.witness_dims = constrained_face_dims<T>(model, out.witness, tol);
    out.mixture = reduce_in_measure_space(model, decompose_measure<T>(model, out.witness, tol), tol);
    if (out.mixture.order() > out.p_star + 1)
        throw NumericError("measure-space reduction left " + std::to_string(out.mixture.order()) +
                           " components for a face of dimension " + std::to_string(out.p_star));
    return out;
}

template <Scalar T>
std::optional<std::size_t> brute_force_min_order(const Mdp<T>& model, std::span<const T> alpha,
                                                 std::size_t max_order, std::size_t policy_cap,
                                                 const Tolerances<T>& tol)
{
    require_absorbing(model);
    const std::size_t d = model.reward_dim();
    if (alpha.size() != d)
        throw InvalidArgument("alpha has wrong dimension");
    std::vector<std::vector<T>> points;
    for (const auto& s : enumerate_deterministic_policies(model, policy_cap)) {
        auto perf = performance<T>(model, occupancy_of_deterministic(model, s).mass);
        bool duplicate = std::any_of(points.begin(), points.end(), [&](const std::vector<T>& q) {
            for (std::size_t i = 0; i < d; ++i)
                if (!near_zero(T(q[i] - perf[i]), tol.character))
                    return false;
            return true;
        });
        if (!duplicate)
            points.push_back(std::move(perf));
    }

    constexpr std::size_t subset_cap = 50'000'000;
    std::size_t examined = 0;
    for (std::size_t n = 1; n <= std::min(max_order, points.size()); ++n) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i)
            idx[i] = i;
        while (true) {
            if (++examined > subset_cap)
                throw CapExceededError("brute-force subset search exceeded its cap");
            Matrix<T> lifted(d + 1, n);
            std::vector<T> rhs(d + 1);
            for (std::size_t c = 0; c < n; ++c) {
                for (std::size_t i = 0; i < d; ++i)
                    lifted(i, c) = points[idx[c]][i];
                lifted(d, c) = T(1);
            }
            for (std::size_t i = 0; i < d; ++i)
                rhs[i] = alpha[i];
            rhs[d] = T(1);
            if (rank(lifted, tol.rank_cutoff) == n) {
                auto w = particular_solution<T>(lifted, rhs, tol.character);
                if (w && std::all_of(w->begin(), w->end(),
                                     [&](const T& v) { return v >= T(0) || near_zero(v, tol.character); }))
                    return n;
            }
            // Next n-subset in lexicographic order.
            std::size_t i = n;
            while (i > 0 && idx[i - 1] == points.size() - n + (i - 1))
                --i;
            if (i == 0)
                break;
            ++idx[i - 1];
            for (std::size_t j = i; j < n; ++j)
                idx[j] = idx[j - 1] + 1;
        }
    }
    return std::nullopt;
}

#define OCCLAB_INSTANTIATE(T)                                                                                   \
    template ChatteringKernel<T> lissage(const ChatteringKernel<T>&, const T&);                                 \
    template MixturePolicy<T> decompose_measure(const Mdp<T>&, std::span<const T>, const Tolerances<T>&);      \
    template std::vector<T> eliminate_affine_dependence(const std::vector<std::vector<T>>&, std::vector<T>,    \
                                                        const Tolerances<T>&);                                  \
    template std::vector<T> caratheodory_reduce(const std::vector<std::vector<T>>&, std::span<const T>,        \
                                                std::span<const T>, const Tolerances<T>&);                      \
    template MixturePolicy<T> reduce_in_measure_space(const Mdp<T>&, const MixturePolicy<T>&,                  \
                                                      const Tolerances<T>&);                                    \
    template PerformanceDecomposition<T> decompose_performance(const Mdp<T>&, std::span<const T>,              \
                                                               const Tolerances<T>&);                           \
    template PerformanceDecomposition<T> decompose_performance(const Mdp<T>&, const StationaryPolicy<T>&,      \
                                                               const Tolerances<T>&);                           \
    template PerformanceDecomposition<T> decompose_alpha(const Mdp<T>&, std::span<const T>,                    \
                                                         const PolytopeOptions&, const Tolerances<T>&);         \
    template MinimalOrder<T> minimal_order(const Mdp<T>&, std::span<const T>, const PolytopeOptions&,          \
                                           const Tolerances<T>&);                                               \
    template std::optional<std::size_t> brute_force_min_order(const Mdp<T>&, std::span<const T>, std::size_t,  \
                                                              std::size_t, const Tolerances<T>&);

OCCLAB_INSTANTIATE(Rational)
OCCLAB_INSTANTIATE(double)

#undef OCCLAB_INSTANTIATE

}  // namespace occlab
