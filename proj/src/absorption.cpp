#include "occlab/absorption.hpp"

#include <algorithm>
#include <functional>

#include "occlab/matrix.hpp"

namespace occlab {

namespace {

/// Tarjan's algorithm over the live states; returns a component id per state (npos if dead).
std::vector<std::size_t> strongly_connected(const std::vector<std::vector<std::size_t>>& succ,
                                            const std::vector<bool>& live)
{
    constexpr std::size_t npos = static_cast<std::size_t>(-1);
    const std::size_t n = succ.size();
    std::vector<std::size_t> index(n, npos), low(n, 0), comp(n, npos);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::size_t counter = 0, components = 0;

    std::function<void(std::size_t)> visit = [&](std::size_t v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (auto w : succ[v]) {
            if (!live[w])
                continue;
            if (index[w] == npos) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::size_t w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp[w] = components;
            } while (w != v);
            ++components;
        }
    };
    for (std::size_t v = 0; v < n; ++v)
        if (live[v] && index[v] == npos)
            visit(v);
    return comp;
}

}  // namespace

template <Scalar T>
std::vector<EndComponent> max_end_components(const Mdp<T>& model)
{
    const std::size_t n = model.num_states();
    const auto& pairs = model.pairs();
    std::vector<bool> live(n, false);
    std::vector<std::vector<bool>> allowed(n);
    for (std::size_t x = 0; x < n; ++x) {
        live[x] = !model.is_absorbing(x);
        allowed[x].assign(model.actions(x).size(), live[x]);
    }
    auto successors = [&](std::size_t x, std::size_t a) {
        std::vector<std::size_t> out;
        const auto& row = model.transition_row(pairs.id(x, a));
        for (std::size_t y = 0; y < n; ++y)
            if (row[y] > T(0))
                out.push_back(y);
        return out;
    };

    std::vector<std::size_t> comp;
    bool changed = true;
    while (changed) {
        changed = false;
        // Drop actions that can leave the live set; then states without actions.
        bool pruned = true;
        while (pruned) {
            pruned = false;
            for (std::size_t x = 0; x < n; ++x) {
                if (!live[x])
                    continue;
                bool any = false;
                for (std::size_t a = 0; a < allowed[x].size(); ++a) {
                    if (!allowed[x][a])
                        continue;
                    for (auto y : successors(x, a))
                        if (!live[y]) {
                            allowed[x][a] = false;
                            break;
                        }
                    any = any || allowed[x][a];
                }
                if (!any) {
                    live[x] = false;
                    pruned = changed = true;
                }
            }
        }
        std::vector<std::vector<std::size_t>> succ(n);
        for (std::size_t x = 0; x < n; ++x)
            if (live[x])
                for (std::size_t a = 0; a < allowed[x].size(); ++a)
                    if (allowed[x][a])
                        for (auto y : successors(x, a))
                            succ[x].push_back(y);
        comp = strongly_connected(succ, live);
        // Actions that may leave their own component cannot belong to an end component.
        for (std::size_t x = 0; x < n; ++x) {
            if (!live[x])
                continue;
            for (std::size_t a = 0; a < allowed[x].size(); ++a) {
                if (!allowed[x][a])
                    continue;
                for (auto y : successors(x, a))
                    if (comp[y] != comp[x]) {
                        allowed[x][a] = false;
                        changed = true;
                        break;
                    }
            }
        }
    }

    std::vector<EndComponent> out;
    std::vector<std::size_t> slot(n, static_cast<std::size_t>(-1));
    for (std::size_t x = 0; x < n; ++x) {
        if (!live[x])
            continue;
        if (slot[comp[x]] == static_cast<std::size_t>(-1)) {
            slot[comp[x]] = out.size();
            out.emplace_back();
        }
        auto& ec = out[slot[comp[x]]];
        ec.states.push_back(x);
        ec.actions.emplace_back();
        for (std::size_t a = 0; a < allowed[x].size(); ++a)
            if (allowed[x][a])
                ec.actions.back().push_back(a);
    }
    return out;
}

template <Scalar T>
void require_absorbing(const Mdp<T>& model)
{
    auto mecs = max_end_components(model);
    if (!mecs.empty())
        throw NotAbsorbingError("model is not absorbing: " + std::to_string(mecs.size()) +
                                    " end component(s) avoid the absorbing set",
                                std::move(mecs));
}

namespace {

template <Scalar T>
T action_value(const Mdp<T>& model, std::size_t x, std::size_t a, const std::vector<T>& v)
{
    const auto& row = model.transition_row(model.pairs().id(x, a));
    T sum(0);
    for (std::size_t y = 0; y < row.size(); ++y)
        if (row[y] != T(0) && v[y] != T(0))
            sum += row[y] * v[y];
    return sum;
}

template <Scalar T>
double bellman_residual(const Mdp<T>& model, const std::vector<T>& v)
{
    double worst = 0.0;
    for (auto x : model.pairs().transient_states()) {
        T best = action_value(model, x, 0, v);
        for (std::size_t a = 1; a < model.actions(x).size(); ++a)
            best = std::max(best, action_value(model, x, a, v));
        worst = std::max(worst, to_double(abs_value(T(v[x] - (T(1) + best)))));
    }
    return worst;
}

template <Scalar T>
std::vector<T> evaluate_hitting_time(const Mdp<T>& model, const DeterministicPolicy& selector)
{
    auto ts = model.pairs().transient_states();
    const std::size_t n = ts.size();
    Matrix<T> system(n, n);
    std::vector<T> rhs(n, T(1));
    for (std::size_t i = 0; i < n; ++i) {
        system(i, i) = T(1);
        const auto& row = model.transition_row(model.pairs().id(ts[i], selector.choice[ts[i]]));
        for (std::size_t j = 0; j < n; ++j)
            system(i, j) -= row[ts[j]];
    }
    auto sol = solve_square<T>(system, rhs);
    if (!sol)
        throw NumericError("hitting-time system is singular");
    std::vector<T> v(model.num_states(), T(0));
    for (std::size_t i = 0; i < n; ++i)
        v[ts[i]] = (*sol)[i];
    return v;
}

}  // namespace

template <Scalar T>
HittingTime<T> max_expected_hitting_time(const Mdp<T>& model, double fixpoint_tol, std::size_t max_sweeps)
{
    require_absorbing(model);
    HittingTime<T> out;
    const std::size_t n = model.num_states();
    auto ts = model.pairs().transient_states();
    out.worst = default_selector(model);

    if constexpr (is_exact_v<T>) {
        // Policy iteration: switch only on strict improvement, so it terminates.
        while (true) {
            ++out.iterations;
            out.value = evaluate_hitting_time(model, out.worst);
            bool improved = false;
            for (auto x : ts) {
                T current = action_value(model, x, out.worst.choice[x], out.value);
                for (std::size_t a = 0; a < model.actions(x).size(); ++a) {
                    T candidate = action_value(model, x, a, out.value);
                    if (candidate > current) {
                        current = candidate;
                        out.worst.choice[x] = a;
                        improved = true;
                    }
                }
            }
            if (!improved)
                break;
        }
    } else {
        std::vector<double> v(n, 0.0), next(n, 0.0);
        while (true) {
            if (out.iterations >= max_sweeps)
                throw NumericError("value iteration did not converge within " + std::to_string(max_sweeps) +
                                   " sweeps (near-degenerate absorption)");
            ++out.iterations;
            double lo = 0.0, hi = 0.0;  // absorbing states contribute a zero difference
            for (auto x : ts) {
                double best = action_value(model, x, 0, v);
                std::size_t arg = 0;
                for (std::size_t a = 1; a < model.actions(x).size(); ++a) {
                    double q = action_value(model, x, a, v);
                    if (q > best) {
                        best = q;
                        arg = a;
                    }
                }
                next[x] = 1.0 + best;
                out.worst.choice[x] = arg;
                double diff = next[x] - v[x];
                lo = std::min(lo, diff);
                hi = std::max(hi, diff);
            }
            std::swap(v, next);
            if (hi - lo <= fixpoint_tol)
                break;
        }
        out.value = std::move(v);
    }
    out.fixpoint_residual = bellman_residual(model, out.value);
    out.expected = T(0);
    for (std::size_t x = 0; x < n; ++x)
        out.expected += model.initial()[x] * out.value[x];
    return out;
}

template <Scalar T>
T TailBound<T>::operator()(std::size_t n) const
{
    T factor(1);
    T base = T(1) - epsilon;
    for (std::size_t i = 0; i < n / horizon; ++i) {
        factor *= base;
        if (factor == T(0))
            break;
    }
    return T(static_cast<long>(horizon)) * factor / epsilon;
}

template <Scalar T>
TailBound<T> uniform_tail_bound(const Mdp<T>& model)
{
    require_absorbing(model);
    const std::size_t n = model.num_states();
    auto ts = model.pairs().transient_states();
    TailBound<T> out;
    out.horizon = std::max<std::size_t>(ts.size(), 1);
    // w_k(x): worst-case probability of having reached the absorbing set within k steps.
    std::vector<T> w(n, T(0)), next(n, T(0));
    for (std::size_t x = 0; x < n; ++x)
        w[x] = model.is_absorbing(x) ? T(1) : T(0);
    for (std::size_t step = 0; step < ts.size(); ++step) {
        next = w;
        for (auto x : ts) {
            T worst = action_value(model, x, 0, w);
            for (std::size_t a = 1; a < model.actions(x).size(); ++a)
                worst = std::min(worst, action_value(model, x, a, w));
            next[x] = worst;
        }
        std::swap(w, next);
    }
    out.epsilon = T(1);
    for (auto x : ts)
        out.epsilon = std::min(out.epsilon, w[x]);
    if (!(out.epsilon > T(0)))
        throw NumericError("worst-case absorption probability within N steps is not positive");
    return out;
}

template <Scalar T>
AbsorptionCertificate<T> certify_absorption(const Mdp<T>& model, double fixpoint_tol, std::size_t max_sweeps)
{
    AbsorptionCertificate<T> out;
    out.mec_witness = max_end_components(model);
    out.absorbing = out.mec_witness.empty();
    if (out.absorbing) {
        out.hitting = max_expected_hitting_time(model, fixpoint_tol, max_sweeps);
        out.tail = uniform_tail_bound(model);
    }
    return out;
}

#define OCCLAB_INSTANTIATE(T)                                                                        \
    template std::vector<EndComponent> max_end_components(const Mdp<T>&);                            \
    template void require_absorbing(const Mdp<T>&);                                                  \
    template HittingTime<T> max_expected_hitting_time(const Mdp<T>&, double, std::size_t);           \
    template struct TailBound<T>;                                                                    \
    template TailBound<T> uniform_tail_bound(const Mdp<T>&);                                         \
    template AbsorptionCertificate<T> certify_absorption(const Mdp<T>&, double, std::size_t);

OCCLAB_INSTANTIATE(Rational)
OCCLAB_INSTANTIATE(double)

#undef OCCLAB_INSTANTIATE

}  // namespace occlab
