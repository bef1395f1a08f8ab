// Test fixtures and independent oracles. Nothing here calls the library's
// solvers: linear systems, ranks and vertex sets are recomputed from
// scratch with plain Gaussian elimination over Rational.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "occlab/model.hpp"
#include "occlab/policy.hpp"

namespace occlab::testing {

using RVec = std::vector<Rational>;
using RMat = std::vector<RVec>;

inline Rational q(long num, long den = 1) { return Rational(num) / Rational(den); }

/// The reference model: X = {s, t}, Delta = {t}, A(s) = {a1, a2}.
/// `loop` is Q(s|s,a2); the rest of the a2 row goes to t.
inline ExactMdp m1(Rational loop = q(1, 2), std::size_t reward_dim = 1)
{
    ExactMdp m({"s", "t"}, {"t"}, {{"a1", "a2"}, {"z"}}, reward_dim);
    std::size_t a1 = m.pair_id("s", "a1"), a2 = m.pair_id("s", "a2"), z = m.pair_id("t", "z");
    m.transition(a1, 1) = 1;
    m.transition(a2, 0) = loop;
    m.transition(a2, 1) = Rational(1) - loop;
    m.transition(z, 1) = 1;
    m.initial()[0] = 1;
    if (reward_dim == 1) {
        m.reward(a1)[0] = 1;
    } else {
        m.reward(a1)[0] = 1;
        m.reward(a2)[1] = 1;
    }
    return m;
}

inline DeterministicPolicy always(std::size_t action) { return DeterministicPolicy{{action, 0}}; }

inline StationaryPolicy<Rational> half_half()
{
    return StationaryPolicy<Rational>{{{q(1, 2), q(1, 2)}, {q(1)}}};
}

/// A 2-transient-state, 2-action corpus model with d = 2.
inline ExactMdp two_state()
{
    ExactMdp m({"u", "w", "goal"}, {"goal"}, {{"stay", "go"}, {"back", "exit"}, {"done"}}, 2);
    auto set = [&](const char* s, const char* a, std::vector<Rational> row, std::vector<Rational> r) {
        std::size_t k = m.pair_id(s, a);
        m.transition_row(k) = std::move(row);
        m.reward(k) = std::move(r);
    };
    set("u", "stay", {q(1, 2), q(1, 4), q(1, 4)}, {q(1), q(0)});
    set("u", "go", {q(0), q(1), q(0)}, {q(0), q(2)});
    set("w", "back", {q(1, 3), q(0), q(2, 3)}, {q(1, 2), q(1)});
    set("w", "exit", {q(0), q(1, 5), q(4, 5)}, {q(0), q(0)});
    set("goal", "done", {q(0), q(0), q(1)}, {q(0), q(0)});
    m.initial() = {q(3, 4), q(1, 4), q(0)};
    return m;
}

/// Two independent binary choices in sequence: u -> w -> goal. The occupancy
/// polytope is a square whose performance map (d = 2) is a bijection.
inline ExactMdp sequential_choice()
{
    ExactMdp m({"u", "w", "goal"}, {"goal"}, {{"a", "b"}, {"c", "d"}, {"done"}}, 2);
    m.transition(m.pair_id("u", "a"), 1) = 1;
    m.transition(m.pair_id("u", "b"), 1) = 1;
    m.transition(m.pair_id("w", "c"), 2) = 1;
    m.transition(m.pair_id("w", "d"), 2) = 1;
    m.transition(m.pair_id("goal", "done"), 2) = 1;
    m.initial()[0] = 1;
    m.reward(m.pair_id("u", "a"))[0] = 1;
    m.reward(m.pair_id("w", "c"))[1] = 1;
    return m;
}

// ---------------------------------------------------------------------------
// Independent exact linear algebra

/// Reduced row echelon form in place; returns pivot columns.
inline std::vector<std::size_t> rref(RMat& a)
{
    std::vector<std::size_t> pivots;
    if (a.empty())
        return pivots;
    const std::size_t rows = a.size(), cols = a[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && a[p][c] == 0)
            ++p;
        if (p == rows)
            continue;
        std::swap(a[p], a[r]);
        Rational inv = Rational(1) / a[r][c];
        for (auto& v : a[r])
            v *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0)
                continue;
            Rational f = a[i][c];
            for (std::size_t j = 0; j < cols; ++j)
                a[i][j] -= f * a[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

inline std::size_t oracle_rank(RMat a) { return rref(a).size(); }

/// Unique solution of a square system, or nullopt when singular.
inline std::optional<RVec> oracle_solve(const RMat& a, const RVec& b)
{
    const std::size_t n = a.size();
    RMat aug(n, RVec(n + 1));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            aug[i][j] = a[i][j];
        aug[i][n] = b[i];
    }
    auto piv = rref(aug);
    if (piv.size() < n || piv.back() == n)
        return std::nullopt;
    RVec x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = aug[i][n];
    return x;
}

/// Affine dimension of a finite point set (-1 when empty).
inline long oracle_affine_dim(const std::vector<RVec>& pts)
{
    if (pts.empty())
        return -1;
    RMat diffs;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        RVec d(pts[i].size());
        for (std::size_t j = 0; j < d.size(); ++j)
            d[j] = pts[i][j] - pts[0][j];
        diffs.push_back(d);
    }
    return diffs.empty() ? 0 : static_cast<long>(oracle_rank(diffs));
}

// ---------------------------------------------------------------------------
// Model-level oracles

inline std::vector<DeterministicPolicy> all_selectors(const ExactMdp& m)
{
    std::vector<DeterministicPolicy> out;
    DeterministicPolicy cur{std::vector<std::size_t>(m.num_states(), 0)};
    std::function<void(std::size_t)> rec = [&](std::size_t x) {
        if (x == m.num_states()) {
            out.push_back(cur);
            return;
        }
        if (m.is_absorbing(x)) {
            rec(x + 1);
            return;
        }
        for (std::size_t a = 0; a < m.actions(x).size(); ++a) {
            cur.choice[x] = a;
            rec(x + 1);
        }
    };
    rec(0);
    return out;
}

/// Under a selector, every state reachable from any state can still reach Delta.
inline bool selector_absorbs(const ExactMdp& m, const DeterministicPolicy& sel)
{
    const std::size_t n = m.num_states();
    auto succ = [&](std::size_t x) {
        std::vector<std::size_t> out;
        const auto& row = m.transition_row(m.pairs().id(x, sel.choice[x]));
        for (std::size_t y = 0; y < n; ++y)
            if (row[y] > 0)
                out.push_back(y);
        return out;
    };
    // can_reach[x]: Delta reachable from x (backward fixpoint).
    std::vector<bool> can(n, false);
    for (std::size_t x = 0; x < n; ++x)
        can[x] = m.is_absorbing(x);
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t x = 0; x < n; ++x)
            if (!can[x])
                for (auto y : succ(x))
                    if (can[y]) {
                        can[x] = changed = true;
                        break;
                    }
    }
    for (std::size_t x = 0; x < n; ++x)
        if (!can[x])
            return false;
    return true;
}

inline bool oracle_absorbing(const ExactMdp& m)
{
    for (const auto& sel : all_selectors(m))
        if (!selector_absorbs(m, sel))
            return false;
    return true;
}

/// Expected hitting time per transient state under a selector (exact solve).
inline std::optional<RVec> oracle_hitting(const ExactMdp& m, const DeterministicPolicy& sel)
{
    auto ts = m.pairs().transient_states();
    const std::size_t n = ts.size();
    RMat a(n, RVec(n, 0));
    RVec b(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = m.transition_row(m.pairs().id(ts[i], sel.choice[ts[i]]));
        a[i][i] += 1;
        for (std::size_t j = 0; j < n; ++j)
            a[i][j] -= row[ts[j]];
    }
    return oracle_solve(a, b);
}

inline Rational oracle_max_expected_hitting(const ExactMdp& m)
{
    auto ts = m.pairs().transient_states();
    Rational best = 0;
    for (const auto& sel : all_selectors(m)) {
        auto v = oracle_hitting(m, sel);
        Rational e = 0;
        for (std::size_t i = 0; i < ts.size(); ++i)
            e += m.initial()[ts[i]] * (*v)[i];
        best = std::max(best, e);
    }
    return best;
}

/// Occupancy over transient pairs by summing eta P^t for `steps` steps (float).
inline std::vector<double> truncated_series(const ExactMdp& m, const StationaryPolicy<Rational>& phi,
                                            std::size_t steps)
{
    const std::size_t n = m.num_states();
    std::vector<double> rho(n, 0.0), cur(n);
    for (std::size_t x = 0; x < n; ++x)
        cur[x] = m.is_absorbing(x) ? 0.0 : to_double(m.initial()[x]);
    for (std::size_t t = 0; t < steps; ++t) {
        std::vector<double> next(n, 0.0);
        for (std::size_t x = 0; x < n; ++x) {
            if (m.is_absorbing(x) || cur[x] == 0.0)
                continue;
            rho[x] += cur[x];
            for (std::size_t a = 0; a < m.actions(x).size(); ++a) {
                double w = cur[x] * to_double(phi.prob[x][a]);
                const auto& row = m.transition_row(m.pairs().id(x, a));
                for (std::size_t y = 0; y < n; ++y)
                    if (!m.is_absorbing(y))
                        next[y] += w * to_double(row[y]);
            }
        }
        cur.swap(next);
    }
    std::vector<double> out;
    for (auto k : m.pairs().transient_pairs()) {
        std::size_t x = m.pairs().state_of(k);
        out.push_back(rho[x] * to_double(phi.prob[x][m.pairs().action_of(k)]));
    }
    return out;
}

/// The characteristic system over transient pairs: rows per transient state.
inline void characteristic_system(const ExactMdp& m, RMat& a, RVec& b)
{
    auto ts = m.pairs().transient_states();
    auto tp = m.pairs().transient_pairs();
    a.assign(ts.size(), RVec(tp.size(), 0));
    b.assign(ts.size(), 0);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        b[i] = m.initial()[ts[i]];
        for (std::size_t c = 0; c < tp.size(); ++c) {
            if (m.pairs().state_of(tp[c]) == ts[i])
                a[i][c] += 1;
            a[i][c] -= m.transition(tp[c], ts[i]);
        }
    }
}

/// Basic feasible solutions of { x >= 0 : A x = b } restricted to `columns`,
/// by trying every basis. Full-length vectors, deduplicated, sorted.
inline std::vector<RVec> oracle_vertices(const RMat& a, const RVec& b, const std::vector<std::size_t>& columns,
                                         std::size_t full_len)
{
    RMat sub(a.size(), RVec(columns.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t c = 0; c < columns.size(); ++c)
            sub[i][c] = a[i][columns[c]];
    // Drop dependent rows (checking consistency) so bases are square.
    RMat aug = sub;
    for (std::size_t i = 0; i < aug.size(); ++i)
        aug[i].push_back(b[i]);
    auto piv = rref(aug);
    if (!piv.empty() && piv.back() == columns.size())
        return {};  // inconsistent
    const std::size_t r = piv.size();
    RMat red(r, RVec(columns.size()));
    RVec rb(r);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t c = 0; c < columns.size(); ++c)
            red[i][c] = aug[i][c];
        rb[i] = aug[i][columns.size()];
    }
    std::vector<RVec> out;
    auto push = [&](RVec v) {
        if (std::find(out.begin(), out.end(), v) == out.end())
            out.push_back(std::move(v));
    };
    if (r == 0) {
        push(RVec(full_len, 0));
        return out;
    }
    std::vector<std::size_t> pick(r);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
        if (depth == r) {
            RMat basis(r, RVec(r));
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < r; ++j)
                    basis[i][j] = red[i][pick[j]];
            auto x = oracle_solve(basis, rb);
            if (!x)
                return;
            for (const auto& v : *x)
                if (v < 0)
                    return;
            RVec full(full_len, 0);
            for (std::size_t j = 0; j < r; ++j)
                full[columns[pick[j]]] = (*x)[j];
            push(std::move(full));
            return;
        }
        for (std::size_t c = start; c < columns.size(); ++c) {
            pick[depth] = c;
            rec(c + 1, depth + 1);
        }
    };
    rec(0, 0);
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Random corpus

struct RandomModelSpec {
    std::size_t max_transient = 4;
    std::size_t max_actions = 3;
    std::size_t max_reward_dim = 3;
    std::size_t denominator = 6;  // probabilities are multiples of 1/denominator
};

/// Random exact model with one absorbing state, redrawn until it is absorbing.
inline ExactMdp random_model(std::mt19937_64& rng, const RandomModelSpec& spec = {})
{
    auto uniform = [&](std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };
    while (true) {
        const std::size_t n = uniform(1, spec.max_transient);
        const std::size_t d = uniform(1, spec.max_reward_dim);
        std::vector<std::string> states;
        std::vector<std::vector<std::string>> actions;
        for (std::size_t x = 0; x < n; ++x) {
            states.push_back("x" + std::to_string(x));
            std::vector<std::string> acts;
            for (std::size_t a = 0, k = uniform(1, spec.max_actions); a < k; ++a)
                acts.push_back("a" + std::to_string(a));
            actions.push_back(acts);
        }
        states.push_back("end");
        actions.push_back({"stop"});
        ExactMdp m(states, {"end"}, actions, d);
        const long den = static_cast<long>(spec.denominator);
        auto random_row = [&](std::vector<Rational>& row, bool absorbing_only) {
            std::vector<long> units(n + 1, 0);
            if (absorbing_only) {
                units[n] = den;
            } else {
                // Scatter `den` units over a random subset of targets.
                for (long u = 0; u < den; ++u)
                    ++units[uniform(0, n)];
            }
            for (std::size_t y = 0; y <= n; ++y)
                row[y] = q(units[y], den);
        };
        for (std::size_t x = 0; x <= n; ++x)
            for (std::size_t a = 0; a < m.actions(x).size(); ++a) {
                std::size_t k = m.pairs().id(x, a);
                random_row(m.transition_row(k), x == n);
                if (x < n)
                    for (std::size_t i = 0; i < d; ++i)
                        m.reward(k)[i] = q(static_cast<long>(uniform(0, 6)) - 2, static_cast<long>(uniform(1, 3)));
            }
        std::vector<long> units(n, 0);
        for (long u = 0; u < den; ++u)
            ++units[uniform(0, n - 1)];
        for (std::size_t x = 0; x < n; ++x)
            m.initial()[x] = q(units[x], den);
        if (oracle_absorbing(m))
            return m;
    }
}

/// Random stationary policy; each state gets random multiples of 1/den, some zero.
inline StationaryPolicy<Rational> random_policy(std::mt19937_64& rng, const ExactMdp& m, long den = 4)
{
    StationaryPolicy<Rational> phi;
    for (std::size_t x = 0; x < m.num_states(); ++x) {
        const std::size_t k = m.actions(x).size();
        std::vector<long> units(k, 0);
        for (long u = 0; u < den; ++u)
            ++units[std::uniform_int_distribution<std::size_t>(0, k - 1)(rng)];
        RVec row;
        for (auto u : units)
            row.push_back(q(u, den));
        phi.prob.push_back(row);
    }
    return phi;
}

inline std::vector<double> to_doubles(const RVec& v)
{
    std::vector<double> out;
    for (const auto& x : v)
        out.push_back(to_double(x));
    return out;
}

/// Per-state induced distribution of a kernel over `actions` actions.
inline RVec induced(const ChatteringKernel<Rational>& k, std::size_t x, std::size_t actions)
{
    RVec out(actions, 0);
    for (std::size_t i = 0; i < k.order(); ++i)
        out[k.selectors[i].choice[x]] += k.beta[x][i];
    return out;
}

inline ChatteringKernel<Rational> random_kernel(std::mt19937_64& rng, std::size_t states, std::size_t actions)
{
    auto pick = [&](std::size_t hi) { return std::uniform_int_distribution<std::size_t>(0, hi)(rng); };
    ChatteringKernel<Rational> k;
    const std::size_t p = 1 + pick(3);
    for (std::size_t i = 0; i < p; ++i) {
        DeterministicPolicy s;
        for (std::size_t x = 0; x < states; ++x)
            s.choice.push_back(pick(actions - 1));
        k.selectors.push_back(s);
    }
    for (std::size_t x = 0; x < states; ++x) {
        // Sparse simplex weights: units of 1/6 dropped on random selectors.
        std::vector<long> units(p, 0);
        for (int u = 0; u < 6; ++u)
            ++units[pick(p - 1)];
        RVec row;
        for (auto u : units)
            row.push_back(q(u, 6));
        k.beta.push_back(row);
    }
    return k;
}

}  // namespace occlab::testing
