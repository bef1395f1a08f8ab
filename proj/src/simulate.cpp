#include "occlab/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "occlab/errors.hpp"

namespace occlab {

Philox4x32::Counter Philox4x32::block(Counter counter, Key key)
{
    constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += w0;
            key[1] += w1;
        }
        std::uint64_t p0 = static_cast<std::uint64_t>(m0) * counter[0];
        std::uint64_t p1 = static_cast<std::uint64_t>(m1) * counter[2];
        auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
        auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
        counter = {hi1 ^ counter[1] ^ key[0], lo1, hi0 ^ counter[3] ^ key[1], lo0};
    }
    return counter;
}

EpisodeStream::EpisodeStream(std::uint64_t seed, std::uint64_t episode)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, episode_(episode)
{
}

double EpisodeStream::uniform()
{
    if (used_ + 2 > 4) {
        buffer_ = Philox4x32::block({static_cast<std::uint32_t>(block_index_),
                                     static_cast<std::uint32_t>(block_index_ >> 32),
                                     static_cast<std::uint32_t>(episode_),
                                     static_cast<std::uint32_t>(episode_ >> 32)},
                                    key_);
        ++block_index_;
        used_ = 0;
    }
    std::uint64_t hi = buffer_[used_] >> 5;  // 27 bits
    std::uint64_t lo = buffer_[used_ + 1] >> 6;  // 26 bits
    used_ += 2;
    ++draws_;
    return static_cast<double>((hi << 26) | lo) * 0x1.0p-53;
}

template <Scalar T>
StationaryPolicy<double> to_double_policy(const StationaryPolicy<T>& policy)
{
    StationaryPolicy<double> out;
    for (const auto& row : policy.prob) {
        out.prob.emplace_back();
        for (const auto& v : row)
            out.prob.back().push_back(to_double(v));
    }
    return out;
}

template <Scalar T>
ChatteringKernel<double> to_double_kernel(const ChatteringKernel<T>& kernel)
{
    ChatteringKernel<double> out;
    out.selectors = kernel.selectors;
    for (const auto& row : kernel.beta) {
        out.beta.emplace_back();
        for (const auto& v : row)
            out.beta.back().push_back(to_double(v));
    }
    return out;
}

template <Scalar T>
MixturePolicy<double> to_double_mixture(const MixturePolicy<T>& mixture)
{
    MixturePolicy<double> out;
    out.selectors = mixture.selectors;
    for (const auto& v : mixture.weights)
        out.weights.push_back(to_double(v));
    return out;
}

namespace {

/// Inverse-CDF draw; falls back to the last positive entry against rounding.
std::size_t sample_index(std::span<const double> probs, double u)
{
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] <= 0.0)
            continue;
        last_positive = i;
        cumulative += probs[i];
        if (u < cumulative)
            return i;
    }
    return last_positive;
}

void check_sim_policy(const FloatMdp& model, const SimPolicy& policy)
{
    const double tol = Tolerances<double>::defaults().stochastic;
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::same_as<P, DeterministicPolicy>)
                check_selector(model, p);
            else if constexpr (std::same_as<P, StationaryPolicy<double>>)
                check_policy(model, p, tol);
            else if constexpr (std::same_as<P, ChatteringKernel<double>>)
                check_kernel(model, p, tol);
            else
                check_mixture(model, p, tol);
        },
        policy);
}

Episode run_episode(const FloatMdp& model, const SimPolicy& policy, EpisodeStream& rng, std::size_t step_cap)
{
    Episode ep;
    std::size_t x = sample_index(model.initial(), rng.uniform());
    // Mixtures pick their component once, before the first action.
    const DeterministicPolicy* component = nullptr;
    if (const auto* mix = std::get_if<MixturePolicy<double>>(&policy))
        component = &mix->selectors[sample_index(mix->weights, rng.uniform())];

    const auto& pairs = model.pairs();
    while (!model.is_absorbing(x)) {
        if (ep.pairs.size() >= step_cap) {
            ep.truncated = true;
            break;
        }
        std::size_t action = 0;
        if (component) {
            action = component->choice[x];
        } else if (const auto* det = std::get_if<DeterministicPolicy>(&policy)) {
            action = det->choice[x];
        } else if (const auto* st = std::get_if<StationaryPolicy<double>>(&policy)) {
            action = sample_index(st->prob[x], rng.uniform());
        } else {
            const auto& kernel = std::get<ChatteringKernel<double>>(policy);
            action = kernel.selectors[sample_index(kernel.beta[x], rng.uniform())].choice[x];
        }
        std::size_t pair = pairs.id(x, action);
        ep.pairs.push_back(pair);
        x = sample_index(model.transition_row(pair), rng.uniform());
    }
    ep.final_state = x;
    return ep;
}

struct BlockAccumulator {
    std::vector<std::uint64_t> visits;
    std::vector<std::uint64_t> visits_sq;
    std::vector<double> reward;
    std::vector<double> reward_sq;
    std::map<std::size_t, std::size_t> lengths;
    std::size_t truncated = 0;
};

BlockAccumulator run_block(const FloatMdp& model, const SimPolicy& policy, const SimOptions& options,
                           std::size_t first, std::size_t last)
{
    const auto& pairs = model.pairs();
    const std::size_t np = pairs.transient_pairs().size();
    const std::size_t d = model.reward_dim();
    BlockAccumulator acc;
    acc.visits.assign(np, 0);
    acc.visits_sq.assign(np, 0);
    acc.reward.assign(d, 0.0);
    acc.reward_sq.assign(d, 0.0);
    std::vector<std::uint64_t> counts(np, 0);
    std::vector<double> total(d);
    for (std::size_t e = first; e < last; ++e) {
        EpisodeStream rng(options.seed, e);
        Episode ep = run_episode(model, policy, rng, options.step_cap);
        std::fill(counts.begin(), counts.end(), 0);
        std::fill(total.begin(), total.end(), 0.0);
        for (auto pair : ep.pairs) {
            ++counts[*pairs.transient_pair_position(pair)];
            const auto& r = model.reward(pair);
            for (std::size_t i = 0; i < d; ++i)
                total[i] += r[i];
        }
        for (std::size_t i = 0; i < np; ++i) {
            acc.visits[i] += counts[i];
            acc.visits_sq[i] += counts[i] * counts[i];
        }
        for (std::size_t i = 0; i < d; ++i) {
            acc.reward[i] += total[i];
            acc.reward_sq[i] += total[i] * total[i];
        }
        ++acc.lengths[ep.length()];
        if (ep.truncated)
            ++acc.truncated;
    }
    return acc;
}

double standard_error(double sum, double sum_sq, double n)
{
    if (n < 2)
        return 0.0;
    double mean = sum / n;
    double var = (sum_sq - n * mean * mean) / (n - 1);
    return var > 0 ? std::sqrt(var / n) : 0.0;
}

}  // namespace

Episode rollout(const FloatMdp& model, const SimPolicy& policy, std::uint64_t seed, std::size_t step_cap,
                std::uint64_t episode)
{
    check_sim_policy(model, policy);
    EpisodeStream rng(seed, episode);
    return run_episode(model, policy, rng, step_cap);
}

SimEstimate estimate(const FloatMdp& model, const SimPolicy& policy, const SimOptions& options)
{
    if (options.episodes == 0)
        throw InvalidArgument("episodes must be >= 1");
    check_sim_policy(model, policy);
    const std::size_t blocks = (options.episodes + kEpisodeBlock - 1) / kEpisodeBlock;
    std::vector<BlockAccumulator> results(blocks);
    auto work = [&](std::size_t worker, std::size_t stride) {
        for (std::size_t b = worker; b < blocks; b += stride)
            results[b] = run_block(model, policy, options, b * kEpisodeBlock,
                                   std::min(options.episodes, (b + 1) * kEpisodeBlock));
    };
    const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, blocks);
    if (workers == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> threads;
        for (std::size_t w = 0; w < workers; ++w)
            threads.emplace_back(work, w, workers);
        for (auto& t : threads)
            t.join();
    }

    const std::size_t np = model.pairs().transient_pairs().size();
    const std::size_t d = model.reward_dim();
    std::vector<std::uint64_t> visits(np, 0), visits_sq(np, 0);
    std::vector<double> reward(d, 0.0), reward_sq(d, 0.0);
    SimEstimate out;
    for (const auto& acc : results) {
        for (std::size_t i = 0; i < np; ++i) {
            visits[i] += acc.visits[i];
            visits_sq[i] += acc.visits_sq[i];
        }
        for (std::size_t i = 0; i < d; ++i) {
            reward[i] += acc.reward[i];
            reward_sq[i] += acc.reward_sq[i];
        }
        for (const auto& [len, count] : acc.lengths)
            out.length_histogram[len] += count;
        out.truncated += acc.truncated;
    }
    const double n = static_cast<double>(options.episodes);
    for (std::size_t i = 0; i < np; ++i) {
        out.occupancy.push_back(static_cast<double>(visits[i]) / n);
        out.occupancy_se.push_back(
            standard_error(static_cast<double>(visits[i]), static_cast<double>(visits_sq[i]), n));
    }
    for (std::size_t i = 0; i < d; ++i) {
        out.performance.push_back(reward[i] / n);
        out.performance_se.push_back(standard_error(reward[i], reward_sq[i], n));
    }
    double len_sum = 0.0, len_sq = 0.0;
    for (const auto& [len, count] : out.length_histogram) {
        len_sum += static_cast<double>(len) * static_cast<double>(count);
        len_sq += static_cast<double>(len) * static_cast<double>(len) * static_cast<double>(count);
    }
    out.absorption_time = len_sum / n;
    out.absorption_time_se = standard_error(len_sum, len_sq, n);
    out.episodes = options.episodes;
    out.seed = options.seed;
    out.step_cap = options.step_cap;
    out.truncation_warning = static_cast<double>(out.truncated) > 0.01 * n;
    return out;
}

std::vector<TailPoint> tail_curve(const SimEstimate& est, std::size_t horizon)
{
    std::vector<TailPoint> out;
    const double n = static_cast<double>(est.episodes);
    for (std::size_t k = 0; k <= horizon; ++k) {
        double sum = 0.0, sum_sq = 0.0;
        for (const auto& [len, count] : est.length_histogram) {
            if (len <= k)
                continue;
            double excess = static_cast<double>(len - k);
            sum += excess * static_cast<double>(count);
            sum_sq += excess * excess * static_cast<double>(count);
        }
        out.push_back({k, sum / n, standard_error(sum, sum_sq, n)});
    }
    return out;
}

std::vector<TailPoint> tail_curve(const FloatMdp& model, const SimPolicy& policy, const SimOptions& options,
                                  std::size_t horizon)
{
    return tail_curve(estimate(model, policy, options), horizon);
}

template StationaryPolicy<double> to_double_policy(const StationaryPolicy<Rational>&);
template StationaryPolicy<double> to_double_policy(const StationaryPolicy<double>&);
template ChatteringKernel<double> to_double_kernel(const ChatteringKernel<Rational>&);
template ChatteringKernel<double> to_double_kernel(const ChatteringKernel<double>&);
template MixturePolicy<double> to_double_mixture(const MixturePolicy<Rational>&);
template MixturePolicy<double> to_double_mixture(const MixturePolicy<double>&);

}  // namespace occlab
