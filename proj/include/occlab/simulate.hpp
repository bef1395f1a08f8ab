/**
 * Seeded Monte Carlo rollouts, independent of the linear-algebra path.
 *
 * Random numbers come from Philox4x32-10 (Salmon et al., Random123). The
 * stream of episode e under master seed s uses key (s mod 2^32, s div 2^32)
 * and counters (i mod 2^32, i div 2^32, e mod 2^32, e div 2^32) for the
 * i-th block of four 32-bit outputs; each uniform double consumes two
 * outputs (53 bits). Episodes are grouped in fixed blocks of
 * `kEpisodeBlock`; workers process whole blocks and the block accumulators
 * are merged in block order, so results do not depend on the worker count.
 */
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <variant>
#include <vector>

#include "occlab/model.hpp"
#include "occlab/policy.hpp"

namespace occlab {

class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter counter, Key key);
};

/// Uniform [0,1) doubles for one episode.
class EpisodeStream {
public:
    EpisodeStream(std::uint64_t seed, std::uint64_t episode);
    double uniform();
    std::uint64_t draws() const noexcept { return draws_; }

private:
    Philox4x32::Key key_;
    std::uint64_t episode_;
    std::uint64_t block_index_ = 0;
    Philox4x32::Counter buffer_{};
    std::size_t used_ = 4;
    std::uint64_t draws_ = 0;
};

using SimPolicy = std::variant<DeterministicPolicy, StationaryPolicy<double>, ChatteringKernel<double>,
                               MixturePolicy<double>>;

template <Scalar T>
StationaryPolicy<double> to_double_policy(const StationaryPolicy<T>& policy);
template <Scalar T>
ChatteringKernel<double> to_double_kernel(const ChatteringKernel<T>& kernel);
template <Scalar T>
MixturePolicy<double> to_double_mixture(const MixturePolicy<T>& mixture);

struct Episode {
    std::vector<std::size_t> pairs;  // visited pair ids in order
    std::size_t final_state = 0;
    bool truncated = false;
    std::size_t length() const noexcept { return pairs.size(); }
};

/// One trajectory from eta until the first absorbing state (or step_cap steps).
Episode rollout(const FloatMdp& model, const SimPolicy& policy, std::uint64_t seed, std::size_t step_cap,
                std::uint64_t episode = 0);

inline constexpr std::size_t kEpisodeBlock = 1024;

struct SimOptions {
    std::size_t episodes = 100'000;
    std::uint64_t seed = 0;
    std::size_t step_cap = 1'000'000;
    std::size_t workers = 1;
};

struct SimEstimate {
    std::vector<double> occupancy;           // per transient pair
    std::vector<double> occupancy_se;
    double absorption_time = 0.0;
    double absorption_time_se = 0.0;
    std::vector<double> performance;         // per reward component
    std::vector<double> performance_se;
    std::size_t episodes = 0;
    std::size_t truncated = 0;
    std::uint64_t seed = 0;
    std::size_t step_cap = 0;
    bool truncation_warning = false;         // truncated / episodes > 1%
    std::map<std::size_t, std::size_t> length_histogram;

    bool operator==(const SimEstimate&) const = default;
};

SimEstimate estimate(const FloatMdp& model, const SimPolicy& policy, const SimOptions& options);

struct TailPoint {
    std::size_t n = 0;
    double value = 0.0;  // empirical sum_{t >= n} P(T > t) = mean of max(T - n, 0)
    double se = 0.0;
};

/// Tail series for n = 0..horizon from an estimate's length histogram.
std::vector<TailPoint> tail_curve(const SimEstimate& estimate, std::size_t horizon);

std::vector<TailPoint> tail_curve(const FloatMdp& model, const SimPolicy& policy, const SimOptions& options,
                                  std::size_t horizon);

}  // namespace occlab
