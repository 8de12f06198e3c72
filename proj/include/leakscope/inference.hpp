#pragma once

#include <cstdint>
#include <optional>

#include "leakscope/model.hpp"
#include "leakscope/sample_set.hpp"

namespace leakscope {

struct ChainSettings {
    int chains = 2;
    int burn_in = 1000;
    int thinning = 1;
    /// Random-walk step for continuous sites; default is half the prior std of the site.
    std::optional<double> proposal_scale;
    /// Run chains on separate threads. Output does not depend on this.
    bool parallel = true;
};

struct RejectionSettings {
    double min_acceptance = 1e-6;
    std::uint64_t check_after = 10'000'000;
};

/// Forward simulation of the prior and prediction; observations are ignored.
SampleSet sample_prior(const GenerativeModel& model, std::size_t n, std::uint64_t seed);

/// Forward draws filtered by the evidence until n are accepted.
SampleSet rejection_sample(const GenerativeModel& model, std::size_t n, std::uint64_t seed,
                           const RejectionSettings& settings = {});

/// Prior-proposal likelihood weighting with 0/1 weights; zero-weight rows are kept.
SampleSet importance_sample(const GenerativeModel& model, std::size_t n, std::uint64_t seed);

/// Single-site Metropolis-Hastings, `settings.chains` chains of n/chains retained draws.
SampleSet metropolis_sample(const GenerativeModel& model, std::size_t n, std::uint64_t seed,
                            const ChainSettings& settings = {});

/// Exact posterior pmf over the queries by enumerating every choice path.
ExactDistribution enumerate_exact(const GenerativeModel& model);

/// Unweighted resample of n rows, systematic scheme.
SampleSet resample_systematic(const SampleSet& samples, std::size_t n, std::uint64_t seed);

}  // namespace leakscope
