#include "leakscope/inference.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "evaluator.hpp"
#include "leakscope/errors.hpp"
#include "leakscope/rng.hpp"

namespace leakscope {

using detail::Chooser;
using detail::Evaluator;
using detail::SiteKey;
using detail::Trace;

namespace {

class ForwardChooser final : public Chooser {
public:
    explicit ForwardChooser(Rng& rng) : rng_(rng) {}
    Value choose(const SiteKey&, const DistSpec& dist, const Value*) override { return dist.sample(rng_); }

private:
    Rng& rng_;
};

/// Keeps existing values, substitutes one proposed site, samples sites that are new.
class ReplayChooser final : public Chooser {
public:
    ReplayChooser(Rng& rng, const SiteKey* target, Value proposal)
        : rng_(rng), target_(target), proposal_(std::move(proposal)) {}
    Value choose(const SiteKey& key, const DistSpec& dist, const Value* previous) override {
        if (target_ && key == *target_) return proposal_;
        if (previous) return *previous;
        return dist.sample(rng_);
    }

private:
    Rng& rng_;
    const SiteKey* target_;
    Value proposal_;
};

SampleSet empty_set(const GenerativeModel& model, std::uint64_t seed, Method method, std::size_t reserve) {
    SampleSet s;
    s.names = model.query_names();
    s.columns.assign(s.names.size(), {});
    for (auto& c : s.columns) c.reserve(reserve);
    s.seed = seed;
    s.method = method;
    return s;
}

void record(SampleSet& s, const GenerativeModel& model, const Trace& t) {
    const auto& qs = model.queries();
    for (std::size_t i = 0; i < qs.size(); ++i) s.columns[i].push_back(t.values[qs[i].node.value]);
}

void require_positive(std::size_t n) {
    if (n == 0) throw InferenceError("sample count must be positive");
}

}  // namespace

SampleSet sample_prior(const GenerativeModel& model, std::size_t n, std::uint64_t seed) {
    require_positive(n);
    Evaluator ev(model);
    Rng rng(seed, 0);
    ForwardChooser fwd(rng);
    Trace t = ev.make_trace();
    SampleSet s = empty_set(model, seed, Method::Forward, n);
    for (std::size_t i = 0; i < n; ++i) {
        ev.run(t, fwd, false);
        record(s, model, t);
    }
    return s;
}

SampleSet rejection_sample(const GenerativeModel& model, std::size_t n, std::uint64_t seed,
                           const RejectionSettings& settings) {
    require_positive(n);
    Evaluator ev(model);
    Rng rng(seed, 0);
    ForwardChooser fwd(rng);
    Trace t = ev.make_trace();
    SampleSet s = empty_set(model, seed, Method::Rejection, n);
    std::uint64_t attempts = 0;
    std::size_t accepted = 0;
    while (accepted < n) {
        ev.run(t, fwd, false);
        ++attempts;
        if (ev.evidence_holds(t)) {
            record(s, model, t);
            ++accepted;
        }
        if (attempts >= settings.check_after && attempts % settings.check_after == 0 &&
            static_cast<double>(accepted) / static_cast<double>(attempts) < settings.min_acceptance) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "rejection sampling accepted %zu of %llu draws (rate below %g); ", accepted,
                          static_cast<unsigned long long>(attempts), settings.min_acceptance);
            throw InferenceError(std::string(buf) + "use importance or metropolis instead");
        }
    }
    return s;
}

SampleSet importance_sample(const GenerativeModel& model, std::size_t n, std::uint64_t seed) {
    require_positive(n);
    Evaluator ev(model);
    Rng rng(seed, 0);
    ForwardChooser fwd(rng);
    Trace t = ev.make_trace();
    SampleSet s = empty_set(model, seed, Method::Importance, n);
    s.weights.emplace();
    s.weights->reserve(n);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ev.run(t, fwd, false);
        const bool ok = ev.evidence_holds(t);
        hits += ok;
        s.weights->push_back(ok ? 1.0 : 0.0);
        record(s, model, t);
    }
    if (hits == 0)
        throw InferenceError("importance sampling: all " + std::to_string(n) +
                             " weights are zero; the evidence was never met");
    return s;
}

// ------------------------------------------------------------------ Metropolis

namespace {

class Chain {
public:
    Chain(const GenerativeModel& model, std::uint64_t seed, int index, const ChainSettings& settings)
        : model_(model), ev_(model), rng_(seed, static_cast<std::uint64_t>(index)), settings_(settings),
          has_evidence_(!model.observations().empty()) {}

    void run(std::size_t retained, SampleSet& out) {
        initialise();
        const std::size_t thin = static_cast<std::size_t>(settings_.thinning);
        const std::size_t total = static_cast<std::size_t>(settings_.burn_in) + retained * thin;
        for (std::size_t it = 0; it < total; ++it) {
            sweep();
            if (has_evidence_) global_move();
            if (it >= static_cast<std::size_t>(settings_.burn_in) && (it - settings_.burn_in) % thin == thin - 1) {
                refresh();
                record(out, model_, state_);
            }
        }
    }

private:
    void initialise() {
        const RejectionSettings limits;
        ForwardChooser fwd(rng_);
        state_ = ev_.make_trace();
        for (std::uint64_t a = 0; a < limits.check_after; ++a) {
            ev_.run(state_, fwd, true);
            if (ev_.evidence_holds(state_)) {
                dirty_ = false;
                return;
            }
        }
        throw InferenceError("metropolis: no initial state satisfying the evidence after " +
                             std::to_string(limits.check_after) + " attempts");
    }

    void refresh() {
        if (!dirty_) return;
        ReplayChooser keep(rng_, nullptr, Value());
        ev_.run(state_, keep, false);
        dirty_ = false;
    }

    void sweep() {
        const auto& nodes = model_.graph().nodes;
        for (std::uint32_t id = 0; id < nodes.size(); ++id) {
            const auto& def = nodes[id];
            if (def.kind == detail::NodeKind::Stochastic) {
                update(SiteKey{id, -1, 0});
            } else if (def.kind == detail::NodeKind::Array) {
                // The element count can change while we walk it; re-read each step.
                for (std::size_t i = 0; i < state_.arrays[def.slot].size(); ++i) {
                    const auto& eg = (*def.elements)[i];
                    for (std::uint32_t l = 0; l < eg.nodes.size(); ++l)
                        if (eg.nodes[l].kind == detail::NodeKind::Stochastic)
                            update(SiteKey{id, static_cast<std::int64_t>(i), l});
                }
            }
        }
    }

    Value& slot(Trace& t, const SiteKey& key) {
        if (key.index < 0) return t.values[key.node];
        const auto& def = model_.graph().nodes[key.node];
        return t.arrays[def.slot][static_cast<std::size_t>(key.index)].values[key.local];
    }

    double& logp_slot(Trace& t, const SiteKey& key) {
        if (key.index < 0) return t.logp[key.node];
        const auto& def = model_.graph().nodes[key.node];
        return t.arrays[def.slot][static_cast<std::size_t>(key.index)].logp[key.local];
    }

    void update(const SiteKey& key) {
        const DistSpec dist = ev_.dist_at(state_, key);
        if (dist.is_constant()) return;
        if (!ev_.influential(key)) {
            // Nothing downstream can reject this change: draw from the conditional prior.
            Value v = dist.sample(rng_);
            if (ev_.has_parents(key)) logp_slot(state_, key) = dist.log_density(v);
            slot(state_, key) = std::move(v);
            dirty_ = true;
            return;
        }
        const Value current = slot(state_, key);
        Value proposal;
        double log_ratio = 0.0;
        if (dist.is_continuous()) {
            const double scale = settings_.proposal_scale ? *settings_.proposal_scale : 0.5 * dist.stddev();
            proposal = Value::real(current.as_real() + scale * rng_.normal());
            log_ratio = dist.log_density(proposal) - dist.log_density(current);
            if (!(log_ratio > -std::numeric_limits<double>::infinity())) return;
        } else {
            proposal = dist.sample(rng_);
            if (proposal == current) return;
        }
        candidate_ = state_;
        ReplayChooser replay(rng_, &key, proposal);
        log_ratio += ev_.run(candidate_, replay, true, &key);
        if (!ev_.evidence_holds(candidate_)) return;
        if (log_ratio >= 0.0 || std::log(rng_.uniform_pos()) < log_ratio) {
            std::swap(state_, candidate_);
            dirty_ = false;
        }
    }

    /// Independent prior proposal of the whole trace; with indicator likelihood the
    /// acceptance probability is exactly the evidence indicator.
    void global_move() {
        ForwardChooser fwd(rng_);
        candidate_ = ev_.make_trace();
        ev_.run(candidate_, fwd, true);
        if (ev_.evidence_holds(candidate_)) {
            std::swap(state_, candidate_);
            dirty_ = false;
        }
    }

    const GenerativeModel& model_;
    Evaluator ev_;
    Rng rng_;
    const ChainSettings& settings_;
    bool has_evidence_;
    Trace state_, candidate_;
    bool dirty_ = false;
};

}  // namespace

SampleSet metropolis_sample(const GenerativeModel& model, std::size_t n, std::uint64_t seed,
                            const ChainSettings& settings) {
    require_positive(n);
    if (settings.chains < 1) throw InferenceError("metropolis: chains must be positive");
    if (settings.burn_in < 0) throw InferenceError("metropolis: burn-in must be nonnegative");
    if (settings.thinning < 1) throw InferenceError("metropolis: thinning must be positive");
    if (settings.proposal_scale && !(*settings.proposal_scale > 0.0))
        throw InferenceError("metropolis: proposal scale must be positive");
    const auto chains = static_cast<std::size_t>(settings.chains);
    if (n % chains != 0)
        throw InferenceError("metropolis: " + std::to_string(n) + " samples do not split evenly over " +
                             std::to_string(chains) + " chains");
    const std::size_t per_chain = n / chains;

    std::vector<SampleSet> parts(chains);
    std::vector<std::exception_ptr> errors(chains);
    auto work = [&](std::size_t c) {
        try {
            parts[c] = empty_set(model, seed, Method::Metropolis, per_chain);
            Chain chain(model, seed, static_cast<int>(c), settings);
            chain.run(per_chain, parts[c]);
        } catch (...) {
            errors[c] = std::current_exception();
        }
    };
    if (settings.parallel && chains > 1) {
        std::vector<std::thread> threads;
        for (std::size_t c = 0; c < chains; ++c) threads.emplace_back(work, c);
        for (auto& th : threads) th.join();
    } else {
        for (std::size_t c = 0; c < chains; ++c) work(c);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    SampleSet s = empty_set(model, seed, Method::Metropolis, n);
    s.chain_ids.emplace();
    for (std::size_t c = 0; c < chains; ++c) {
        for (std::size_t q = 0; q < s.columns.size(); ++q)
            s.columns[q].insert(s.columns[q].end(), parts[c].columns[q].begin(), parts[c].columns[q].end());
        s.chain_ids->insert(s.chain_ids->end(), per_chain, static_cast<int>(c));
    }
    return s;
}

// ----------------------------------------------------------------- Enumeration

namespace {

class PathChooser final : public Chooser {
public:
    struct Step {
        std::vector<std::pair<Value, double>> support;
        std::size_t choice = 0;
    };

    Value choose(const SiteKey&, const DistSpec& dist, const Value*) override {
        if (depth_ == path_.size()) {
            std::vector<std::pair<Value, double>> sup;
            try {
                sup = dist.support();
            } catch (const ModelError&) {
                throw InferenceError("model is not enumerable: it contains the continuous distribution " +
                                     dist.describe());
            }
            path_.push_back(Step{std::move(sup), 0});
        }
        const Step& step = path_[depth_++];
        prob_ *= step.support[step.choice].second;
        return step.support[step.choice].first;
    }

    void reset() {
        depth_ = 0;
        prob_ = 1.0;
    }
    double prob() const { return prob_; }

    /// Moves to the next path in lexicographic order; false when exhausted.
    bool advance() {
        path_.resize(depth_);
        while (!path_.empty()) {
            Step& last = path_.back();
            if (++last.choice < last.support.size()) return true;
            path_.pop_back();
        }
        return false;
    }

private:
    std::vector<Step> path_;
    std::size_t depth_ = 0;
    double prob_ = 1.0;
};

}  // namespace

ExactDistribution enumerate_exact(const GenerativeModel& model) {
    constexpr std::uint64_t kMaxPaths = 50'000'000;
    Evaluator ev(model);
    PathChooser chooser;
    Trace t = ev.make_trace();
    ExactDistribution out;
    out.names = model.query_names();
    double evidence = 0.0;
    std::uint64_t paths = 0;
    do {
        if (++paths > kMaxPaths) throw InferenceError("enumeration exceeded " + std::to_string(kMaxPaths) + " paths");
        chooser.reset();
        ev.run(t, chooser, false);
        if (chooser.prob() > 0.0 && ev.evidence_holds(t)) {
            std::vector<Value> key;
            key.reserve(model.queries().size());
            for (const auto& q : model.queries()) key.push_back(t.values[q.node.value]);
            out.outcomes[std::move(key)] += chooser.prob();
            evidence += chooser.prob();
        }
    } while (chooser.advance());
    if (!(evidence > 0.0)) throw InferenceError("impossible evidence: the observations have probability zero");
    for (auto& [key, p] : out.outcomes) p /= evidence;
    return out;
}

SampleSet resample_systematic(const SampleSet& samples, std::size_t n, std::uint64_t seed) {
    require_positive(n);
    const std::size_t m = samples.size();
    const double total = samples.total_weight();
    if (m == 0 || !(total > 0.0) || !std::isfinite(total)) throw InferenceError("resampling needs positive weights");
    SampleSet out;
    out.names = samples.names;
    out.columns.assign(samples.names.size(), {});
    out.seed = seed;
    out.method = samples.method;
    Rng rng(seed, 0);
    const double step = total / static_cast<double>(n);
    double u = rng.uniform() * step;
    double cum = 0.0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double target = u + step * static_cast<double>(i);
        while (j < m) {
            const double w = samples.weights ? (*samples.weights)[j] : 1.0;
            if (cum + w > target) break;
            cum += w;
            ++j;
        }
        const std::size_t row = std::min(j, m - 1);
        for (std::size_t q = 0; q < out.columns.size(); ++q) out.columns[q].push_back(samples.columns[q][row]);
    }
    return out;
}

}  // namespace leakscope
