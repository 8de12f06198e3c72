#pragma once

#include <cstdint>
#include <vector>

#include "leakscope/model.hpp"

namespace leakscope::detail {

/// Address of a stochastic site: top-level node (index < 0) or local node of array element `index`.
struct SiteKey {
    std::uint32_t node = 0;
    std::int64_t index = -1;
    std::uint32_t local = 0;
    friend bool operator==(const SiteKey&, const SiteKey&) = default;
};

struct ElementState {
    std::vector<Value> values;
    std::vector<double> logp;
};

/// One execution of a model. logp is only maintained for sites whose
/// distribution depends on parents; parentless sites never need it.
struct Trace {
    std::vector<Value> values;
    std::vector<double> logp;
    std::vector<std::vector<ElementState>> arrays;
};

class Chooser {
public:
    virtual ~Chooser() = default;
    /// Value for the site; `previous` is null when the site did not exist in the trace.
    virtual Value choose(const SiteKey& key, const DistSpec& dist, const Value* previous) = 0;
};

class Evaluator {
public:
    explicit Evaluator(const GenerativeModel& model);

    Trace make_trace() const;

    /// Recomputes every node in place. With track_logp, returns the summed log-density
    /// change of parented sites present before and after, skipping `exclude`.
    double run(Trace& t, Chooser& chooser, bool track_logp, const SiteKey* exclude = nullptr);

    bool evidence_holds(const Trace& t) const;
    Value query_value(const Trace& t, NodeId id) const { return t.values[id.value]; }

    /// Distribution of a site given the parent values currently in the trace.
    DistSpec dist_at(const Trace& t, const SiteKey& key);
    const NodeDef& def_at(const SiteKey& key) const;
    bool has_parents(const SiteKey& key) const { return !def_at(key).parents.empty(); }
    bool influential(const SiteKey& key) const;
    std::string label(const SiteKey& key) const;

    const GenerativeModel& model() const { return model_; }

private:
    /// The node's fixed distribution, or one built from scratch_ into built_.
    const DistSpec& build_dist(const NodeDef& def, const SiteKey& key);
    Value apply(const NodeDef& def, const SiteKey& key);
    void gather(const NodeDef& def, const Trace& t, const ElementState* es);

    const GenerativeModel& model_;
    const Graph& graph_;
    const Analysis& analysis_;
    std::vector<Value> scratch_;
    DistSpec built_ = DistSpec::constant(Value());
};

}  // namespace leakscope::detail
