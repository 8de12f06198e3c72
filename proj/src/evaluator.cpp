#include "evaluator.hpp"

#include <cmath>
#include <limits>

#include "leakscope/errors.hpp"

namespace leakscope::detail {

Evaluator::Evaluator(const GenerativeModel& model)
    : model_(model), graph_(model.graph()), analysis_(model.analysis()) {}

Trace Evaluator::make_trace() const {
    Trace t;
    t.values.resize(graph_.nodes.size());
    t.logp.assign(graph_.nodes.size(), 0.0);
    t.arrays.resize(graph_.array_slots);
    return t;
}

const NodeDef& Evaluator::def_at(const SiteKey& key) const {
    const NodeDef& top = graph_.nodes[key.node];
    if (key.index < 0) return top;
    return (*top.elements)[static_cast<std::size_t>(key.index)].nodes[key.local];
}

bool Evaluator::influential(const SiteKey& key) const {
    if (key.index < 0) return analysis_.influential[key.node];
    const NodeDef& top = graph_.nodes[key.node];
    return analysis_.element_influential[top.slot][static_cast<std::size_t>(key.index)][key.local];
}

std::string Evaluator::label(const SiteKey& key) const {
    std::string out = model_.node_label(NodeId{key.node});
    if (key.index >= 0) {
        out += "[" + std::to_string(key.index) + "]";
        const NodeDef& d = def_at(key);
        out += "." + (d.name.empty() ? "#" + std::to_string(key.local) : d.name);
    }
    return out;
}

void Evaluator::gather(const NodeDef& def, const Trace& t, const ElementState* es) {
    scratch_.clear();
    for (const auto& p : def.parents) scratch_.push_back(p.outer ? t.values[p.index] : es->values[p.index]);
}

const DistSpec& Evaluator::build_dist(const NodeDef& def, const SiteKey& key) {
    if (def.fixed) return *def.fixed;
    try {
        built_ = def.builder(scratch_);
        return built_;
    } catch (const std::exception& e) {
        throw SamplingError("node " + label(key) + ": " + e.what());
    }
}

Value Evaluator::apply(const NodeDef& def, const SiteKey& key) {
    try {
        return def.fn(scratch_);
    } catch (const SamplingError&) {
        throw;
    } catch (const std::exception& e) {
        throw SamplingError("derived node " + label(key) + " failed: " + e.what());
    }
}

DistSpec Evaluator::dist_at(const Trace& t, const SiteKey& key) {
    const NodeDef& def = def_at(key);
    if (def.fixed) return *def.fixed;
    const ElementState* es = nullptr;
    if (key.index >= 0) es = &t.arrays[graph_.nodes[key.node].slot][static_cast<std::size_t>(key.index)];
    gather(def, t, es);
    return build_dist(def, key);
}

double Evaluator::run(Trace& t, Chooser& chooser, bool track_logp, const SiteKey* exclude) {
    double delta = 0.0;
    const std::uint32_t n = static_cast<std::uint32_t>(graph_.nodes.size());
    for (std::uint32_t id = 0; id < n; ++id) {
        const NodeDef& def = graph_.nodes[id];
        switch (def.kind) {
            case NodeKind::Stochastic: {
                const SiteKey key{id, -1, 0};
                gather(def, t, nullptr);
                const DistSpec& dist = build_dist(def, key);
                Value v = chooser.choose(key, dist, &t.values[id]);
                if (track_logp && !def.parents.empty()) {
                    const double lp = dist.log_density(v);
                    if (!(exclude && *exclude == key)) delta += lp - t.logp[id];
                    t.logp[id] = lp;
                }
                t.values[id] = std::move(v);
                break;
            }
            case NodeKind::Deterministic: {
                gather(def, t, nullptr);
                t.values[id] = apply(def, SiteKey{id, -1, 0});
                break;
            }
            case NodeKind::Array: {
                const Value& size_v = t.values[def.size_node];
                if (!size_v.is_int())
                    throw SamplingError("array " + model_.node_label(NodeId{id}) + " needs an Int size, got " +
                                        size_v.to_string());
                const std::int64_t size = size_v.as_int();
                if (size < 0)
                    throw SamplingError("array " + model_.node_label(NodeId{id}) + " drew negative size " +
                                        std::to_string(size));
                if (size > def.max_size)
                    throw SamplingError("array " + model_.node_label(NodeId{id}) + " size exceeds its bound");
                auto& elems = t.arrays[def.slot];
                elems.resize(static_cast<std::size_t>(size));
                std::vector<Value> items;
                items.reserve(elems.size());
                for (std::size_t i = 0; i < elems.size(); ++i) {
                    const ElementGraph& eg = (*def.elements)[i];
                    ElementState& es = elems[i];
                    const bool fresh = es.values.empty();
                    if (fresh) {
                        es.values.resize(eg.nodes.size());
                        es.logp.assign(eg.nodes.size(), 0.0);
                    }
                    for (std::uint32_t l = 0; l < eg.nodes.size(); ++l) {
                        const NodeDef& ld = eg.nodes[l];
                        const SiteKey key{id, static_cast<std::int64_t>(i), l};
                        gather(ld, t, &es);
                        if (ld.kind == NodeKind::Stochastic) {
                            const DistSpec& dist = build_dist(ld, key);
                            Value v = chooser.choose(key, dist, fresh ? nullptr : &es.values[l]);
                            if (track_logp && !ld.parents.empty()) {
                                const double lp = dist.log_density(v);
                                if (!fresh && !(exclude && *exclude == key)) delta += lp - es.logp[l];
                                es.logp[l] = lp;
                            }
                            es.values[l] = std::move(v);
                        } else {
                            es.values[l] = apply(ld, key);
                        }
                    }
                    items.push_back(es.values[eg.result]);
                }
                t.values[id] = Value::list(std::move(items));
                break;
            }
        }
    }
    if (std::isnan(delta)) delta = -std::numeric_limits<double>::infinity();
    return delta;
}

bool Evaluator::evidence_holds(const Trace& t) const {
    for (const auto& [target, obs] : model_.observations()) {
        bool ok;
        try {
            ok = obs.satisfied(t.values[target.value]);
        } catch (const std::exception& e) {
            throw SamplingError("observation on " + model_.node_label(target) + ": " + e.what());
        }
        if (!ok) return false;
    }
    return true;
}

}  // namespace leakscope::detail
