#include "leakscope/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "leakscope/errors.hpp"

namespace leakscope {

using detail::ElementGraph;
using detail::NodeDef;
using detail::NodeKind;
using detail::Ref;

// ---------------------------------------------------------------- Observation

Observation Observation::interval(double lo, double hi) {
    if (!(lo < hi)) throw ModelError("interval observation requires lo < hi");
    Observation o;
    o.type_ = Type::Interval;
    o.lo_ = lo;
    o.hi_ = hi;
    return o;
}

Observation Observation::equals(Value v) {
    if (!v.is_countable())
        throw ModelError("equality observation on a real value has probability zero; use an interval");
    Observation o;
    o.type_ = Type::Equals;
    o.value_ = std::move(v);
    return o;
}

Observation Observation::predicate(ValuePredicate pred, std::string label) {
    if (!pred) throw ModelError("predicate observation needs a function");
    Observation o;
    o.type_ = Type::Predicate;
    o.pred_ = std::move(pred);
    o.label_ = std::move(label);
    return o;
}

bool Observation::satisfied(const Value& v) const {
    switch (type_) {
        case Type::Interval: {
            const double x = v.as_real();
            return x >= lo_ && x < hi_;
        }
        case Type::Equals: return v == value_;
        case Type::Predicate: return pred_(v);
    }
    return false;
}

std::string Observation::describe() const {
    char buf[96];
    switch (type_) {
        case Type::Interval:
            std::snprintf(buf, sizeof buf, "in [%.17g, %.17g)", lo_, hi_);
            return buf;
        case Type::Equals: return "== " + value_.to_string();
        case Type::Predicate: return label_;
    }
    return {};
}

// --------------------------------------------------------------- ElementScope

void ElementScope::check(const Ref& r) const {
    if (r.outer) {
        if (r.index >= array_id_)
            throw ModelError("array element refers to node #" + std::to_string(r.index) +
                             " which is not declared before the array");
    } else if (r.index >= nodes_.size()) {
        throw ModelError("array element refers to an unknown local node");
    }
}

Ref ElementScope::push(NodeDef def) {
    for (const auto& p : def.parents) check(p);
    nodes_.push_back(std::move(def));
    return Ref{false, static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Ref ElementScope::outer(NodeId id) {
    Ref r{true, id.value};
    check(r);
    return r;
}

Ref ElementScope::constant(Value v, std::string name) { return stochastic(DistSpec::constant(std::move(v)), std::move(name)); }

Ref ElementScope::stochastic(DistSpec dist, std::string name) {
    NodeDef def;
    def.kind = NodeKind::Stochastic;
    def.name = std::move(name);
    def.value_kind = dist.value_kind();
    def.fixed = std::move(dist);
    return push(std::move(def));
}

Ref ElementScope::stochastic(DistBuilder builder, std::vector<Ref> parents, std::string name) {
    if (parents.empty()) return stochastic(builder({}), std::move(name));
    NodeDef def;
    def.kind = NodeKind::Stochastic;
    def.name = std::move(name);
    def.builder = std::move(builder);
    def.parents = std::move(parents);
    return push(std::move(def));
}

Ref ElementScope::derived(DerivedFn fn, std::vector<Ref> parents, std::string name) {
    NodeDef def;
    def.kind = NodeKind::Deterministic;
    def.name = std::move(name);
    def.fn = std::move(fn);
    def.parents = std::move(parents);
    return push(std::move(def));
}

Ref ElementScope::tuple(std::vector<Ref> parts, std::string name) {
    auto r = derived([](std::span<const Value> xs) { return Value::tuple(std::vector<Value>(xs.begin(), xs.end())); },
                     std::move(parts), std::move(name));
    nodes_.back().value_kind = ValueKind::Tuple;
    return r;
}

// -------------------------------------------------------------- ModelBuilder

ModelBuilder::ModelBuilder() : graph_(std::make_shared<detail::Graph>()) {}

void ModelBuilder::check_parent(NodeId id) const {
    if (id.value >= graph_->nodes.size()) throw ModelError("unknown node #" + std::to_string(id.value));
}

NodeId ModelBuilder::push(NodeDef def) {
    if (!def.name.empty() && find(def.name))
        throw ModelError("duplicate node name '" + def.name + "'");
    graph_->nodes.push_back(std::move(def));
    return NodeId{static_cast<std::uint32_t>(graph_->nodes.size() - 1)};
}

NodeId ModelBuilder::constant(Value v, NodeOptions opts) {
    return stochastic(DistSpec::constant(std::move(v)), std::move(opts));
}

NodeId ModelBuilder::stochastic(DistSpec dist, NodeOptions opts) {
    NodeDef def;
    def.kind = NodeKind::Stochastic;
    def.name = std::move(opts.name);
    def.value_kind = opts.kind ? opts.kind : std::optional<ValueKind>(dist.value_kind());
    def.fixed = std::move(dist);
    return push(std::move(def));
}

NodeId ModelBuilder::stochastic(DistBuilder builder, std::vector<NodeId> parents, NodeOptions opts) {
    if (!builder) throw ModelError("stochastic node needs a distribution builder");
    if (parents.empty()) {
        try {
            return stochastic(builder({}), std::move(opts));
        } catch (const InvalidDistribution& e) {
            throw ModelError("node '" + opts.name + "': " + e.what());
        }
    }
    NodeDef def;
    def.kind = NodeKind::Stochastic;
    def.name = std::move(opts.name);
    def.value_kind = opts.kind;
    def.builder = std::move(builder);
    for (auto p : parents) {
        check_parent(p);
        def.parents.push_back(Ref{true, p.value});
    }
    return push(std::move(def));
}

NodeId ModelBuilder::derived(DerivedFn fn, std::vector<NodeId> parents, NodeOptions opts) {
    if (!fn) throw ModelError("derived node needs a function");
    NodeDef def;
    def.kind = NodeKind::Deterministic;
    def.name = std::move(opts.name);
    def.value_kind = opts.kind;
    def.fn = std::move(fn);
    for (auto p : parents) {
        check_parent(p);
        def.parents.push_back(Ref{true, p.value});
    }
    return push(std::move(def));
}

NodeId ModelBuilder::array_of(NodeId size, const ElementBuilder& builder, NodeOptions opts) {
    check_parent(size);
    const NodeDef& size_def = graph_->nodes[size.value];
    if (size_def.kind != NodeKind::Stochastic || !size_def.fixed)
        throw ModelError("array size must be a parentless distribution node");
    const std::int64_t max_size = size_def.fixed->max_int();

    const auto array_id = static_cast<std::uint32_t>(graph_->nodes.size());
    auto elements = std::make_shared<std::vector<ElementGraph>>();
    std::set<std::uint32_t> outer_refs;
    for (std::int64_t i = 0; i < max_size; ++i) {
        ElementScope scope(array_id, i);
        Ref result;
        try {
            result = builder(scope, i);
        } catch (const ModelError&) {
            throw;
        } catch (const std::exception& e) {
            throw ModelError("array element builder failed at index " + std::to_string(i) + ": " + e.what());
        }
        scope.check(result);
        if (result.outer)
            result = scope.derived([](std::span<const Value> xs) { return xs[0]; }, {result});
        for (const auto& node : scope.nodes_)
            for (const auto& p : node.parents)
                if (p.outer) outer_refs.insert(p.index);
        elements->push_back(ElementGraph{std::move(scope.nodes_), result.index});
    }

    NodeDef def;
    def.kind = NodeKind::Array;
    def.name = std::move(opts.name);
    def.value_kind = ValueKind::List;
    def.size_node = size.value;
    def.slot = graph_->array_slots++;
    def.max_size = max_size;
    def.elements = std::move(elements);
    def.parents.push_back(Ref{true, size.value});
    for (auto r : outer_refs)
        if (r != size.value) def.parents.push_back(Ref{true, r});
    return push(std::move(def));
}

ModelBuilder& ModelBuilder::observe(NodeId target, Observation obs) {
    check_parent(target);
    observations_.emplace_back(target, std::move(obs));
    return *this;
}

ModelBuilder& ModelBuilder::query(std::string name, NodeId target) {
    check_parent(target);
    for (const auto& q : queries_)
        if (q.name == name) throw ModelError("duplicate query name '" + name + "'");
    queries_.push_back({std::move(name), target});
    return *this;
}

ModelBuilder& ModelBuilder::clear_queries() {
    queries_.clear();
    return *this;
}

std::optional<NodeId> ModelBuilder::find(std::string_view name) const {
    for (std::size_t i = 0; i < graph_->nodes.size(); ++i)
        if (graph_->nodes[i].name == name) return NodeId{static_cast<std::uint32_t>(i)};
    return std::nullopt;
}

std::optional<ValueKind> ModelBuilder::kind_of(NodeId id) const {
    check_parent(id);
    return graph_->nodes[id.value].value_kind;
}

GenerativeModel ModelBuilder::finalize() const {
    return GenerativeModel(std::make_shared<const detail::Graph>(*graph_), observations_, queries_);
}

// ----------------------------------------------------------- GenerativeModel

namespace {

std::shared_ptr<const detail::Analysis> analyse(const detail::Graph& g,
                                                const std::vector<std::pair<NodeId, Observation>>& obs) {
    auto a = std::make_shared<detail::Analysis>();
    const std::size_t n = g.nodes.size();
    a->observed.assign(n, false);
    a->observations_by_node.assign(n, {});
    for (std::size_t i = 0; i < obs.size(); ++i) {
        a->observed[obs[i].first.value] = true;
        a->observations_by_node[obs[i].first.value].push_back(static_cast<std::uint32_t>(i));
    }

    std::vector<std::vector<std::uint32_t>> children(n);
    for (std::uint32_t c = 0; c < n; ++c)
        for (const auto& p : g.nodes[c].parents) children[p.index].push_back(c);

    a->influential.assign(n, false);
    for (std::size_t i = n; i-- > 0;) {
        bool infl = a->observed[i];
        for (auto c : children[i]) {
            const NodeKind k = g.nodes[c].kind;
            if (k != NodeKind::Deterministic || a->influential[c]) infl = true;
        }
        a->influential[i] = infl;
    }

    a->element_influential.resize(g.array_slots);
    for (std::uint32_t id = 0; id < n; ++id) {
        const NodeDef& arr = g.nodes[id];
        if (arr.kind != NodeKind::Array) continue;
        auto& per_index = a->element_influential[arr.slot];
        for (const auto& eg : *arr.elements) {
            const std::size_t m = eg.nodes.size();
            std::vector<std::vector<std::uint32_t>> kids(m);
            for (std::uint32_t c = 0; c < m; ++c)
                for (const auto& p : eg.nodes[c].parents)
                    if (!p.outer) kids[p.index].push_back(c);
            std::vector<bool> infl(m, false);
            for (std::size_t l = m; l-- > 0;) {
                bool f = (l == eg.result) && a->influential[id];
                for (auto c : kids[l])
                    if (eg.nodes[c].kind == NodeKind::Stochastic || infl[c]) f = true;
                infl[l] = f;
            }
            per_index.push_back(std::move(infl));
        }
    }
    return a;
}

}  // namespace

GenerativeModel::GenerativeModel(std::shared_ptr<const detail::Graph> graph,
                                 std::vector<std::pair<NodeId, Observation>> obs, std::vector<Query> queries)
    : graph_(std::move(graph)), observations_(std::move(obs)), queries_(std::move(queries)) {
    for (const auto& [target, o] : observations_) check_observation(target, o);
    analysis_ = analyse(*graph_, observations_);
}

void GenerativeModel::check_observation(NodeId target, const Observation& obs) const {
    if (target.value >= graph_->nodes.size()) throw ModelError("observation on unknown node");
    const auto& kind = graph_->nodes[target.value].value_kind;
    if (!kind) return;
    if (obs.type() == Observation::Type::Interval && *kind != ValueKind::Real)
        throw ModelError("interval observation on " + std::string(to_string(*kind)) + " node " + node_label(target) +
                         "; intervals need a real-valued node");
    if (obs.type() == Observation::Type::Equals && *kind == ValueKind::Real)
        throw ModelError("equality observation on real node " + node_label(target) + " has probability zero");
}

const std::string& GenerativeModel::node_name(NodeId id) const {
    if (id.value >= graph_->nodes.size()) throw ModelError("unknown node #" + std::to_string(id.value));
    return graph_->nodes[id.value].name;
}

std::string GenerativeModel::node_label(NodeId id) const {
    const auto& name = node_name(id);
    return name.empty() ? "#" + std::to_string(id.value) : "'" + name + "'";
}

std::optional<NodeId> GenerativeModel::find(std::string_view name) const {
    for (std::size_t i = 0; i < graph_->nodes.size(); ++i)
        if (graph_->nodes[i].name == name) return NodeId{static_cast<std::uint32_t>(i)};
    return std::nullopt;
}

std::vector<std::string> GenerativeModel::query_names() const {
    std::vector<std::string> out;
    for (const auto& q : queries_) out.push_back(q.name);
    return out;
}

NodeId GenerativeModel::query_node(std::string_view name) const {
    for (const auto& q : queries_)
        if (q.name == name) return q.node;
    throw ModelError("no query named '" + std::string(name) + "'");
}

GenerativeModel GenerativeModel::observe(NodeId target, Observation obs) const {
    auto o = observations_;
    o.emplace_back(target, std::move(obs));
    return GenerativeModel(graph_, std::move(o), queries_);
}

GenerativeModel GenerativeModel::query(std::string name, NodeId target) const {
    if (target.value >= graph_->nodes.size()) throw ModelError("query on unknown node");
    for (const auto& q : queries_)
        if (q.name == name) throw ModelError("duplicate query name '" + name + "'");
    auto qs = queries_;
    qs.push_back({std::move(name), target});
    return GenerativeModel(graph_, observations_, std::move(qs));
}

GenerativeModel GenerativeModel::select_queries(const std::vector<std::string>& names) const {
    std::vector<Query> qs;
    for (const auto& n : names) qs.push_back({n, query_node(n)});
    return GenerativeModel(graph_, observations_, std::move(qs));
}

GenerativeModel GenerativeModel::without_observations() const { return GenerativeModel(graph_, {}, queries_); }

ModelBuilder GenerativeModel::extend() const {
    ModelBuilder b;
    b.graph_ = std::make_shared<detail::Graph>(*graph_);
    b.observations_ = observations_;
    b.queries_ = queries_;
    return b;
}

}  // namespace leakscope
