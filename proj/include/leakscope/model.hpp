#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "leakscope/dist.hpp"
#include "leakscope/value.hpp"

namespace leakscope {

struct NodeId {
    std::uint32_t value = 0;
    friend auto operator<=>(NodeId, NodeId) = default;
};

using DistBuilder = std::function<DistSpec(std::span<const Value>)>;
using DerivedFn = std::function<Value(std::span<const Value>)>;
using ValuePredicate = std::function<bool(const Value&)>;

struct NodeOptions {
    std::string name;
    /// Kind of the node's values, when it cannot be inferred (builders with parents, derived nodes).
    std::optional<ValueKind> kind;
};

/// Evidence attached to a node. Interval is half-open, lo <= x < hi.
class Observation {
public:
    enum class Type { Interval, Equals, Predicate };

    static Observation interval(double lo, double hi);
    static Observation equals(Value v);
    static Observation predicate(ValuePredicate pred, std::string label = "predicate");

    Type type() const { return type_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    const Value& value() const { return value_; }
    bool satisfied(const Value& v) const;
    std::string describe() const;

private:
    Observation() = default;

    Type type_ = Type::Predicate;
    double lo_ = 0.0, hi_ = 0.0;
    Value value_;
    ValuePredicate pred_;
    std::string label_;
};

namespace detail {

enum class NodeKind : std::uint8_t { Stochastic, Deterministic, Array };

/// Parent reference inside an array element: either a node of the element
/// itself (local) or a top-level node declared before the array.
struct Ref {
    bool outer = true;
    std::uint32_t index = 0;
    friend bool operator==(Ref, Ref) = default;
};

struct ElementGraph;

struct NodeDef {
    NodeKind kind = NodeKind::Deterministic;
    std::string name;
    std::optional<ValueKind> value_kind;
    std::vector<Ref> parents;
    DistBuilder builder;
    std::optional<DistSpec> fixed;  // parentless stochastic nodes
    DerivedFn fn;
    // Array nodes only.
    std::uint32_t size_node = 0;
    std::uint32_t slot = 0;
    std::int64_t max_size = 0;
    std::shared_ptr<const std::vector<ElementGraph>> elements;
};

struct ElementGraph {
    std::vector<NodeDef> nodes;
    std::uint32_t result = 0;
};

struct Graph {
    std::vector<NodeDef> nodes;
    std::uint32_t array_slots = 0;
};

/// Static dependency facts used by the samplers.
struct Analysis {
    std::vector<bool> observed;
    /// A site is influential when a change to it can alter an observation
    /// outcome, the distribution of another stochastic site, or array structure.
    std::vector<bool> influential;
    std::vector<std::vector<std::vector<bool>>> element_influential;  // [slot][index][local]
    std::vector<std::vector<std::uint32_t>> observations_by_node;
};

}  // namespace detail

class ModelBuilder;

/// Scope handed to an array element builder; nodes created here belong to one element.
class ElementScope {
public:
    using Ref = detail::Ref;

    Ref outer(NodeId id);
    Ref constant(Value v, std::string name = {});
    Ref stochastic(DistSpec dist, std::string name = {});
    Ref stochastic(DistBuilder builder, std::vector<Ref> parents, std::string name = {});
    Ref derived(DerivedFn fn, std::vector<Ref> parents, std::string name = {});
    Ref tuple(std::vector<Ref> parts, std::string name = {});

private:
    friend class ModelBuilder;
    ElementScope(std::uint32_t array_id, std::int64_t index) : array_id_(array_id), index_(index) {}
    void check(const Ref& r) const;
    Ref push(detail::NodeDef def);

    std::uint32_t array_id_;
    std::int64_t index_;
    std::vector<detail::NodeDef> nodes_;
};

using ElementBuilder = std::function<ElementScope::Ref(ElementScope&, std::int64_t index)>;

/// Immutable generative model: topologically ordered nodes, evidence, and
/// named query variables. Copies share the node graph.
class GenerativeModel {
public:
    struct Query {
        std::string name;
        NodeId node;
    };

    std::size_t node_count() const { return graph_->nodes.size(); }
    const std::string& node_name(NodeId id) const;
    /// Label used in diagnostics: the node name, or "#<id>".
    std::string node_label(NodeId id) const;
    std::optional<NodeId> find(std::string_view name) const;

    const std::vector<std::pair<NodeId, Observation>>& observations() const { return observations_; }
    const std::vector<Query>& queries() const { return queries_; }
    std::vector<std::string> query_names() const;
    NodeId query_node(std::string_view name) const;

    GenerativeModel observe(NodeId target, Observation obs) const;
    GenerativeModel query(std::string name, NodeId target) const;
    /// Same model with only the named queries, in the given order.
    GenerativeModel select_queries(const std::vector<std::string>& names) const;
    GenerativeModel without_observations() const;
    /// Builder holding a copy of this model, for adding derived nodes.
    ModelBuilder extend() const;

    const detail::Graph& graph() const { return *graph_; }
    const detail::Analysis& analysis() const { return *analysis_; }

private:
    friend class ModelBuilder;
    GenerativeModel(std::shared_ptr<const detail::Graph> graph, std::vector<std::pair<NodeId, Observation>> obs,
                    std::vector<Query> queries);
    void check_observation(NodeId target, const Observation& obs) const;

    std::shared_ptr<const detail::Graph> graph_;
    std::vector<std::pair<NodeId, Observation>> observations_;
    std::vector<Query> queries_;
    std::shared_ptr<const detail::Analysis> analysis_;
};

/// Single-threaded construction of a GenerativeModel. Parents must exist
/// before children, which makes the graph acyclic by construction.
class ModelBuilder {
public:
    ModelBuilder();

    /// Dirac node; forward sampling always yields v.
    NodeId constant(Value v, NodeOptions opts = {});
    NodeId stochastic(DistSpec dist, NodeOptions opts = {});
    /// Distribution parameters depend on parent draws (monadic bind).
    NodeId stochastic(DistBuilder builder, std::vector<NodeId> parents, NodeOptions opts = {});
    /// Pure function of the parents (monadic lift).
    NodeId derived(DerivedFn fn, std::vector<NodeId> parents, NodeOptions opts = {});
    /// List-valued node of `size` elements, element i built by builder(scope, i).
    /// The size node must be a parentless Int distribution with bounded support.
    NodeId array_of(NodeId size, const ElementBuilder& builder, NodeOptions opts = {});

    ModelBuilder& observe(NodeId target, Observation obs);
    ModelBuilder& query(std::string name, NodeId target);
    ModelBuilder& clear_queries();

    std::optional<NodeId> find(std::string_view name) const;
    std::optional<ValueKind> kind_of(NodeId id) const;

    GenerativeModel finalize() const;

private:
    friend class GenerativeModel;
    void check_parent(NodeId id) const;
    NodeId push(detail::NodeDef def);

    std::shared_ptr<detail::Graph> graph_;
    std::vector<std::pair<NodeId, Observation>> observations_;
    std::vector<GenerativeModel::Query> queries_;
};

}  // namespace leakscope
