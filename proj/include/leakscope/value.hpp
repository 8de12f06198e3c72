#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace leakscope {

enum class ValueKind : std::uint8_t { Real, Int, Bool, Symbol, Tuple, List };

const char* to_string(ValueKind kind);

/// Interned string. Equality is by id; ordering is by text so that ordered
/// containers do not depend on interning order.
class Symbol {
public:
    explicit Symbol(std::string_view text);

    const std::string& text() const;
    std::uint32_t id() const { return id_; }

    friend bool operator==(Symbol a, Symbol b) { return a.id_ == b.id_; }
    friend std::strong_ordering operator<=>(Symbol a, Symbol b);

private:
    std::uint32_t id_;
};

class Value;

/// Immutable, shared sequence payload for Tuple and List values.
struct Items {
    std::shared_ptr<const std::vector<Value>> data;

    std::span<const Value> view() const;
    std::size_t size() const;
};

/// Tagged runtime value flowing through models and sample sets. No implicit
/// conversion between Int and Real.
class Value {
public:
    Value() : rep_(0.0) {}

    static Value real(double v) { return Value(Rep(std::in_place_index<0>, v)); }
    static Value integer(std::int64_t v) { return Value(Rep(std::in_place_index<1>, v)); }
    static Value boolean(bool v) { return Value(Rep(std::in_place_index<2>, v)); }
    static Value symbol(std::string_view text) { return Value(Rep(std::in_place_index<3>, Symbol(text))); }
    static Value symbol(Symbol s) { return Value(Rep(std::in_place_index<3>, s)); }
    static Value tuple(std::vector<Value> items);
    static Value tuple(std::initializer_list<Value> items) { return tuple(std::vector<Value>(items)); }
    static Value list(std::vector<Value> items);

    ValueKind kind() const { return static_cast<ValueKind>(rep_.index()); }
    bool is_real() const { return kind() == ValueKind::Real; }
    bool is_int() const { return kind() == ValueKind::Int; }
    bool is_bool() const { return kind() == ValueKind::Bool; }
    bool is_symbol() const { return kind() == ValueKind::Symbol; }
    bool is_tuple() const { return kind() == ValueKind::Tuple; }
    bool is_list() const { return kind() == ValueKind::List; }
    /// Int, Bool, Symbol and composites of countable values.
    bool is_countable() const;

    // Accessors throw DomainError on a tag mismatch.
    double as_real() const;
    std::int64_t as_int() const;
    bool as_bool() const;
    Symbol as_symbol() const;
    std::span<const Value> items() const;  // Tuple or List
    const Value& operator[](std::size_t i) const;

    /// Real or Int as double; anything else throws.
    double to_double() const;

    std::string to_string() const;
    std::size_t hash() const;

    friend bool operator==(const Value& a, const Value& b);
    friend std::strong_ordering operator<=>(const Value& a, const Value& b);

private:
    struct TupleTag {
        Items items;
    };
    struct ListTag {
        Items items;
    };
    using Rep = std::variant<double, std::int64_t, bool, Symbol, TupleTag, ListTag>;

    explicit Value(Rep rep) : rep_(std::move(rep)) {}

    Rep rep_;
};

struct ValueHash {
    std::size_t operator()(const Value& v) const { return v.hash(); }
};

struct ValueVectorHash {
    std::size_t operator()(const std::vector<Value>& vs) const;
};

/// Numeric values, whether Int or Real, as doubles.
std::vector<double> to_doubles(std::span<const Value> values);

}  // namespace leakscope
