#include "leakscope/value.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <deque>
#include <functional>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

#include "leakscope/errors.hpp"

namespace leakscope {

namespace {

class SymbolTable {
public:
    std::uint32_t intern(std::string_view text) {
        {
            std::shared_lock lock(mutex_);
            if (auto it = ids_.find(std::string(text)); it != ids_.end()) return it->second;
        }
        std::unique_lock lock(mutex_);
        auto [it, inserted] = ids_.try_emplace(std::string(text), static_cast<std::uint32_t>(texts_.size()));
        if (inserted) texts_.emplace_back(text);
        return it->second;
    }

    const std::string& text(std::uint32_t id) {
        std::shared_lock lock(mutex_);
        return texts_[id];
    }

private:
    std::shared_mutex mutex_;
    std::unordered_map<std::string, std::uint32_t> ids_;
    std::deque<std::string> texts_;  // element references stay valid on push_back
};

SymbolTable& symbols() {
    static SymbolTable table;
    return table;
}

std::size_t mix(std::size_t seed, std::size_t h) {
    return seed ^ (h + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

// NaN sorts after every number and equals itself; -0.0 equals 0.0.
std::strong_ordering compare_doubles(double a, double b) {
    const bool na = std::isnan(a);
    const bool nb = std::isnan(b);
    if (na || nb) return na == nb ? std::strong_ordering::equal : (na ? std::strong_ordering::greater : std::strong_ordering::less);
    if (a < b) return std::strong_ordering::less;
    if (b < a) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::strong_ordering compare_items(std::span<const Value> a, std::span<const Value> b) {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (auto c = a[i] <=> b[i]; c != 0) return c;
    }
    return a.size() <=> b.size();
}

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

const char* to_string(ValueKind kind) {
    switch (kind) {
        case ValueKind::Real: return "real";
        case ValueKind::Int: return "int";
        case ValueKind::Bool: return "bool";
        case ValueKind::Symbol: return "symbol";
        case ValueKind::Tuple: return "tuple";
        case ValueKind::List: return "list";
    }
    return "?";
}

Symbol::Symbol(std::string_view text) : id_(symbols().intern(text)) {}

const std::string& Symbol::text() const { return symbols().text(id_); }

std::strong_ordering operator<=>(Symbol a, Symbol b) {
    if (a.id_ == b.id_) return std::strong_ordering::equal;
    const int c = a.text().compare(b.text());
    return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
}

std::span<const Value> Items::view() const { return data ? std::span<const Value>(*data) : std::span<const Value>(); }

std::size_t Items::size() const { return data ? data->size() : 0; }

Value Value::tuple(std::vector<Value> items) {
    return Value(Rep(std::in_place_index<4>, TupleTag{Items{std::make_shared<const std::vector<Value>>(std::move(items))}}));
}

Value Value::list(std::vector<Value> items) {
    return Value(Rep(std::in_place_index<5>, ListTag{Items{std::make_shared<const std::vector<Value>>(std::move(items))}}));
}

bool Value::is_countable() const {
    switch (kind()) {
        case ValueKind::Real: return false;
        case ValueKind::Int:
        case ValueKind::Bool:
        case ValueKind::Symbol: return true;
        case ValueKind::Tuple:
        case ValueKind::List:
            for (const auto& v : items())
                if (!v.is_countable()) return false;
            return true;
    }
    return false;
}

double Value::as_real() const {
    if (auto p = std::get_if<0>(&rep_)) return *p;
    throw DomainError(std::string("expected real value, got ") + leakscope::to_string(kind()));
}

std::int64_t Value::as_int() const {
    if (auto p = std::get_if<1>(&rep_)) return *p;
    throw DomainError(std::string("expected int value, got ") + leakscope::to_string(kind()));
}

bool Value::as_bool() const {
    if (auto p = std::get_if<2>(&rep_)) return *p;
    throw DomainError(std::string("expected bool value, got ") + leakscope::to_string(kind()));
}

Symbol Value::as_symbol() const {
    if (auto p = std::get_if<3>(&rep_)) return *p;
    throw DomainError(std::string("expected symbol value, got ") + leakscope::to_string(kind()));
}

std::span<const Value> Value::items() const {
    if (auto p = std::get_if<4>(&rep_)) return p->items.view();
    if (auto p = std::get_if<5>(&rep_)) return p->items.view();
    throw DomainError(std::string("expected tuple or list value, got ") + leakscope::to_string(kind()));
}

const Value& Value::operator[](std::size_t i) const {
    auto xs = items();
    if (i >= xs.size()) throw DomainError("index " + std::to_string(i) + " out of range for " + to_string());
    return xs[i];
}

double Value::to_double() const {
    if (auto p = std::get_if<0>(&rep_)) return *p;
    if (auto p = std::get_if<1>(&rep_)) return static_cast<double>(*p);
    throw DomainError(std::string("expected numeric value, got ") + leakscope::to_string(kind()));
}

std::string Value::to_string() const {
    switch (kind()) {
        case ValueKind::Real: return format_real(std::get<0>(rep_));
        case ValueKind::Int: return std::to_string(std::get<1>(rep_));
        case ValueKind::Bool: return std::get<2>(rep_) ? "true" : "false";
        case ValueKind::Symbol: return std::get<3>(rep_).text();
        case ValueKind::Tuple:
        case ValueKind::List: {
            const bool tup = kind() == ValueKind::Tuple;
            std::string out(1, tup ? '(' : '[');
            bool first = true;
            for (const auto& v : items()) {
                if (!first) out += ',';
                first = false;
                out += v.to_string();
            }
            out += tup ? ')' : ']';
            return out;
        }
    }
    return {};
}

std::size_t Value::hash() const {
    std::size_t h = static_cast<std::size_t>(kind()) * 0x100000001b3ULL;
    switch (kind()) {
        case ValueKind::Real: {
            double d = std::get<0>(rep_);
            if (d == 0.0) d = 0.0;
            std::uint64_t bits;
            std::memcpy(&bits, &d, sizeof bits);
            return mix(h, std::hash<std::uint64_t>{}(bits));
        }
        case ValueKind::Int: return mix(h, std::hash<std::int64_t>{}(std::get<1>(rep_)));
        case ValueKind::Bool: return mix(h, std::get<2>(rep_) ? 1 : 2);
        case ValueKind::Symbol: return mix(h, std::get<3>(rep_).id());
        case ValueKind::Tuple:
        case ValueKind::List:
            for (const auto& v : items()) h = mix(h, v.hash());
            return h;
    }
    return h;
}

bool operator==(const Value& a, const Value& b) { return (a <=> b) == 0; }

std::strong_ordering operator<=>(const Value& a, const Value& b) {
    if (a.kind() != b.kind()) return a.kind() <=> b.kind();
    switch (a.kind()) {
        case ValueKind::Real: return compare_doubles(std::get<0>(a.rep_), std::get<0>(b.rep_));
        case ValueKind::Int: return std::get<1>(a.rep_) <=> std::get<1>(b.rep_);
        case ValueKind::Bool: return std::get<2>(a.rep_) <=> std::get<2>(b.rep_);
        case ValueKind::Symbol: return std::get<3>(a.rep_) <=> std::get<3>(b.rep_);
        case ValueKind::Tuple:
        case ValueKind::List: return compare_items(a.items(), b.items());
    }
    return std::strong_ordering::equal;
}

std::size_t ValueVectorHash::operator()(const std::vector<Value>& vs) const {
    std::size_t h = vs.size();
    for (const auto& v : vs) h = mix(h, v.hash());
    return h;
}

std::vector<double> to_doubles(std::span<const Value> values) {
    std::vector<double> out;
    out.reserve(values.size());
    for (const auto& v : values) out.push_back(v.to_double());
    return out;
}

}  // namespace leakscope
