#include "leakscope/sample_set.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "leakscope/errors.hpp"

namespace leakscope {

const char* to_string(Method m) {
    switch (m) {
        case Method::Forward: return "forward";
        case Method::Rejection: return "rejection";
        case Method::Importance: return "importance";
        case Method::Metropolis: return "metropolis";
        case Method::Exact: return "exact";
    }
    return "?";
}

Method parse_method(std::string_view text) {
    for (auto m : {Method::Forward, Method::Rejection, Method::Importance, Method::Metropolis, Method::Exact})
        if (text == to_string(m)) return m;
    throw std::invalid_argument("unknown method '" + std::string(text) + "'");
}

bool SampleSet::has_column(std::string_view name) const {
    for (const auto& n : names)
        if (n == name) return true;
    return false;
}

const std::vector<Value>& SampleSet::column(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return columns[i];
    throw EstimationError("no column named '" + std::string(name) + "'");
}

bool SampleSet::is_weighted() const {
    if (!weights || weights->empty()) return false;
    const double w0 = weights->front();
    for (double w : *weights)
        if (w != w0) return true;
    return false;
}

double SampleSet::total_weight() const {
    if (!weights) return static_cast<double>(size());
    double s = 0.0;
    for (double w : *weights) s += w;
    return s;
}

std::map<int, std::size_t> SampleSet::chain_counts() const {
    std::map<int, std::size_t> out;
    if (!chain_ids) {
        if (size() > 0) out[0] = size();
        return out;
    }
    for (int c : *chain_ids) ++out[c];
    return out;
}

std::size_t ExactDistribution::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return i;
    throw EstimationError("no query named '" + std::string(name) + "'");
}

std::map<Value, double> ExactDistribution::pmf(std::string_view name) const {
    const std::size_t i = index_of(name);
    std::map<Value, double> out;
    for (const auto& [key, p] : outcomes) out[key[i]] += p;
    return out;
}

ExactDistribution ExactDistribution::marginal(const std::vector<std::string>& keep) const {
    std::vector<std::size_t> idx;
    for (const auto& n : keep) idx.push_back(index_of(n));
    ExactDistribution out;
    out.names = keep;
    for (const auto& [key, p] : outcomes) {
        std::vector<Value> k;
        k.reserve(idx.size());
        for (auto i : idx) k.push_back(key[i]);
        out.outcomes[std::move(k)] += p;
    }
    return out;
}

double ExactDistribution::total() const {
    double s = 0.0;
    for (const auto& [key, p] : outcomes) s += p;
    return s;
}

SampleSet ExactDistribution::to_sample_set() const {
    SampleSet s;
    s.names = names;
    s.columns.assign(names.size(), {});
    s.weights.emplace();
    s.method = Method::Exact;
    for (const auto& [key, p] : outcomes) {
        for (std::size_t i = 0; i < key.size(); ++i) s.columns[i].push_back(key[i]);
        s.weights->push_back(p);
    }
    return s;
}

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

void write_csv(const SampleSet& s, std::ostream& os) {
    for (const auto& n : s.names) os << csv_field(n) << ',';
    os << "weight,chain\n";
    for (std::size_t r = 0; r < s.size(); ++r) {
        for (const auto& col : s.columns) os << csv_field(col[r].to_string()) << ',';
        os << (s.weights ? format_double((*s.weights)[r]) : "1") << ',' << (s.chain_ids ? (*s.chain_ids)[r] : 0)
           << "\n";
    }
}

}  // namespace leakscope
