#include "leakscope/dist.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "leakscope/errors.hpp"

namespace leakscope {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

std::int64_t sample_binomial(std::int64_t n, double p, Rng& rng) {
    if (p <= 0.0 || n == 0) return 0;
    if (p >= 1.0) return n;
    // Sequential inversion with the pmf carried in log space so that p(0)
    // may underflow without losing the rest of the mass.
    const double u = rng.uniform();
    const double log_ratio = std::log(p) - std::log1p(-p);
    double log_pmf = static_cast<double>(n) * std::log1p(-p);
    double cumulative = 0.0;
    for (std::int64_t k = 0; k < n; ++k) {
        cumulative += std::exp(log_pmf);
        if (u < cumulative) return k;
        log_pmf += std::log(static_cast<double>(n - k) / static_cast<double>(k + 1)) + log_ratio;
    }
    return n;
}

}  // namespace

double binomial_log_pmf(std::int64_t n, double p, std::int64_t k) {
    if (k < 0 || k > n) return kNegInf;
    if (p <= 0.0) return k == 0 ? 0.0 : kNegInf;
    if (p >= 1.0) return k == n ? 0.0 : kNegInf;
    const double dn = static_cast<double>(n);
    const double dk = static_cast<double>(k);
    return std::lgamma(dn + 1) - std::lgamma(dk + 1) - std::lgamma(dn - dk + 1) + dk * std::log(p) +
           (dn - dk) * std::log1p(-p);
}

DistSpec DistSpec::constant(Value v) { return DistSpec(Constant{std::move(v)}); }

DistSpec DistSpec::uniform(double lo, double hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
        throw InvalidDistribution("UniformContinuous requires finite lo < hi");
    return DistSpec(UniformContinuous{lo, hi});
}

DistSpec DistSpec::uniform_discrete(std::vector<Value> items) {
    return uniform_discrete(std::make_shared<const std::vector<Value>>(std::move(items)));
}

DistSpec DistSpec::uniform_discrete(std::shared_ptr<const std::vector<Value>> items) {
    if (!items || items->empty()) throw InvalidDistribution("UniformDiscrete requires a nonempty item list");
    return DistSpec(UniformDiscrete{std::move(items)});
}

DistSpec DistSpec::normal(double mu, double sigma) {
    if (!std::isfinite(mu) || !std::isfinite(sigma) || !(sigma > 0.0))
        throw InvalidDistribution("Normal requires finite mu and sigma > 0");
    return DistSpec(Normal{mu, sigma});
}

DistSpec DistSpec::binomial(std::int64_t n, double p) {
    if (n < 0 || !is_probability(p)) throw InvalidDistribution("Binomial requires n >= 0 and p in [0,1]");
    return DistSpec(Binomial{n, p});
}

DistSpec DistSpec::bernoulli(double p) {
    if (!is_probability(p)) throw InvalidDistribution("Bernoulli requires p in [0,1]");
    return DistSpec(Bernoulli{p});
}

DistSpec DistSpec::exponential(double rate) {
    if (!std::isfinite(rate) || !(rate > 0.0)) throw InvalidDistribution("Exponential requires rate > 0");
    return DistSpec(Exponential{rate});
}

Value DistSpec::sample(Rng& rng) const {
    return std::visit(
        Overloaded{
            [](const Constant& d) { return d.value; },
            [&](const UniformContinuous& d) { return Value::real(d.lo + (d.hi - d.lo) * rng.uniform()); },
            [&](const UniformDiscrete& d) { return (*d.items)[rng.below(d.items->size())]; },
            [&](const Normal& d) { return Value::real(d.mu + d.sigma * rng.normal()); },
            [&](const Binomial& d) { return Value::integer(sample_binomial(d.n, d.p, rng)); },
            [&](const Bernoulli& d) { return Value::boolean(rng.uniform() < d.p); },
            [&](const Exponential& d) { return Value::real(rng.exponential(d.rate)); },
        },
        rep_);
}

double DistSpec::log_density(const Value& v) const {
    return std::visit(
        Overloaded{
            [&](const Constant& d) { return v == d.value ? 0.0 : kNegInf; },
            [&](const UniformContinuous& d) {
                if (!v.is_real()) return kNegInf;
                const double x = v.as_real();
                return (x >= d.lo && x < d.hi) ? -std::log(d.hi - d.lo) : kNegInf;
            },
            [&](const UniformDiscrete& d) {
                std::size_t hits = 0;
                for (const auto& item : *d.items)
                    if (item == v) ++hits;
                return hits == 0 ? kNegInf
                                 : std::log(static_cast<double>(hits)) - std::log(static_cast<double>(d.items->size()));
            },
            [&](const Normal& d) {
                if (!v.is_real()) return kNegInf;
                const double z = (v.as_real() - d.mu) / d.sigma;
                return -0.5 * z * z - std::log(d.sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
            },
            [&](const Binomial& d) { return v.is_int() ? binomial_log_pmf(d.n, d.p, v.as_int()) : kNegInf; },
            [&](const Bernoulli& d) {
                if (!v.is_bool()) return kNegInf;
                const double q = v.as_bool() ? d.p : 1.0 - d.p;
                return q > 0.0 ? std::log(q) : kNegInf;
            },
            [&](const Exponential& d) {
                if (!v.is_real()) return kNegInf;
                const double x = v.as_real();
                return x >= 0.0 ? std::log(d.rate) - d.rate * x : kNegInf;
            },
        },
        rep_);
}

bool DistSpec::is_continuous() const {
    return std::holds_alternative<UniformContinuous>(rep_) || std::holds_alternative<Normal>(rep_) ||
           std::holds_alternative<Exponential>(rep_);
}

ValueKind DistSpec::value_kind() const {
    return std::visit(Overloaded{
                          [](const Constant& d) { return d.value.kind(); },
                          [](const UniformDiscrete& d) { return d.items->front().kind(); },
                          [](const Binomial&) { return ValueKind::Int; },
                          [](const Bernoulli&) { return ValueKind::Bool; },
                          [](const auto&) { return ValueKind::Real; },
                      },
                      rep_);
}

std::vector<std::pair<Value, double>> DistSpec::support() const {
    std::vector<std::pair<Value, double>> out;
    std::visit(Overloaded{
                   [&](const Constant& d) { out.emplace_back(d.value, 1.0); },
                   [&](const UniformDiscrete& d) {
                       const double w = 1.0 / static_cast<double>(d.items->size());
                       for (const auto& item : *d.items) out.emplace_back(item, w);
                   },
                   [&](const Binomial& d) {
                       for (std::int64_t k = 0; k <= d.n; ++k) {
                           const double pk = std::exp(binomial_log_pmf(d.n, d.p, k));
                           if (pk > 0.0) out.emplace_back(Value::integer(k), pk);
                       }
                   },
                   [&](const Bernoulli& d) {
                       if (d.p < 1.0) out.emplace_back(Value::boolean(false), 1.0 - d.p);
                       if (d.p > 0.0) out.emplace_back(Value::boolean(true), d.p);
                   },
                   [&](const auto&) { throw ModelError("continuous distribution " + describe() + " is not enumerable"); },
               },
               rep_);
    return out;
}

std::int64_t DistSpec::max_int() const {
    return std::visit(Overloaded{
                          [&](const Constant& d) -> std::int64_t {
                              if (!d.value.is_int()) throw ModelError("array size must be an Int, got " + describe());
                              return d.value.as_int();
                          },
                          [&](const UniformDiscrete& d) -> std::int64_t {
                              std::int64_t hi = std::numeric_limits<std::int64_t>::min();
                              for (const auto& item : *d.items) {
                                  if (!item.is_int()) throw ModelError("array size must be an Int, got " + describe());
                                  hi = std::max(hi, item.as_int());
                              }
                              return hi;
                          },
                          [](const Binomial& d) -> std::int64_t { return d.n; },
                          [&](const auto&) -> std::int64_t {
                              throw ModelError("array size needs a bounded Int distribution, got " + describe());
                          },
                      },
                      rep_);
}

double DistSpec::mean() const {
    return std::visit(Overloaded{
                          [](const Constant& d) { return d.value.to_double(); },
                          [](const UniformContinuous& d) { return 0.5 * (d.lo + d.hi); },
                          [](const UniformDiscrete& d) {
                              double s = 0.0;
                              for (const auto& item : *d.items) s += item.to_double();
                              return s / static_cast<double>(d.items->size());
                          },
                          [](const Normal& d) { return d.mu; },
                          [](const Binomial& d) { return static_cast<double>(d.n) * d.p; },
                          [](const Bernoulli& d) { return d.p; },
                          [](const Exponential& d) { return 1.0 / d.rate; },
                      },
                      rep_);
}

double DistSpec::stddev() const {
    return std::visit(Overloaded{
                          [](const Constant&) { return 0.0; },
                          [](const UniformContinuous& d) { return (d.hi - d.lo) / std::sqrt(12.0); },
                          [](const UniformDiscrete& d) {
                              const double n = static_cast<double>(d.items->size());
                              double s = 0.0, s2 = 0.0;
                              for (const auto& item : *d.items) {
                                  const double x = item.to_double();
                                  s += x;
                                  s2 += x * x;
                              }
                              return std::sqrt(std::max(0.0, s2 / n - (s / n) * (s / n)));
                          },
                          [](const Normal& d) { return d.sigma; },
                          [](const Binomial& d) { return std::sqrt(static_cast<double>(d.n) * d.p * (1.0 - d.p)); },
                          [](const Bernoulli& d) { return std::sqrt(d.p * (1.0 - d.p)); },
                          [](const Exponential& d) { return 1.0 / d.rate; },
                      },
                      rep_);
}

std::string DistSpec::describe() const {
    std::ostringstream os;
    std::visit(Overloaded{
                   [&](const Constant& d) { os << "Constant(" << d.value.to_string() << ")"; },
                   [&](const UniformContinuous& d) { os << "Uniform(" << d.lo << "," << d.hi << ")"; },
                   [&](const UniformDiscrete& d) { os << "UniformDiscrete(" << d.items->size() << " items)"; },
                   [&](const Normal& d) { os << "Normal(" << d.mu << "," << d.sigma << ")"; },
                   [&](const Binomial& d) { os << "Binomial(" << d.n << "," << d.p << ")"; },
                   [&](const Bernoulli& d) { os << "Bernoulli(" << d.p << ")"; },
                   [&](const Exponential& d) { os << "Exponential(" << d.rate << ")"; },
               },
               rep_);
    return os.str();
}

std::shared_ptr<const std::vector<Value>> int_range(std::int64_t lo, std::int64_t hi) {
    std::vector<Value> items;
    items.reserve(static_cast<std::size_t>(std::max<std::int64_t>(0, hi - lo + 1)));
    for (std::int64_t i = lo; i <= hi; ++i) items.push_back(Value::integer(i));
    return std::make_shared<const std::vector<Value>>(std::move(items));
}

std::shared_ptr<const std::vector<Value>> symbol_items(const std::vector<std::string>& texts) {
    std::vector<Value> items;
    items.reserve(texts.size());
    for (const auto& t : texts) items.push_back(Value::symbol(t));
    return std::make_shared<const std::vector<Value>>(std::move(items));
}

}  // namespace leakscope
