#include "leakscope/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include <boost/math/special_functions/digamma.hpp>

#include "leakscope/errors.hpp"
#include "leakscope/rng.hpp"

namespace leakscope {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double digamma(double x) { return boost::math::digamma(x); }

/// Weights that matter, or null when every row counts the same.
const std::vector<double>* effective_weights(const SampleSet& s) {
    if (s.size() == 0) throw EstimationError("empty sample set");
    if (!s.weights) return nullptr;
    double total = 0.0;
    for (double w : *s.weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw EstimationError("weights must be finite and nonnegative");
        total += w;
    }
    if (!(total > 0.0)) throw EstimationError("all sample weights are zero");
    return s.is_weighted() ? &*s.weights : nullptr;
}

std::vector<double> numeric_column(const SampleSet& s, std::string_view column) {
    const auto& col = s.column(column);
    std::vector<double> out;
    out.reserve(col.size());
    for (const auto& v : col) {
        if (!v.is_real() && !v.is_int())
            throw EstimationError("column '" + std::string(column) + "' is not numeric (" + to_string(v.kind()) + ")");
        out.push_back(v.to_double());
    }
    return out;
}

std::vector<double> real_column(const SampleSet& s, std::string_view column) {
    const auto& col = s.column(column);
    std::vector<double> out;
    out.reserve(col.size());
    for (const auto& v : col) {
        if (!v.is_real())
            throw EstimationError("continuous estimator needs a real column; '" + std::string(column) + "' holds " +
                                  to_string(v.kind()) + " values");
        out.push_back(v.as_real());
    }
    return out;
}

bool is_continuous_column(const SampleSet& s, std::string_view column) {
    const auto& col = s.column(column);
    if (col.empty()) throw EstimationError("empty column '" + std::string(column) + "'");
    return col.front().is_real();
}

void require_unweighted(const SampleSet& s, const char* what) {
    if (s.is_weighted())
        throw EstimationError(std::string(what) +
                              " needs unweighted samples; resample importance output or use rejection/metropolis");
}

/// Breaks exact ties with a tiny deterministic perturbation; k-NN estimators
/// take logs of neighbour distances, which must be positive.
void break_ties(std::vector<double>& xs) {
    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end()) return;
    double mean_abs = 0.0;
    for (double x : xs) mean_abs += std::abs(x);
    mean_abs /= static_cast<double>(xs.size());
    const double scale = 1e-10 * std::max(1.0, mean_abs);
    Rng rng(0x6a17c3d5ULL, 0);
    for (double& x : xs) x += scale * (rng.uniform() - 0.5);
}

/// Distance from a[i] to its k-th nearest neighbour among the other points of sorted a.
double kth_within(const std::vector<double>& a, std::size_t i, int k) {
    std::size_t lo = i, hi = i;
    double d = 0.0;
    for (int c = 0; c < k; ++c) {
        const double dl = lo > 0 ? a[i] - a[lo - 1] : kInf;
        const double dr = hi + 1 < a.size() ? a[hi + 1] - a[i] : kInf;
        if (dl <= dr) {
            d = dl;
            --lo;
        } else {
            d = dr;
            ++hi;
        }
    }
    return d;
}

/// Distance from x to its k-th nearest point of sorted b.
double kth_across(const std::vector<double>& b, double x, int k) {
    std::size_t hi = static_cast<std::size_t>(std::lower_bound(b.begin(), b.end(), x) - b.begin());
    std::size_t lo = hi;
    double d = 0.0;
    for (int c = 0; c < k; ++c) {
        const double dl = lo > 0 ? x - b[lo - 1] : kInf;
        const double dr = hi < b.size() ? b[hi] - x : kInf;
        if (dl <= dr) {
            d = dl;
            --lo;
        } else {
            d = dr;
            ++hi;
        }
    }
    return d;
}

/// Number of points of sorted a strictly within eps of x, excluding one copy of x itself.
std::size_t count_strict(const std::vector<double>& a, double x, double eps) {
    // Compare differences rather than shifted bounds, so the neighbour that set eps
    // is classified with the same rounding that produced it.
    auto lo = std::partition_point(a.begin(), a.end(), [&](double z) { return x - z >= eps; });
    auto hi = std::partition_point(lo, a.end(), [&](double z) { return z - x < eps; });
    const auto n = static_cast<std::size_t>(hi - lo);
    return n > 0 ? n - 1 : 0;
}

EstimatorResult make(Measure m, double value, std::size_t n, std::string estimator) {
    EstimatorResult r;
    r.measure = m;
    r.value = value;
    r.n = n;
    r.estimator = std::move(estimator);
    return r;
}

/// Sums in a fixed order so that equal multisets of terms give identical totals.
double ordered_sum(std::vector<double> terms) {
    std::sort(terms.begin(), terms.end());
    double s = 0.0;
    for (double t : terms) s += t;
    return s;
}

double quantile_sorted(const std::vector<double>& s, double q) {
    const double pos = q * static_cast<double>(s.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(i);
    if (i + 1 >= s.size()) return s.back();
    return s[i] + frac * (s[i + 1] - s[i]);
}

Pmf exact_marginal(const ExactDistribution& d, std::string_view column) { return d.pmf(column); }

JointPmf exact_joint(const ExactDistribution& d, std::string_view x, std::string_view y) {
    const std::size_t ix = d.index_of(x), iy = d.index_of(y);
    JointPmf out;
    for (const auto& [key, p] : d.outcomes) out[{key[ix], key[iy]}] += p;
    return out;
}

BayesRisk bayes_from_joint(const JointPmf& joint, std::size_t n, const std::string& estimator) {
    Pmf secret;
    for (const auto& [key, p] : joint) secret[key.first] += p;
    double max_prior = 0.0;
    for (const auto& [s, p] : secret) max_prior = std::max(max_prior, p);
    const double risk = bayes_risk_table(joint);
    const double vuln = 1.0 - risk;
    BayesRisk out{make(Measure::BayesRisk, risk, n, estimator), make(Measure::BayesVulnerability, vuln, n, estimator),
                  make(Measure::MultLeakage, vuln / max_prior, n, estimator)};
    return out;
}

}  // namespace

const char* to_string(Measure m) {
    switch (m) {
        case Measure::Probability: return "probability";
        case Measure::Mean: return "mean";
        case Measure::Std: return "std";
        case Measure::Entropy: return "entropy";
        case Measure::Kl: return "kl";
        case Measure::Mi: return "mi";
        case Measure::BayesRisk: return "bayes_risk";
        case Measure::BayesVulnerability: return "bayes_vulnerability";
        case Measure::MultLeakage: return "mult_leakage";
    }
    return "?";
}

Measure parse_measure(std::string_view text) {
    for (auto m : {Measure::Probability, Measure::Mean, Measure::Std, Measure::Entropy, Measure::Kl, Measure::Mi,
                   Measure::BayesRisk, Measure::BayesVulnerability, Measure::MultLeakage})
        if (text == to_string(m)) return m;
    throw EstimationError("unknown measure '" + std::string(text) + "'");
}

EstimatorMode parse_mode(std::string_view text) {
    if (text == "auto") return EstimatorMode::Auto;
    if (text == "discrete") return EstimatorMode::Discrete;
    if (text == "differential" || text == "knn" || text == "ksg" || text == "continuous")
        return EstimatorMode::Continuous;
    throw EstimationError("unknown estimator mode '" + std::string(text) + "'");
}

// ------------------------------------------------------------ building blocks

Pmf empirical_pmf(std::span<const Value> xs, const std::vector<double>* weights) {
    if (xs.empty()) throw EstimationError("empty input");
    Pmf out;
    double total = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double w = weights ? (*weights)[i] : 1.0;
        if (w == 0.0) continue;
        out[xs[i]] += w;
        total += w;
    }
    if (!(total > 0.0)) throw EstimationError("all sample weights are zero");
    for (auto& [v, p] : out) p /= total;
    return out;
}

JointPmf empirical_joint(std::span<const Value> xs, std::span<const Value> ys, const std::vector<double>* weights) {
    if (xs.size() != ys.size()) throw EstimationError("paired columns differ in length");
    if (xs.empty()) throw EstimationError("empty input");
    JointPmf out;
    double total = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double w = weights ? (*weights)[i] : 1.0;
        if (w == 0.0) continue;
        out[{xs[i], ys[i]}] += w;
        total += w;
    }
    if (!(total > 0.0)) throw EstimationError("all sample weights are zero");
    for (auto& [v, p] : out) p /= total;
    return out;
}

double plugin_entropy_bits(const Pmf& p) {
    std::vector<double> terms;
    for (const auto& [v, q] : p)
        if (q > 0.0) terms.push_back(-q * std::log2(q));
    return std::max(0.0, ordered_sum(std::move(terms)));
}

double plugin_kl_bits(const Pmf& p, const Pmf& q) {
    std::vector<double> terms;
    for (const auto& [v, pv] : p) {
        if (pv <= 0.0) continue;
        auto it = q.find(v);
        if (it == q.end() || it->second <= 0.0)
            throw EstimationError("KL divergence undefined: P has mass at " + v.to_string() + " where Q has none");
        terms.push_back(pv * std::log2(pv / it->second));
    }
    return std::max(0.0, ordered_sum(std::move(terms)));
}

double plugin_mi_bits(const JointPmf& joint) {
    Pmf px, py;
    for (const auto& [key, p] : joint) {
        px[key.first] += p;
        py[key.second] += p;
    }
    std::vector<double> terms;
    for (const auto& [key, p] : joint)
        if (p > 0.0) terms.push_back(p * std::log2(p / (px[key.first] * py[key.second])));
    return std::max(0.0, ordered_sum(std::move(terms)));
}

double bayes_risk_table(const JointPmf& joint) {
    if (joint.empty()) throw EstimationError("empty joint table");
    // Group by output; the best guess per output is the first secret with maximal mass.
    std::map<Value, double> best;
    for (const auto& [key, p] : joint) {
        auto [it, inserted] = best.try_emplace(key.second, p);
        if (!inserted && p > it->second) it->second = p;
    }
    double success = 0.0;
    for (const auto& [o, p] : best) success += p;
    return std::clamp(1.0 - success, 0.0, 1.0);
}

double knn_entropy_bits(std::vector<double> xs, int k) {
    if (k < 1) throw EstimationError("k must be positive");
    const std::size_t n = xs.size();
    if (n < static_cast<std::size_t>(k) + 1) throw EstimationError("k-NN entropy needs more than k samples");
    break_ties(xs);
    std::sort(xs.begin(), xs.end());
    double sum_log = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum_log += std::log(kth_within(xs, i, k));
    const double nats = digamma(static_cast<double>(n)) - digamma(k) + std::numbers::ln2 +
                        sum_log / static_cast<double>(n);
    return nats * kBitsPerNat;
}

double knn_kl_bits(std::vector<double> p, std::vector<double> q, int k) {
    if (k < 1) throw EstimationError("k must be positive");
    const std::size_t n = p.size(), m = q.size();
    if (n < 2 * static_cast<std::size_t>(k) || m < 2 * static_cast<std::size_t>(k))
        throw EstimationError("k-NN divergence needs at least 2k samples from each distribution");
    break_ties(p);
    break_ties(q);
    std::sort(p.begin(), p.end());
    std::sort(q.begin(), q.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double rho = kth_within(p, i, k);
        double nu = kth_across(q, p[i], k);
        if (nu == 0.0) nu = std::numeric_limits<double>::min();
        sum += std::log(nu / rho);
    }
    const double nats = sum / static_cast<double>(n) + std::log(static_cast<double>(m) / static_cast<double>(n - 1));
    return nats * kBitsPerNat;
}

double ksg_mi_bits(std::vector<double> x, std::vector<double> y, int k) {
    if (k < 1) throw EstimationError("k must be positive");
    if (x.size() != y.size()) throw EstimationError("paired columns differ in length");
    const std::size_t n = x.size();
    if (n < static_cast<std::size_t>(k) + 1) throw EstimationError("KSG needs more than k samples");
    break_ties(x);
    break_ties(y);

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> xo(n), yo(n);
    for (std::size_t i = 0; i < n; ++i) {
        xo[i] = x[order[i]];
        yo[i] = y[order[i]];
    }
    std::vector<double> xs = xo, ys = yo;
    std::sort(ys.begin(), ys.end());

    double acc = 0.0;
    std::priority_queue<double> heap;
    for (std::size_t i = 0; i < n; ++i) {
        heap = {};
        std::size_t l = i, r = i + 1;
        while (l > 0 || r < n) {
            const double gl = l > 0 ? xo[i] - xo[l - 1] : kInf;
            const double gr = r < n ? xo[r] - xo[i] : kInf;
            const bool left = gl <= gr;
            const double gap = left ? gl : gr;
            if (heap.size() == static_cast<std::size_t>(k) && gap >= heap.top()) break;
            const std::size_t j = left ? --l : r++;
            const double d = std::max(gap, std::abs(yo[j] - yo[i]));
            if (heap.size() < static_cast<std::size_t>(k)) {
                heap.push(d);
            } else if (d < heap.top()) {
                heap.pop();
                heap.push(d);
            }
        }
        const double eps = heap.top();
        const std::size_t nx = count_strict(xs, xo[i], eps);
        const std::size_t ny = count_strict(ys, yo[i], eps);
        acc += digamma(static_cast<double>(nx) + 1.0) + digamma(static_cast<double>(ny) + 1.0);
    }
    const double nats = digamma(k) + digamma(static_cast<double>(n)) - acc / static_cast<double>(n);
    return nats * kBitsPerNat;
}

double silverman_bandwidth(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n < 2) return 0.0;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    const double sigma = std::sqrt(var / static_cast<double>(n - 1));
    std::vector<double> s(xs.begin(), xs.end());
    std::sort(s.begin(), s.end());
    const double iqr = quantile_sorted(s, 0.75) - quantile_sorted(s, 0.25);
    const double spread = iqr > 0.0 ? std::min(sigma, iqr / 1.34) : sigma;
    return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

DensitySeries kde(std::span<const double> xs, const std::vector<double>* weights, std::optional<double> bandwidth,
                  std::size_t points) {
    if (xs.size() < 2) throw EstimationError("KDE needs at least two samples");
    if (points < 2) throw EstimationError("KDE grid needs at least two points");
    std::vector<double> pts;
    std::vector<double> ws;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double w = weights ? (*weights)[i] : 1.0;
        if (w > 0.0) {
            pts.push_back(xs[i]);
            ws.push_back(w);
        }
    }
    const double h = bandwidth ? *bandwidth : silverman_bandwidth(pts);
    if (!(h > 0.0) || !std::isfinite(h)) throw EstimationError("KDE bandwidth is not positive (degenerate sample)");
    double total = 0.0;
    for (double w : ws) total += w;
    const auto [mn, mx] = std::minmax_element(pts.begin(), pts.end());
    const double lo = *mn - 4.0 * h, hi = *mx + 4.0 * h;
    DensitySeries out;
    out.bandwidth = h;
    out.grid.resize(points);
    out.density.assign(points, 0.0);
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t g = 0; g < points; ++g) out.grid[g] = lo + step * static_cast<double>(g);
    const double norm = 1.0 / (total * h * std::sqrt(2.0 * std::numbers::pi));
    // Kernels beyond 8h contribute below 1e-14 of their peak; only nearby grid nodes are visited.
    const auto reach = static_cast<std::ptrdiff_t>(std::ceil(8.0 * h / step));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto centre = static_cast<std::ptrdiff_t>(std::llround((pts[i] - lo) / step));
        const std::ptrdiff_t g0 = std::max<std::ptrdiff_t>(0, centre - reach);
        const std::ptrdiff_t g1 = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(points) - 1, centre + reach);
        for (std::ptrdiff_t g = g0; g <= g1; ++g) {
            const double z = (out.grid[static_cast<std::size_t>(g)] - pts[i]) / h;
            out.density[static_cast<std::size_t>(g)] += ws[i] * std::exp(-0.5 * z * z);
        }
    }
    for (double& d : out.density) d *= norm;
    return out;
}

Histogram histogram(std::span<const double> xs, const std::vector<double>* weights, std::size_t bins) {
    if (xs.empty()) throw EstimationError("histogram of an empty column");
    if (bins < 1) throw EstimationError("histogram needs at least one bin");
    const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
    double lo = *mn, hi = *mx;
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }
    Histogram h;
    h.edges.resize(bins + 1);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t b = 0; b <= bins; ++b) h.edges[b] = lo + width * static_cast<double>(b);
    h.edges.back() = hi;
    h.counts.assign(bins, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double w = weights ? (*weights)[i] : 1.0;
        auto b = static_cast<std::size_t>((xs[i] - lo) / width);
        if (b >= bins) b = bins - 1;
        h.counts[b] += w;
        total += w;
    }
    h.density.resize(bins);
    for (std::size_t b = 0; b < bins; ++b) h.density[b] = total > 0.0 ? h.counts[b] / (total * width) : 0.0;
    return h;
}

// ---------------------------------------------------------------- sample sets

EstimatorResult probability_query(const SampleSet& s, std::string_view column, const ValuePredicate& pred) {
    const auto* w = effective_weights(s);
    const auto& col = s.column(column);
    double hit = 0.0, total = 0.0;
    for (std::size_t i = 0; i < col.size(); ++i) {
        const double wi = w ? (*w)[i] : 1.0;
        total += wi;
        if (wi != 0.0 && pred(col[i])) hit += wi;
    }
    return make(Measure::Probability, hit / total, col.size(), w ? "weighted-frequency" : "frequency");
}

std::pair<EstimatorResult, EstimatorResult> summary_stats(const SampleSet& s, std::string_view column) {
    const auto* w = effective_weights(s);
    const auto xs = numeric_column(s, column);
    double total = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double wi = w ? (*w)[i] : 1.0;
        total += wi;
        mean += wi * xs[i];
    }
    mean /= total;
    double var = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double wi = w ? (*w)[i] : 1.0;
        var += wi * (xs[i] - mean) * (xs[i] - mean);
    }
    var /= total;
    const char* name = w ? "weighted-moment" : "moment";
    return {make(Measure::Mean, mean, xs.size(), name), make(Measure::Std, std::sqrt(var), xs.size(), name)};
}

DensityEstimate density_estimate(const SampleSet& s, std::string_view column, DensityKind kind,
                                 const DensityParams& params) {
    const auto* w = effective_weights(s);
    const auto xs = numeric_column(s, column);
    DensityEstimate out;
    if (kind == DensityKind::Kde) {
        std::vector<double> support;
        for (std::size_t i = 0; i < xs.size(); ++i)
            if (!w || (*w)[i] > 0.0) support.push_back(xs[i]);
        std::sort(support.begin(), support.end());
        const bool degenerate = support.size() < 2 || support.front() == support.back();
        if (!degenerate) {
            try {
                out.kde = kde(xs, w, params.bandwidth, params.points);
                return out;
            } catch (const EstimationError& e) {
                out.diagnostic = std::string("KDE unavailable (") + e.what() + "); histogram returned instead";
            }
        } else {
            out.diagnostic = "KDE needs at least two distinct values; histogram returned instead";
        }
    }
    out.histogram = histogram(xs, w, params.bins);
    return out;
}

EstimatorResult entropy(const SampleSet& s, std::string_view column, EstimatorMode mode, int k) {
    const auto* w = effective_weights(s);
    if (mode == EstimatorMode::Auto)
        mode = is_continuous_column(s, column) ? EstimatorMode::Continuous : EstimatorMode::Discrete;
    const auto& col = s.column(column);
    if (mode == EstimatorMode::Discrete) {
        for (const auto& v : col)
            if (!v.is_countable())
                throw EstimationError("discrete entropy needs countable values; column '" + std::string(column) +
                                      "' is real");
        return make(Measure::Entropy, plugin_entropy_bits(empirical_pmf(col, w)), col.size(), "plugin");
    }
    require_unweighted(s, "differential entropy");
    auto r = make(Measure::Entropy, knn_entropy_bits(real_column(s, column), k), col.size(), "kozachenko-leonenko");
    r.params["k"] = k;
    return r;
}

EstimatorResult kl_divergence(const SampleSet& p, std::string_view p_column, const SampleSet& q,
                              std::string_view q_column, EstimatorMode mode, int k) {
    const auto* wp = effective_weights(p);
    const auto* wq = effective_weights(q);
    if (mode == EstimatorMode::Auto) {
        const bool cp = is_continuous_column(p, p_column), cq = is_continuous_column(q, q_column);
        if (cp != cq) throw EstimationError("KL between a continuous and a discrete column; discretize first");
        mode = cp ? EstimatorMode::Continuous : EstimatorMode::Discrete;
    }
    if (mode == EstimatorMode::Discrete) {
        const double v = plugin_kl_bits(empirical_pmf(p.column(p_column), wp), empirical_pmf(q.column(q_column), wq));
        return make(Measure::Kl, v, p.size(), "plugin");
    }
    require_unweighted(p, "k-NN divergence");
    require_unweighted(q, "k-NN divergence");
    auto r = make(Measure::Kl, knn_kl_bits(real_column(p, p_column), real_column(q, q_column), k), p.size(),
                  "wang-kulkarni-verdu");
    r.params["k"] = k;
    r.params["m"] = static_cast<double>(q.size());
    return r;
}

EstimatorResult mutual_information(const SampleSet& s, std::string_view x, std::string_view y, EstimatorMode mode,
                                   int k) {
    const auto* w = effective_weights(s);
    if (mode == EstimatorMode::Auto) {
        const bool cx = is_continuous_column(s, x), cy = is_continuous_column(s, y);
        if (cx != cy)
            throw EstimationError("mutual information between a continuous and a discrete column; discretize first");
        mode = cx ? EstimatorMode::Continuous : EstimatorMode::Discrete;
    }
    if (mode == EstimatorMode::Discrete) {
        return make(Measure::Mi, plugin_mi_bits(empirical_joint(s.column(x), s.column(y), w)), s.size(), "plugin");
    }
    require_unweighted(s, "KSG mutual information");
    auto r = make(Measure::Mi, ksg_mi_bits(real_column(s, x), real_column(s, y), k), s.size(), "ksg");
    r.params["k"] = k;
    return r;
}

BayesRisk bayes_risk(const SampleSet& s, std::string_view secret, std::string_view output) {
    const auto* w = effective_weights(s);
    for (auto name : {secret, output})
        for (const auto& v : s.column(name))
            if (!v.is_countable())
                throw EstimationError("Bayes risk needs discrete columns; '" + std::string(name) +
                                      "' is real, discretize first");
    return bayes_from_joint(empirical_joint(s.column(secret), s.column(output), w), s.size(), "frequency");
}

// ------------------------------------------------------- exact distributions

EstimatorResult probability_query(const ExactDistribution& d, std::string_view column, const ValuePredicate& pred) {
    double hit = 0.0;
    for (const auto& [v, p] : exact_marginal(d, column))
        if (pred(v)) hit += p;
    return make(Measure::Probability, hit, d.outcomes.size(), "exact");
}

EstimatorResult entropy(const ExactDistribution& d, std::string_view column) {
    return make(Measure::Entropy, plugin_entropy_bits(exact_marginal(d, column)), d.outcomes.size(), "exact");
}

EstimatorResult kl_divergence(const ExactDistribution& p, std::string_view p_column, const ExactDistribution& q,
                              std::string_view q_column) {
    return make(Measure::Kl, plugin_kl_bits(exact_marginal(p, p_column), exact_marginal(q, q_column)),
                p.outcomes.size(), "exact");
}

EstimatorResult mutual_information(const ExactDistribution& d, std::string_view x, std::string_view y) {
    return make(Measure::Mi, plugin_mi_bits(exact_joint(d, x, y)), d.outcomes.size(), "exact");
}

BayesRisk bayes_risk(const ExactDistribution& d, std::string_view secret, std::string_view output) {
    return bayes_from_joint(exact_joint(d, secret, output), d.outcomes.size(), "exact");
}

}  // namespace leakscope
