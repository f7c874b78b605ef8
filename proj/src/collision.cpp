#include "nxsift/collision.hpp"

#include <cmath>
#include <stdexcept>

#include "nxsift/rng.hpp"

namespace nxsift {

void CollisionParams::validate() const {
    if (dict_sizes.empty()) throw std::invalid_argument("collision: no dictionaries");
    for (long L : dict_sizes)
        if (L < 1) throw std::invalid_argument("collision: dictionary size must be >= 1");
    if (strike_threshold < 2) throw std::invalid_argument("collision: t must be >= 2");
}

TCollisionProb p_t_collision(long L, long n, int t) {
    if (L < 1 || t < 2 || n < 0) throw std::invalid_argument("p_t_collision: invalid params");
    if (n < t) return {0.0, false};
    const double Ld = static_cast<double>(L);
    const double nd = static_cast<double>(n);
    // pigeonhole: more than L(t-1) draws force a t-collision
    if (n > L * static_cast<long>(t - 1)) return {1.0, nd >= Ld * (t + 1)};

    const double inner =
        nd * std::exp(-nd / (Ld * t)) * std::pow(1.0 - nd / (Ld * (t + 1)), -1.0 / t);
    const double log_term =
        (1.0 - t) * std::log(Ld) + t * std::log(inner) - std::lgamma(t + 1.0);
    double p = 1.0 - std::exp(-std::exp(log_term));
    if (p < 0.0) p = 0.0;
    if (p > 1.0) p = 1.0;
    return {p, false};
}

AnyDictionaryProb p_any_dictionary(const CollisionParams& params, long n) {
    params.validate();
    if (n < 0) throw std::invalid_argument("p_any_dictionary: n must be >= 0");
    AnyDictionaryProb out;
    double sum = 0.0, survive = 1.0;
    for (long L : params.dict_sizes) {
        const double p = p_t_collision(L, n, params.strike_threshold).p;
        sum += p;
        survive *= 1.0 - p;
    }
    out.sum_form = sum > 1.0 ? 1.0 : sum;
    out.product_form = 1.0 - survive;
    return out;
}

long n_for_probability(long L, int t, double p_target) {
    if (L < 1 || t < 2) throw std::invalid_argument("n_for_probability: invalid params");
    if (!(p_target > 0.0 && p_target < 1.0))
        throw std::invalid_argument("n_for_probability: target must be in (0,1)");
    long lo = t;                                  // first n with nonzero probability
    long hi = L * static_cast<long>(t - 1) + 1;   // pigeonhole certainty
    if (p_t_collision(L, lo, t).p >= p_target) return lo;
    while (lo + 1 < hi) {
        const long mid = lo + (hi - lo) / 2;
        if (p_t_collision(L, mid, t).p >= p_target) hi = mid;
        else lo = mid;
    }
    return hi;
}

double monte_carlo_oracle(long L, int t, long n, long trials, uint64_t seed) {
    if (L < 1 || t < 2 || n < 0) throw std::invalid_argument("monte_carlo_oracle: invalid params");
    if (trials < 1) throw std::invalid_argument("monte_carlo_oracle: trials must be >= 1");
    const std::vector<double> cdf = monte_carlo_cdf(L, t, n, trials, seed);
    return n == 0 ? 0.0 : cdf[static_cast<size_t>(n - 1)];
}

std::vector<double> monte_carlo_cdf(long L, int t, long n_max, long trials, uint64_t seed) {
    if (L < 1 || t < 2 || n_max < 0) throw std::invalid_argument("monte_carlo_cdf: invalid params");
    if (trials < 1) throw std::invalid_argument("monte_carlo_cdf: trials must be >= 1");
    std::vector<long> first_hit_counts(static_cast<size_t>(n_max) + 1, 0);
    std::vector<uint16_t> counts(static_cast<size_t>(L), 0);
    std::vector<uint32_t> touched;
    touched.reserve(static_cast<size_t>(n_max));
    Rng rng(seed);
    const uint64_t Lu = static_cast<uint64_t>(L);

    for (long trial = 0; trial < trials; ++trial) {
        long hit = 0;
        for (long i = 1; i <= n_max; ++i) {
            const uint32_t v = static_cast<uint32_t>(rng.next_below(Lu));
            if (counts[v] == 0) touched.push_back(v);
            if (++counts[v] >= t) {
                hit = i;
                break;
            }
        }
        first_hit_counts[static_cast<size_t>(hit)] += hit > 0 ? 1 : 0;
        for (uint32_t v : touched) counts[v] = 0;
        touched.clear();
    }

    std::vector<double> cdf(static_cast<size_t>(n_max), 0.0);
    long acc = 0;
    for (long n = 1; n <= n_max; ++n) {
        acc += first_hit_counts[static_cast<size_t>(n)];
        cdf[static_cast<size_t>(n - 1)] = static_cast<double>(acc) / static_cast<double>(trials);
    }
    return cdf;
}

double exact_birthday_probability(long L, long n) {
    if (L < 1 || n < 0) throw std::invalid_argument("exact_birthday_probability: invalid params");
    if (n < 2) return 0.0;
    if (n > L) return 1.0;
    double survive = 1.0;
    for (long i = 1; i < n; ++i) survive *= 1.0 - static_cast<double>(i) / static_cast<double>(L);
    return 1.0 - survive;
}

}  // namespace nxsift
