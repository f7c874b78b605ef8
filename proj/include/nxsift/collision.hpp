#pragma once

#include <cstdint>
#include <vector>

namespace nxsift {

// Parameters of the t-collision question: how likely is it that some
// dictionary word has been drawn at least t times after n draws.
struct CollisionParams {
    std::vector<long> dict_sizes;  // L_i, one per dictionary
    int strike_threshold = 2;      // t

    void validate() const;
};

struct TCollisionProb {
    double p = 0.0;
    // n ran past the approximation's domain (n >= L(t+1)); the returned
    // value is the exact-regime clamp, not the formula.
    bool approximation_saturated = false;
};

// Closed-form approximation of the probability that n uniform draws
// from L values contain some value at least t times. Exact 0 below
// n = t and exact 1 from the pigeonhole bound n > L(t-1).
TCollisionProb p_t_collision(long L, long n, int t);

struct AnyDictionaryProb {
    double sum_form = 0.0;      // sum of per-dictionary p_i, clamped to 1
    double product_form = 0.0;  // 1 - prod(1 - p_i)
};

// Probability that any of the k independent dictionaries shows a
// t-collision after n draws from each.
AnyDictionaryProb p_any_dictionary(const CollisionParams& params, long n);

// Smallest n with p_t_collision(L, n, t) >= p_target.
long n_for_probability(long L, int t, double p_target);

// Empirical check by simulation; deterministic per seed. Standard
// error is sqrt(p(1-p)/trials).
double monte_carlo_oracle(long L, int t, long n, long trials, uint64_t seed);

// One simulation pass shared across all n: element n-1 is the
// empirical probability that the first t-collision happens within n
// draws. Equivalent to monte_carlo_oracle at every n <= n_max with
// common random numbers.
std::vector<double> monte_carlo_cdf(long L, int t, long n_max, long trials, uint64_t seed);

// Exact classic birthday probability (t = 2): 1 - prod(1 - i/L).
double exact_birthday_probability(long L, long n);

}  // namespace nxsift
