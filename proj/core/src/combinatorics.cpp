#include "mfl/combinatorics.hpp"

#include <cmath>

#include "mfl/errors.hpp"

namespace mfl {

namespace {

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= static_cast<double>(i);
    return f;
}

// Recursively walks compositions of `remaining` into `parts` entries, each at
// least `lower`, multiplying the multinomial weight (2m)! / prod a_t! along
// the way.
double weighted_compositions(int remaining, int parts, int lower, double weight) {
    if (parts == 1) {
        if (remaining < lower) return 0.0;
        return weight / factorial(remaining);
    }
    double acc = 0.0;
    for (int a = lower; a <= remaining - lower * (parts - 1); ++a) {
        acc += weighted_compositions(remaining - a, parts - 1, lower, weight / factorial(a));
    }
    return acc;
}

} // namespace

double binomial(long long a, long long b) {
    if (a < 0 || b < 0 || b > a) return 0.0;
    if (b > a - b) b = a - b;
    double r = 1.0;
    for (long long t = 1; t <= b; ++t) {
        r *= static_cast<double>(a - b + t);
        r /= static_cast<double>(t);
    }
    return r;
}

long long composition_count(int total, int parts, int lower) {
    if (parts <= 0) return (total == 0) ? 1 : 0;
    if (total < lower * parts) return 0;
    if (parts == 1) return (total >= lower) ? 1 : 0;
    long long acc = 0;
    for (int a = lower; a <= total - lower * (parts - 1); ++a) {
        acc += composition_count(total - a, parts - 1, lower);
    }
    return acc;
}

double multiplicity_weight_sum(int m) {
    if (m < 1) throw ConfigError("multiplicity_weight_sum: m must be at least 1");
    const double two_m_fact = factorial(2 * m);
    double acc = 0.0;
    for (int s = 1; s <= m; ++s) {
        acc += weighted_compositions(2 * m, s, 2, two_m_fact);
    }
    return acc;
}

double index_triple_cap(int n_particles, int m) {
    if (n_particles < 1) throw ConfigError("index_triple_cap: n_particles must be positive");
    const double e = std::exp(1.0);
    return 2.0 * m * std::pow(8.0 * e, m) * std::pow(static_cast<double>(n_particles), 4 * m) *
           multiplicity_weight_sum(m);
}

} // namespace mfl
