#pragma once

namespace mfl {

/// Binomial coefficient with the extended convention C(a, b) = 0 whenever
/// a < 0, b < 0 or b > a (so identities stated with binomials stay valid at
/// the boundary of their parameter range).
double binomial(long long a, long long b);

/// Number of integer tuples (a_1, ..., a_parts) with a_t >= lower and
/// sum a_t = total, counted by direct recursion.
long long composition_count(int total, int parts, int lower);

/// sum over s = 1..m and over compositions a_1 + ... + a_s = 2m with
/// a_t >= 2 of the multinomial (2m)! / (a_1! ... a_s!).
double multiplicity_weight_sum(int m);

/// Closed-form cap for the number of index triples that escape both
/// vanishing conditions:  2m (8e)^m N^{4m} * multiplicity_weight_sum(m).
double index_triple_cap(int n_particles, int m);

} // namespace mfl
