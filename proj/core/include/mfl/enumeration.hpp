#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "mfl/phi.hpp"

namespace mfl {

/// One term of the 6m-fold index sum: the l-th factor of the product is
/// phi2(x_{i[l]}, x_{j[l]}, x_{k[l]}).  Entries are 0-based labels in
/// [0, n_particles).  All three vectors have length 2m.
struct IndexTriple {
    int m = 0;
    std::vector<int> i;
    std::vector<int> j;
    std::vector<int> k;

    /// Multiplicities of the distinct values of i, sorted descending.
    std::vector<int> multiplicities() const;
};

/// Screening test from the cancellation identities.  Returns false when one
/// of the two sufficient vanishing conditions holds:
///  (1) some i[l] appears exactly once in i and never in j or k, or
///  (2) some l has j[l] != k[l] with both labels absent from i and from every
///      other slot of j and k.
/// A true return means the product integral is *not* excluded by these rules;
/// it may still vanish for other reasons (the screen is one-directional).
bool survives(const IndexTriple& t);

struct EnumerationReport {
    int n_particles = 0;
    int m = 0;
    long long total = 0;      ///< N^{6m} candidate triples
    long long survivors = 0;  ///< triples passing the screen
    double cap = 0.0;         ///< closed-form bound (always >= survivors)

    // Side identities exercised during the run.
    long long stars_and_bars_direct = 0;  ///< compositions of 2m into N parts >= 0
    double stars_and_bars_formula = 0.0;  ///< C(2m + N - 1, N - 1)
    std::vector<long long> restricted_direct;  ///< s = 1..m: compositions, parts >= 2
    std::vector<double> restricted_formula;    ///< C(2m - s - 1, s - 1)
    bool identities_ok = false;
};

/// Enumerates every (I, J, K) triple for 2m factors over N labels, counting
/// the ones that pass the screen.  Refuses when N^{6m} exceeds `budget`
/// (default 1e8) with the offending arithmetic in the message.
EnumerationReport enumerate_survivors(int n_particles, int m, double budget = 1e8);

/// Numeric quadrature oracle for the product integrals behind the screen:
///   integral(t) = int prod_l phi2(x_{i_l}, x_{j_l}, x_{k_l})
///                 prod_{used labels} rho(x_label) dx.
/// phi2 is tabulated once on a quad_n^3 grid (one-dimensional fields only);
/// results are memoized under relabeling symmetry and the j/k swap within
/// each factor.
class TripleOracle {
public:
    TripleOracle(const PhiField& field, int quad_n = 32);

    double integral(const IndexTriple& t);

    /// Reference magnitude (sup |phi2|)^{2m} for relative comparisons.
    double scale(int m) const;

    /// True when |integral| < rel_tol * scale(m).
    bool vanishes(const IndexTriple& t, double rel_tol = 1e-6);

    int quad_n() const { return quad_n_; }
    std::size_t memo_size() const { return memo_.size(); }

private:
    double integral_uncached(const std::vector<int>& factors, int n_vars, int m) const;

    int quad_n_ = 0;
    double phi_sup_ = 0.0;
    std::vector<double> phi_;  // [x * quad_n^2 + z * quad_n + zp]
    std::vector<double> rho_;
    std::map<std::vector<int>, double> memo_;
};

} // namespace mfl
