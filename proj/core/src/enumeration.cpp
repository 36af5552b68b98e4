#include "mfl/enumeration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "mfl/combinatorics.hpp"
#include "mfl/errors.hpp"

namespace mfl {

namespace {

// Condition (1): some i[l] appears exactly once in i and nowhere in j or k.
// Condition (2): some l has j[l] != k[l] with both labels absent from i and
// from every other slot of j and k.  Either one forces the product integral
// to vanish.
bool screen(const int* i, const int* j, const int* k, int two_m) {
    for (int l = 0; l < two_m; ++l) {
        const int v = i[l];
        bool isolated = true;
        for (int t = 0; isolated && t < two_m; ++t) {
            if (t != l && i[t] == v) isolated = false;
            if (j[t] == v || k[t] == v) isolated = false;
        }
        if (isolated) return false;
    }
    for (int l = 0; l < two_m; ++l) {
        if (j[l] == k[l]) continue;
        bool fresh = true;
        for (int t = 0; fresh && t < two_m; ++t) {
            if (i[t] == j[l] || i[t] == k[l]) fresh = false;
            if (t == l) continue;
            if (j[t] == j[l] || k[t] == j[l]) fresh = false;
            if (j[t] == k[l] || k[t] == k[l]) fresh = false;
        }
        if (fresh) return false;
    }
    return true;
}

void check_sizes(const IndexTriple& t) {
    const std::size_t len = static_cast<std::size_t>(2 * t.m);
    if (t.m < 1 || t.i.size() != len || t.j.size() != len || t.k.size() != len) {
        throw ConfigError("index triple: i, j, k must each hold 2m entries with m >= 1");
    }
}

} // namespace

std::vector<int> IndexTriple::multiplicities() const {
    std::vector<int> sorted = i;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> counts;
    std::size_t t = 0;
    while (t < sorted.size()) {
        std::size_t u = t;
        while (u < sorted.size() && sorted[u] == sorted[t]) ++u;
        counts.push_back(static_cast<int>(u - t));
        t = u;
    }
    std::sort(counts.rbegin(), counts.rend());
    return counts;
}

bool survives(const IndexTriple& t) {
    check_sizes(t);
    return screen(t.i.data(), t.j.data(), t.k.data(), 2 * t.m);
}

EnumerationReport enumerate_survivors(int n_particles, int m, double budget) {
    if (n_particles < 1 || m < 1) {
        throw ConfigError("enumerate_survivors: need n_particles >= 1 and m >= 1");
    }
    const double total_d = std::pow(static_cast<double>(n_particles), 6 * m);
    if (total_d > budget) {
        throw BudgetError("enumerate_survivors: N^(6m) = " + std::to_string(n_particles) + "^" +
                          std::to_string(6 * m) + " = " + std::to_string(total_d) +
                          " exceeds the budget " + std::to_string(budget));
    }

    EnumerationReport rep;
    rep.n_particles = n_particles;
    rep.m = m;
    rep.total = static_cast<long long>(total_d);
    rep.cap = index_triple_cap(n_particles, m);

    const int two_m = 2 * m;
    const int digits = 6 * m;
    std::vector<int> idx(static_cast<std::size_t>(digits), 0);
    const int* i = idx.data();
    const int* j = idx.data() + two_m;
    const int* k = idx.data() + 2 * two_m;
    long long visited = 0;
    while (true) {
        if (screen(i, j, k, two_m)) ++rep.survivors;
        ++visited;
        int pos = 0;
        while (pos < digits && ++idx[static_cast<std::size_t>(pos)] == n_particles) {
            idx[static_cast<std::size_t>(pos)] = 0;
            ++pos;
        }
        if (pos == digits) break;
    }
    (void)visited;

    rep.stars_and_bars_direct = composition_count(two_m, n_particles, 0);
    rep.stars_and_bars_formula = binomial(two_m + n_particles - 1, n_particles - 1);
    rep.identities_ok =
        static_cast<double>(rep.stars_and_bars_direct) == rep.stars_and_bars_formula;
    for (int s = 1; s <= m; ++s) {
        rep.restricted_direct.push_back(composition_count(two_m, s, 2));
        rep.restricted_formula.push_back(binomial(two_m - s - 1, s - 1));
        if (static_cast<double>(rep.restricted_direct.back()) != rep.restricted_formula.back()) {
            rep.identities_ok = false;
        }
    }
    return rep;
}

TripleOracle::TripleOracle(const PhiField& field, int quad_n) : quad_n_(quad_n) {
    if (field.dim() != 1) {
        throw ConfigError("triple oracle: only one-dimensional fields are supported");
    }
    if (quad_n < 32) {
        throw ConfigError("triple oracle: quad_n must be at least 32");
    }
    const std::size_t qn = static_cast<std::size_t>(quad_n);
    phi_.resize(qn * qn * qn);
    rho_.resize(qn);
    for (std::size_t t = 0; t < qn; ++t) {
        const double x = static_cast<double>(t) / quad_n;
        rho_[t] = field.rho(&x);
    }
    for (std::size_t ix = 0; ix < qn; ++ix) {
        const double x = static_cast<double>(ix) / quad_n;
        for (std::size_t iz = 0; iz < qn; ++iz) {
            const double z = static_cast<double>(iz) / quad_n;
            for (std::size_t izp = 0; izp < qn; ++izp) {
                const double zp = static_cast<double>(izp) / quad_n;
                const double v = field.phi2(&x, &z, &zp);
                phi_[(ix * qn + iz) * qn + izp] = v;
                phi_sup_ = std::max(phi_sup_, std::abs(v));
            }
        }
    }
}

double TripleOracle::scale(int m) const { return std::pow(phi_sup_, 2 * m); }

double TripleOracle::integral(const IndexTriple& t) {
    check_sizes(t);
    const int two_m = 2 * t.m;

    // Relabel the used particle labels by first occurrence and normalise each
    // factor so j <= k (phi2 is symmetric in its two trailing slots).
    std::vector<int> remap;
    auto var_of = [&remap](int label) {
        for (std::size_t v = 0; v < remap.size(); ++v) {
            if (remap[v] == label) return static_cast<int>(v);
        }
        remap.push_back(label);
        return static_cast<int>(remap.size() - 1);
    };
    std::vector<std::array<int, 3>> factors(static_cast<std::size_t>(two_m));
    for (int l = 0; l < two_m; ++l) {
        int a = var_of(t.i[static_cast<std::size_t>(l)]);
        int b = var_of(t.j[static_cast<std::size_t>(l)]);
        int c = var_of(t.k[static_cast<std::size_t>(l)]);
        if (b > c) std::swap(b, c);
        factors[static_cast<std::size_t>(l)] = {a, b, c};
    }
    const int n_vars = static_cast<int>(remap.size());

    // Canonical form: lexicographic minimum of the sorted factor list over
    // all permutations of the variable labels.
    std::vector<int> perm(static_cast<std::size_t>(n_vars));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best;
    do {
        std::vector<std::array<int, 3>> relab = factors;
        for (auto& f : relab) {
            f[0] = perm[static_cast<std::size_t>(f[0])];
            f[1] = perm[static_cast<std::size_t>(f[1])];
            f[2] = perm[static_cast<std::size_t>(f[2])];
            if (f[1] > f[2]) std::swap(f[1], f[2]);
        }
        std::sort(relab.begin(), relab.end());
        std::vector<int> key;
        key.reserve(static_cast<std::size_t>(3 * two_m) + 1);
        key.push_back(n_vars);
        for (const auto& f : relab) {
            key.push_back(f[0]);
            key.push_back(f[1]);
            key.push_back(f[2]);
        }
        if (best.empty() || key < best) best = key;
    } while (std::next_permutation(perm.begin(), perm.end()));

    const auto hit = memo_.find(best);
    if (hit != memo_.end()) return hit->second;

    const double cost = std::pow(static_cast<double>(quad_n_), n_vars);
    if (cost > 5.0e7) {
        throw BudgetError("triple oracle: quad_n^vars = " + std::to_string(quad_n_) + "^" +
                          std::to_string(n_vars) + " = " + std::to_string(cost) +
                          " exceeds 5e7 nodes");
    }
    const double value = integral_uncached(best, n_vars, t.m);
    memo_.emplace(std::move(best), value);
    return value;
}

double TripleOracle::integral_uncached(const std::vector<int>& key, int n_vars, int m) const {
    const int two_m = 2 * m;
    const std::size_t qn = static_cast<std::size_t>(quad_n_);
    std::vector<std::size_t> node(static_cast<std::size_t>(n_vars), 0);
    const double w = 1.0 / static_cast<double>(quad_n_);
    double acc = 0.0;
    while (true) {
        double term = 1.0;
        for (int v = 0; v < n_vars; ++v) term *= rho_[node[static_cast<std::size_t>(v)]];
        for (int l = 0; l < two_m; ++l) {
            const std::size_t x = node[static_cast<std::size_t>(key[1 + 3 * l])];
            const std::size_t z = node[static_cast<std::size_t>(key[2 + 3 * l])];
            const std::size_t zp = node[static_cast<std::size_t>(key[3 + 3 * l])];
            term *= phi_[(x * qn + z) * qn + zp];
        }
        acc += term;
        int pos = 0;
        while (pos < n_vars && ++node[static_cast<std::size_t>(pos)] == qn) {
            node[static_cast<std::size_t>(pos)] = 0;
            ++pos;
        }
        if (pos == n_vars) break;
    }
    return acc * std::pow(w, n_vars);
}

bool TripleOracle::vanishes(const IndexTriple& t, double rel_tol) {
    return std::abs(integral(t)) < rel_tol * scale(t.m);
}

} // namespace mfl
