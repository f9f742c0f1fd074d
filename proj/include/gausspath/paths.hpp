#pragma once

// Quadratic Gauss paths: the polygonal path G(t;c) through the partial sums
// g_j = c^{-1/2} sum_{m<=j} (m/c) e(m/c), its sharp-cutoff variant, grid
// sampling and signature extraction.  Per-modulus computations are a single
// O(c) pass with an incremental complex rotation.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "gausspath/arith.hpp"

namespace gausspath::paths {

using std::complex;
using std::int64_t;
using cplx = std::complex<double>;

constexpr double kTwoPi = 6.283185307179586476925287;

// Uniform grid of complex path values on [0,1]; values[i] is the value at
// t = i/resolution.
struct PathSample {
    int64_t resolution = 1;
    std::vector<cplx> values;
    std::string label;
};

// Smallest-prime-factor table, shared read-only across threads.
struct SpfSieve {
    std::vector<int32_t> spf;
    explicit SpfSieve(int64_t n) : spf(static_cast<size_t>(std::max<int64_t>(n, 1)) + 1, 0) {
        for (int64_t i = 2; i < static_cast<int64_t>(spf.size()); ++i) {
            if (spf[static_cast<size_t>(i)] == 0) {
                for (int64_t j = i; j < static_cast<int64_t>(spf.size()); j += i)
                    if (spf[static_cast<size_t>(j)] == 0) spf[static_cast<size_t>(j)] = static_cast<int32_t>(i);
            }
        }
    }
    int64_t operator[](int64_t i) const { return spf[static_cast<size_t>(i)]; }
    int64_t limit() const { return static_cast<int64_t>(spf.size()) - 1; }
};

// Jacobi values (m/c) for m = 1..limit via complete multiplicativity:
// only primes require a reciprocity evaluation.
inline std::vector<int8_t> jacobi_row(int64_t c, int64_t limit, const SpfSieve& sieve) {
    if (sieve.limit() < limit) throw std::invalid_argument("jacobi_row: sieve too small");
    std::vector<int8_t> val(static_cast<size_t>(limit) + 1, 0);
    if (limit >= 1) val[1] = 1;
    for (int64_t m = 2; m <= limit; ++m) {
        int64_t p = sieve[m];
        if (p == m) {
            val[static_cast<size_t>(m)] = static_cast<int8_t>(arith::jacobi(m % c, c));
        } else {
            val[static_cast<size_t>(m)] =
                static_cast<int8_t>(val[static_cast<size_t>(p)] * val[static_cast<size_t>(m / p)]);
        }
    }
    return val;
}

inline void require_in_D(int64_t c) {
    if (c < 5 || c % 4 != 1 || !arith::is_squarefree(c))
        throw std::invalid_argument("modulus must be squarefree and = 1 mod 4");
}

namespace detail {

// e(m/c) by per-step rotation, renormalized every 2^16 steps to bound drift.
struct UnitRotor {
    cplx cur{1.0, 0.0};
    cplx step;
    int64_t c;
    int count = 0;
    int64_t index = 0;
    explicit UnitRotor(int64_t c_) : c(c_) {
        double th = kTwoPi / static_cast<double>(c);
        step = cplx(std::cos(th), std::sin(th));
    }
    // advance to e((index+1)/c)
    cplx next() {
        cur *= step;
        ++index;
        if (++count == (1 << 16)) {
            count = 0;
            double th = kTwoPi * (static_cast<double>(index % c) / static_cast<double>(c));
            cur = cplx(std::cos(th), std::sin(th));
        }
        return cur;
    }
};

struct KahanC {
    cplx sum{0.0, 0.0};
    cplx comp{0.0, 0.0};
    void add(cplx x) {
        cplx y = x - comp;
        cplx t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

} // namespace detail

// Partial sums g_j for the ascending list of indices js (each in [0, c-1]),
// computed in one pass.
inline std::vector<cplx> partial_sums_at(int64_t c, const std::vector<int64_t>& js, const SpfSieve* sieve = nullptr) {
    require_in_D(c);
    std::vector<cplx> out;
    out.reserve(js.size());
    if (js.empty()) return out;
    int64_t jmax = js.back();
    for (size_t i = 0; i < js.size(); ++i) {
        if (js[i] < 0 || js[i] > c - 1 || (i && js[i] < js[i - 1]))
            throw std::invalid_argument("partial_sums_at: indices must be ascending in [0, c-1]");
    }

    std::vector<int8_t> jac;
    if (sieve && sieve->limit() >= jmax) {
        jac = jacobi_row(c, jmax, *sieve);
    } else {
        SpfSieve local(jmax);
        jac = jacobi_row(c, jmax, local);
    }

    double norm = 1.0 / std::sqrt(static_cast<double>(c));
    detail::UnitRotor rot(c);
    detail::KahanC acc;
    size_t k = 0;
    while (k < js.size() && js[k] == 0) { out.push_back(cplx(0, 0)); ++k; }
    for (int64_t m = 1; m <= jmax && k < js.size(); ++m) {
        cplx e = rot.next();
        int8_t s = jac[static_cast<size_t>(m)];
        if (s) acc.add((s > 0 ? e : -e) * norm);
        while (k < js.size() && js[k] == m) { out.push_back(acc.sum); ++k; }
    }
    return out;
}

// All c partial sums g_0..g_{c-1}.  Intended for moduli small enough to hold
// in memory; family sweeps should use partial_sums_at or path_grid.
inline std::vector<cplx> gauss_path(int64_t c, const SpfSieve* sieve = nullptr) {
    require_in_D(c);
    std::vector<int64_t> js(static_cast<size_t>(c));
    for (int64_t j = 0; j < c; ++j) js[static_cast<size_t>(j)] = j;
    return partial_sums_at(c, js, sieve);
}

// G(t;c): linear interpolation of the g_j at nodes t = j/(c-1).
inline cplx path_eval(int64_t c, double t, const SpfSieve* sieve = nullptr) {
    require_in_D(c);
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("path_eval: t must lie in [0,1]");
    double x = t * static_cast<double>(c - 1);
    int64_t j = static_cast<int64_t>(x);
    if (j >= c - 1) {
        auto g = partial_sums_at(c, {c - 1}, sieve);
        return g[0];
    }
    auto g = partial_sums_at(c, {j, j + 1}, sieve);
    double frac = x - static_cast<double>(j);
    return g[0] + frac * (g[1] - g[0]);
}

// Sharp-cutoff index floor((c-1) t), snapped to the nearest integer within
// 1e-9 to absorb the binary representation of rational t.
inline int64_t cutoff_index(int64_t c, double t) {
    double x = t * static_cast<double>(c - 1);
    double r = std::nearbyint(x);
    if (std::abs(x - r) < 1e-9) return static_cast<int64_t>(r);
    return static_cast<int64_t>(std::floor(x));
}

// G~(t;c) = c^{-1/2} sum_{1<=x<=(c-1)t} (x/c) e(x/c): no interpolation.
inline cplx tilde_path_eval(int64_t c, double t, const SpfSieve* sieve = nullptr) {
    require_in_D(c);
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("tilde_path_eval: t must lie in [0,1]");
    int64_t j = cutoff_index(c, t);
    auto g = partial_sums_at(c, {j}, sieve);
    return g[0];
}

// PathSample with values[i] = G(i/R; c), one O(c) pass.
inline PathSample path_grid(int64_t c, int64_t R, const SpfSieve* sieve = nullptr) {
    require_in_D(c);
    if (R < 1) throw std::invalid_argument("path_grid: resolution must be >= 1");
    std::vector<int64_t> need;
    need.reserve(2 * static_cast<size_t>(R) + 2);
    for (int64_t i = 0; i <= R; ++i) {
        double x = (static_cast<double>(i) / static_cast<double>(R)) * static_cast<double>(c - 1);
        int64_t j = std::min<int64_t>(static_cast<int64_t>(x), c - 2);
        need.push_back(j);
        need.push_back(j + 1);
    }
    std::sort(need.begin(), need.end());
    need.erase(std::unique(need.begin(), need.end()), need.end());
    auto gs = partial_sums_at(c, need, sieve);

    auto g_at = [&](int64_t j) {
        auto it = std::lower_bound(need.begin(), need.end(), j);
        return gs[static_cast<size_t>(it - need.begin())];
    };

    PathSample s;
    s.resolution = R;
    s.label = "c=" + std::to_string(c);
    s.values.resize(static_cast<size_t>(R) + 1);
    for (int64_t i = 0; i <= R; ++i) {
        double x = (static_cast<double>(i) / static_cast<double>(R)) * static_cast<double>(c - 1);
        int64_t j = std::min<int64_t>(static_cast<int64_t>(x), c - 2);
        double frac = x - static_cast<double>(j);
        cplx a = g_at(j), b = g_at(j + 1);
        s.values[static_cast<size_t>(i)] = a + frac * (b - a);
    }
    return s;
}

// eps_p = (p/c) for each prime p <= Z.
inline arith::EpsilonSignature eps_signature(int64_t c, int64_t Z) {
    if (c % 2 == 0) throw std::invalid_argument("eps_signature: c must be odd");
    arith::EpsilonSignature sig;
    sig.Z = Z;
    for (int64_t p : arith::primes_upto(Z)) sig.eps[p] = arith::jacobi(p, c);
    return sig;
}

inline double sup_distance(const PathSample& a, const PathSample& b) {
    if (a.resolution != b.resolution || a.values.size() != b.values.size())
        throw std::invalid_argument("sup_distance: resolutions must match");
    double m = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i)
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

} // namespace gausspath::paths
