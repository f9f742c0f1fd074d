#pragma once

// The probabilistic side: completely multiplicative random variables X_n with
// the lambda_p laws, samples of the limiting random Fourier series G*, and
// Monte Carlo deviation estimates against the deterministic shapes G#.
//
// Randomness is counter-based: every X_p draw is a pure function of
// (seed, stream, prime index), so samples are reproducible for any worker
// count and evaluation order.

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "gausspath/arith.hpp"
#include "gausspath/atlas.hpp"
#include "gausspath/parallel.hpp"
#include "gausspath/paths.hpp"

namespace gausspath::random_model {

using arith::EpsilonSignature;
using paths::PathSample;
using std::int64_t;
using std::uint64_t;
using cplx = std::complex<double>;

constexpr double kTwoPi = 6.283185307179586476925287;

inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline uint64_t keyed_draw(uint64_t seed, uint64_t stream, uint64_t index) {
    return mix64(mix64(seed ^ 0x5851f42d4c957f2dull) + mix64(stream * 0xd6e8feb86659fd93ull + index));
}

// One draw of X_p from lambda_p:
//   P(0) = 1/(p+1), P(+1) = P(-1) = p/(2(p+1));  p = 2 is the fair sign.
inline int draw_xp(int64_t p, uint64_t seed, uint64_t stream, uint64_t prime_index) {
    uint64_t r = keyed_draw(seed, stream, 2 * prime_index);
    uint64_t s = keyed_draw(seed, stream, 2 * prime_index + 1);
    if (p > 2 && r % static_cast<uint64_t>(p + 1) == 0) return 0;
    return (s & 1) ? 1 : -1;
}

// Independent draws X_p for all primes p <= y, with entries frozen to eps_p
// for p <= Z when a signature is present.
struct MultiplicativeSample {
    int64_t y = 2;
    uint64_t seed = 0;
    uint64_t stream = 0;
    std::vector<int64_t> truncation_primes;
    std::vector<int8_t> values;  // aligned with truncation_primes
    std::optional<EpsilonSignature> fixed;

    int value_of_prime(int64_t p) const {
        auto it = std::lower_bound(truncation_primes.begin(), truncation_primes.end(), p);
        if (it == truncation_primes.end() || *it != p)
            throw std::invalid_argument("MultiplicativeSample: prime not sampled");
        return values[static_cast<size_t>(it - truncation_primes.begin())];
    }
};

inline MultiplicativeSample sample_multiplicative(int64_t y, const std::optional<EpsilonSignature>& sig,
                                                  uint64_t seed, uint64_t stream = 0) {
    if (y < 2) throw std::invalid_argument("sample_multiplicative: y must be >= 2");
    if (sig) sig->validate();
    MultiplicativeSample s;
    s.y = y;
    s.seed = seed;
    s.stream = stream;
    s.fixed = sig;
    s.truncation_primes = arith::primes_upto(y);
    s.values.resize(s.truncation_primes.size());
    for (size_t i = 0; i < s.truncation_primes.size(); ++i) {
        int64_t p = s.truncation_primes[i];
        if (sig && p <= sig->Z) {
            s.values[i] = static_cast<int8_t>(sig->at(p));
        } else {
            s.values[i] = static_cast<int8_t>(draw_xp(p, seed, stream, static_cast<uint64_t>(i)));
        }
    }
    return s;
}

// X_n for all 1 <= n <= M by complete multiplicativity over an SPF table.
inline std::vector<int8_t> x_table(const MultiplicativeSample& s, int64_t M, const paths::SpfSieve* sieve = nullptr) {
    if (M < 1) throw std::invalid_argument("x_table: M must be >= 1");
    if (s.y < M) {
        for (int64_t q = s.y + 1; q <= M; ++q)
            if (arith::is_prime(static_cast<uint64_t>(q)))
                throw std::invalid_argument("x_table: sample cutoff y too small for M");
    }
    std::optional<paths::SpfSieve> local;
    if (!sieve || sieve->limit() < M) { local.emplace(M); sieve = &*local; }
    std::vector<int8_t> x(static_cast<size_t>(M) + 1, 0);
    x[1] = 1;
    for (int64_t n = 2; n <= M; ++n) {
        int64_t p = (*sieve)[n];
        x[static_cast<size_t>(n)] = (p == n) ? static_cast<int8_t>(s.value_of_prime(p))
                                             : static_cast<int8_t>(x[static_cast<size_t>(p)] * x[static_cast<size_t>(n / p)]);
    }
    return x;
}

// X_n for a single n (|n|), by factorization.
inline int x_of(const MultiplicativeSample& s, int64_t n) {
    if (n == 0) throw std::invalid_argument("x_of: n must be nonzero");
    int r = 1;
    for (auto& [p, e] : arith::factorize(n)) {
        int v = s.value_of_prime(p);
        if (v == 0) return 0;
        if (v == -1 && (e & 1)) r = -r;
    }
    return r;
}

// One sample of the truncated series
//   sum_{n != -1,0, |n+1| <= N} X_n (e((n+1)t)-1)/(2 pi i (n+1)) + t
// on the grid t = i/R.  With h = n+1 the grid phases e(h i/R) depend only on
// h mod R, so the sum collapses to R frequency buckets and the grid costs
// O(N + R^2) instead of O(N R).  Endpoint values are 0 and 1 exactly: every
// Fourier term vanishes there.
inline PathSample sample_limit_path(const MultiplicativeSample& s, int64_t N, int64_t R) {
    if (N < 2) throw std::invalid_argument("sample_limit_path: N must be >= 2");
    if (R < 1) throw std::invalid_argument("sample_limit_path: R must be >= 1");
    auto x = x_table(s, N + 1);

    std::vector<paths::detail::KahanC> bucket(static_cast<size_t>(R));
    paths::detail::KahanC s0;
    for (int64_t h = -N; h <= N; ++h) {
        if (h == 0 || h == 1) continue;
        int8_t xn = x[static_cast<size_t>(h < 0 ? 1 - h : h - 1)];  // X_{|h-1|}
        if (!xn) continue;
        // X_n / (2 pi i h) = -i X_n / (2 pi h)
        cplx coeff(0.0, -static_cast<double>(xn) / (kTwoPi * static_cast<double>(h)));
        bucket[static_cast<size_t>(((h % R) + R) % R)].add(coeff);
        s0.add(coeff);
    }

    std::vector<cplx> w(static_cast<size_t>(R));
    for (int64_t r = 0; r < R; ++r) {
        double th = kTwoPi * static_cast<double>(r) / static_cast<double>(R);
        w[static_cast<size_t>(r)] = cplx(std::cos(th), std::sin(th));
    }

    PathSample out;
    out.resolution = R;
    out.label = "sample";
    out.values.assign(static_cast<size_t>(R) + 1, cplx(0.0, 0.0));
    out.values[0] = cplx(0.0, 0.0);
    out.values[static_cast<size_t>(R)] = cplx(1.0, 0.0);
    for (int64_t i = 1; i < R; ++i) {
        paths::detail::KahanC acc;
        for (int64_t k = 0; k < R; ++k)
            acc.add(bucket[static_cast<size_t>(k)].sum * w[static_cast<size_t>((k * i) % R)]);
        out.values[static_cast<size_t>(i)] =
            acc.sum - s0.sum + cplx(static_cast<double>(i) / static_cast<double>(R), 0.0);
    }
    return out;
}

struct DeviationReport {
    int64_t Z = 0;
    double delta = 0.0;
    int64_t trials = 0;
    int64_t N = 0;
    int64_t R = 0;
    uint64_t seed = 0;
    double estimate = 0.0;
    double stderr_est = 0.0;
};

// Monte Carlo estimate of P(||G*_{eps_Z} - G#_{eps_Z}||_inf >= delta), sup
// taken over the grid t = i/R.  Trial k uses stream k, so the estimate is
// independent of the worker count.
inline DeviationReport estimate_deviation_prob(const EpsilonSignature& sig, double delta, int64_t trials,
                                               int64_t N = 100000, int64_t R = 256, uint64_t seed = 1,
                                               double shape_tolerance = 1e-6) {
    if (!(delta > 0)) throw std::invalid_argument("estimate_deviation_prob: delta must be positive");
    if (trials < 1) throw std::invalid_argument("estimate_deviation_prob: trials must be >= 1");
    auto spec = atlas::make_shape_spec(sig, shape_tolerance);
    PathSample sharp = atlas::gsharp_grid(spec, R);

    std::vector<int8_t> exceeded(static_cast<size_t>(trials), 0);
    par::parallel_for(trials, [&](int64_t k) {
        auto sample = sample_multiplicative(N + 1, sig, seed, static_cast<uint64_t>(k));
        PathSample path = sample_limit_path(sample, N, R);
        exceeded[static_cast<size_t>(k)] = paths::sup_distance(path, sharp) >= delta ? 1 : 0;
    });
    int64_t count = 0;
    for (int8_t e : exceeded) count += e;

    DeviationReport rep;
    rep.Z = sig.Z;
    rep.delta = delta;
    rep.trials = trials;
    rep.N = N;
    rep.R = R;
    rep.seed = seed;
    rep.estimate = static_cast<double>(count) / static_cast<double>(trials);
    rep.stderr_est = std::sqrt(rep.estimate * (1.0 - rep.estimate) / static_cast<double>(trials));
    return rep;
}

} // namespace gausspath::random_model
