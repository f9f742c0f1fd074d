#pragma once

// Deterministic limit shapes G#_{eps_Z}: truncated smooth-support Fourier
// series with a certified tail bound, plus enumeration of the atlas over all
// signatures.
//
// Tail certification uses that the support generates a multiplicative
// semigroup whose full harmonic sum is the exact finite Euler product
// prod (1 - 1/p)^{-1}; the discarded tail is bounded by
// (2/pi) * (1 - 1/B^2)^{-1} * (EulerProduct - sum_{smooth n <= B} 1/n),
// since |g_n(t)| <= 1/(pi |n+1|) and 1/(n+1) + 1/(n-1) <= (2/n)/(1 - 1/B^2)
// for the +-n pair with n > B.

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gausspath/arith.hpp"
#include "gausspath/paths.hpp"

namespace gausspath::atlas {

using arith::EpsilonSignature;
using paths::PathSample;
using std::int64_t;
using cplx = std::complex<double>;

constexpr double kPi = 3.141592653589793238462643;
constexpr double kTwoPi = 2.0 * kPi;

inline double smooth_harmonic_full(const EpsilonSignature& sig) {
    double prod = 1.0;
    for (int64_t p : sig.support()) prod *= static_cast<double>(p) / static_cast<double>(p - 1);
    return prod;
}

inline double certified_tail(const EpsilonSignature& sig, int64_t B) {
    if (B < 2) throw std::invalid_argument("certified_tail: B must be >= 2");
    auto smooth = arith::enumerate_smooth(sig, B);
    // sum ascending in 1/n: accumulate from the largest n
    double partial = 0.0;
    for (auto it = smooth.rbegin(); it != smooth.rend(); ++it) partial += 1.0 / static_cast<double>(it->first);
    double tail_harmonic = smooth_harmonic_full(sig) - partial;
    if (tail_harmonic < 0) tail_harmonic = 0;
    double b = static_cast<double>(B);
    return (2.0 / kPi) * tail_harmonic / (1.0 - 1.0 / (b * b));
}

// Truncated shape: signature, requested tolerance, the smallest power-of-two
// cutoff B whose certified tail meets it, and the cached term list.
struct ShapeSpec {
    EpsilonSignature signature;
    double tolerance = 1e-4;
    int64_t B = 2;
    double tail_bound = 0.0;
    std::vector<std::pair<int64_t, int>> terms;  // (n, eps_n), n positive smooth <= B
};

inline ShapeSpec make_shape_spec(const EpsilonSignature& sig, double tolerance) {
    sig.validate();
    if (!(tolerance > 0)) throw std::invalid_argument("make_shape_spec: tolerance must be positive");
    ShapeSpec spec;
    spec.signature = sig;
    spec.tolerance = tolerance;
    int64_t B = 2;
    while (true) {
        double tail = certified_tail(sig, B);
        if (tail <= tolerance) {
            spec.B = B;
            spec.tail_bound = tail;
            break;
        }
        if (B > (int64_t(1) << 50))
            throw std::invalid_argument("make_shape_spec: tolerance needs terms beyond float-exact range");
        B *= 2;
    }
    spec.terms = arith::enumerate_smooth(sig, spec.B);
    return spec;
}

// G#(t) = sum over +-(smooth support), |n| <= B, eps_n (e((n+1)t)-1)/(2 pi i (n+1)) + t.
inline cplx gsharp_eval(const ShapeSpec& spec, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("gsharp_eval: t must lie in [0,1]");
    if (t == 0.0) return cplx(0.0, 0.0);
    if (t == 1.0) return cplx(1.0, 0.0);  // every Fourier term vanishes at integers
    paths::detail::KahanC acc;
    for (auto& [n, eps] : spec.terms) {
        if (eps == 0) continue;
        double e = static_cast<double>(eps);
        {
            double k = static_cast<double>(n + 1);
            double th = kTwoPi * std::fmod(k * t, 1.0);
            // (e(kt) - 1) / (2 pi i k)
            cplx num(std::cos(th) - 1.0, std::sin(th));
            acc.add(e * cplx(num.imag(), -num.real()) / (kTwoPi * k));
        }
        if (n >= 2) {  // negative twin -n, skipping n = -1
            double k = static_cast<double>(-n + 1);
            double th = kTwoPi * std::fmod(k * t, 1.0);
            cplx num(std::cos(th) - 1.0, std::sin(th));
            acc.add(e * cplx(num.imag(), -num.real()) / (kTwoPi * k));
        }
    }
    return acc.sum + cplx(t, 0.0);
}

// G#(a/q + h) - G#(a/q) evaluated term-by-term: phases e((n+1) a/q) come from
// an exact root-of-unity table and the increment uses e(x)-1 =
// (-2 sin^2(pi x), sin(2 pi x)), so the difference carries no cancellation
// error from subtracting two O(1) values.  Needed by the slope probes, where
// |h| can be as small as 1e-16.
inline cplx gsharp_diff(const ShapeSpec& spec, int64_t a, int64_t q, double h) {
    if (q < 2) throw std::invalid_argument("gsharp_diff: q must be >= 2");
    int64_t am = ((a % q) + q) % q;
    std::vector<cplx> w(static_cast<size_t>(q));
    for (int64_t r = 0; r < q; ++r) {
        double th = kTwoPi * static_cast<double>(r) / static_cast<double>(q);
        w[static_cast<size_t>(r)] = cplx(std::cos(th), std::sin(th));
    }
    auto circ = [](double x) {  // e(x) - 1
        double s = std::sin(kPi * x);
        return cplx(-2.0 * s * s, std::sin(kTwoPi * x));
    };
    paths::detail::KahanC acc;
    for (auto& [n, eps] : spec.terms) {
        if (eps == 0) continue;
        double e = static_cast<double>(eps);
        {
            int64_t k = n + 1;
            cplx phase = w[static_cast<size_t>(((k % q) * am) % q)];
            cplx num = phase * circ(static_cast<double>(k) * h);
            acc.add(e * cplx(num.imag(), -num.real()) / (kTwoPi * static_cast<double>(k)));
        }
        if (n >= 2) {
            int64_t k = -n + 1;
            int64_t kr = ((k % q) + q) % q;
            cplx phase = w[static_cast<size_t>((kr * am) % q)];
            cplx num = phase * circ(static_cast<double>(k) * h);
            acc.add(e * cplx(num.imag(), -num.real()) / (kTwoPi * static_cast<double>(k)));
        }
    }
    return acc.sum + cplx(h, 0.0);
}

// All 2 * 3^{pi(Z)-1} signatures in lexicographic order (-1 < 0 < 1 per
// prime, eps_2 in {-1,1}).
inline std::vector<EpsilonSignature> enumerate_signatures(int64_t Z) {
    if (Z < 2) throw std::invalid_argument("enumerate_signatures: Z must be >= 2");
    auto ps = arith::primes_upto(Z);
    std::vector<std::vector<int>> choices;
    choices.push_back({-1, 1});
    for (size_t i = 1; i < ps.size(); ++i) choices.push_back({-1, 0, 1});

    std::vector<EpsilonSignature> out;
    std::vector<size_t> idx(ps.size(), 0);
    while (true) {
        EpsilonSignature sig;
        sig.Z = Z;
        for (size_t i = 0; i < ps.size(); ++i) sig.eps[ps[i]] = choices[i][idx[i]];
        out.push_back(sig);
        size_t k = ps.size();
        while (k > 0) {
            --k;
            if (++idx[k] < choices[k].size()) break;
            idx[k] = 0;
            if (k == 0) return out;
        }
    }
}

inline PathSample gsharp_grid(const ShapeSpec& spec, int64_t R) {
    if (R < 1) throw std::invalid_argument("gsharp_grid: resolution must be >= 1");
    PathSample s;
    s.resolution = R;
    s.label = spec.signature.compact_name();
    s.values.resize(static_cast<size_t>(R) + 1);
    for (int64_t i = 0; i <= R; ++i)
        s.values[static_cast<size_t>(i)] = gsharp_eval(spec, static_cast<double>(i) / static_cast<double>(R));
    return s;
}

} // namespace gausspath::atlas
