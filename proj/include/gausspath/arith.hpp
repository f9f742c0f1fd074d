#pragma once

// Exact integer and number-theoretic primitives shared by every other module:
// Jacobi symbols, the eta weights, admissible-modulus families, multiplicative
// orders and bounded smooth-number enumeration.  Everything here is a pure
// function of its inputs and safe to call from any number of threads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gausspath::arith {

using std::int64_t;
using std::uint64_t;

// ---------------------------------------------------------------------------
// modular helpers (128-bit intermediates, valid for any 64-bit modulus)
// ---------------------------------------------------------------------------

inline uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) {
    return static_cast<uint64_t>((static_cast<__uint128_t>(a) * b) % m);
}

inline uint64_t powmod(uint64_t a, uint64_t e, uint64_t m) {
    if (m == 1) return 0;
    uint64_t r = 1;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

// Deterministic Miller-Rabin for 64-bit inputs.
inline bool is_prime(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    // Sinclair's witness set, deterministic below 3.3e24.
    for (uint64_t a : {2ull, 325ull, 9375ull, 28178ull, 450775ull, 9780504ull, 1795265022ull}) {
        uint64_t x = powmod(a % n, d, n);
        if (x == 0 || x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 0; i < s - 1; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

inline std::vector<int64_t> primes_upto(int64_t n) {
    std::vector<int64_t> out;
    if (n < 2) return out;
    std::vector<bool> comp(static_cast<size_t>(n) + 1, false);
    for (int64_t i = 2; i <= n; ++i) {
        if (!comp[static_cast<size_t>(i)]) {
            out.push_back(i);
            for (int64_t j = i * i; j <= n; j += i) comp[static_cast<size_t>(j)] = true;
        }
    }
    return out;
}

namespace detail {

inline uint64_t pollard_rho(uint64_t n) {
    if (n % 2 == 0) return 2;
    uint64_t x = 2, y = 2, d = 1, c = 1;
    while (true) {
        x = 2; y = 2; d = 1;
        while (d == 1) {
            x = mulmod(x, x, n) + c;
            if (x >= n) x -= n;
            y = mulmod(y, y, n) + c;
            if (y >= n) y -= n;
            y = mulmod(y, y, n) + c;
            if (y >= n) y -= n;
            d = std::gcd(x > y ? x - y : y - x, n);
        }
        if (d != n) return d;
        ++c;
    }
}

inline void factor_rec(uint64_t n, std::map<uint64_t, int>& out) {
    if (n == 1) return;
    if (is_prime(n)) { ++out[n]; return; }
    uint64_t d = pollard_rho(n);
    factor_rec(d, out);
    factor_rec(n / d, out);
}

} // namespace detail

// Prime factorization of |n|, sorted by prime.
inline std::vector<std::pair<int64_t, int>> factorize(int64_t n) {
    if (n == 0) throw std::invalid_argument("factorize: n must be nonzero");
    uint64_t m = static_cast<uint64_t>(n < 0 ? -n : n);
    std::map<uint64_t, int> acc;
    for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull, 41ull, 43ull}) {
        while (m % p == 0) { ++acc[p]; m /= p; }
    }
    if (m > 1) detail::factor_rec(m, acc);
    std::vector<std::pair<int64_t, int>> out;
    out.reserve(acc.size());
    for (auto& [p, e] : acc) out.emplace_back(static_cast<int64_t>(p), e);
    return out;
}

inline bool is_squarefree(int64_t n) {
    if (n == 0) return false;
    for (auto& [p, e] : factorize(n))
        if (e > 1) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Jacobi symbol (a/n), binary reciprocity algorithm
// ---------------------------------------------------------------------------

inline int jacobi(int64_t a, int64_t n) {
    if (n <= 0 || n % 2 == 0)
        throw std::invalid_argument("jacobi: lower argument must be odd and positive");
    a %= n;
    if (a < 0) a += n;
    uint64_t x = static_cast<uint64_t>(a), y = static_cast<uint64_t>(n);
    int sign = 1;
    while (x != 0) {
        while (x % 2 == 0) {
            x /= 2;
            uint64_t r = y % 8;
            if (r == 3 || r == 5) sign = -sign;
        }
        std::swap(x, y);
        if (x % 4 == 3 && y % 4 == 3) sign = -sign;
        x %= y;
    }
    return y == 1 ? sign : 0;
}

// ---------------------------------------------------------------------------
// eta weights (exact rationals)
// ---------------------------------------------------------------------------

struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d) : num(n), den(d) {
        if (den == 0) throw std::invalid_argument("Rational: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        long long g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
};

inline Rational rational_mul(const Rational& a, const Rational& b) {
    __int128 n = static_cast<__int128>(a.num) * b.num;
    __int128 d = static_cast<__int128>(a.den) * b.den;
    auto gcd128 = [](__int128 x, __int128 y) {
        if (x < 0) x = -x;
        while (y) { __int128 t = x % y; x = y; y = t; }
        return x;
    };
    __int128 g = gcd128(n, d);
    if (g > 1) { n /= g; d /= g; }
    if (n > static_cast<__int128>(9e18) || n < -static_cast<__int128>(9e18) || d > static_cast<__int128>(9e18))
        throw std::overflow_error("Rational: overflow in multiplication");
    return Rational(static_cast<long long>(n), static_cast<long long>(d));
}

// eta(h) = prod_{p | |h|, p > 2} p/(p+1); eta(0) = 0, eta(+-1) = 1.
inline Rational eta(int64_t h) {
    if (h == 0) return Rational(0, 1);
    Rational r(1, 1);
    for (auto& [p, e] : factorize(h)) {
        if (p > 2) r = rational_mul(r, Rational(p, p + 1));
    }
    return r;
}

// Same product taken over an explicit list of distinct odd primes, as a double.
// Moment sums convert eta factor-by-factor at the call site.
inline double eta_double(const std::vector<int64_t>& odd_primes) {
    double r = 1.0;
    for (int64_t p : odd_primes) r *= static_cast<double>(p) / static_cast<double>(p + 1);
    return r;
}

// ---------------------------------------------------------------------------
// epsilon signatures
// ---------------------------------------------------------------------------

// A choice eps_p in {-1,0,1} for every prime p <= Z (eps_2 in {-1,1}).
struct EpsilonSignature {
    int64_t Z = 2;
    std::map<int64_t, int> eps;  // keys are exactly the primes <= Z

    void validate() const {
        if (Z < 2) throw std::invalid_argument("EpsilonSignature: Z must be >= 2");
        auto ps = primes_upto(Z);
        if (ps.size() != eps.size())
            throw std::invalid_argument("EpsilonSignature: keys must be exactly the primes <= Z");
        for (int64_t p : ps) {
            auto it = eps.find(p);
            if (it == eps.end())
                throw std::invalid_argument("EpsilonSignature: missing prime " + std::to_string(p));
            if (it->second < -1 || it->second > 1)
                throw std::invalid_argument("EpsilonSignature: values must lie in {-1,0,1}");
        }
        if (eps.at(2) == 0)
            throw std::invalid_argument("EpsilonSignature: eps_2 must be -1 or 1");
    }

    int at(int64_t p) const {
        auto it = eps.find(p);
        if (it == eps.end())
            throw std::invalid_argument("EpsilonSignature: no entry for p=" + std::to_string(p));
        return it->second;
    }

    // primes p <= Z with eps_p != 0
    std::vector<int64_t> support() const {
        std::vector<int64_t> s;
        for (auto& [p, e] : eps)
            if (e != 0) s.push_back(p);
        return s;
    }

    // eps_n = prod eps_p^{a_p} for |n| whose prime factors all divide primes <= Z.
    int eps_of(int64_t n) const {
        if (n == 0) throw std::invalid_argument("eps_of: n must be nonzero");
        int r = 1;
        for (auto& [p, e] : factorize(n)) {
            if (p > Z) throw std::invalid_argument("eps_of: n has a prime factor exceeding Z");
            int ep = at(p);
            if (ep == 0) return 0;
            if (ep == -1 && (e & 1)) r = -r;
        }
        return r;
    }

    std::string compact_name() const {
        std::string s = "eps";
        for (auto& [p, e] : eps) {
            (void)p;
            s += (e >= 0) ? "_p" : "_m";
            s += std::to_string(e >= 0 ? e : -e);
        }
        return s;
    }
};

inline EpsilonSignature make_signature(int64_t Z, const std::vector<int>& values) {
    auto ps = primes_upto(Z);
    if (ps.size() != values.size())
        throw std::invalid_argument("make_signature: expected one value per prime <= Z");
    EpsilonSignature sig;
    sig.Z = Z;
    for (size_t i = 0; i < ps.size(); ++i) sig.eps[ps[i]] = values[i];
    sig.validate();
    return sig;
}

// Split |h| = h_Z * h^Z into its Z-smooth part and Z-rough part.
inline std::pair<int64_t, int64_t> smooth_rough_split(int64_t h, int64_t Z) {
    if (h == 0) throw std::invalid_argument("smooth_rough_split: h must be nonzero");
    int64_t a = h < 0 ? -h : h;
    int64_t smooth = 1;
    for (int64_t p : primes_upto(Z)) {
        while (a % p == 0) { a /= p; smooth *= p; }
    }
    return {smooth, a};
}

inline bool is_perfect_square(int64_t n) {
    if (n < 0) return false;
    int64_t r = static_cast<int64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && static_cast<__int128>(r) * r > n) --r;
    while (static_cast<__int128>(r + 1) * (r + 1) <= n) ++r;
    return static_cast<__int128>(r) * r == n;
}

// eta_Z(h) = eps_{h_Z} * eta(h^Z) when the Z-rough part of |h| is a perfect
// square, else 0.  eta_Z(0) = 0.
inline Rational eta_Z(int64_t h, const EpsilonSignature& sig) {
    if (h == 0) return Rational(0, 1);
    auto [hz, hrough] = smooth_rough_split(h, sig.Z);
    if (!is_perfect_square(hrough)) return Rational(0, 1);
    int e = sig.eps_of(hz);
    Rational r = eta(hrough);
    return Rational(e * r.num, r.den);
}

// ---------------------------------------------------------------------------
// modulus families
// ---------------------------------------------------------------------------

// D_Q (squarefree c = 1 mod 4 in [Q,2Q]), optionally conditioned on
// (p/c) = eps_p for every p <= Z.  eps_p = 0 requires p | c.
struct ModulusFamily {
    int64_t Q = 0;
    std::optional<EpsilonSignature> signature;
    std::vector<int64_t> members;

    bool empty() const { return members.empty(); }
};

inline ModulusFamily enumerate_family(int64_t Q, const std::optional<EpsilonSignature>& sig = std::nullopt) {
    if (Q < 3) throw std::invalid_argument("enumerate_family: Q must be >= 3");
    if (sig) sig->validate();
    const int64_t lo = Q, hi = 2 * Q;
    std::vector<bool> keep(static_cast<size_t>(hi - lo + 1), true);
    for (int64_t p = 2; p * p <= hi; ++p) {
        int64_t pp = p * p;
        for (int64_t m = ((lo + pp - 1) / pp) * pp; m <= hi; m += pp)
            keep[static_cast<size_t>(m - lo)] = false;
    }
    ModulusFamily fam;
    fam.Q = Q;
    fam.signature = sig;
    std::vector<int64_t> support;
    if (sig) {
        for (auto& [p, e] : sig->eps) { (void)e; support.push_back(p); }
    }
    for (int64_t c = lo; c <= hi; ++c) {
        if (c % 4 != 1 || !keep[static_cast<size_t>(c - lo)]) continue;
        bool ok = true;
        for (int64_t p : support) {
            if (jacobi(p, c) != sig->at(p)) { ok = false; break; }
        }
        if (ok) fam.members.push_back(c);
    }
    return fam;
}

// ---------------------------------------------------------------------------
// multiplicative order
// ---------------------------------------------------------------------------

inline int64_t euler_phi(int64_t q) {
    int64_t r = q;
    for (auto& [p, e] : factorize(q)) {
        (void)e;
        r -= r / p;
    }
    return r;
}

inline int64_t multiplicative_order(int64_t a, int64_t q) {
    if (q < 2) throw std::invalid_argument("multiplicative_order: q must be >= 2");
    int64_t am = a % q;
    if (am < 0) am += q;
    if (std::gcd(am, q) != 1)
        throw std::invalid_argument("multiplicative_order: gcd(a,q) must be 1");
    int64_t ord = euler_phi(q);
    for (auto& [p, e] : factorize(ord)) {
        (void)e;
        while (ord % p == 0 &&
               powmod(static_cast<uint64_t>(am), static_cast<uint64_t>(ord / p), static_cast<uint64_t>(q)) == 1)
            ord /= p;
    }
    return ord;
}

// ---------------------------------------------------------------------------
// smooth enumeration
// ---------------------------------------------------------------------------

// All n in [1,bound] whose prime factors lie in the support of sig, paired
// with eps_n.  Bounded DFS over exponent vectors; output sorted by n.
inline std::vector<std::pair<int64_t, int>> enumerate_smooth(const EpsilonSignature& sig, int64_t bound) {
    sig.validate();
    std::vector<std::pair<int64_t, int>> out;
    if (bound < 1) return out;
    auto supp = sig.support();
    std::vector<int> vals;
    vals.reserve(supp.size());
    for (int64_t p : supp) vals.push_back(sig.at(p));

    // DFS over primes in decreasing order so each level multiplies by one prime.
    std::function<void(size_t, int64_t, int)> rec = [&](size_t i, int64_t n, int e) {
        if (i == supp.size()) { out.emplace_back(n, e); return; }
        int64_t p = supp[i];
        int ep = vals[i];
        int64_t cur = n;
        int sign = e;
        while (true) {
            rec(i + 1, cur, sign);
            if (cur > bound / p) break;
            cur *= p;
            sign *= ep;
        }
    };
    rec(0, 1, 1);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace gausspath::arith
