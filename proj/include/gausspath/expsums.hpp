#pragma once

// Complete exponential sums s*(a/m; eps_Z), generalized Gauss power sums
// sigma_d^iota, sawtooth-weighted sums s~_q, character-sum cross-checks, the
// cusp constants c+/c'/c- and a scan for cusp points.
//
// The tuple sums are evaluated exactly by a count DP over the pair
// (residue mod m, accumulated sign): the summand depends on each exponent m_p
// only through its class modulo lcm(ord_m p, 2), so the full (2 phi(m))^k
// tuple box collapses to small per-prime cycles with integer multiplicities.
// A direct reference enumeration is kept alongside for cross-validation.

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gausspath/arith.hpp"
#include "gausspath/atlas.hpp"

namespace gausspath::expsums {

using arith::EpsilonSignature;
using std::complex;
using std::int64_t;
using cplx = std::complex<double>;

constexpr double kPi = 3.141592653589793238462643;
constexpr double kTwoPi = 2.0 * kPi;
// Euler-Mascheroni, 20 digits.
constexpr double kEulerGamma = 0.57721566490153286061;

// roots of unity e(r/m) for r in [0,m)
inline std::vector<cplx> unit_roots(int64_t m) {
    std::vector<cplx> w(static_cast<size_t>(m));
    for (int64_t r = 0; r < m; ++r) {
        double th = kTwoPi * static_cast<double>(r) / static_cast<double>(m);
        w[static_cast<size_t>(r)] = cplx(std::cos(th), std::sin(th));
    }
    return w;
}

// primes p <= Z with eps_p != 0 and p not dividing m
inline std::vector<int64_t> support_coprime_to(const EpsilonSignature& sig, int64_t m) {
    std::vector<int64_t> ps;
    for (int64_t p : sig.support())
        if (m % p != 0) ps.push_back(p);
    return ps;
}

// ---------------------------------------------------------------------------
// generalized tuple sums
// ---------------------------------------------------------------------------
//
// s(a/m; eps)[delta', m'] = average over exponent tuples (m_p), p in
// {p <= Z : eps_p != 0, p does not divide m'}, 0 <= m_p < 2 phi(m), of
// e(a prod p^{delta' m_p} / m) prod eps_p^{m_p}.
// s*(a/m; eps) is the case delta' = 1, m' = m.

inline cplx s_gen(int64_t a, int64_t m, const EpsilonSignature& sig, int64_t delta_prime, int64_t m_prime) {
    if (m < 2) throw std::invalid_argument("s_gen: modulus must be >= 2");
    int64_t am = ((a % m) + m) % m;
    if (std::gcd(am, m) != 1) throw std::invalid_argument("s_gen: gcd(a,m) must be 1");
    std::vector<int64_t> ps;
    for (int64_t p : sig.support())
        if (m_prime % p != 0) ps.push_back(p);
    for (int64_t p : ps)
        if (m % p == 0) throw std::invalid_argument("s_gen: tuple primes must be coprime to m");

    // DP over (residue, accumulated sign), carrying per-prime averages: the
    // summand depends on m_p only through its class mod L_p, so averaging
    // over [0, 2 phi(m)) equals averaging over one cycle.
    std::vector<double> plus(static_cast<size_t>(m), 0.0), minus(static_cast<size_t>(m), 0.0);
    plus[1] = 1.0;
    for (int64_t p : ps) {
        int eps_p = sig.at(p);
        // cycle of (p^{delta' j} mod m, eps_p^j) in j
        int64_t ord = arith::multiplicative_order(p, m);
        int64_t step_ord = ord / std::gcd(ord, delta_prime);
        int64_t L = (eps_p == -1) ? std::lcm<int64_t>(step_ord, 2) : step_ord;
        double mult = 1.0 / static_cast<double>(L);

        std::vector<double> nplus(static_cast<size_t>(m), 0.0), nminus(static_cast<size_t>(m), 0.0);
        int64_t pw = 1;
        int sgn = 1;
        int64_t pd = static_cast<int64_t>(arith::powmod(static_cast<uint64_t>(p % m),
                                                        static_cast<uint64_t>(delta_prime),
                                                        static_cast<uint64_t>(m)));
        for (int64_t j = 0; j < L; ++j) {
            for (int64_t r = 0; r < m; ++r) {
                double cp = plus[static_cast<size_t>(r)], cm = minus[static_cast<size_t>(r)];
                if (cp == 0.0 && cm == 0.0) continue;
                int64_t nr = static_cast<int64_t>(arith::mulmod(static_cast<uint64_t>(r), static_cast<uint64_t>(pw),
                                                                static_cast<uint64_t>(m)));
                if (sgn > 0) {
                    nplus[static_cast<size_t>(nr)] += cp * mult;
                    nminus[static_cast<size_t>(nr)] += cm * mult;
                } else {
                    nminus[static_cast<size_t>(nr)] += cp * mult;
                    nplus[static_cast<size_t>(nr)] += cm * mult;
                }
            }
            pw = static_cast<int64_t>(arith::mulmod(static_cast<uint64_t>(pw), static_cast<uint64_t>(pd),
                                                    static_cast<uint64_t>(m)));
            sgn *= eps_p;
        }
        plus.swap(nplus);
        minus.swap(nminus);
    }

    auto w = unit_roots(m);
    cplx acc(0.0, 0.0);
    for (int64_t r = 0; r < m; ++r) {
        double d = plus[static_cast<size_t>(r)] - minus[static_cast<size_t>(r)];
        if (d != 0.0) acc += d * w[static_cast<size_t>((am * r) % m)];
    }
    return acc;
}

// Reference implementation: the literal tuple enumeration.  Guarded by a
// term budget; used by tests to pin down the optimized evaluator.
inline cplx s_gen_reference(int64_t a, int64_t m, const EpsilonSignature& sig, int64_t delta_prime, int64_t m_prime,
                            int64_t term_budget = 100'000'000) {
    if (m < 2) throw std::invalid_argument("s_gen_reference: modulus must be >= 2");
    int64_t am = ((a % m) + m) % m;
    if (std::gcd(am, m) != 1) throw std::invalid_argument("s_gen_reference: gcd(a,m) must be 1");
    std::vector<int64_t> ps;
    for (int64_t p : sig.support())
        if (m_prime % p != 0) ps.push_back(p);
    const int64_t range = 2 * arith::euler_phi(m);
    double total = 1.0;
    for (size_t i = 0; i < ps.size(); ++i) total *= static_cast<double>(range);
    if (total > static_cast<double>(term_budget))
        throw std::invalid_argument("s_gen_reference: tuple count exceeds budget");

    auto w = unit_roots(m);
    if (ps.empty()) return w[static_cast<size_t>(am)];
    std::vector<int64_t> idx(ps.size(), 0);
    cplx acc(0.0, 0.0);
    while (true) {
        int64_t r = am;
        int sgn = 1;
        for (size_t i = 0; i < ps.size(); ++i) {
            int64_t pw = static_cast<int64_t>(arith::powmod(static_cast<uint64_t>(ps[i] % m),
                                                            static_cast<uint64_t>(delta_prime * idx[i]),
                                                            static_cast<uint64_t>(m)));
            r = static_cast<int64_t>(arith::mulmod(static_cast<uint64_t>(r), static_cast<uint64_t>(pw),
                                                   static_cast<uint64_t>(m)));
            if (sig.at(ps[i]) == -1 && (idx[i] & 1)) sgn = -sgn;
        }
        acc += static_cast<double>(sgn) * w[static_cast<size_t>(r)];
        size_t k = 0;
        while (k < idx.size() && ++idx[k] == range) idx[k++] = 0;
        if (k == idx.size()) break;
    }
    return acc / total;
}

// s*(a/m; eps_Z): the tuple primes are the support primes coprime to m.
inline cplx s_star(int64_t a, int64_t m, const EpsilonSignature& sig) {
    return s_gen(a, m, sig, 1, m);
}

inline cplx s_star_reference(int64_t a, int64_t m, const EpsilonSignature& sig) {
    return s_gen_reference(a, m, sig, 1, m);
}

// ---------------------------------------------------------------------------
// generalized Gauss power sums
// ---------------------------------------------------------------------------

inline bool is_odd_prime_power(int64_t q, int64_t* p_out = nullptr, int* k_out = nullptr) {
    if (q < 3 || q % 2 == 0) return false;
    auto f = arith::factorize(q);
    if (f.size() != 1) return false;
    if (p_out) *p_out = f[0].first;
    if (k_out) *k_out = f[0].second;
    return true;
}

// sigma_d^iota(a/q) = sum over units x mod q of (x/q)^iota e(a x^d / q).
inline cplx sigma_power_sum(int64_t a, int64_t q, int64_t d, int iota) {
    int64_t p = 0;
    int k = 0;
    if (!is_odd_prime_power(q, &p, &k))
        throw std::invalid_argument("sigma_power_sum: q must be an odd prime power");
    if (iota != 0 && iota != 1) throw std::invalid_argument("sigma_power_sum: iota must be 0 or 1");
    int64_t phi = arith::euler_phi(q);
    if (d < 1 || phi % d != 0) throw std::invalid_argument("sigma_power_sum: d must divide phi(q)");
    int64_t am = ((a % q) + q) % q;
    if (std::gcd(am, q) != 1) throw std::invalid_argument("sigma_power_sum: gcd(a,q) must be 1");

    auto w = unit_roots(q);
    cplx acc(0.0, 0.0);
    for (int64_t x = 1; x < q; ++x) {
        if (x % p == 0) continue;
        int64_t xd = static_cast<int64_t>(arith::powmod(static_cast<uint64_t>(x), static_cast<uint64_t>(d),
                                                        static_cast<uint64_t>(q)));
        cplx term = w[static_cast<size_t>(arith::mulmod(static_cast<uint64_t>(am), static_cast<uint64_t>(xd),
                                                        static_cast<uint64_t>(q)))];
        if (iota == 1 && arith::jacobi(x, q) < 0) term = -term;
        acc += term;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// closed form for odd prime powers
// ---------------------------------------------------------------------------

// s*(a/q; eps_Z) for q an odd prime power coprime to the support, via
// d_q = phi(q)/lcm(ord_q p) and the partition of the support into the
// 2 d_q-th power residues P+ and its complement P-:
//   all eps = 1 on P+ and eps constant (-1)^iota on P-  ->  sigma_{d_q}^iota / phi(q)
//   otherwise 0.
inline cplx s_star_reduced(int64_t a, int64_t q, const EpsilonSignature& sig) {
    int64_t p = 0;
    int k = 0;
    if (!is_odd_prime_power(q, &p, &k))
        throw std::invalid_argument("s_star_reduced: q must be an odd prime power");
    auto supp = sig.support();
    for (int64_t s : supp)
        if (q % s == 0) throw std::invalid_argument("s_star_reduced: q must be coprime to the support");
    if (supp.empty()) {
        auto w = unit_roots(q);
        return w[static_cast<size_t>(((a % q) + q) % q)];
    }

    int64_t phi = arith::euler_phi(q);
    int64_t l = 1;
    std::map<int64_t, int64_t> ord;
    for (int64_t s : supp) {
        ord[s] = arith::multiplicative_order(s, q);
        l = std::lcm(l, ord[s]);
    }
    int64_t dq = phi / l;

    // s in (Z/q)^{x 2 d_q}  <=>  ord_q(s) | phi / gcd(phi, 2 d_q)
    int64_t g = std::gcd(phi, 2 * dq);
    int64_t cosub = phi / g;
    int iota = -1;  // -1: undecided; 0 or 1 once P- seen
    for (int64_t s : supp) {
        bool in_plus = (cosub % ord[s] == 0);
        int e = sig.at(s);
        if (in_plus) {
            if (e != 1) return cplx(0.0, 0.0);
        } else {
            int want = (e == 1) ? 0 : 1;
            if (iota == -1) iota = want;
            else if (iota != want) return cplx(0.0, 0.0);
        }
    }
    if (iota == -1) iota = 0;  // P- empty, all eps = 1
    return sigma_power_sum(a, q, dq, iota) / static_cast<double>(phi);
}

// ---------------------------------------------------------------------------
// sawtooth-weighted sums s~_q
// ---------------------------------------------------------------------------

// {x} = x - floor(x) - 1/2
inline double sawtooth(double x) { return x - std::floor(x) - 0.5; }

// s~_{q*}(a/b; eps_Z): the tuple sum over the full support with the sawtooth
// weight {(m_{q*} + 1/2)/phi(b)} attached to the q* exponent and prefactor
// -phi(b)/(2 phi(b))^{|P|}.
inline cplx s_tilde_q(int64_t a, int64_t b, int64_t q_star, const EpsilonSignature& sig) {
    if (b < 2) throw std::invalid_argument("s_tilde_q: modulus must be >= 2");
    int64_t am = ((a % b) + b) % b;
    if (std::gcd(am, b) != 1) throw std::invalid_argument("s_tilde_q: gcd(a,b) must be 1");
    auto supp = sig.support();
    bool found = false;
    for (int64_t s : supp) {
        if (b % s == 0) throw std::invalid_argument("s_tilde_q: b must be coprime to the support");
        if (s == q_star) found = true;
    }
    if (!found) throw std::invalid_argument("s_tilde_q: q_star must lie in the support");

    const int64_t phi = arith::euler_phi(b);
    const int64_t range = 2 * phi;

    // collapse every exponent except m_{q*}, carrying per-prime averages
    std::vector<double> plus(static_cast<size_t>(b), 0.0), minus(static_cast<size_t>(b), 0.0);
    plus[1] = 1.0;
    for (int64_t p : supp) {
        if (p == q_star) continue;
        int eps_p = sig.at(p);
        int64_t ordp = arith::multiplicative_order(p, b);
        int64_t L = (eps_p == -1) ? std::lcm<int64_t>(ordp, 2) : ordp;
        double mult = 1.0 / static_cast<double>(L);
        std::vector<double> nplus(static_cast<size_t>(b), 0.0), nminus(static_cast<size_t>(b), 0.0);
        int64_t pw = 1;
        int sgn = 1;
        for (int64_t j = 0; j < L; ++j) {
            for (int64_t r = 0; r < b; ++r) {
                double cp = plus[static_cast<size_t>(r)], cm = minus[static_cast<size_t>(r)];
                if (cp == 0.0 && cm == 0.0) continue;
                int64_t nr = static_cast<int64_t>(arith::mulmod(static_cast<uint64_t>(r), static_cast<uint64_t>(pw),
                                                                static_cast<uint64_t>(b)));
                if (sgn > 0) {
                    nplus[static_cast<size_t>(nr)] += cp * mult;
                    nminus[static_cast<size_t>(nr)] += cm * mult;
                } else {
                    nminus[static_cast<size_t>(nr)] += cp * mult;
                    nplus[static_cast<size_t>(nr)] += cm * mult;
                }
            }
            pw = static_cast<int64_t>(arith::mulmod(static_cast<uint64_t>(pw), static_cast<uint64_t>(p % b),
                                                    static_cast<uint64_t>(b)));
            sgn *= eps_p;
        }
        plus.swap(nplus);
        minus.swap(nminus);
    }

    auto w = unit_roots(b);
    int eps_q = sig.at(q_star);
    cplx acc(0.0, 0.0);
    int64_t qpow = 1;
    int qsgn = 1;
    for (int64_t mq = 0; mq < range; ++mq) {
        double weight = sawtooth((static_cast<double>(mq) + 0.5) / static_cast<double>(phi));
        for (int64_t r = 0; r < b; ++r) {
            double d = plus[static_cast<size_t>(r)] - minus[static_cast<size_t>(r)];
            if (d == 0.0) continue;
            int64_t rr = static_cast<int64_t>(arith::mulmod(
                arith::mulmod(static_cast<uint64_t>(am), static_cast<uint64_t>(r), static_cast<uint64_t>(b)),
                static_cast<uint64_t>(qpow), static_cast<uint64_t>(b)));
            acc += (qsgn > 0 ? d : -d) * weight * w[static_cast<size_t>(rr)];
        }
        qpow = static_cast<int64_t>(arith::mulmod(static_cast<uint64_t>(qpow), static_cast<uint64_t>(q_star % b),
                                                  static_cast<uint64_t>(b)));
        if (eps_q == -1) qsgn = -qsgn;
    }

    // plus/minus already hold averages over the collapsed exponents, so only
    // the explicit m_{q*} range remains in the normalization.
    return acc * (-static_cast<double>(phi) / static_cast<double>(range));
}

// ---------------------------------------------------------------------------
// character table and character-side sums (prime modulus)
// ---------------------------------------------------------------------------

struct CharacterTable {
    int64_t q = 0;          // odd prime
    int64_t generator = 0;  // primitive root
    int64_t phi = 0;
    std::vector<int64_t> dlog;       // dlog[x] for x in [1, q-1]
    std::vector<cplx> gauss_sums;    // G(chi_k), k in [0, phi)
    std::vector<cplx> roots_phi;     // e(j/phi)

    explicit CharacterTable(int64_t q_) : q(q_) {
        if (!arith::is_prime(static_cast<uint64_t>(q)) || q < 3)
            throw std::invalid_argument("CharacterTable: modulus must be an odd prime");
        phi = q - 1;
        for (int64_t g = 2; g < q; ++g) {
            if (arith::multiplicative_order(g, q) == phi) { generator = g; break; }
        }
        dlog.assign(static_cast<size_t>(q), -1);
        int64_t x = 1;
        for (int64_t j = 0; j < phi; ++j) {
            dlog[static_cast<size_t>(x)] = j;
            x = static_cast<int64_t>(arith::mulmod(static_cast<uint64_t>(x), static_cast<uint64_t>(generator),
                                                   static_cast<uint64_t>(q)));
        }
        roots_phi = unit_roots(phi);
        auto wq = unit_roots(q);
        gauss_sums.assign(static_cast<size_t>(phi), cplx(0.0, 0.0));
        for (int64_t k = 0; k < phi; ++k) {
            cplx s(0.0, 0.0);
            for (int64_t y = 1; y < q; ++y)
                s += roots_phi[static_cast<size_t>((k * dlog[static_cast<size_t>(y)]) % phi)] *
                     wq[static_cast<size_t>(y)];
            gauss_sums[static_cast<size_t>(k)] = s;
        }
    }

    cplx chi(int64_t k, int64_t x) const {
        int64_t xm = ((x % q) + q) % q;
        if (xm == 0) return cplx(0.0, 0.0);
        return roots_phi[static_cast<size_t>((k * dlog[static_cast<size_t>(xm)]) % phi)];
    }

    // chi_k(x) equals the sign e in {-1,+1} as an exact congruence test
    bool chi_equals_sign(int64_t k, int64_t x, int e) const {
        int64_t xm = ((x % q) + q) % q;
        if (xm == 0) return false;
        int64_t v = (k * dlog[static_cast<size_t>(xm)]) % phi;
        return e == 1 ? v == 0 : (phi % 2 == 0 && v == phi / 2);
    }

    bool chi_parity(int64_t k, int e) const { return chi_equals_sign(k, q - 1, e); }
};

// s^eps(a/b, eps_Z) = (2/phi(b)) sum over chi mod b with chi(-1) = eps_sign
// and chi(p) = eps_p on the support, of conj(G(chi)) chi(-a).
inline cplx s_eps_char(int64_t a, int64_t b, int eps_sign, const EpsilonSignature& sig,
                       const CharacterTable* table = nullptr) {
    if (eps_sign != 1 && eps_sign != -1)
        throw std::invalid_argument("s_eps_char: sign must be +1 or -1");
    std::optional<CharacterTable> local;
    if (!table) { local.emplace(b); table = &*local; }
    if (table->q != b) throw std::invalid_argument("s_eps_char: table modulus mismatch");
    auto supp = sig.support();
    for (int64_t p : supp)
        if (b % p == 0) throw std::invalid_argument("s_eps_char: b must be coprime to the support");
    int64_t am = ((a % b) + b) % b;
    if (std::gcd(am, b) != 1) throw std::invalid_argument("s_eps_char: gcd(a,b) must be 1");

    cplx acc(0.0, 0.0);
    for (int64_t k = 0; k < table->phi; ++k) {
        if (!table->chi_parity(k, eps_sign)) continue;
        bool ok = true;
        for (int64_t p : supp) {
            if (!table->chi_equals_sign(k, p, sig.at(p))) { ok = false; break; }
        }
        if (!ok) continue;
        acc += std::conj(table->gauss_sums[static_cast<size_t>(k)]) * table->chi(k, -am);
    }
    return acc * (2.0 / static_cast<double>(table->phi));
}

// ---------------------------------------------------------------------------
// cusp constants and classification
// ---------------------------------------------------------------------------

enum class CuspClass { cusp, smooth_through, log_singularity, undetermined };

inline std::string to_string(CuspClass c) {
    switch (c) {
        case CuspClass::cusp: return "cusp";
        case CuspClass::smooth_through: return "smooth-through";
        case CuspClass::log_singularity: return "log-singularity";
        case CuspClass::undetermined: return "undetermined";
    }
    return "?";
}

struct CuspReport {
    int64_t a = 0;
    int64_t q = 0;
    EpsilonSignature signature;
    cplx s_star{0.0, 0.0};
    double c_plus = 0.0;
    double c_prime = 0.0;
    double c_minus = 0.0;
    double slope_plus = 0.0;   // c' + c-
    double slope_minus = 0.0;  // c' - c-
    bool all_qrs = false;
    CuspClass classification = CuspClass::undetermined;
};

// Does the subgroup of (Z/q)* generated by the eps_p = +1 support primes
// equal the full group of quadratic residues?
inline bool all_qrs_condition(const EpsilonSignature& sig, int64_t q) {
    std::vector<int64_t> gens;
    for (int64_t p : sig.support())
        if (sig.at(p) == 1) gens.push_back(p % q);
    if (gens.empty()) return false;
    std::set<int64_t> sub{1};
    std::vector<int64_t> frontier{1};
    while (!frontier.empty()) {
        std::vector<int64_t> next;
        for (int64_t x : frontier) {
            for (int64_t g : gens) {
                int64_t y = static_cast<int64_t>(arith::mulmod(static_cast<uint64_t>(x), static_cast<uint64_t>(g),
                                                               static_cast<uint64_t>(q)));
                if (sub.insert(y).second) next.push_back(y);
            }
        }
        frontier.swap(next);
    }
    return static_cast<int64_t>(sub.size()) == (q - 1) / 2;
}

// Constants of the two-term local expansion of G# at t0 = a/q:
//   c+ = c_eps 2 Re s*,  c- = -c_eps |P| pi Im s*,
//   c' = c_eps |P| 2 Re( c'+_eps s* + sum_p (log p) s~_p ).
inline CuspReport cusp_constants(int64_t a, int64_t q, const EpsilonSignature& sig) {
    if (!arith::is_prime(static_cast<uint64_t>(q)))
        throw std::invalid_argument("cusp_constants: q must be prime");
    if (q <= sig.Z) throw std::invalid_argument("cusp_constants: q must exceed Z");
    int64_t am = ((a % q) + q) % q;
    if (am == 0) throw std::invalid_argument("cusp_constants: gcd(a,q) must be 1");

    auto supp = sig.support();
    const int np = static_cast<int>(supp.size());
    double log_prod = 1.0, log_sum = 0.0;
    for (int64_t p : supp) {
        log_prod *= std::log(static_cast<double>(p));
        log_sum += std::log(static_cast<double>(p));
    }
    double fact = 1.0;
    for (int i = 2; i <= np; ++i) fact *= i;
    const double c_eps = 1.0 / (fact * log_prod);
    const double c_prime_plus = -(std::log(kTwoPi) + kEulerGamma - 1.0) + 0.5 * log_sum;

    CuspReport rep;
    rep.a = am;
    rep.q = q;
    rep.signature = sig;
    rep.s_star = s_star(am, q, sig);

    cplx tilde_sum(0.0, 0.0);
    for (int64_t p : supp) tilde_sum += std::log(static_cast<double>(p)) * s_tilde_q(am, q, p, sig);

    rep.c_plus = c_eps * 2.0 * rep.s_star.real();
    rep.c_minus = -c_eps * np * kPi * rep.s_star.imag();
    rep.c_prime = c_eps * np * 2.0 * (c_prime_plus * rep.s_star + tilde_sum).real();
    rep.slope_plus = rep.c_prime + rep.c_minus;
    rep.slope_minus = rep.c_prime - rep.c_minus;
    rep.all_qrs = all_qrs_condition(sig, q);

    int n_neg = 0;
    for (int64_t p : supp)
        if (sig.at(p) == -1) ++n_neg;

    const double re_zero_tol = 1e-12;
    if (std::abs(rep.s_star.real()) > re_zero_tol) {
        rep.classification = CuspClass::smooth_through;
    } else if (rep.slope_plus * rep.slope_minus < 0.0 && (n_neg >= 2 || (n_neg == 1 && rep.all_qrs))) {
        rep.classification = CuspClass::cusp;
    } else {
        // Re s* = 0 but outside the regimes the classification covers
        // (condition (log p1) 2|Re s~| < pi |Im s*| is open in general).
        rep.classification = CuspClass::undetermined;
    }
    return rep;
}

// Primes Z < q <= qmax with q = 3 mod 4 and (p/q) = eps_p on the support,
// flagged with the all-QRs subgroup condition.
inline std::vector<std::pair<int64_t, bool>> find_cusp_points(const EpsilonSignature& sig, int64_t qmax) {
    if (qmax <= sig.Z) throw std::invalid_argument("find_cusp_points: qmax must exceed Z");
    std::vector<std::pair<int64_t, bool>> out;
    for (int64_t q = sig.Z + 1; q <= qmax; ++q) {
        if (q % 4 != 3 || !arith::is_prime(static_cast<uint64_t>(q))) continue;
        bool ok = true;
        for (int64_t p : sig.support()) {
            if (arith::jacobi(p, q) != sig.at(p)) { ok = false; break; }
        }
        if (ok) out.emplace_back(q, all_qrs_condition(sig, q));
    }
    return out;
}

// ---------------------------------------------------------------------------
// numeric slope probe
// ---------------------------------------------------------------------------

struct ProbeRow {
    double offset = 0.0;
    cplx quotient{0.0, 0.0};  // (G#(t0+h) - G#(t0)) / (e(t0) h ell^{|P|-1})
};

// Normalized difference quotients of G# at t0 = a/q for the given offsets,
// for comparison against the predicted one-sided slopes c_{+-}.  With G# at
// certified tolerance tau the quotient error is at most
// 2 tau / (|h| ell^{|P|-1}); the term-by-term difference evaluation keeps the
// roundoff far below that.
inline std::vector<ProbeRow> local_slope_probe(const EpsilonSignature& sig, int64_t a, int64_t q,
                                               const std::vector<double>& offsets, double tolerance = 1e-7) {
    auto spec = atlas::make_shape_spec(sig, tolerance);
    const int np = static_cast<int>(sig.support().size());
    const double t0 = static_cast<double>(((a % q) + q) % q) / static_cast<double>(q);
    const double th0 = kTwoPi * t0;
    const cplx e_t0(std::cos(th0), std::sin(th0));

    std::vector<ProbeRow> rows;
    rows.reserve(offsets.size());
    for (double h : offsets) {
        if (h == 0.0 || std::abs(h) > 0.1)
            throw std::invalid_argument("local_slope_probe: offsets must be nonzero with |h| <= 0.1");
        cplx diff = atlas::gsharp_diff(spec, a, q, h);
        double ell = std::abs(std::log(std::abs(h)));
        double norm = h * std::pow(ell, np - 1);
        rows.push_back(ProbeRow{h, diff / (e_t0 * norm)});
    }
    return rows;
}

} // namespace gausspath::expsums
