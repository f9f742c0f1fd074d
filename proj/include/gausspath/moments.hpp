#pragma once

// Complex moments on both sides: empirical averages of path products over a
// modulus family, and the limiting moments as absolutely convergent sums over
// h-tuples whose product H = prod (1 - h_{j,l}) has square modulus (square
// Z-rough part in the conditioned case).
//
// The tuple enumeration builds the square condition in: all slots but the
// last range freely, and the last slot runs over the precomputed values whose
// squarefree kernel matches the running kernel, i.e. over kernel * f^2.

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "gausspath/arith.hpp"
#include "gausspath/parallel.hpp"
#include "gausspath/paths.hpp"

namespace gausspath::moments {

using arith::EpsilonSignature;
using arith::ModulusFamily;
using std::int64_t;
using cplx = std::complex<double>;

constexpr double kTwoPi = 6.283185307179586476925287;

struct budget_error : std::runtime_error {
    explicit budget_error(const std::string& w) : std::runtime_error(w) {}
};

// (t, m, n) tuples of equal length k; total degree sum(m) + sum(n) capped.
struct MomentOrder {
    std::vector<double> t;
    std::vector<int> m;
    std::vector<int> n;

    int total_degree() const {
        int d = 0;
        for (int v : m) d += v;
        for (int v : n) d += v;
        return d;
    }

    void validate(int degree_cap = 6) const {
        if (t.size() != m.size() || t.size() != n.size())
            throw std::invalid_argument("MomentOrder: t, m, n must have equal lengths");
        for (double ti : t)
            if (!(ti >= 0.0 && ti <= 1.0)) throw std::invalid_argument("MomentOrder: t must lie in [0,1]");
        for (int v : m)
            if (v < 0) throw std::invalid_argument("MomentOrder: m entries must be nonnegative");
        for (int v : n)
            if (v < 0) throw std::invalid_argument("MomentOrder: n entries must be nonnegative");
        if (total_degree() > degree_cap)
            throw std::invalid_argument("MomentOrder: total degree exceeds cap");
    }
};

// beta(h;t) = (e(ht)-1)/(2 pi i h) for h != 0, and t for h = 0.  The phase is
// reduced mod 1 before the trig call, so beta vanishes exactly when ht is an
// integer.
inline cplx beta_coeff(int64_t h, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("beta_coeff: t must lie in [0,1]");
    if (h == 0) return cplx(t, 0.0);
    double frac = std::fmod(static_cast<double>(h) * t, 1.0);
    double th = kTwoPi * frac;
    cplx num(std::cos(th) - 1.0, std::sin(th));
    return cplx(num.imag(), -num.real()) / (kTwoPi * static_cast<double>(h));
}

// ---------------------------------------------------------------------------
// empirical side
// ---------------------------------------------------------------------------

// Average over the family of prod_i conj(G(t_i;c))^{m_i} G(t_i;c)^{n_i}.
// Each modulus is one shared O(c) pass over all needed t_i; the family
// average reduces by a fixed pairwise tree.
inline cplx empirical_moment(const MomentOrder& order, const ModulusFamily& family) {
    order.validate();
    if (family.empty()) throw std::invalid_argument("empirical_moment: family is empty");

    double tmax = 0.0;
    for (double ti : order.t) tmax = std::max(tmax, ti);
    int64_t cmax = family.members.back();
    int64_t sieve_limit = std::min<int64_t>(cmax, static_cast<int64_t>(tmax * static_cast<double>(cmax)) + 2);
    paths::SpfSieve sieve(std::max<int64_t>(sieve_limit, 2));

    std::vector<cplx> vals(family.members.size());
    par::parallel_for(static_cast<int64_t>(family.members.size()), [&](int64_t idx) {
        int64_t c = family.members[static_cast<size_t>(idx)];
        std::vector<int64_t> need;
        need.reserve(2 * order.t.size());
        for (double ti : order.t) {
            double x = ti * static_cast<double>(c - 1);
            int64_t j = std::min<int64_t>(static_cast<int64_t>(x), c - 2);
            need.push_back(j);
            need.push_back(j + 1);
        }
        std::sort(need.begin(), need.end());
        need.erase(std::unique(need.begin(), need.end()), need.end());
        auto gs = paths::partial_sums_at(c, need, &sieve);
        cplx prod(1.0, 0.0);
        for (size_t i = 0; i < order.t.size(); ++i) {
            double x = order.t[i] * static_cast<double>(c - 1);
            int64_t j = std::min<int64_t>(static_cast<int64_t>(x), c - 2);
            double frac = x - static_cast<double>(j);
            auto at = [&](int64_t jj) {
                auto it = std::lower_bound(need.begin(), need.end(), jj);
                return gs[static_cast<size_t>(it - need.begin())];
            };
            cplx g = at(j) + frac * (at(j + 1) - at(j));
            for (int e = 0; e < order.m[i]; ++e) prod *= std::conj(g);
            for (int e = 0; e < order.n[i]; ++e) prod *= g;
        }
        vals[static_cast<size_t>(idx)] = prod;
    });
    cplx total = par::tree_reduce(std::move(vals), cplx(0.0, 0.0));
    return total / static_cast<double>(family.members.size());
}

// ---------------------------------------------------------------------------
// limiting side
// ---------------------------------------------------------------------------

namespace detail {

// factor data for slot values 1..Hmax+1
struct ValueTables {
    int64_t vmax = 0;
    std::vector<int64_t> kernel;                       // squarefree kernel of x (restricted, see below)
    std::vector<std::vector<int32_t>> primes;          // restricted distinct primes of x
    std::vector<int> support_parity_bits;              // packed exponent parities of support primes
    std::vector<int8_t> support_zero_hit;              // some eps_p = 0 prime divides x
    std::unordered_map<int64_t, std::vector<int64_t>> by_kernel;  // kernel -> ascending values

    // Conditioned case: kernel/primes are taken over primes > Z only, and the
    // support exponent parities feed eps_{H_Z}.  Unconditioned: over all
    // primes (kernel) and odd primes (eta).
    ValueTables(int64_t Hmax, const std::optional<EpsilonSignature>& sig) : vmax(Hmax + 1) {
        paths::SpfSieve sieve(vmax);
        std::vector<int64_t> supp;
        std::vector<int> supp_eps;
        int64_t Z = 0;
        if (sig) {
            Z = sig->Z;
            for (auto& [p, e] : sig->eps) { supp.push_back(p); supp_eps.push_back(e); }
        }
        kernel.assign(static_cast<size_t>(vmax) + 1, 1);
        primes.assign(static_cast<size_t>(vmax) + 1, {});
        support_parity_bits.assign(static_cast<size_t>(vmax) + 1, 0);
        support_zero_hit.assign(static_cast<size_t>(vmax) + 1, 0);
        for (int64_t x = 1; x <= vmax; ++x) {
            int64_t rest = x;
            while (rest > 1) {
                int64_t p = sieve[rest];
                int e = 0;
                while (rest % p == 0) { rest /= p; ++e; }
                if (p <= Z) {
                    // support bookkeeping for eps_{H_Z}
                    auto it = std::lower_bound(supp.begin(), supp.end(), p);
                    size_t si = static_cast<size_t>(it - supp.begin());
                    if (supp_eps[si] == 0) {
                        if (e > 0) support_zero_hit[static_cast<size_t>(x)] = 1;
                    } else if (supp_eps[si] == -1 && (e & 1)) {
                        support_parity_bits[static_cast<size_t>(x)] ^= 1;
                    }
                } else {
                    // unrestricted prime: feeds the square-kernel and (when
                    // odd) the eta weight
                    if (e & 1) kernel[static_cast<size_t>(x)] *= p;
                    if (p > 2) primes[static_cast<size_t>(x)].push_back(static_cast<int32_t>(p));
                }
            }
            by_kernel[kernel[static_cast<size_t>(x)]].push_back(x);
        }
    }
};

} // namespace detail

// Explicit truncation bound for the omitted |h| > Hmax terms, from
// |beta(vec h)| <= 1/|H| and grouping the off-range tuples by the kernel of
// the large slot; see the prime-product constants below.  Coarse but
// rigorous.
inline double limit_moment_tail_bound(int u, int64_t Hmax, const std::optional<EpsilonSignature>& sig) {
    if (u == 0) return 0.0;
    // conditioned case: smooth parts ride along freely in every slot; the
    // large slot picks up the sqrt-harmonic smooth sum, the others the
    // harmonic one
    double smooth_harm = 1.0, smooth_sqrt = 1.0;
    if (sig) {
        for (int64_t p : sig->support()) {
            smooth_harm *= static_cast<double>(p) / static_cast<double>(p - 1);
            smooth_sqrt *= 1.0 / (1.0 - 1.0 / std::sqrt(static_cast<double>(p)));
        }
    }
    double root = std::sqrt(static_cast<double>(Hmax));
    if (u == 1) return 4.0 / root * smooth_sqrt;

    auto primes = arith::primes_upto(100000);
    auto prime_prod = [&](double j, double expo) {
        double prod = 1.0;
        for (int64_t p : primes) prod *= 1.0 + j * std::pow(static_cast<double>(p), -expo);
        // remainder over p > 1e5, bounded by the integral of x^{-expo}
        prod *= std::exp(j * 2.0 / std::sqrt(100000.0));
        return prod;
    };
    const double zeta2 = 1.6449340668482264;
    double A = 2.0 * zeta2;  // A_1
    for (int j = 1; j <= u - 2; ++j) A *= 2.0 * zeta2 * prime_prod(static_cast<double>(j), 2.0);
    double W = prime_prod(static_cast<double>(u - 1), 1.5);
    double s = smooth_sqrt;
    for (int j = 1; j < u; ++j) s *= smooth_harm;
    return static_cast<double>(u) * A * (4.0 + 2.0 * zeta2) * W / root * s;
}

// M*(t; m, n) truncated to |h_{j,l}| <= Hmax, with the certified remainder.
// Unconditioned: terms with |H| square weighted by eta(H).  Conditioned:
// terms with square Z-rough part |H^Z| weighted by eps_{H_Z} eta(H^Z).
inline std::pair<cplx, double> limit_moment(const MomentOrder& order, int64_t Hmax,
                                            const std::optional<EpsilonSignature>& sig = std::nullopt,
                                            int64_t term_budget = 100'000'000) {
    order.validate();
    if (Hmax < 2) throw std::invalid_argument("limit_moment: Hmax must be >= 2");
    if (sig) sig->validate();

    // slots: for each j, n_j plain then m_j conjugated
    struct Slot {
        double t;
        bool conj;
    };
    std::vector<Slot> slots;
    for (size_t j = 0; j < order.t.size(); ++j) {
        for (int e = 0; e < order.n[j]; ++e) slots.push_back({order.t[j], false});
        for (int e = 0; e < order.m[j]; ++e) slots.push_back({order.t[j], true});
    }
    const int u = static_cast<int>(slots.size());
    double tail = limit_moment_tail_bound(u, Hmax, sig);
    if (u == 0) return {cplx(1.0, 0.0), 0.0};

    // budget guard on the free-slot scan
    double nodes = 1.0;
    for (int i = 0; i + 1 < u; ++i) nodes *= static_cast<double>(2 * Hmax + 1);
    if (nodes > static_cast<double>(term_budget))
        throw budget_error("limit_moment: enumeration would exceed the term budget");

    detail::ValueTables tab(Hmax, sig);
    const int64_t vmax_pos = Hmax + 1;  // v = 1 - h, |h| <= Hmax
    const int64_t vmax_neg = Hmax - 1;

    // per-slot beta values indexed by v (+ and - branches)
    std::vector<std::vector<cplx>> beta_pos(static_cast<size_t>(u)), beta_neg(static_cast<size_t>(u));
    for (int i = 0; i < u; ++i) {
        beta_pos[static_cast<size_t>(i)].resize(static_cast<size_t>(vmax_pos) + 1);
        beta_neg[static_cast<size_t>(i)].resize(static_cast<size_t>(vmax_neg) + 1);
        for (int64_t v = 1; v <= vmax_pos; ++v) {
            cplx b = beta_coeff(1 - v, slots[static_cast<size_t>(i)].t);
            beta_pos[static_cast<size_t>(i)][static_cast<size_t>(v)] = slots[static_cast<size_t>(i)].conj ? std::conj(b) : b;
        }
        for (int64_t v = 1; v <= vmax_neg; ++v) {
            cplx b = beta_coeff(1 + v, slots[static_cast<size_t>(i)].t);
            beta_neg[static_cast<size_t>(i)][static_cast<size_t>(v)] = slots[static_cast<size_t>(i)].conj ? std::conj(b) : b;
        }
    }

    // DFS state: running kernel, distinct restricted primes with
    // multiplicities (for eta over the union), support parity, beta product.
    struct Walker {
        const detail::ValueTables& tab;
        const std::vector<std::vector<cplx>>& beta_pos;
        const std::vector<std::vector<cplx>>& beta_neg;
        int u;
        int64_t vmax_pos, vmax_neg;
        bool conditioned;
        std::vector<std::pair<int32_t, int>> prime_mult;
        double eta_prod = 1.0;
        int support_parity = 0;
        paths::detail::KahanC acc;

        void push_primes(int64_t vabs) {
            for (int32_t p : tab.primes[static_cast<size_t>(vabs)]) {
                bool found = false;
                for (auto& pm : prime_mult) {
                    if (pm.first == p) { ++pm.second; found = true; break; }
                }
                if (!found) {
                    prime_mult.emplace_back(p, 1);
                    if (p > 2) eta_prod *= static_cast<double>(p) / static_cast<double>(p + 1);
                }
            }
        }
        void pop_primes(int64_t vabs) {
            for (int32_t p : tab.primes[static_cast<size_t>(vabs)]) {
                for (size_t i = 0; i < prime_mult.size(); ++i) {
                    if (prime_mult[i].first == p) {
                        if (--prime_mult[i].second == 0) {
                            if (p > 2) eta_prod /= static_cast<double>(p) / static_cast<double>(p + 1);
                            prime_mult.erase(prime_mult.begin() + static_cast<long>(i));
                        }
                        break;
                    }
                }
            }
        }

        void leaf(int64_t kernel_needed, cplx beta_partial, int depth) {
            auto it = tab.by_kernel.find(kernel_needed);
            if (it == tab.by_kernel.end()) return;
            for (int64_t vabs : it->second) {
                // + branch
                if (vabs <= vmax_pos && !(conditioned && tab.support_zero_hit[static_cast<size_t>(vabs)])) {
                    emit(vabs, beta_partial * beta_pos[static_cast<size_t>(depth)][static_cast<size_t>(vabs)]);
                }
                // - branch
                if (vabs <= vmax_neg && !(conditioned && tab.support_zero_hit[static_cast<size_t>(vabs)])) {
                    emit(vabs, beta_partial * beta_neg[static_cast<size_t>(depth)][static_cast<size_t>(vabs)]);
                }
            }
        }

        void emit(int64_t vabs, cplx beta_full) {
            push_primes(vabs);
            int parity = support_parity ^ (conditioned ? tab.support_parity_bits[static_cast<size_t>(vabs)] : 0);
            double weight = eta_prod * (parity ? -1.0 : 1.0);
            acc.add(weight * beta_full);
            pop_primes(vabs);
        }

        void descend(int depth, int64_t kernel, cplx beta_partial) {
            if (depth == u - 1) {
                leaf(kernel, beta_partial, depth);
                return;
            }
            for (int64_t vabs = 1; vabs <= vmax_pos; ++vabs) {
                if (conditioned && tab.support_zero_hit[static_cast<size_t>(vabs)]) continue;
                int64_t k = tab.kernel[static_cast<size_t>(vabs)];
                int64_t g = std::gcd(kernel, k);
                int64_t merged = (kernel / g) * (k / g);
                push_primes(vabs);
                if (conditioned) support_parity ^= tab.support_parity_bits[static_cast<size_t>(vabs)];
                if (vabs <= vmax_pos)
                    descend(depth + 1, merged, beta_partial * beta_pos[static_cast<size_t>(depth)][static_cast<size_t>(vabs)]);
                if (vabs <= vmax_neg)
                    descend(depth + 1, merged, beta_partial * beta_neg[static_cast<size_t>(depth)][static_cast<size_t>(vabs)]);
                if (conditioned) support_parity ^= tab.support_parity_bits[static_cast<size_t>(vabs)];
                pop_primes(vabs);
            }
        }
    };

    // parallel over the first slot value; partials reduced in fixed order
    const bool conditioned = sig.has_value();
    if (u == 1) {
        Walker w{tab, beta_pos, beta_neg, u, vmax_pos, vmax_neg, conditioned, {}, 1.0, 0, {}};
        w.leaf(1, cplx(1.0, 0.0), 0);
        return {w.acc.sum, tail};
    }

    std::vector<cplx> partials(static_cast<size_t>(2 * vmax_pos), cplx(0.0, 0.0));
    par::parallel_for(2 * vmax_pos, [&](int64_t job) {
        int64_t vabs = job / 2 + 1;
        bool neg = (job % 2) == 1;
        if (neg && vabs > vmax_neg) return;
        if (conditioned && tab.support_zero_hit[static_cast<size_t>(vabs)]) return;
        Walker w{tab, beta_pos, beta_neg, u, vmax_pos, vmax_neg, conditioned, {}, 1.0, 0, {}};
        w.push_primes(vabs);
        if (conditioned) w.support_parity ^= tab.support_parity_bits[static_cast<size_t>(vabs)];
        cplx b = neg ? beta_neg[0][static_cast<size_t>(vabs)] : beta_pos[0][static_cast<size_t>(vabs)];
        w.descend(1, tab.kernel[static_cast<size_t>(vabs)], b);
        partials[static_cast<size_t>(job)] = w.acc.sum;
    });
    cplx total = par::tree_reduce(std::move(partials), cplx(0.0, 0.0));
    return {total, tail};
}

// ---------------------------------------------------------------------------
// convergence report
// ---------------------------------------------------------------------------

struct ConvergenceRow {
    int64_t Q = 0;
    cplx empirical{0.0, 0.0};
    cplx limit{0.0, 0.0};
    double abs_diff = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    double fitted_slope = 0.0;  // least-squares slope of log|diff| vs log Q
};

inline ConvergenceReport convergence_report(const MomentOrder& order, const std::vector<int64_t>& Q_list,
                                            int64_t Hmax, const std::optional<EpsilonSignature>& sig = std::nullopt) {
    order.validate();
    for (size_t i = 1; i < Q_list.size(); ++i)
        if (Q_list[i] <= Q_list[i - 1]) throw std::invalid_argument("convergence_report: Q_list must increase");
    auto [lim, tail] = limit_moment(order, Hmax, sig);
    (void)tail;

    ConvergenceReport rep;
    for (int64_t Q : Q_list) {
        auto family = arith::enumerate_family(Q, sig);
        cplx emp = empirical_moment(order, family);
        rep.rows.push_back({Q, emp, lim, std::abs(emp - lim)});
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int64_t n = 0;
    for (auto& r : rep.rows) {
        if (r.abs_diff <= 0) continue;
        double x = std::log(static_cast<double>(r.Q)), y = std::log(r.abs_diff);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++n;
    }
    if (n >= 2) rep.fitted_slope = (static_cast<double>(n) * sxy - sx * sy) / (static_cast<double>(n) * sxx - sx * sx);
    return rep;
}

} // namespace gausspath::moments
