#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>
#include <set>

#include "gausspath/arith.hpp"

using namespace gausspath;
using arith::Rational;

namespace {

// Independent Legendre oracle: membership in the set of nonzero squares mod p.
int legendre_by_squares(int64_t a, int64_t p) {
    a %= p;
    if (a < 0) a += p;
    if (a % p == 0) return 0;
    std::set<int64_t> squares;
    for (int64_t x = 1; x < p; ++x) squares.insert((x * x) % p);
    return squares.count(a) ? 1 : -1;
}

// Jacobi oracle for odd squarefree-or-not n: product of Legendre symbols over
// prime factors with multiplicity.
int jacobi_oracle(int64_t a, int64_t n) {
    int r = 1;
    for (auto& [p, e] : arith::factorize(n)) {
        for (int i = 0; i < e; ++i) r *= legendre_by_squares(a, p);
        if (r == 0) return 0;
    }
    return r;
}

} // namespace

TEST_CASE("jacobi examples") {
    CHECK(arith::jacobi(1, 15) == 1);
    CHECK(arith::jacobi(3, 9) == 0);
    CHECK(arith::jacobi(2, 13) == legendre_by_squares(2, 13));
    CHECK(arith::jacobi(2, 13) == -1);
    CHECK_THROWS_AS(arith::jacobi(3, 10), std::invalid_argument);
    CHECK_THROWS_AS(arith::jacobi(3, -5), std::invalid_argument);
}

TEST_CASE("jacobi matches the square-enumeration oracle for all n <= 200") {
    for (int64_t n = 1; n <= 200; n += 2) {
        for (int64_t a = 0; a < n; ++a) {
            CAPTURE(a);
            CAPTURE(n);
            REQUIRE(arith::jacobi(a, n) == jacobi_oracle(a, n));
        }
    }
}

TEST_CASE("jacobi multiplicativity and periodicity") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 2000; ++trial) {
        int64_t n = 2 * static_cast<int64_t>(rng() % 100000) + 1;
        int64_t a = static_cast<int64_t>(rng() % 1000000) - 500000;
        int64_t b = static_cast<int64_t>(rng() % 1000000) - 500000;
        CHECK(arith::jacobi(a * b % n, n) == arith::jacobi(a, n) * arith::jacobi(b, n));
        CHECK(arith::jacobi(a + n, n) == arith::jacobi(a, n));
    }
}

TEST_CASE("eta values") {
    CHECK(arith::eta(0) == Rational(0, 1));
    CHECK(arith::eta(4) == Rational(1, 1));
    CHECK(arith::eta(1) == Rational(1, 1));
    CHECK(arith::eta(-1) == Rational(1, 1));
    CHECK(arith::eta(9) == Rational(3, 4));
    CHECK(arith::eta(15) == Rational(5, 8));  // (3/4)(5/6)
}

TEST_CASE("eta multiplicative on coprime arguments") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 500; ++trial) {
        int64_t m = 1 + static_cast<int64_t>(rng() % 5000);
        int64_t n = 1 + static_cast<int64_t>(rng() % 5000);
        if (std::gcd(m, n) != 1) continue;
        auto lhs = arith::eta(m * n);
        auto rhs = arith::rational_mul(arith::eta(m), arith::eta(n));
        CHECK(lhs == rhs);
    }
}

TEST_CASE("eta_Z values") {
    auto sig = arith::make_signature(5, {1, -1, 1});  // eps_3 = -1
    CHECK(arith::eta_Z(0, sig) == Rational(0, 1));
    // h = 9: h_Z = 9, rough part 1 is a square, eps_9 = eps_3^2 = 1
    CHECK(arith::eta_Z(9, sig) == Rational(1, 1));

    auto sig2 = arith::make_signature(5, {-1, 1, 1});  // eps_2 = -1, eps_3 = 1
    // h = 18 = 2 * 3^2: rough part 1, eps_18 = eps_2 eps_3^2 = -1
    CHECK(arith::eta_Z(18, sig2) == Rational(-1, 1));
    // h = 7: rough part 7 is not a square
    CHECK(arith::eta_Z(7, sig2) == Rational(0, 1));
    // h = 49: rough part 49 = 7^2, eta(49) = 7/8
    CHECK(arith::eta_Z(49, sig2) == Rational(7, 8));
    // zero entry kills smooth multiples
    auto sig3 = arith::make_signature(5, {1, 0, 1});
    CHECK(arith::eta_Z(9, sig3) == Rational(0, 1));
}

TEST_CASE("enumerate_family basic examples") {
    auto fam = arith::enumerate_family(10);
    CHECK(fam.members == std::vector<int64_t>{13, 17});

    auto sig = arith::make_signature(5, {-1, 1, -1});
    auto cond = arith::enumerate_family(10, sig);
    CHECK(cond.members == std::vector<int64_t>{13});

    CHECK_THROWS_AS(arith::enumerate_family(2), std::invalid_argument);
}

TEST_CASE("conditioned families partition D_Q by signature") {
    const int64_t Q = 50, Z = 5;
    auto fam = arith::enumerate_family(Q);
    auto sigs_seen = 0;
    for (int64_t c : fam.members) {
        arith::EpsilonSignature sig;
        sig.Z = Z;
        for (int64_t p : arith::primes_upto(Z)) sig.eps[p] = arith::jacobi(p, c);
        auto cond = arith::enumerate_family(Q, sig);
        // c lands in its own signature family, which is a subset of D_Q
        CHECK(std::binary_search(cond.members.begin(), cond.members.end(), c));
        for (int64_t d : cond.members)
            CHECK(std::binary_search(fam.members.begin(), fam.members.end(), d));
        ++sigs_seen;
    }
    CHECK(sigs_seen == static_cast<int>(fam.members.size()));

    // the 2 * 3^{pi(Z)-1} signature families cover D_Q exactly once
    const int64_t Q2 = 200;
    auto all = arith::enumerate_family(Q2);
    size_t total = 0;
    std::vector<std::vector<int>> vals;
    for (int e2 : {-1, 1})
        for (int e3 : {-1, 0, 1})
            for (int e5 : {-1, 0, 1}) vals.push_back({e2, e3, e5});
    CHECK(vals.size() == 18);
    for (auto& v : vals) total += arith::enumerate_family(Q2, arith::make_signature(5, v)).members.size();
    CHECK(total == all.members.size());
}

TEST_CASE("family density approaches 1/(3 zeta(2))") {
    const int64_t Q = 100000;
    auto fam = arith::enumerate_family(Q);
    double density = static_cast<double>(fam.members.size()) / static_cast<double>(Q);
    CHECK(std::abs(density - 0.2026423672846756) < 0.02);
}

TEST_CASE("multiplicative_order") {
    CHECK(arith::multiplicative_order(1, 23) == 1);
    CHECK(arith::multiplicative_order(2, 71) == 35);
    CHECK(arith::multiplicative_order(3, 71) == 35);
    CHECK(arith::multiplicative_order(5, 23) == 22);
    CHECK_THROWS_AS(arith::multiplicative_order(6, 9), std::invalid_argument);
}

TEST_CASE("enumerate_smooth") {
    auto all = arith::make_signature(5, {1, 1, 1});
    auto got = arith::enumerate_smooth(all, 10);
    std::vector<int64_t> ns;
    for (auto& [n, e] : got) {
        ns.push_back(n);
        CHECK(e == 1);
    }
    CHECK(ns == std::vector<int64_t>{1, 2, 3, 4, 5, 6, 8, 9, 10});

    auto holed = arith::make_signature(5, {1, 0, 1});
    got = arith::enumerate_smooth(holed, 10);
    ns.clear();
    for (auto& [n, e] : got) ns.push_back(n);
    CHECK(ns == std::vector<int64_t>{1, 2, 4, 5, 8, 10});

    CHECK(arith::enumerate_smooth(all, 0).empty());
}

TEST_CASE("enumerate_smooth signs track eps_n") {
    auto sig = arith::make_signature(5, {-1, 1, -1});
    for (auto& [n, e] : arith::enumerate_smooth(sig, 500)) {
        int expect = 1;
        for (auto& [p, k] : arith::factorize(n))
            if (sig.at(p) == -1 && (k & 1)) expect = -expect;
        CHECK(e == expect);
    }
}

TEST_CASE("enumerate_smooth count matches brute force at B=100 and grows") {
    auto all = arith::make_signature(5, {1, 1, 1});
    // brute force: trial-divide every n
    int64_t brute = 0;
    for (int64_t n = 1; n <= 100; ++n) {
        int64_t r = n;
        for (int64_t p : {2, 3, 5})
            while (r % p == 0) r /= p;
        if (r == 1) ++brute;
    }
    CHECK(static_cast<int64_t>(arith::enumerate_smooth(all, 100).size()) == brute);

    size_t prev = 0;
    for (int64_t B : {10, 100, 1000, 10000}) {
        size_t cnt = arith::enumerate_smooth(all, B).size();
        CHECK(cnt > prev);
        prev = cnt;
    }
}

TEST_CASE("signature validation") {
    CHECK_THROWS_AS(arith::make_signature(5, {0, 1, 1}), std::invalid_argument);  // eps_2 = 0
    CHECK_THROWS_AS(arith::make_signature(5, {1, 1}), std::invalid_argument);     // missing prime
    CHECK_THROWS_AS(arith::make_signature(5, {1, 2, 1}), std::invalid_argument);  // out of range
    auto sig = arith::make_signature(11, {1, -1, 0, 1, -1});
    CHECK(sig.support() == std::vector<int64_t>{2, 3, 7, 11});
    CHECK(sig.eps_of(12) == -1);  // 2^2 * 3
    CHECK(sig.eps_of(5) == 0);
}
