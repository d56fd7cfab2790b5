#include "clustercc/error.hpp"
#include "clustercc/seed.hpp"

#include "doctest.h"

#include <random>

using namespace clustercc;

namespace {

LaurentPoly P(const std::string& s, int n) { return LaurentPoly::parse(s, n); }

const ExchangeMatrix kB54{2, 1, {{0, 1}, {-1, 0}, {1, -1}}};

// Oracle: run the exchange relation on numbers instead of polynomials.
std::vector<Rational> numeric_cluster(const ExchangeMatrix& b0, const std::vector<int>& seq,
                                      std::vector<Rational> x) {
    ExchangeMatrix b = b0;
    for (int k : seq) {
        Rational plus = 1, minus = 1;
        for (int i = 0; i < b.n + b.m; ++i) {
            const long long e = b.rows[i][k - 1];
            for (long long t = 0; t < std::abs(e); ++t) (e > 0 ? plus : minus) *= x[i];
        }
        x[k - 1] = (plus + minus) / x[k - 1];
        // independent entrywise matrix mutation
        ExchangeMatrix nb = b;
        for (int i = 0; i < b.n + b.m; ++i)
            for (int j = 0; j < b.n; ++j) {
                if (i == k - 1 || j == k - 1) nb.rows[i][j] = -b.rows[i][j];
                else nb.rows[i][j] = b.rows[i][j] + (std::abs(b.rows[i][k - 1]) * b.rows[k - 1][j] +
                                                     b.rows[i][k - 1] * std::abs(b.rows[k - 1][j])) / 2;
            }
        b = nb;
    }
    return x;
}

ExchangeMatrix random_matrix(std::mt19937& rng, int n, int m, int amp = 2) {
    std::uniform_int_distribution<int> d(-amp, amp);
    ExchangeMatrix b{n, m, IntMatrix(n + m, IntVector(n, 0))};
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            b.rows[i][j] = d(rng);
            b.rows[j][i] = -b.rows[i][j];
        }
    for (int i = n; i < n + m; ++i)
        for (int j = 0; j < n; ++j) b.rows[i][j] = d(rng);
    return b;
}

}  // namespace

TEST_CASE("mutate_matrix examples") {
    auto a2 = ExchangeMatrix::square({{0, 1}, {-1, 0}});
    CHECK(mutate_matrix(a2, 1).rows == IntMatrix{{0, -1}, {1, 0}});
    CHECK(mutate_matrix(kB54, 2).rows == IntMatrix{{0, -1}, {1, 0}, {0, 1}});
    CHECK_THROWS_AS(mutate_matrix(kB54, 3), Error);
    CHECK_THROWS_AS(mutate_matrix(kB54, 0), Error);
    std::mt19937 rng(9);
    for (int t = 0; t < 200; ++t) {
        auto b = random_matrix(rng, 1 + t % 4, t % 3);
        for (int k = 1; k <= b.n; ++k) {
            auto mu = mutate_matrix(b, k);
            CHECK_NOTHROW(mu.validate());
            CHECK(mutate_matrix(mu, k) == b);
        }
    }
}

TEST_CASE("mutate_seed examples") {
    auto s = mutate_seed(Seed::initial(kB54), 1);
    CHECK(s.cluster[0].num == P("x1^-1 x2 + x1^-1 x3", 3));
    CHECK(s.cluster[0].is_laurent());
    auto back = mutate_seed(s, 1);
    CHECK(back.cluster[0].num == P("x1", 3));
    CHECK(back.matrix == kB54);

    // A2 period five: (1,2,1,2,1) gives the initial cluster up to a swap
    auto a2 = ExchangeMatrix::square({{0, 1}, {-1, 0}});
    Seed t = Seed::initial(a2);
    for (int k : {1, 2, 1, 2, 1}) t = mutate_seed(t, k);
    CHECK(t.cluster[0].num == P("x2", 2));
    CHECK(t.cluster[1].num == P("x1", 2));
    CHECK(cluster_variable(a2, {1}, 1) == P("x1^-1 + x1^-1 x2", 2));
    CHECK(enumerate_cluster_variables(a2, 6).size() == 5);
}

TEST_CASE("cluster_variable") {
    CHECK(cluster_variable(kB54, {}, 1) == P("x1", 3));
    CHECK(cluster_variable(kB54, {2, 2}, 2) == P("x2", 3));
    // Sequence (2,1): x1 x2^-1 ... the variable (x1 + x2 + x3)/(x1 x2)
    CHECK(cluster_variable(kB54, {2, 1}, 1) == P("x1^-1 + x1^-1 x2^-1 x3 + x2^-1", 3));
}

TEST_CASE("Laurent phenomenon and numeric oracle") {
    std::mt19937 rng(12);
    std::uniform_int_distribution<int> pick(2, 7);
    for (int t = 0; t < 60; ++t) {
        const int n = 2 + t % 3, m = t % 2;
        const bool wide = t % 4 == 0;
        auto b = random_matrix(rng, n, m, wide ? 2 : 1);
        std::vector<int> seq;
        std::uniform_int_distribution<int> kd(1, n);
        const int len = wide ? 1 + t % 4 : 1 + t % 8;
        while (int(seq.size()) < len) {
            int k = kd(rng);
            if (seq.empty() || seq.back() != k) seq.push_back(k);
        }
        Seed s = Seed::initial(b);
        for (int k : seq) s = mutate_seed(s, k);
        std::vector<Rational> pt;
        for (int i = 0; i < n + m; ++i) pt.emplace_back(pick(rng), pick(rng));
        for (auto& p : pt) p.canonicalize();
        auto num = numeric_cluster(b, seq, pt);
        for (int j = 0; j < n + m; ++j) {
            REQUIRE(s.cluster[j].is_laurent());
            CHECK(s.cluster[j].num.has_integer_coefficients());
            CHECK(s.cluster[j].num.evaluate(pt) == num[j]);
        }
    }
}

TEST_CASE("principal matrix, specialization and independence") {
    CHECK(principal_matrix({{0}}).rows == IntMatrix{{0}, {1}});
    auto p = principal_matrix({{0, 2}, {-2, 0}});
    CHECK(p.rows == IntMatrix{{0, 2}, {-2, 0}, {1, 0}, {0, 1}});

    // Extended matrix of the two-triangle QP: vertices 1..3 mutable, vertex 4 frozen.
    ExchangeMatrix b26{3, 1, {{0, -1, 1}, {1, 0, -1}, {-1, 1, 0}, {1, -1, 0}}};
    auto phi = specialization_phi(b26);
    CHECK(phi.exps[3] == IntVector{0, 0, 0, 1});
    CHECK(phi.exps[4] == IntVector{0, 0, 0, -1});
    CHECK(phi.exps[5] == IntVector{0, 0, 0, 0});
    auto none = specialization_phi(ExchangeMatrix::square({{0, 1}, {-1, 0}}));
    CHECK(none.exps[2] == IntVector{0, 0});
    // frozen block = identity gives the identity on the frozen part
    auto id = specialization_phi(principal_matrix({{0, 1}, {-1, 0}}));
    CHECK(id.exps[2] == IntVector{0, 0, 1, 0});
    CHECK(id.exps[3] == IntVector{0, 0, 0, 1});

    CHECK(certify_independence({{0, 1}, {-1, 0}}, {}).independent);
    auto markov = certify_independence({{0, 2, -2}, {-2, 0, 2}, {2, -2, 0}}, {{1, 0, 0}});
    CHECK_FALSE(markov.independent);
    CHECK(markov.cone.kernel_witness == IntVector{1, 1, 1});
    CHECK(certify_independence({{0, 1, 1}, {-1, 0, -1}, {-1, 1, 0}}, {{0, -1, 1}, {1, 0, 0}}).independent);
    auto dup = certify_independence({{0, 1}, {-1, 0}}, {{1, 0}, {0, 1}, {1, 0}});
    CHECK_FALSE(dup.independent);
    REQUIRE(dup.repeated_pair);
    CHECK(dup.repeated_pair->first == 0);
    CHECK(dup.repeated_pair->second == 2);
}
