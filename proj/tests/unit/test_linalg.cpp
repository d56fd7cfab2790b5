#include "clustercc/error.hpp"
#include "clustercc/linalg.hpp"

#include "doctest.h"

#include <random>

using namespace clustercc;

namespace {

const IntMatrix kAnnulus3 = {{0, 1, 1}, {-1, 0, -1}, {-1, 1, 0}};
const IntMatrix kMarkov = {{0, 2, -2}, {-2, 0, 2}, {2, -2, 0}};
const IntMatrix kRot = {{0, 1}, {-1, 0}};

IntMatrix random_skew(std::mt19937& rng, int n, int amp) {
    std::uniform_int_distribution<int> dist(-amp, amp);
    IntMatrix b(n, IntVector(n, 0));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            b[i][j] = dist(rng);
            b[j][i] = -b[i][j];
        }
    return b;
}

// Oracle: search every vector in {0..5}^n \ {0} for a kernel element.
bool brute_kernel_hit(const IntMatrix& b) {
    const int n = int(b.size());
    IntVector x(n, 0);
    for (;;) {
        int i = 0;
        while (i < n && x[i] == 5) x[i++] = 0;
        if (i == n) return false;
        ++x[i];
        bool zero = true;
        for (int r = 0; r < n && zero; ++r) {
            long long s = 0;
            for (int c = 0; c < n; ++c) s += b[r][c] * x[c];
            zero = s == 0;
        }
        if (zero) return true;
    }
}

}  // namespace

TEST_CASE("rref of small matrices") {
    auto id = RatMatrix::identity(3);
    auto r = rref(id);
    CHECK(r.R == id);
    CHECK(r.rank == 3);

    auto z = rref(RatMatrix(2, 4));
    CHECK(z.rank == 0);
    CHECK(z.R.is_zero());

    auto s = rref(RatMatrix::from_ints(kRot));
    CHECK(s.R == RatMatrix::identity(2));
    CHECK(s.pivots == std::vector<int>{0, 1});
}

TEST_CASE("rref is idempotent and kernels are exact") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> dist(-3, 3);
    for (int trial = 0; trial < 200; ++trial) {
        const int rows = 1 + trial % 5, cols = 1 + (trial / 5) % 5;
        RatMatrix a(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) a(i, j) = dist(rng) * (trial % 3 == 0 ? dist(rng) : 1);
        auto r = rref(a);
        CHECK(rref(r.R).R == r.R);
        auto ker = kernel_basis_rational(a);
        CHECK(int(ker.size()) == cols - r.rank);
        for (const auto& v : ker) {
            for (const auto& x : a.apply(v)) CHECK(x == 0);
        }
        CHECK(rank(left_kernel(a)) == rows - r.rank);
        CHECK((left_kernel(a) * a).is_zero());
    }
}

TEST_CASE("kernel basis examples") {
    CHECK(kernel_basis(RatMatrix::identity(4)).empty());
    CHECK(kernel_basis(RatMatrix::from_ints(kAnnulus3)) == std::vector<IntVector>{{1, 1, -1}});
    CHECK(kernel_basis(RatMatrix(2, 2)) == std::vector<IntVector>{{1, 0}, {0, 1}});
}

TEST_CASE("solve, inverses") {
    auto a = RatMatrix::from_ints({{2, 1}, {1, 1}});
    auto inv = inverse(a);
    REQUIRE(inv);
    CHECK(*inv * a == RatMatrix::identity(2));
    CHECK(!inverse(RatMatrix::from_ints({{1, 2}, {2, 4}})));
    auto tall = RatMatrix::from_ints({{1, 0}, {1, 1}, {0, 3}});
    CHECK(left_inverse(tall) * tall == RatMatrix::identity(2));
    CHECK(tall.transpose() * right_inverse(tall.transpose()) == RatMatrix::identity(2));
    auto x = solve(tall, {Rational(1), Rational(2), Rational(3)});
    REQUIRE(x);
    CHECK((*x)[0] == 1);
    CHECK((*x)[1] == 1);
    CHECK(!solve(tall, {Rational(1), Rational(2), Rational(4)}));
}

TEST_CASE("lp_maximize small programs") {
    // max x + y  s.t. x + 2y + s = 4, 3x + y + t = 6
    auto a = RatMatrix::from_ints({{1, 2, 1, 0}, {3, 1, 0, 1}});
    auto r = lp_maximize(a, {Rational(4), Rational(6)}, {1, 1, 0, 0});
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.value == Rational(14, 5));
    // infeasible: x = -1
    auto inf = lp_maximize(RatMatrix::from_ints({{1}}), {Rational(-1)});
    CHECK(inf.status == LpStatus::Infeasible);
    // unbounded: x - y = 0, maximize x
    auto unb = lp_maximize(RatMatrix::from_ints({{1, -1}}), {Rational(0)}, {1, 0});
    CHECK(unb.status == LpStatus::Unbounded);
    // redundant rows
    auto red = lp_maximize(RatMatrix::from_ints({{1, 1}, {2, 2}}), {Rational(1), Rational(2)}, {1, 0});
    REQUIRE(red.status == LpStatus::Optimal);
    CHECK(red.value == 1);
}

TEST_CASE("kernel_cone_trivial examples and certificates") {
    auto rot = kernel_cone_trivial({{0, 2}, {-2, 0}});
    CHECK(rot.trivial);
    auto ann = kernel_cone_trivial(kAnnulus3);
    CHECK(ann.trivial);
    auto markov = kernel_cone_trivial(kMarkov);
    CHECK_FALSE(markov.trivial);
    CHECK(markov.kernel_witness == IntVector{1, 1, 1});
    CHECK_THROWS_AS(kernel_cone_trivial({{0, 1}, {1, 0}}), Error);
    CHECK_THROWS_AS(kernel_cone_trivial({{0, 1, 0}}), Error);
}

TEST_CASE("kernel_cone_trivial agrees with brute force for n <= 4") {
    std::mt19937 rng(11);
    int agree = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 1 + trial % 4;
        auto b = random_skew(rng, n, trial % 2 ? 2 : 3);
        auto res = kernel_cone_trivial(b);
        const bool hit = brute_kernel_hit(b);
        if (hit) CHECK_FALSE(res.trivial);
        if (res.trivial) {
            // Farkas direction: B^T y > 0 forbids any x >= 0, x != 0 with Bx = 0.
            for (int j = 0; j < n; ++j) {
                long long s = 0;
                for (int i = 0; i < n; ++i) s += b[i][j] * res.positive_witness[i];
                CHECK(s > 0);
            }
        } else {
            CHECK(std::all_of(res.kernel_witness.begin(), res.kernel_witness.end(), [](long long v) { return v >= 0; }));
        }
        agree += hit != res.trivial;
    }
    CHECK(agree > 0);
}

TEST_CASE("cone_membership and order_compare") {
    CHECK(cone_membership({0, 0}, kRot).outcome == ConeOutcome::Feasible);
    auto f = cone_membership({1, 0}, kRot);
    CHECK(f.outcome == ConeOutcome::Feasible);
    CHECK(f.u == IntVector{0, 1});
    CHECK(cone_membership({0, 1}, kRot).outcome == ConeOutcome::Infeasible);
    CHECK_THROWS_AS(cone_membership({1, 0}, kRot, 0), Error);

    CHECK(order_compare({3, 4}, {3, 4}, kRot) == OrderOutcome::Equal);
    CHECK(order_compare({1, 0}, {0, 0}, kRot) == OrderOutcome::Less);
    CHECK(order_compare({0, 0}, {1, 0}, kRot) == OrderOutcome::Greater);
    // b - a = (0,-1) = B(1,0), so b <= a.
    CHECK(order_compare({0, 1}, {0, 0}, kRot) == OrderOutcome::Greater);
    CHECK(order_compare({1, 1}, {0, 0}, kRot) == OrderOutcome::Incomparable);
    CHECK_THROWS_AS(order_compare({1, 0, 0}, {0, 0, 0}, kMarkov), Error);

    // Singular annulus matrix: an integer point needs the kernel direction.
    auto m = cone_membership({1, -1, 0}, kAnnulus3);
    REQUIRE(m.outcome == ConeOutcome::Feasible);
    IntVector bu(3, 0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) bu[i] += kAnnulus3[i][j] * m.u[j];
    CHECK(bu == IntVector{1, -1, 0});
}

TEST_CASE("order_compare antisymmetry on random data") {
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> small(-2, 2);
    int checked = 0;
    for (int trial = 0; trial < 60; ++trial) {
        auto b = random_skew(rng, 2 + trial % 3, 2);
        if (!kernel_cone_trivial(b).trivial) continue;
        IntVector a(b.size()), c(b.size());
        for (auto& x : a) x = small(rng);
        for (auto& x : c) x = small(rng);
        auto ab = order_compare(a, c, b, 6);
        auto ba = order_compare(c, a, b, 6);
        if (ab == OrderOutcome::Less) CHECK(ba == OrderOutcome::Greater);
        if (ab == OrderOutcome::Greater) CHECK(ba == OrderOutcome::Less);
        ++checked;
    }
    CHECK(checked > 10);
}

TEST_CASE("matrix_conditions_report") {
    auto full = matrix_conditions_report({{0, 2}, {-2, 0}});
    CHECK(full.c1 == Tri::True);
    CHECK(full.c2 == Tri::True);
    CHECK(full.c3 == Tri::True);
    CHECK(full.c4 == Tri::True);
    CHECK(full.c5 == Tri::True);

    auto markov = matrix_conditions_report(kMarkov);
    CHECK(markov.c1 == Tri::False);
    CHECK(markov.c2 == Tri::False);
    CHECK(markov.c3 == Tri::False);
    CHECK(markov.c4 == Tri::False);
    CHECK(markov.c5 == Tri::False);
    CHECK(markov.implications_hold);

    auto ann = matrix_conditions_report(kAnnulus3);
    CHECK(ann.c1 == Tri::False);
    CHECK(ann.rank == 2);
    CHECK(ann.c4 == Tri::True);
    CHECK(ann.c5 == Tri::True);
    CHECK(ann.implications_hold);

    std::mt19937 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        auto rep = matrix_conditions_report(random_skew(rng, 1 + trial % 5, 2));
        CHECK(rep.implications_hold);
    }
}
