#include "clustercc/error.hpp"
#include "clustercc/qp.hpp"
#include "clustercc/seed.hpp"
#include "clustercc/surface.hpp"

#include "doctest.h"

using namespace clustercc;

namespace {

const IntMatrix kAnnulus11{{0, 2}, {-2, 0}};
const IntMatrix kAnnulus12{{0, 1, 1}, {-1, 0, -1}, {-1, 1, 0}};
const IntMatrix kAnnulus13{{0, 2, -1, 0}, {-2, 0, 1, 0}, {1, -1, 0, 1}, {0, 0, -1, 0}};
const IntMatrix kAnnulus14{{0, 2, -1, 0, 0}, {-2, 0, 1, 0, 0}, {1, -1, 0, -1, 0}, {0, 0, 1, 0, 1}, {0, 0, 0, -1, 0}};

MarkedSurface annulus(int c1, int c2, int q = 0) { return MarkedSurface{0, {c1, c2}, q}; }

Triangulation refined_annulus(int c) { return refine_boundary(base_triangulation(0, 2), 2, c).triangulation; }

std::vector<Rational> column(const IntMatrix& b, int j) {
    std::vector<Rational> c;
    for (const auto& row : b) c.push_back(Rational(long(row[j])));
    return c;
}

const ColumnCertificate& cert_for(const NiceTriangulation& nt, const std::string& arc) {
    for (const auto& c : nt.certificates)
        if (c.arc == arc) return c;
    FAIL("no certificate for " << arc);
    throw std::logic_error("unreachable");
}

Rational coef(const ColumnCertificate& c, const std::string& arc) {
    for (const auto& [a, v] : c.terms)
        if (a == arc) return v;
    return 0;
}

// Rank over Q by fraction-free elimination, independent of the library's rref.
int oracle_rank(IntMatrix m) {
    int r = 0;
    const int rows = int(m.size());
    const int cols = rows ? int(m[0].size()) : 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int piv = -1;
        for (int i = r; i < rows; ++i)
            if (m[i][c] != 0) piv = i;
        if (piv < 0) continue;
        std::swap(m[piv], m[r]);
        for (int i = 0; i < rows; ++i) {
            if (i == r || m[i][c] == 0) continue;
            const long long a = m[r][c], b = m[i][c];
            for (int j = 0; j < cols; ++j) m[i][j] = m[i][j] * a - m[r][j] * b;
            long long g = 0;
            for (long long v : m[i]) g = std::gcd(g, std::abs(v));
            if (g > 1)
                for (auto& v : m[i]) v /= g;
        }
        ++r;
    }
    return r;
}

std::vector<Triangulation> generated_family() {
    std::vector<Triangulation> out;
    for (int b = 2; b <= 4; ++b)
        for (int c = 1; c <= 4; ++c)
            for (int q = 0; q <= 2; ++q) {
                MarkedSurface s{0, IntVector(b, 1), q};
                s.boundary[b - 1] = c;
                if (b == 3) s.boundary[0] = 2;
                out.push_back(build_nice_triangulation(s).sigma);
            }
    return out;
}

}  // namespace

TEST_CASE("surface: annulus matrices from the refined boundary") {
    CHECK(b_matrix(base_triangulation(0, 2)) == kAnnulus11);
    CHECK(b_matrix(refined_annulus(2)) == kAnnulus12);
    CHECK(b_matrix(refined_annulus(3)) == kAnnulus13);
    CHECK(b_matrix(refined_annulus(4)) == kAnnulus14);
    CHECK(refined_annulus(4).arcs == std::vector<std::string>{"1", "2", "3", "4", "5"});
}

TEST_CASE("surface: refine with c = 1 is the identity and needs one marked point") {
    const auto t = base_triangulation(0, 2);
    const auto r = refine_boundary(t, 1, 1);
    CHECK(r.triangulation.triangles == t.triangles);
    CHECK(r.new_arcs.empty());
    const auto twice = refine_boundary(t, 2, 2).triangulation;
    CHECK_THROWS_WITH_AS(refine_boundary(twice, 2, 2), doctest::Contains("exactly one marked point"), Error);
}

TEST_CASE("surface: b_matrix is skew-symmetric and validation catches bad input") {
    for (const auto& t : generated_family()) CHECK(is_skew_symmetric(b_matrix(t)));
    Triangulation bad = base_triangulation(0, 2);
    bad.triangles.pop_back();
    try {
        b_matrix(bad);
        FAIL("expected InvalidTriangulation");
    } catch (const Error& e) {
        CHECK(e.code() == "InvalidTriangulation");
    }
}

TEST_CASE("surface: JSON round trip") {
    const auto nt = build_nice_triangulation(annulus(1, 2, 1));
    const auto j = nt.sigma.to_json();
    CHECK(j.at("selfFolded").size() == 1);
    const auto back = Triangulation::from_json(j);
    CHECK(back.triangles == nt.sigma.triangles);
    CHECK(b_matrix(back) == b_matrix(nt.sigma));
    const auto s = MarkedSurface::from_json(nlohmann::json::parse(R"({"genus":0,"boundary":[1,2],"punctures":0})"));
    CHECK(s.num_arcs() == 3);
    CHECK(s.even_components() == 1);
}

TEST_CASE("surface: flip matches matrix mutation (seed engine as oracle)") {
    const auto t = refined_annulus(2);
    const auto f = flip(t, "3");
    CHECK(f.arcs[2] == "3'");
    CHECK(b_matrix(f) == mutate_matrix(ExchangeMatrix::square(kAnnulus12), 3).rows);

    int checked = 0;
    for (const auto& tri : generated_family()) {
        const auto b = b_matrix(tri);
        for (int i = 0; i < int(tri.arcs.size()); ++i) {
            if (tri.is_radius(tri.arcs[i])) {
                CHECK_THROWS_AS(flip(tri, tri.arcs[i]), Error);
                continue;
            }
            const auto f1 = flip(tri, tri.arcs[i]);
            CHECK(b_matrix(f1) == mutate_matrix(ExchangeMatrix::square(b), i + 1).rows);
            ++checked;
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("surface: flipping twice restores the triangulation") {
    const auto t = refined_annulus(3);
    const auto back = flip(flip(t, "4"), "4'");
    CHECK(back.arcs == t.arcs);
    CHECK(b_matrix(back) == b_matrix(t));
    auto sorted = [](std::vector<Triangle> v) {
        for (auto& tri : v) std::rotate(tri.begin(), std::min_element(tri.begin(), tri.end()), tri.end());
        std::sort(v.begin(), v.end());
        return v;
    };
    CHECK(sorted(back.triangles) == sorted(t.triangles));
}

TEST_CASE("surface: square disk flip gives the other diagonal") {
    Triangulation t;
    t.arcs = {"d"};
    t.boundary = {{"e1", "e2", "e3", "e4"}};
    t.triangles = {Triangle{"d", "e1", "e2"}, Triangle{"d", "e3", "e4"}};
    t.validate(MarkedSurface{0, {4}, 0});
    const auto f = flip(t, "d", "d2");
    CHECK(f.arcs == std::vector<std::string>{"d2"});
    CHECK(f.triangles.size() == 2);
    // The new diagonal separates e2, e3 from e4, e1.
    CHECK(f.triangles[0] == Triangle{"d2", "e2", "e3"});
    CHECK(f.triangles[1] == Triangle{"d2", "e4", "e1"});
    CHECK_THROWS_AS(flip(t, "e1"), Error);
}

TEST_CASE("surface: punctures produce coincident loop and radius columns") {
    for (int q = 1; q <= 2; ++q) {
        const auto base = refine_boundary(base_triangulation(0, 2), 2, 3);
        const auto flipped = flip(base.triangulation, base.new_arcs.back(), "9");
        const auto ins = add_punctures(flipped, 2, q);
        const auto b = b_matrix(ins.triangulation);
        int folded = 0;
        for (const auto& tri : ins.triangulation.triangles) folded += ins.triangulation.is_self_folded(tri) ? 1 : 0;
        CHECK(folded == q);
        for (const auto& p : ins.punctures)
            CHECK(column(b, ins.triangulation.arc_index(p.loop)) == column(b, ins.triangulation.arc_index(p.radius)));
    }
    const auto t = base_triangulation(0, 2);
    CHECK(add_punctures(t, 1, 0).triangulation.triangles == t.triangles);
}

TEST_CASE("surface: corank formula") {
    CHECK(corank_check(base_triangulation(0, 2), annulus(1, 1)).rank == 2);
    const auto r = corank_check(refined_annulus(2), annulus(1, 2));
    CHECK(r.rank == 2);
    CHECK(r.expected == 2);
    CHECK(corank_check(refined_annulus(3), annulus(1, 3)).rank == 4);
    const auto punctured = build_nice_triangulation(annulus(1, 2, 1));
    CHECK(corank_check(punctured.sigma, annulus(1, 2, 1)).rank == 6 - 1 - 1);
    for (int b = 2; b <= 4; ++b)
        for (int c = 1; c <= 5; ++c)
            for (int q = 0; q <= 3; ++q) {
                MarkedSurface s{0, IntVector(b, 1), q};
                s.boundary[0] = c;
                const auto nt = build_nice_triangulation(s);
                CHECK(oracle_rank(b_matrix(nt.sigma)) == s.num_arcs() - q - s.even_components());
            }
    try {
        corank_check(refined_annulus(2), annulus(1, 2, 0));
    } catch (...) {
        FAIL("corank check should hold");
    }
}

TEST_CASE("surface: nice triangulation certificates of the refined annuli") {
    const auto a11 = build_nice_triangulation(annulus(1, 1));
    CHECK(b_matrix(a11.sigma) == kAnnulus11);
    CHECK(a11.certificates.empty());
    CHECK(a11.rank == 2);
    CHECK(a11.cone.trivial);

    const auto a12 = build_nice_triangulation(annulus(1, 2));
    CHECK(b_matrix(a12.sigma) == kAnnulus12);
    REQUIRE(a12.certificates.size() == 1);
    const auto& c3 = cert_for(a12, "3");
    CHECK(c3.terms.size() == 2);
    CHECK(coef(c3, "1") == 1);
    CHECK(coef(c3, "2") == 1);
    CHECK(a12.cone.trivial);

    const auto a14 = build_nice_triangulation(annulus(1, 4));
    CHECK(b_matrix(a14.sigma) == kAnnulus14);
    REQUIRE(a14.certificates.size() == 1);
    const auto& c5 = cert_for(a14, "5");
    CHECK(c5.terms.size() == 3);
    CHECK(coef(c5, "3") == 1);
    CHECK(coef(c5, "1") == Rational(1, 2));
    CHECK(coef(c5, "2") == Rational(1, 2));
    CHECK(a14.dependent == std::vector<std::string>{"5"});
}

TEST_CASE("surface: every certificate reproduces its column with nonnegative coefficients") {
    for (int b = 2; b <= 4; ++b)
        for (int c = 1; c <= 6; ++c)
            for (int q = 0; q <= 3; ++q) {
                MarkedSurface s{0, IntVector(b, 1), q};
                s.boundary[b - 1] = c;
                if (b >= 3) s.boundary[0] = 2;
                const auto nt = build_nice_triangulation(s);
                CHECK(nt.cone.trivial);
                const auto bm = b_matrix(nt.sigma);
                const int n = int(bm.size());
                CHECK(int(nt.dependent.size()) == n - oracle_rank(bm));
                for (const auto& cert : nt.certificates) {
                    std::vector<Rational> sum(n, 0);
                    for (const auto& [arc, v] : cert.terms) {
                        CHECK(v > 0);
                        CHECK(std::find(nt.dependent.begin(), nt.dependent.end(), arc) == nt.dependent.end());
                        const auto col = column(bm, nt.sigma.arc_index(arc));
                        for (int i = 0; i < n; ++i) sum[i] += v * col[i];
                    }
                    CHECK(sum == column(bm, nt.sigma.arc_index(cert.arc)));
                }
                // Columns outside S are linearly independent.
                IntMatrix rest;
                for (int i = 0; i < n; ++i) {
                    IntVector row;
                    for (int j = 0; j < n; ++j)
                        if (std::find(nt.dependent.begin(), nt.dependent.end(), nt.sigma.arcs[j]) == nt.dependent.end())
                            row.push_back(bm[i][j]);
                    rest.push_back(row);
                }
                CHECK(oracle_rank(rest) == n - int(nt.dependent.size()));
            }
}

TEST_CASE("surface: base triangulations and the missing-template error") {
    for (int b = 2; b <= 4; ++b) {
        const auto t = base_triangulation(0, b);
        t.validate(MarkedSurface{0, IntVector(b, 1), 0});
        CHECK(int(t.arcs.size()) == 4 * b - 6);
    }
    for (auto [g, b] : {std::pair{1, 1}, std::pair{0, 1}, std::pair{0, 5}}) {
        try {
            build_nice_triangulation(MarkedSurface{g, IntVector(b, 4), 0});
            FAIL("expected BaseTriangulationRequired");
        } catch (const Error& e) {
            CHECK(e.code() == "BaseTriangulationRequired");
        }
    }
}

TEST_CASE("surface: user-supplied base triangulation for the torus with one hole") {
    // Once-punctured torus (two triangles a, b, c) with the puncture opened into a
    // hole at the corner between a and b; the diagonal d splits the quadrilateral.
    Triangulation t;
    t.arcs = {"a", "b", "c", "d"};
    t.boundary = {{"h"}};
    t.triangles = {Triangle{"a", "b", "c"}, Triangle{"a", "h", "d"}, Triangle{"d", "b", "c"}};
    t.validate(MarkedSurface{1, {1}, 0});
    const auto nt = build_nice_triangulation(MarkedSurface{1, {2}, 1}, t);
    CHECK(nt.cone.trivial);
    CHECK(nt.rank == 6 + 3 + 3 + 2 - 6 - 1 - 1);
}

TEST_CASE("surface: gentle QP of the 3-arc annulus has one almost bypass") {
    const QP qp = triangulation_qp(refined_annulus(2));
    CHECK(qp.quiver.exchange_matrix().rows == kAnnulus12);
    CHECK(is_gentle(qp));
    const auto bypasses = find_bypasses(qp);
    int almost = 0;
    for (const auto& b : bypasses) {
        if (b.kind == BypassKind::AlmostBypass) ++almost;
        CHECK_NOTHROW(bypass_column_identity(qp, b));
    }
    CHECK(almost == 1);
    for (const auto& tri : generated_family()) {
        bool folded = false;
        for (const auto& x : tri.triangles) folded = folded || tri.is_self_folded(x);
        if (folded) continue;
        const QP g = triangulation_qp(tri);
        CHECK(g.quiver.exchange_matrix().rows == b_matrix(tri));
        CHECK(is_gentle(g));
        for (const auto& b : find_bypasses(g)) CHECK_NOTHROW(bypass_column_identity(g, b));
    }
}
