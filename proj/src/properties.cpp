#include "clustercc/properties.hpp"

#include "clustercc/error.hpp"
#include "clustercc/rep.hpp"
#include "clustercc/seed.hpp"
#include "clustercc/surface.hpp"

#include <chrono>
#include <functional>
#include <random>
#include <sstream>

namespace clustercc {

using nlohmann::json;

namespace {

/// Adds a frozen copy j' of every mutable vertex with an arrow j -> j'.
QP principal_extension(const QP& qp) {
    const Quiver& q = qp.quiver;
    const int n = q.n();
    std::vector<Arrow> arrows;
    for (const auto& a : q.arrows()) arrows.push_back(a);
    for (int j = 1; j <= n; ++j) arrows.push_back(Arrow{"p" + std::to_string(j), j, n + j});
    QP out;
    out.quiver = Quiver(n, n, arrows);
    out.potential = qp.potential;
    out.p = qp.p;
    return out;
}

QP make_qp(int n, int m, std::vector<Arrow> arrows, const std::vector<Path>& cycles = {}) {
    QP qp;
    qp.quiver = Quiver(n, m, std::move(arrows));
    for (const auto& c : cycles) add_cycle(qp.potential, c, 1);
    qp.validate();
    return qp;
}

/// Sum over vertices of floor(d^2 / 4): the largest Grassmannian dimension.
long long worst_grassmannian(const IntVector& dims) {
    long long s = 0;
    for (long long d : dims) s += (d * d) / 4;
    return s;
}

constexpr long long kCountableDimension = 4;

struct Suite {
    PropertyOptions opt;
    std::mt19937 rng;
    PropertyReport report;

    explicit Suite(const PropertyOptions& o) : opt(o), rng(o.seed) {
        auto add = [&](const std::string& id, const std::string& name, long required) {
            PropertyTally t;
            t.id = id;
            t.name = name;
            t.required = required;
            report.properties.push_back(t);
        };
        add("a", "mutation is an involution up to isomorphism", opt.reps);
        add("b", "E-invariant is unchanged by mutation", opt.reps);
        add("c", "CC functions satisfy the mutation identity", opt.reps);
        add("d", "restricted g-vector is the truncated extended g-vector", opt.reps);
        add("e", "CC functions multiply on direct sums", opt.reps);
        add("f", "triangle maps satisfy alpha gamma = 0 and gamma beta = 0", opt.reps);
        add("g", "flip matches matrix mutation on generated triangulations", 1);
        add("h", "column identity on every detected bypass", 1);
        add("i", "corank formula on generated triangulations", 1);
        add("j", "fixed-point and point-count Euler characteristics agree", opt.reps);
        report.options = opt;
    }

    PropertyTally& tally(const std::string& id) {
        for (auto& t : report.properties)
            if (t.id == id) return t;
        throw Error("InternalError", "unknown property " + id);
    }

    void fail(const std::string& id, const std::string& what) {
        auto& t = tally(id);
        ++t.failed;
        if (t.failures.size() < 5) t.failures.push_back(what);
    }

    long total_failures() const {
        long f = 0;
        for (const auto& t : report.properties) f += t.failed;
        return f;
    }

    void skip(const std::string& id, const std::string& reason) {
        auto& t = tally(id);
        ++t.skipped;
        ++t.skip_reasons[reason];
    }

    /// Random dimension vector on the mutable vertices with small Grassmannians.
    IntVector random_dims(const QP& qp) {
        const int n = qp.quiver.n();
        std::uniform_int_distribution<int> total_dist(1, opt.max_total);
        std::uniform_int_distribution<int> vertex(0, n - 1);
        for (int tries = 0; tries < 100; ++tries) {
            const int total = total_dist(rng);
            IntVector d(qp.quiver.num_vertices(), 0);
            for (int i = 0; i < total; ++i) ++d[vertex(rng)];
            if (*std::max_element(d.begin(), d.end()) <= 3 && worst_grassmannian(d) <= kCountableDimension) return d;
        }
        IntVector d(qp.quiver.num_vertices(), 0);
        d[0] = 1;
        return d;
    }

    std::string describe(const std::string& qp_name, const DecoratedRep& m, int k = 0) {
        std::ostringstream os;
        os << qp_name << " dims " << to_string(m.dims) << " decoration " << to_string(m.decoration);
        if (k) os << " at k=" << k;
        return os.str();
    }

    /// Runs one check; Euler characteristics that point counting cannot reach
    /// are skips, any other engine error is a failure of that property.
    template <class F>
    bool guarded(const std::string& id, const std::string& where, F&& body) {
        try {
            body();
            return true;
        } catch (const Error& e) {
            if (e.code() == "TooLarge") skip(id, "Grassmannian too large for point counting");
            else if (e.code() == "NonPolynomialCount") skip(id, "subrepresentation count not polynomial in p");
            else if (e.code() == "Inconclusive") skip(id, "no arrow relabeling identifies the QPs");
            else fail(id, where + ": " + e.code() + " " + e.what());
            return false;
        }
    }

    /// Runs (a)-(f) on one representation; returns true when none was skipped or failed.
    bool check_rep(const std::string& name, const QP& qp, const DecoratedRep& m) {
        bool complete = true;
        const int n = qp.quiver.n();
        const std::string where = describe(name, m);

        // (f) at every vertex without 2-cycles or loops.
        complete &= guarded("f", where, [&] {
            bool any_triangle = false;
            for (int k = 1; k <= n; ++k) {
                try {
                    const auto t = triangle_maps(m, qp, k);
                    any_triangle = true;
                    if (!(t.alpha * t.gamma).is_zero() || !(t.gamma * t.beta).is_zero())
                        fail("f", describe(name, m, k));
                } catch (const Error& e) {
                    if (e.code() != "TwoCycleAtK" && e.code() != "LoopAtK") throw;
                }
            }
            if (!any_triangle) throw Error("Inconclusive", "no vertex free of 2-cycles");
            ++tally("f").checked;
        });

        // (d) restriction of the extended g-vector, cross-checked by the Hom/Ext route.
        complete &= guarded("d", where, [&] {
            const auto gv = g_vectors(m, qp);
            const IntVector head(gv.g_ext.begin(), gv.g_ext.begin() + n);
            if (gv.g != head || g_vector_hom_ext(m, qp) != gv.g_ext) fail("d", where);
            ++tally("d").checked;
        });

        std::vector<int> ks;
        for (int k = 1; k <= n; ++k) {
            try {
                check_mutable_vertex(qp.quiver, k);
                ks.push_back(k);
            } catch (const Error&) {
            }
        }
        if (ks.empty()) {
            for (const char* id : {"a", "b", "c"}) skip(id, "no mutable vertex free of 2-cycles");
            return false;
        }
        const int k = ks[std::uniform_int_distribution<int>(0, int(ks.size()) - 1)(rng)];
        const std::string at = describe(name, m, k);
        std::optional<RepMutation> once;
        if (!guarded("a", at, [&] { once = mutate_rep(m, qp, k); })) {
            skip("b", "mutation failed");
            skip("c", "mutation failed");
            return false;
        }

        // (a)
        complete &= guarded("a", at, [&] {
            const auto twice = mutate_rep(once->rep, once->qp, k);
            const auto answer = involution_check(m, qp, twice.rep, twice.qp, k);
            if (answer != IsoAnswer::Yes) fail("a", at + ": " + to_string(answer));
            ++tally("a").checked;
        });

        // (b)
        complete &= guarded("b", at, [&] {
            if (e_invariant(once->rep, once->rep, once->qp) != e_invariant(m, m, qp)) fail("b", at);
            ++tally("b").checked;
        });

        // (c)
        complete &= guarded("c", at, [&] {
            const auto before = cc_function(m, qp);
            const auto after = cc_function(once->rep, once->qp);
            if (!cc_mutation_identity(before, after, qp.quiver.exchange_matrix(), k)) fail("c", at);
            ++tally("c").checked;
        });

        // (e) with a second random representation that keeps the sum countable.
        complete &= guarded("e", where, [&] {
            for (int tries = 0; tries < 8; ++tries) {
                IntVector d = random_dims(qp);
                IntVector sum_dims = m.dims;
                for (std::size_t i = 0; i < d.size(); ++i) sum_dims[i] += d[i];
                if (worst_grassmannian(sum_dims) > kCountableDimension) continue;
                auto other = random_rep(qp, d, rng);
                if (!other) continue;
                const auto lhs = cc_function(direct_sum(m, *other, qp.quiver), qp);
                const auto rhs = cc_function(m, qp) * cc_function(*other, qp);
                if (lhs != rhs) fail("e", where + " with dims " + to_string(d));
                ++tally("e").checked;
                return;
            }
            throw Error("TooLarge", "no second representation with a countable direct sum");
        });
        return complete;
    }

    void run_reps(const std::vector<std::pair<std::string, QP>>& qps) {
        std::vector<bool> used(qps.size(), false);
        std::bernoulli_distribution decorate(0.2);
        for (int attempt = 0; attempt < opt.max_attempts && report.reps_fully_checked < opt.reps; ++attempt) {
            const std::size_t qi = std::size_t(attempt) % qps.size();
            const auto& [name, qp] = qps[qi];
            const IntVector dims = random_dims(qp);
            auto m = random_rep(qp, dims, rng);
            if (!m) continue;
            if (decorate(rng)) ++m->decoration[std::uniform_int_distribution<int>(0, qp.quiver.n() - 1)(rng)];
            if (!validate_rep(*m, qp).valid) throw Error("InternalError", "random_rep returned an invalid rep");
            ++report.reps_generated;
            used[qi] = true;
            const long failures_before = total_failures();
            if (check_rep(name, qp, *m) && total_failures() == failures_before) ++report.reps_fully_checked;
        }
        report.qps_used = int(std::count(used.begin(), used.end(), true));
    }

    /// Random representation whose arrows are partial permutations on a forest.
    std::optional<DecoratedRep> random_tree_rep(const QP& qp) {
        const Quiver& q = qp.quiver;
        DecoratedRep m;
        m.dims = random_dims(qp);
        m.decoration.assign(m.dims.size(), 0);
        std::bernoulli_distribution on(0.6);
        for (const auto& a : q.arrows()) {
            RatMatrix mat(int(m.dims[a.to - 1]), int(m.dims[a.from - 1]));
            std::vector<bool> row_used(mat.rows(), false);
            for (int c = 0; c < mat.cols(); ++c) {
                if (!on(rng)) continue;
                std::vector<int> free_rows;
                for (int r = 0; r < mat.rows(); ++r)
                    if (!row_used[r]) free_rows.push_back(r);
                if (free_rows.empty()) break;
                const int r = free_rows[std::uniform_int_distribution<int>(0, int(free_rows.size()) - 1)(rng)];
                row_used[r] = true;
                mat(r, c) = 1;
            }
            m.matrices[a.id] = mat;
        }
        if (!fixedpoint_applicable(m, q) || !validate_rep(m, effective_qp(qp, m.total_dim())).valid) return std::nullopt;
        return m;
    }

    void run_euler(const std::vector<std::pair<std::string, QP>>& qps) {
        int done = 0;
        for (int attempt = 0; attempt < opt.max_attempts && done < opt.reps; ++attempt) {
            const auto& [name, qp] = qps[std::size_t(attempt) % qps.size()];
            auto m = random_tree_rep(qp);
            if (!m) continue;
            bool complete = true;
            bool ok = true;
            std::vector<long long> e(m->dims.size(), 0);
            std::function<void(std::size_t)> rec = [&](std::size_t v) {
                if (v == e.size()) {
                    const long long fp = chi_grassmannian(*m, qp.quiver, e, ChiMethod::FixedPoint);
                    try {
                        const long long pc = chi_grassmannian(*m, qp.quiver, e, ChiMethod::PointCount);
                        if (fp != pc) ok = false;
                    } catch (const Error& err) {
                        // Tree modules have polynomial counts, so only size limits are skips.
                        if (err.code() == "TooLarge") complete = false;
                        else ok = false;
                    }
                    return;
                }
                for (e[v] = 0; e[v] <= m->dims[v]; ++e[v]) rec(v + 1);
            };
            rec(0);
            if (!ok) fail("j", describe(name, *m));
            if (complete) {
                ++tally("j").checked;
                ++done;
            } else {
                skip("j", "some subdimension vector too large for point counting");
            }
        }
    }

    void check_triangulation(const Triangulation& t, const MarkedSurface& s, const std::string& label) {
        ++report.triangulations;
        try {
            corank_check(t, s);
        } catch (const Error& e) {
            if (e.code() != "RankMismatch") throw;
            fail("i", label + ": " + e.what());
        }
        ++tally("i").checked;
        bool folded = false;
        for (const auto& tri : t.triangles) folded = folded || t.is_self_folded(tri);
        if (!folded) {
            const QP qp = triangulation_qp(t);
            if (qp.quiver.exchange_matrix().rows != b_matrix(t)) fail("h", label + ": quiver differs from B(tau)");
            if (is_gentle(qp)) {
                for (const auto& b : find_bypasses(qp)) {
                    try {
                        bypass_column_identity(qp, b);
                    } catch (const Error& e) {
                        fail("h", label + ": " + e.what());
                    }
                    ++tally("h").checked;
                }
            } else {
                skip("h", "quiver with potential not gentle");
            }
        }
    }

    void run_surfaces() {
        std::vector<MarkedSurface> surfaces;
        for (int c1 = 1; c1 <= 4; ++c1)
            for (int c2 = 1; c2 <= 4; ++c2)
                for (int q = 0; q <= 2; ++q) surfaces.push_back(MarkedSurface{0, {c1, c2}, q});
        for (int c = 1; c <= 3; ++c)
            for (int q = 0; q <= 1; ++q) {
                surfaces.push_back(MarkedSurface{0, {c, 2, 1}, q});
                surfaces.push_back(MarkedSurface{0, {1, c, 2, 1}, q});
            }
        for (const auto& s : surfaces) {
            const auto nt = build_nice_triangulation(s);
            std::ostringstream label;
            label << "genus " << s.genus << " boundary " << to_string(s.boundary) << " punctures " << s.punctures;
            std::vector<std::pair<Triangulation, MarkedSurface>> family{{nt.sigma, s}};
            family.push_back({nt.tau1, MarkedSurface{s.genus, s.boundary, 0}});
            for (const auto& [t, surf] : std::vector(family)) {
                const auto b = b_matrix(t);
                for (int i = 0; i < int(t.arcs.size()); ++i) {
                    if (t.is_radius(t.arcs[i])) continue;
                    const auto f = flip(t, t.arcs[i]);
                    if (b_matrix(f) != mutate_matrix(ExchangeMatrix::square(b), i + 1).rows)
                        fail("g", label.str() + " flip at " + t.arcs[i]);
                    ++tally("g").checked;
                    family.push_back({f, surf});
                }
            }
            for (const auto& [t, surf] : family) check_triangulation(t, surf, label.str());
        }
    }
};

}  // namespace

std::vector<std::pair<std::string, QP>> property_qps() {
    std::vector<std::pair<std::string, QP>> out;
    out.push_back({"A2", principal_extension(make_qp(2, 0, {{"a", 1, 2}}))});
    out.push_back({"A3 linear", principal_extension(make_qp(3, 0, {{"a", 1, 2}, {"b", 2, 3}}))});
    out.push_back({"A3 sink", principal_extension(make_qp(3, 0, {{"a", 1, 2}, {"b", 3, 2}}))});
    out.push_back({"three-cycle", principal_extension(make_qp(3, 0, {{"α", 2, 1}, {"β", 3, 2}, {"γ", 1, 3}},
                                                              {{"γ", "β", "α"}}))});
    {
        QP qp = make_qp(3, 1, {{"α", 2, 1}, {"β", 3, 2}, {"γ", 1, 3}, {"δ", 4, 2}, {"ε", 1, 4}}, {{"γ", "β", "α"}});
        add_cycle(qp.potential, {"ε", "δ", "α"}, -1);
        out.push_back({"two triangles", qp});
    }
    out.push_back({"frozen triangle", make_qp(2, 1, {{"α", 2, 1}, {"γ", 1, 3}, {"β", 3, 2}}, {{"γ", "β", "α"}})});
    out.push_back({"frozen triangle, zero potential", make_qp(2, 1, {{"α", 2, 1}, {"γ", 1, 3}, {"β", 3, 2}})});
    out.push_back({"Kronecker", principal_extension(make_qp(2, 0, {{"a", 1, 2}, {"b", 1, 2}}))});
    out.push_back({"four-cycle", principal_extension(make_qp(4, 0, {{"a", 1, 2}, {"b", 2, 3}, {"c", 3, 4}, {"d", 4, 1}},
                                                             {{"a", "b", "c", "d"}}))});
    out.push_back({"D4", principal_extension(make_qp(4, 0, {{"a", 1, 2}, {"b", 3, 2}, {"c", 4, 2}}))});
    out.push_back({"two glued 3-cycles",
                   principal_extension(make_qp(4, 0, {{"a", 1, 2}, {"b", 2, 3}, {"c", 3, 1}, {"f", 1, 4}, {"g", 4, 3}},
                                               {{"a", "b", "c"}, {"f", "g", "c"}}))});
    {
        const auto t = refine_boundary(base_triangulation(0, 2), 2, 2).triangulation;
        out.push_back({"3-arc annulus", principal_extension(triangulation_qp(t))});
    }
    return out;
}

bool PropertyReport::passed() const {
    if (qps_used < 10 || reps_fully_checked < options.reps) return false;
    return std::all_of(properties.begin(), properties.end(), [](const PropertyTally& t) { return t.passed(); });
}

json PropertyReport::to_json() const {
    json props = json::array();
    for (const auto& t : properties)
        props.push_back({{"id", t.id},
                         {"name", t.name},
                         {"checked", t.checked},
                         {"failed", t.failed},
                         {"skipped", t.skipped},
                         {"required", t.required},
                         {"skipReasons", t.skip_reasons},
                         {"failures", t.failures},
                         {"passed", t.passed()}});
    return json{{"passed", passed()},
                {"seed", options.seed},
                {"qpsUsed", qps_used},
                {"repsGenerated", reps_generated},
                {"repsFullyChecked", reps_fully_checked},
                {"triangulations", triangulations},
                {"seconds", seconds},
                {"properties", props}};
}

std::string PropertyReport::to_text() const {
    std::ostringstream os;
    os << "property suite (seed " << options.seed << "): " << reps_generated << " reps generated, "
       << reps_fully_checked << " fully checked, " << qps_used << " QPs, " << triangulations << " triangulations, "
       << seconds << " s\n";
    for (const auto& t : properties) {
        os << "  (" << t.id << ") " << (t.passed() ? "ok  " : "FAIL") << " " << t.name << ": " << t.checked
           << " checked, " << t.failed << " failed, " << t.skipped << " skipped\n";
        for (const auto& [reason, count] : t.skip_reasons) os << "        skipped " << count << ": " << reason << "\n";
        for (const auto& f : t.failures) os << "        failure: " << f << "\n";
    }
    os << (passed() ? "PASS" : "FAIL") << "\n";
    return os.str();
}

PropertyReport run_property_suite(const PropertyOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    Suite suite(options);
    const auto qps = property_qps();
    suite.run_reps(qps);
    suite.run_euler(qps);
    suite.run_surfaces();
    suite.report.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return suite.report;
}

}  // namespace clustercc
