#include "clustercc/qp.hpp"

#include "clustercc/error.hpp"
#include "clustercc/linalg.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace clustercc {

// ---------------------------------------------------------------------------
// Quiver
// ---------------------------------------------------------------------------

Quiver::Quiver(int n, int m, std::vector<Arrow> arrows) : n_(n), m_(m), arrows_(std::move(arrows)) {
    if (n < 0 || m < 0) throw Error("InvalidQP", "negative vertex count");
    for (std::size_t i = 0; i < arrows_.size(); ++i) {
        const Arrow& a = arrows_[i];
        if (a.id.empty()) throw Error("InvalidQP", "empty arrow id");
        if (a.from < 1 || a.from > n + m || a.to < 1 || a.to > n + m) {
            throw Error("InvalidQP", "arrow " + a.id + " has an endpoint outside [n+m]");
        }
        if (!index_.emplace(a.id, i).second) throw Error("InvalidQP", "duplicate arrow id " + a.id);
    }
}

const Arrow& Quiver::arrow(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw Error("InvalidQP", "unknown arrow " + id);
    return arrows_[it->second];
}

std::vector<Arrow> Quiver::arrows_into(int v) const {
    std::vector<Arrow> out;
    for (const auto& a : arrows_)
        if (a.to == v) out.push_back(a);
    std::sort(out.begin(), out.end(), [](const Arrow& x, const Arrow& y) {
        return std::tie(x.from, x.id) < std::tie(y.from, y.id);
    });
    return out;
}

std::vector<Arrow> Quiver::arrows_out_of(int v) const {
    std::vector<Arrow> out;
    for (const auto& a : arrows_)
        if (a.from == v) out.push_back(a);
    std::sort(out.begin(), out.end(), [](const Arrow& x, const Arrow& y) {
        return std::tie(x.to, x.id) < std::tie(y.to, y.id);
    });
    return out;
}

int Quiver::path_source(const Path& p) const { return arrow(p.front()).from; }
int Quiver::path_target(const Path& p) const { return arrow(p.back()).to; }

bool Quiver::is_path(const Path& p) const {
    if (p.empty()) return false;
    for (const auto& id : p)
        if (!has_arrow(id)) return false;
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
        if (arrow(p[i]).to != arrow(p[i + 1]).from) return false;
    return true;
}

bool Quiver::is_cycle(const Path& p) const { return is_path(p) && path_target(p) == path_source(p); }

ExchangeMatrix Quiver::exchange_matrix() const {
    ExchangeMatrix b{n_, m_, IntMatrix(n_ + m_, IntVector(n_, 0))};
    for (const auto& a : arrows_) {
        if (a.from == a.to) continue;
        if (a.from <= n_) b.rows[a.to - 1][a.from - 1] += 1;
        if (a.to <= n_) b.rows[a.from - 1][a.to - 1] -= 1;
    }
    return b;
}

IntMatrix Quiver::full_skew_matrix() const {
    const int v = n_ + m_;
    IntMatrix b(v, IntVector(v, 0));
    for (const auto& a : arrows_) {
        if (a.from == a.to) continue;
        b[a.to - 1][a.from - 1] += 1;
        b[a.from - 1][a.to - 1] -= 1;
    }
    return b;
}

Quiver quiver_from_matrix(const ExchangeMatrix& b) {
    b.validate();
    std::vector<Arrow> arrows;
    int next = 1;
    const int v = b.n + b.m;
    for (int j = 0; j < b.n; ++j) {
        for (int i = 0; i < v; ++i) {
            // b_ij > 0 counts arrows j -> i; frozen rows also record arrows i -> j when negative.
            const long long e = b.rows[i][j];
            if (i < b.n && i <= j) continue;
            for (long long c = 0; c < std::abs(e); ++c) {
                Arrow a{"a" + std::to_string(next++), e > 0 ? j + 1 : i + 1, e > 0 ? i + 1 : j + 1};
                arrows.push_back(a);
            }
        }
    }
    return Quiver(b.n, b.m, arrows);
}

// ---------------------------------------------------------------------------
// Paths and potentials
// ---------------------------------------------------------------------------

Path canonical_rotation(const Path& cycle) {
    Path best = cycle;
    Path rot = cycle;
    for (std::size_t r = 1; r < cycle.size(); ++r) {
        std::rotate(rot.begin(), rot.begin() + 1, rot.end());
        if (rot < best) best = rot;
    }
    return best;
}

void add_cycle(PathComb& potential, const Path& cycle, const Rational& c) {
    if (c == 0) return;
    Rational canon(c);
    canon.canonicalize();
    auto [it, inserted] = potential.emplace(canonical_rotation(cycle), canon);
    if (!inserted) {
        it->second += canon;
        if (it->second == 0) potential.erase(it);
    }
}

namespace {

void add_path(PathComb& comb, const Path& p, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = comb.emplace(p, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) comb.erase(it);
    }
}

/// Replaces arrows by linear combinations of paths in every cycle of a potential.
/// Terms longer than p are dropped and reported through truncated.
PathComb substitute(const PathComb& potential, const std::map<std::string, PathComb>& images, int p,
                    bool& truncated) {
    PathComb out;
    for (const auto& [cycle, coef] : potential) {
        bool touched = std::any_of(cycle.begin(), cycle.end(), [&](const std::string& a) { return images.count(a); });
        if (!touched) {
            add_cycle(out, cycle, coef);
            continue;
        }
        // Expand the product position by position.
        std::vector<std::pair<Path, Rational>> partial{{Path{}, coef}};
        for (const auto& a : cycle) {
            auto it = images.find(a);
            std::vector<std::pair<Path, Rational>> next;
            if (it == images.end()) {
                for (auto& [pth, c] : partial) {
                    pth.push_back(a);
                    if (int(pth.size()) > p) {
                        truncated = true;
                        continue;
                    }
                    next.emplace_back(std::move(pth), c);
                }
            } else {
                for (const auto& [pth, c] : partial) {
                    for (const auto& [img, ic] : it->second) {
                        if (int(pth.size() + img.size()) > p) {
                            truncated = true;
                            continue;
                        }
                        Path np = pth;
                        np.insert(np.end(), img.begin(), img.end());
                        next.emplace_back(std::move(np), c * ic);
                    }
                }
            }
            partial = std::move(next);
        }
        for (const auto& [pth, c] : partial) add_cycle(out, pth, c);
    }
    return out;
}

}  // namespace

void QP::validate() const {
    if (p < 3) throw Error("InvalidQP", "truncation order p must be at least 3");
    for (const auto& [cycle, c] : potential) {
        if (cycle.size() < 2) throw Error("InvalidQP", "potential terms must have length at least 2");
        if (!quiver.is_cycle(cycle)) throw Error("InvalidQP", "potential term " + path_to_string(cycle) + " is not a cycle");
        if (c == 0) throw Error("InvalidQP", "zero coefficient stored in potential");
    }
}

nlohmann::json QP::to_json() const {
    nlohmann::json arrows = nlohmann::json::array();
    for (const auto& a : quiver.arrows()) arrows.push_back({{"id", a.id}, {"from", a.from}, {"to", a.to}});
    nlohmann::json pot = nlohmann::json::array();
    for (const auto& [cycle, c] : potential) pot.push_back({{"coeff", to_string(c)}, {"cycle", cycle}});
    return {{"n", quiver.n()}, {"m", quiver.m()}, {"arrows", arrows}, {"potential", pot}, {"p", p}};
}

QP QP::from_json(const nlohmann::json& j) {
    std::vector<Arrow> arrows;
    for (const auto& a : j.at("arrows")) arrows.push_back({a.at("id").get<std::string>(), a.at("from").get<int>(), a.at("to").get<int>()});
    QP qp;
    qp.quiver = Quiver(j.at("n").get<int>(), j.value("m", 0), arrows);
    if (j.contains("potential")) {
        for (const auto& t : j.at("potential")) {
            const auto& c = t.at("coeff");
            Rational coef = c.is_string() ? parse_rational(c.get<std::string>()) : Rational(c.get<long>());
            add_cycle(qp.potential, t.at("cycle").get<Path>(), coef);
        }
    }
    qp.p = j.value("p", 12);
    qp.validate();
    return qp;
}

PathComb cyclic_derivative(const PathComb& potential, const std::string& a) {
    PathComb out;
    for (const auto& [cycle, c] : potential) {
        const std::size_t len = cycle.size();
        for (std::size_t i = 0; i < len; ++i) {
            if (cycle[i] != a) continue;
            Path rest;
            for (std::size_t k = 1; k < len; ++k) rest.push_back(cycle[(i + k) % len]);
            add_path(out, rest, c);
        }
    }
    return out;
}

QP restrict_qp(const QP& qp, const std::vector<int>& keep) {
    std::set<int> kept(keep.begin(), keep.end());
    std::map<int, int> renumber;
    int next = 1, n_new = 0;
    for (int v : kept) {
        if (v < 1 || v > qp.quiver.num_vertices()) throw Error("InvalidIndex", "vertex outside the quiver");
        renumber[v] = next++;
        if (v <= qp.quiver.n()) ++n_new;
    }
    // Mutable vertices must stay first after renumbering.
    for (int v : kept)
        if (v > qp.quiver.n() && renumber[v] <= n_new) throw Error("InvalidIndex", "renumbering would interleave frozen vertices");
    std::vector<Arrow> arrows;
    std::set<std::string> dropped;
    for (const auto& a : qp.quiver.arrows()) {
        if (kept.count(a.from) && kept.count(a.to)) {
            arrows.push_back({a.id, renumber[a.from], renumber[a.to]});
        } else {
            dropped.insert(a.id);
        }
    }
    QP out;
    out.quiver = Quiver(n_new, int(kept.size()) - n_new, arrows);
    out.p = qp.p;
    for (const auto& [cycle, c] : qp.potential) {
        if (std::none_of(cycle.begin(), cycle.end(), [&](const std::string& x) { return dropped.count(x); })) {
            out.potential.emplace(cycle, c);
        }
    }
    return out;
}

QP restrict_to_mutable(const QP& qp) {
    std::vector<int> keep;
    for (int v = 1; v <= qp.quiver.n(); ++v) keep.push_back(v);
    return restrict_qp(qp, keep);
}

// ---------------------------------------------------------------------------
// Premutation
// ---------------------------------------------------------------------------

std::string reversed_id(const std::string& id) {
    if (!id.empty() && id.back() == '*') return id.substr(0, id.size() - 1);
    return id + "*";
}

std::string composite_id(const std::string& a, const std::string& b) { return "[" + b + a + "]"; }

void check_mutable_vertex(const Quiver& q, int k) {
    if (k < 1 || k > q.n()) throw Error("InvalidIndex", "vertex " + std::to_string(k) + " is not mutable");
    std::set<int> ins, outs;
    for (const auto& a : q.arrows()) {
        if (a.from == k && a.to == k) throw Error("LoopAtK", "loop " + a.id + " at vertex " + std::to_string(k));
        if (a.to == k) ins.insert(a.from);
        if (a.from == k) outs.insert(a.to);
    }
    for (int v : ins)
        if (outs.count(v)) {
            throw Error("TwoCycleAtK", "2-cycle between vertices " + std::to_string(k) + " and " + std::to_string(v));
        }
}

QP premutate_qp(const QP& qp, int k) {
    const Quiver& q = qp.quiver;
    check_mutable_vertex(q, k);
    std::vector<Arrow> arrows;
    for (const auto& a : q.arrows()) {
        if (a.to == k) arrows.push_back({reversed_id(a.id), k, a.from});
        else if (a.from == k) arrows.push_back({reversed_id(a.id), k == a.from ? a.to : a.from, k});
        else arrows.push_back(a);
    }
    const auto ins = q.arrows_into(k);
    const auto outs = q.arrows_out_of(k);
    for (const auto& a : ins)
        for (const auto& b : outs) arrows.push_back({composite_id(a.id, b.id), a.from, b.to});
    QP out;
    out.quiver = Quiver(q.n(), q.m(), arrows);
    out.p = qp.p;
    // [S]: every passage a -> k -> b becomes the composite arrow.
    for (const auto& [cycle, c] : qp.potential) {
        const std::size_t len = cycle.size();
        std::size_t start = 0;
        while (start < len && q.arrow(cycle[start]).from == k) ++start;
        Path rotated;
        for (std::size_t i = 0; i < len; ++i) rotated.push_back(cycle[(start + i) % len]);
        Path bracket;
        for (std::size_t i = 0; i < len; ++i) {
            if (q.arrow(rotated[i]).to == k) {
                bracket.push_back(composite_id(rotated[i], rotated[i + 1]));
                ++i;
            } else {
                bracket.push_back(rotated[i]);
            }
        }
        add_cycle(out.potential, bracket, c);
    }
    // Delta = sum over pairs of b* [ba] a*, i.e. the cycle (a*, [ba], b*).
    for (const auto& a : ins)
        for (const auto& b : outs)
            add_cycle(out.potential, {reversed_id(a.id), composite_id(a.id, b.id), reversed_id(b.id)}, 1);
    out.validate();
    return out;
}

// ---------------------------------------------------------------------------
// Reduction
// ---------------------------------------------------------------------------

ReductionResult reduce_qp(const QP& qp) {
    qp.validate();
    const Quiver& q = qp.quiver;
    ReductionResult res;
    std::map<std::string, PathComb> images;  // old arrow -> combination of new arrows
    std::map<std::string, std::string> partner;

    // Group the degree-two terms by vertex pair.
    std::set<std::pair<int, int>> pairs;
    for (const auto& [cycle, c] : qp.potential) {
        if (cycle.size() != 2) continue;
        const Arrow& x = q.arrow(cycle[0]);
        const Arrow& y = q.arrow(cycle[1]);
        if (x.from == x.to || y.from == y.to) {
            throw Error("NonSplittable2Cycle", "degree-two term " + path_to_string(cycle) + " is built from loops");
        }
        pairs.insert({std::min(x.from, x.to), std::max(x.from, x.to)});
    }
    for (const auto& [u, v] : pairs) {
        std::vector<Arrow> as, bs;
        for (const auto& a : q.arrows()) {
            if (a.from == u && a.to == v) as.push_back(a);
            if (a.from == v && a.to == u) bs.push_back(a);
        }
        const int r = int(as.size()), s = int(bs.size());
        RatMatrix cm(r, s);
        for (int i = 0; i < r; ++i) {
            for (int j = 0; j < s; ++j) {
                auto it = qp.potential.find(canonical_rotation({as[i].id, bs[j].id}));
                if (it != qp.potential.end()) cm(i, j) = it->second;
            }
        }
        const std::vector<int> rows_i = rref(cm.transpose()).pivots;  // independent rows
        const RatMatrix ci = cm.select_rows(rows_i);
        const std::vector<int> cols_j = rref(ci).pivots;               // pivot columns within them
        const int rho = int(rows_i.size());
        std::vector<int> other_rows, other_cols;
        for (int i = 0; i < r; ++i)
            if (std::find(rows_i.begin(), rows_i.end(), i) == rows_i.end()) other_rows.push_back(i);
        for (int j = 0; j < s; ++j)
            if (std::find(cols_j.begin(), cols_j.end(), j) == cols_j.end()) other_cols.push_back(j);
        // Row i outside I equals sum_k mu_ik row_{I_k}.
        const RatMatrix ciT = ci.transpose();
        for (int i : other_rows) {
            auto mu = solve(ciT, cm.select_rows({i}).transpose().column(0));
            if (!mu) throw Error("InternalError", "row dependency not solvable");
            // a_{I_k} = a'_{I_k} - sum_{i not in I} mu_ik a_i
            for (int kk = 0; kk < rho; ++kk) {
                if ((*mu)[kk] == 0) continue;
                add_path(images[as[rows_i[kk]].id], {as[i].id}, -(*mu)[kk]);
            }
        }
        for (int kk = 0; kk < rho; ++kk) add_path(images[as[rows_i[kk]].id], {as[rows_i[kk]].id}, 1);
        // b_J = C[I,J]^{-1} (b'_I - C[I, not J] b_{not J}); b'_k carries the id of b_{J_k}.
        const RatMatrix cij = ci.select_columns(cols_j);
        auto inv = inverse(cij);
        if (!inv) throw Error("InternalError", "pivot block of the 2-cycle matrix is singular");
        const RatMatrix rest = *inv * ci.select_columns(other_cols);
        for (int jj = 0; jj < rho; ++jj) {
            PathComb& img = images[bs[cols_j[jj]].id];
            for (int kk = 0; kk < rho; ++kk) add_path(img, {bs[cols_j[kk]].id}, (*inv)(jj, kk));
            for (std::size_t t = 0; t < other_cols.size(); ++t) add_path(img, {bs[other_cols[t]].id}, -rest(jj, int(t)));
        }
        for (int kk = 0; kk < rho; ++kk) {
            const std::string& a = as[rows_i[kk]].id;
            const std::string& b = bs[cols_j[kk]].id;
            partner[a] = b;
            partner[b] = a;
            res.trivial_pairs.emplace_back(a, b);
        }
    }

    bool truncated = false;
    PathComb pot = images.empty() ? qp.potential : substitute(qp.potential, images, qp.p, truncated);
    // The degree-two part is now exactly the sum of the trivial 2-cycles.
    for (const auto& [cycle, c] : pot) {
        if (cycle.size() != 2) continue;
        auto it = partner.find(cycle[0]);
        if (it == partner.end() || it->second != cycle[1] || c != 1) {
            throw Error("InternalError", "degree-two part not in standard form after change of arrows");
        }
    }

    auto has_trivial = [&](const Path& cycle) {
        return std::any_of(cycle.begin(), cycle.end(), [&](const std::string& a) { return partner.count(a); });
    };
    for (int d = 3; d <= qp.p; ++d) {
        for (;;) {
            auto it = std::find_if(pot.begin(), pot.end(), [&](const auto& t) {
                return int(t.first.size()) == d && has_trivial(t.first);
            });
            if (it == pot.end()) break;
            const Path cycle = it->first;
            const Rational lambda = it->second;
            std::size_t idx = 0;
            while (!partner.count(cycle[idx])) ++idx;
            Path w;
            for (std::size_t k = 1; k < cycle.size(); ++k) w.push_back(cycle[(idx + k) % cycle.size()]);
            const std::string& y = partner[cycle[idx]];
            std::map<std::string, PathComb> step;
            add_path(step[y], {y}, 1);
            add_path(step[y], w, -lambda);
            pot = substitute(pot, step, qp.p, truncated);
        }
    }

    QP out;
    out.p = qp.p;
    std::vector<Arrow> kept;
    for (const auto& a : q.arrows())
        if (!partner.count(a.id)) kept.push_back(a);
    out.quiver = Quiver(q.n(), q.m(), kept);
    for (const auto& [cycle, c] : pot) {
        if (has_trivial(cycle)) {
            if (cycle.size() == 2) continue;
            truncated = true;  // only possible above the truncation order
            continue;
        }
        out.potential.emplace(cycle, c);
    }
    out.validate();
    res.reduced = std::move(out);
    res.truncated = truncated;
    return res;
}

ReductionResult mutate_qp_full(const QP& qp, int k) { return reduce_qp(premutate_qp(qp, k)); }

QP mutate_qp(const QP& qp, int k) { return mutate_qp_full(qp, k).reduced; }

namespace {

bool same_arrow_counts(const QP& a, const QP& b) {
    if (a.quiver.n() != b.quiver.n() || a.quiver.m() != b.quiver.m() ||
        a.quiver.full_skew_matrix() != b.quiver.full_skew_matrix() ||
        a.quiver.arrows().size() != b.quiver.arrows().size()) {
        return false;
    }
    std::map<std::pair<int, int>, int> ca, cb;
    for (const auto& x : a.quiver.arrows()) ++ca[{x.from, x.to}];
    for (const auto& x : b.quiver.arrows()) ++cb[{x.from, x.to}];
    return ca == cb;
}

}  // namespace

std::vector<ArrowMatch> qp_isomorphisms(const QP& a, const QP& b, std::size_t limit) {
    std::vector<ArrowMatch> found;
    if (!same_arrow_counts(a, b)) return found;
    std::map<std::pair<int, int>, std::vector<std::string>> ga, gb;
    for (const auto& x : a.quiver.arrows()) ga[{x.from, x.to}].push_back(x.id);
    for (const auto& x : b.quiver.arrows()) gb[{x.from, x.to}].push_back(x.id);
    std::vector<std::vector<std::string>> groups_a, groups_b;
    long long combos = 1;
    for (auto& [key, ids] : ga) {
        groups_a.push_back(ids);
        auto g = gb[key];
        std::sort(g.begin(), g.end());
        groups_b.push_back(g);
        for (std::size_t i = 2; i <= ids.size(); ++i) combos *= long(i);
    }
    if (combos > 40320) return found;
    std::vector<std::string> ids_a;
    for (const auto& x : a.quiver.arrows()) ids_a.push_back(x.id);
    const bool try_signs = ids_a.size() <= 14;
    std::vector<ArrowMatch> signed_found;
    std::map<std::string, std::string> relabel;
    std::function<void(std::size_t)> rec = [&](std::size_t g) {
        if (found.size() >= limit) return;
        if (g == groups_a.size()) {
            PathComb mapped;
            for (const auto& [cycle, c] : a.potential) {
                Path m;
                for (const auto& x : cycle) m.push_back(relabel[x]);
                add_cycle(mapped, m, c);
            }
            if (mapped == b.potential) {
                ArrowMatch match;
                for (const auto& id : ids_a) match[id] = {relabel[id], 1};
                found.push_back(std::move(match));
                return;
            }
            if (!try_signs || signed_found.size() >= limit || mapped.size() != b.potential.size()) return;
            for (unsigned mask = 1; mask < (1u << ids_a.size()); ++mask) {
                std::set<std::string> flipped;
                for (std::size_t i = 0; i < ids_a.size(); ++i)
                    if (mask & (1u << i)) flipped.insert(relabel[ids_a[i]]);
                PathComb signed_pot;
                for (const auto& [cycle, c] : mapped) {
                    const auto odd = std::count_if(cycle.begin(), cycle.end(), [&](const std::string& x) { return flipped.count(x); }) % 2;
                    add_cycle(signed_pot, cycle, odd ? Rational(-c) : c);
                }
                if (signed_pot == b.potential) {
                    ArrowMatch match;
                    for (std::size_t i = 0; i < ids_a.size(); ++i)
                        match[ids_a[i]] = {relabel[ids_a[i]], (mask & (1u << i)) ? -1 : 1};
                    signed_found.push_back(std::move(match));
                    break;
                }
            }
            return;
        }
        auto perm = groups_b[g];
        do {
            for (std::size_t i = 0; i < perm.size(); ++i) relabel[groups_a[g][i]] = perm[i];
            rec(g + 1);
        } while (std::next_permutation(perm.begin(), perm.end()) && found.size() < limit);
    };
    rec(0);
    for (auto& m : signed_found) {
        if (found.size() >= limit) break;
        found.push_back(std::move(m));
    }
    return found;
}

QPComparison compare_qps(const QP& a, const QP& b) {
    if (!same_arrow_counts(a, b)) return QPComparison::Different;
    const auto matches = qp_isomorphisms(a, b, 1);
    if (matches.empty()) return QPComparison::Inconclusive;
    for (const auto& [id, target] : matches.front())
        if (target.second < 0) return QPComparison::EqualUpToSigns;
    return QPComparison::Equal;
}

// ---------------------------------------------------------------------------
// Gentleness and bypasses
// ---------------------------------------------------------------------------

GentleReport gentle_report(const QP& qp) {
    const Quiver& q = qp.quiver;
    GentleReport rep;
    auto fail = [&](std::string why) {
        rep.gentle = false;
        rep.reason = std::move(why);
        return rep;
    };
    for (const auto& a : q.arrows())
        if (a.from == a.to) return fail("loop " + a.id);
    for (int v = 1; v <= q.num_vertices(); ++v) {
        if (q.arrows_into(v).size() > 2) return fail("vertex " + std::to_string(v) + " is the head of more than two arrows");
        if (q.arrows_out_of(v).size() > 2) return fail("vertex " + std::to_string(v) + " is the tail of more than two arrows");
    }
    std::set<Path> rel;
    for (const auto& a : q.arrows()) {
        const PathComb d = cyclic_derivative(qp.potential, a.id);
        if (d.empty()) continue;
        if (d.size() != 1 || d.begin()->first.size() != 2) {
            return fail("the cyclic derivative by " + a.id + " is not a multiple of a path of length 2");
        }
        rel.insert(d.begin()->first);
    }
    rep.relations.assign(rel.begin(), rel.end());
    // Two continuations of an arrow: exactly one of them is a relation.
    for (const auto& a : q.arrows()) {
        const auto outs = q.arrows_out_of(a.to);
        if (outs.size() == 2) {
            const int inr = int(rel.count({a.id, outs[0].id})) + int(rel.count({a.id, outs[1].id}));
            if (inr != 1) return fail("continuations of " + a.id + " do not contain exactly one relation");
        }
        const auto ins = q.arrows_into(a.from);
        if (ins.size() == 2) {
            const int inr = int(rel.count({ins[0].id, a.id})) + int(rel.count({ins[1].id, a.id}));
            if (inr != 1) return fail("predecessors of " + a.id + " do not contain exactly one relation");
        }
    }
    // Finite dimension: no closed walk whose consecutive pairs all avoid the relations.
    std::map<std::string, std::vector<std::string>> succ;
    for (const auto& a : q.arrows())
        for (const auto& b : q.arrows_out_of(a.to))
            if (!rel.count({a.id, b.id})) succ[a.id].push_back(b.id);
    std::map<std::string, int> color;
    std::function<bool(const std::string&)> has_cycle = [&](const std::string& a) {
        color[a] = 1;
        for (const auto& b : succ[a]) {
            if (color[b] == 1) return true;
            if (color[b] == 0 && has_cycle(b)) return true;
        }
        color[a] = 2;
        return false;
    };
    for (const auto& a : q.arrows())
        if (color[a.id] == 0 && has_cycle(a.id)) return fail("a relation-free oriented cycle makes the algebra infinite dimensional");
    rep.gentle = true;
    return rep;
}

bool is_gentle(const QP& qp) { return gentle_report(qp).gentle; }

std::vector<Bypass> find_bypasses(const QP& qp) {
    const GentleReport gr = gentle_report(qp);
    if (!gr.gentle) throw Error("NotGentle", gr.reason);
    const Quiver& q = qp.quiver;
    const std::set<Path> rel(gr.relations.begin(), gr.relations.end());
    std::vector<Bypass> out;
    std::vector<int> degree(q.num_vertices() + 1, 0);
    for (const auto& a : q.arrows()) {
        ++degree[a.from];
        ++degree[a.to];
    }

    auto close = [&](const Path& path, const std::vector<int>& verts) {
        const std::string& first = path.front();
        const std::string& last = path.back();
        const int s = q.arrow(first).from, t = q.arrow(last).to;
        for (const auto& c : q.arrows_out_of(s)) {
            if (c.id == first || c.id == last) continue;
            if (c.to == t) out.push_back({path, BypassKind::Bypass, s, t, {c.id}});
            const int v = c.to;
            if (degree[v] != 2 || std::find(verts.begin(), verts.end(), v) != verts.end()) continue;
            for (const auto& d : q.arrows_out_of(v)) {
                if (d.id == first || d.id == last || d.to != t || rel.count({c.id, d.id})) continue;
                out.push_back({path, BypassKind::AlmostBypass, s, t, {c.id, d.id}});
            }
        }
    };

    std::function<void(Path&, std::vector<int>&)> extend = [&](Path& path, std::vector<int>& verts) {
        close(path, verts);
        if (int(path.size()) >= qp.p) return;
        const Arrow& last = q.arrow(path.back());
        for (const auto& b : q.arrows_out_of(last.to)) {
            if (rel.count({last.id, b.id})) continue;
            if (std::find(verts.begin(), verts.end(), b.to) != verts.end()) continue;
            path.push_back(b.id);
            verts.push_back(b.to);
            extend(path, verts);
            path.pop_back();
            verts.pop_back();
        }
    };
    for (const auto& a : q.arrows()) {
        Path path{a.id};
        std::vector<int> verts{a.from, a.to};
        extend(path, verts);
    }
    return out;
}

ColumnIdentityReport bypass_column_identity(const QP& qp, const Bypass& bp) {
    const Quiver& q = qp.quiver;
    if (!q.is_path(bp.path)) throw Error("InvalidArgument", "bypass path is not a path of the quiver");
    const IntMatrix b = q.full_skew_matrix();
    const int nv = q.num_vertices();
    ColumnIdentityReport rep;
    for (const auto& id : bp.path) rep.columns.push_back(q.arrow(id).from);
    rep.columns.push_back(q.arrow(bp.path.back()).to);
    rep.lhs.assign(nv, 0);
    for (int j : rep.columns)
        for (int i = 0; i < nv; ++i) rep.lhs[i] += b[i][j - 1];
    rep.rhs.assign(nv, 0);
    const int f = bp.kind == BypassKind::Bypass ? 2 : 1;
    rep.rhs[rep.columns.back() - 1] += f;
    rep.rhs[rep.columns.front() - 1] -= f;
    if (rep.lhs != rep.rhs) {
        throw Error("IdentityViolated", "column sum " + to_string(rep.lhs) + " differs from " + to_string(rep.rhs) +
                                            " for " + to_string(bp.kind) + " " + path_to_string(bp.path));
    }
    return rep;
}

std::string to_string(BypassKind k) { return k == BypassKind::Bypass ? "bypass" : "almost-bypass"; }

std::string path_to_string(const Path& p) {
    std::string out = "(";
    for (std::size_t i = 0; i < p.size(); ++i) out += (i ? "," : "") + p[i];
    return out + ")";
}

nlohmann::json to_json(const Bypass& b) {
    return {{"path", b.path}, {"kind", to_string(b.kind)}, {"source", b.source}, {"sink", b.sink}, {"closing", b.closing}};
}

}  // namespace clustercc
