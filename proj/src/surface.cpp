#include "clustercc/surface.hpp"

#include "clustercc/error.hpp"

#include <algorithm>
#include <map>
#include <functional>
#include <set>
#include <sstream>

namespace clustercc {

using nlohmann::json;

// ---------------------------------------------------------------------------
// MarkedSurface
// ---------------------------------------------------------------------------

int MarkedSurface::num_arcs() const {
    long long c = 0;
    for (long long v : boundary) c += v;
    return int(6 * genus + 3 * int(boundary.size()) + 3 * punctures + c - 6);
}

int MarkedSurface::even_components() const {
    return int(std::count_if(boundary.begin(), boundary.end(), [](long long c) { return c % 2 == 0; }));
}

void MarkedSurface::validate() const {
    if (genus < 0 || punctures < 0) throw Error("InvalidSurface", "genus and punctures must be nonnegative");
    if (boundary.empty()) throw Error("InvalidSurface", "the surface must have nonempty boundary");
    for (long long c : boundary)
        if (c < 1) throw Error("InvalidSurface", "every boundary component needs at least one marked point");
    if (num_arcs() < 1) throw Error("InvalidSurface", "the surface admits no arcs");
}

json MarkedSurface::to_json() const {
    return json{{"genus", genus}, {"boundary", boundary}, {"punctures", punctures}};
}

MarkedSurface MarkedSurface::from_json(const json& j) {
    MarkedSurface s;
    try {
        s.genus = j.value("genus", 0);
        s.punctures = j.value("punctures", 0);
        if (j.contains("boundary")) s.boundary = j.at("boundary").get<IntVector>();
        else if (j.contains("boundaryComponents")) s.boundary = j.at("boundaryComponents").get<IntVector>();
    } catch (const json::exception& e) {
        throw Error("ParseError", std::string("marked surface: ") + e.what());
    }
    s.validate();
    return s;
}

// ---------------------------------------------------------------------------
// Triangulation
// ---------------------------------------------------------------------------

namespace {

/// For a self-folded triangle (two equal sides) returns {loop, radius}.
std::optional<std::pair<std::string, std::string>> folded_sides(const Triangle& t) {
    for (int k = 0; k < 3; ++k) {
        const auto& a = t[k];
        const auto& b = t[(k + 1) % 3];
        const auto& c = t[(k + 2) % 3];
        if (b == c && a != b) return std::make_pair(a, b);
    }
    return std::nullopt;
}

/// Rotates the triangle so that the given side comes first.
Triangle rotate_to(const Triangle& t, const std::string& side) {
    for (int k = 0; k < 3; ++k)
        if (t[k] == side) return Triangle{t[k], t[(k + 1) % 3], t[(k + 2) % 3]};
    throw Error("InternalError", "side " + side + " not in triangle");
}

long long numeric_label(const std::string& s) {
    if (s.empty() || s.size() > 15 || !std::all_of(s.begin(), s.end(), [](char ch) { return ch >= '0' && ch <= '9'; }))
        return -1;
    return std::stoll(s);
}

/// Hands out fresh numeric labels after the largest numeric arc label in use.
class LabelSource {
public:
    explicit LabelSource(const Triangulation& t) {
        next_ = 1;
        for (const auto& a : t.arcs) next_ = std::max(next_, numeric_label(a) + 1);
        next_ = std::max<long long>(next_, static_cast<long long>(t.arcs.size()) + 1);
        for (const auto& e : t.boundary_edges()) used_.insert(e);
        for (const auto& a : t.arcs) used_.insert(a);
    }
    std::string next() {
        std::string s;
        do s = std::to_string(next_++);
        while (used_.count(s));
        used_.insert(s);
        return s;
    }

private:
    long long next_;
    std::set<std::string> used_;
};

}  // namespace

std::vector<std::string> Triangulation::boundary_edges() const {
    std::vector<std::string> out;
    for (const auto& comp : boundary) out.insert(out.end(), comp.begin(), comp.end());
    return out;
}

bool Triangulation::is_self_folded(const Triangle& t) const { return folded_sides(t).has_value(); }

bool Triangulation::is_radius(const std::string& arc) const {
    for (const auto& t : triangles) {
        auto f = folded_sides(t);
        if (f && f->second == arc) return true;
    }
    return false;
}

int Triangulation::arc_index(const std::string& arc) const {
    auto it = std::find(arcs.begin(), arcs.end(), arc);
    return it == arcs.end() ? -1 : int(it - arcs.begin());
}

void Triangulation::validate() const {
    auto fail = [](const std::string& m) { throw Error("InvalidTriangulation", m); };
    std::set<std::string> arc_set(arcs.begin(), arcs.end());
    if (arc_set.size() != arcs.size()) fail("duplicate arc label");
    const auto edges = boundary_edges();
    std::set<std::string> edge_set(edges.begin(), edges.end());
    if (edge_set.size() != edges.size()) fail("duplicate boundary edge label");
    for (const auto& e : edges)
        if (arc_set.count(e)) fail("label " + e + " is both an arc and a boundary edge");
    for (const auto& comp : boundary)
        if (comp.empty()) fail("empty boundary component");

    std::map<std::string, int> slots;
    for (const auto& t : triangles) {
        for (const auto& s : t) {
            if (!arc_set.count(s) && !edge_set.count(s)) fail("unknown label " + s + " in a triangle");
            ++slots[s];
        }
        if (t[0] == t[1] && t[1] == t[2]) fail("degenerate triangle");
        for (int k = 0; k < 3; ++k)
            if (t[k] == t[(k + 1) % 3] && edge_set.count(t[k])) fail("boundary edge folded in a triangle");
    }
    for (const auto& a : arcs)
        if (slots[a] != 2) fail("arc " + a + " must lie in exactly two triangle slots");
    for (const auto& e : edges)
        if (slots[e] != 1) fail("boundary edge " + e + " must lie in exactly one triangle slot");
    if (3 * triangles.size() != 2 * arcs.size() + edges.size()) fail("triangle count is inconsistent");
    // Every loop enclosing a self-folded triangle must also border a second triangle.
    for (const auto& t : triangles) {
        auto f = folded_sides(t);
        if (!f) continue;
        if (edge_set.count(f->first)) fail("self-folded triangle bounded by a boundary edge");
        int count = 0;
        for (const auto& u : triangles) count += int(std::count(u.begin(), u.end(), f->first));
        if (count != 2) fail("loop " + f->first + " must border two triangles");
    }
}

void Triangulation::validate(const MarkedSurface& s) const {
    s.validate();
    validate();
    if (int(arcs.size()) != s.num_arcs())
        throw Error("InvalidTriangulation", "expected " + std::to_string(s.num_arcs()) + " arcs, found " +
                                                std::to_string(arcs.size()));
    if (boundary.size() != s.boundary.size())
        throw Error("InvalidTriangulation", "boundary component count differs from the surface");
    for (std::size_t k = 0; k < boundary.size(); ++k)
        if ((long long)boundary[k].size() != s.boundary[k])
            throw Error("InvalidTriangulation",
                        "boundary component " + std::to_string(k + 1) + " has the wrong number of edges");
    int folded = 0;
    for (const auto& t : triangles) folded += is_self_folded(t) ? 1 : 0;
    if (folded > s.punctures) throw Error("InvalidTriangulation", "more self-folded triangles than punctures");
}

json Triangulation::to_json() const {
    json tris = json::array();
    json folded = json::array();
    for (const auto& t : triangles) {
        json entry{{"edges", {t[0], t[1], t[2]}}};
        if (auto f = folded_sides(t)) {
            entry["selfFolded"] = true;
            entry["folded"] = f->second;
            folded.push_back({{"loop", f->first}, {"radius", f->second}});
        }
        tris.push_back(entry);
    }
    return json{{"arcs", arcs},
                {"boundaryEdges", boundary_edges()},
                {"boundaryComponents", boundary},
                {"triangles", tris},
                {"selfFolded", folded}};
}

Triangulation Triangulation::from_json(const json& j) {
    Triangulation t;
    try {
        t.arcs = j.at("arcs").get<std::vector<std::string>>();
        if (j.contains("boundaryComponents")) {
            t.boundary = j.at("boundaryComponents").get<std::vector<std::vector<std::string>>>();
        } else {
            // Without grouping, each boundary edge is its own component.
            for (const auto& e : j.value("boundaryEdges", std::vector<std::string>{})) t.boundary.push_back({e});
        }
        for (const auto& entry : j.at("triangles")) {
            const auto& edges = entry.is_array() ? entry : entry.at("edges");
            auto v = edges.get<std::vector<std::string>>();
            if (v.size() != 3) throw Error("InvalidTriangulation", "a triangle needs exactly three edges");
            t.triangles.push_back(Triangle{v[0], v[1], v[2]});
        }
    } catch (const json::exception& e) {
        throw Error("ParseError", std::string("triangulation: ") + e.what());
    }
    t.validate();
    return t;
}

// ---------------------------------------------------------------------------
// B(τ) and flips
// ---------------------------------------------------------------------------

IntMatrix b_matrix(const Triangulation& t) {
    t.validate();
    const int n = int(t.arcs.size());
    std::map<std::string, int> idx;
    for (int i = 0; i < n; ++i) idx[t.arcs[i]] = i;
    std::map<std::string, std::string> loop_of;
    for (const auto& tri : t.triangles)
        if (auto f = folded_sides(tri)) loop_of[f->second] = f->first;

    std::map<std::pair<std::string, std::string>, long long> base;
    for (const auto& tri : t.triangles) {
        if (folded_sides(tri)) continue;
        for (int k = 0; k < 3; ++k) {
            const auto& a = tri[k];
            const auto& b = tri[(k + 1) % 3];
            if (!idx.count(a) || !idx.count(b)) continue;
            base[{a, b}] += 1;
            base[{b, a}] -= 1;
        }
    }
    auto sub = [&](const std::string& a) {
        auto it = loop_of.find(a);
        return it == loop_of.end() ? a : it->second;
    };
    IntMatrix b(n, IntVector(n, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            auto it = base.find({sub(t.arcs[i]), sub(t.arcs[j])});
            if (it != base.end()) b[i][j] = it->second;
        }
    return b;
}

QP triangulation_qp(const Triangulation& t) {
    t.validate();
    std::map<std::string, int> vertex;
    for (int i = 0; i < int(t.arcs.size()); ++i) vertex[t.arcs[i]] = i + 1;
    // For consecutive sides (a, b) of a triangle the arrow runs b -> a.
    std::vector<Arrow> arrows;
    std::vector<std::optional<Path>> cycles;
    for (int ti = 0; ti < int(t.triangles.size()); ++ti) {
        const auto& tri = t.triangles[ti];
        if (folded_sides(tri))
            throw Error("InvalidTriangulation", "self-folded triangles have no gentle quiver with potential here");
        Path cycle;
        for (int k = 0; k < 3; ++k) {
            const auto& a = tri[k];
            const auto& b = tri[(k + 1) % 3];
            if (!vertex.count(a) || !vertex.count(b)) continue;
            const std::string id = "t" + std::to_string(ti + 1) + "_" + std::to_string(k + 1);
            arrows.push_back(Arrow{id, vertex[b], vertex[a]});
            cycle.insert(cycle.begin(), id);
        }
        if (cycle.size() == 3) cycles.push_back(cycle);
    }
    // Cancel opposite arrow pairs coming from different triangles.
    std::set<std::string> removed;
    for (std::size_t i = 0; i < arrows.size(); ++i) {
        if (removed.count(arrows[i].id)) continue;
        for (std::size_t j = i + 1; j < arrows.size(); ++j) {
            if (removed.count(arrows[j].id)) continue;
            if (arrows[i].from == arrows[j].to && arrows[i].to == arrows[j].from) {
                removed.insert(arrows[i].id);
                removed.insert(arrows[j].id);
                break;
            }
        }
    }
    std::vector<Arrow> kept;
    for (const auto& a : arrows)
        if (!removed.count(a.id)) kept.push_back(a);
    QP qp;
    qp.quiver = Quiver(int(t.arcs.size()), 0, kept);
    for (const auto& c : cycles) {
        if (std::any_of(c->begin(), c->end(), [&](const std::string& id) { return removed.count(id) > 0; }))
            continue;
        add_cycle(qp.potential, *c, Rational(1));
    }
    qp.validate();
    return qp;
}

Triangulation flip(const Triangulation& t, const std::string& arc, const std::string& new_label) {
    if (t.arc_index(arc) < 0) throw Error("NotFlippable", arc + " is not an arc of the triangulation");
    if (t.is_radius(arc)) throw Error("NotFlippable", arc + " is the folded side of a self-folded triangle");
    std::vector<int> where;
    for (int k = 0; k < int(t.triangles.size()); ++k)
        if (std::find(t.triangles[k].begin(), t.triangles[k].end(), arc) != t.triangles[k].end())
            where.push_back(k);
    if (where.size() != 2) throw Error("NotFlippable", arc + " does not border two distinct triangles");

    std::string label = new_label;
    if (label.empty()) label = (!arc.empty() && arc.back() == '\'') ? arc.substr(0, arc.size() - 1) : arc + "'";
    if (label != arc && (t.arc_index(label) >= 0)) throw Error("NotFlippable", "label " + label + " already in use");

    const Triangle t1 = rotate_to(t.triangles[where[0]], arc);
    const Triangle t2 = rotate_to(t.triangles[where[1]], arc);
    Triangulation out;
    out.arcs = t.arcs;
    out.arcs[t.arc_index(arc)] = label;
    out.boundary = t.boundary;
    for (int k = 0; k < int(t.triangles.size()); ++k)
        if (k != where[0] && k != where[1]) out.triangles.push_back(t.triangles[k]);
    out.triangles.push_back(Triangle{label, t1[2], t2[1]});
    out.triangles.push_back(Triangle{label, t2[2], t1[1]});
    out.validate();
    return out;
}

// ---------------------------------------------------------------------------
// Construction pieces
// ---------------------------------------------------------------------------

Triangulation base_triangulation(int genus, int boundary_components) {
    const int b = boundary_components;
    if (genus != 0 || b < 2 || b > 4)
        throw Error("BaseTriangulationRequired", "no built-in base triangulation for genus " + std::to_string(genus) +
                                                     " with " + std::to_string(b) +
                                                     " boundary components; supply one in JSON");
    Triangulation t;
    for (int k = 1; k <= b; ++k) t.boundary.push_back({"b" + std::to_string(k)});
    int next = 1;
    // Each inner hole h is enclosed by two arcs u_h, v_h from the outer point.
    std::vector<std::string> sides{"b1"};
    for (int h = 1; h < b; ++h) {
        const std::string u = std::to_string(next++);
        const std::string v = std::to_string(next++);
        t.arcs.push_back(u);
        t.arcs.push_back(v);
        t.triangles.push_back(Triangle{u, v, "b" + std::to_string(h + 1)});
        sides.push_back(u);
        sides.push_back(v);
    }
    // The remaining polygon has sides b1, u_1, v_1, ..., fanned from its first vertex.
    const int sides_count = int(sides.size());
    std::vector<std::string> diag(sides_count, "");
    for (int i = 2; i <= sides_count - 2; ++i) {
        diag[i] = std::to_string(next++);
        t.arcs.push_back(diag[i]);
    }
    for (int i = 1; i <= sides_count - 2; ++i) {
        const std::string left = i == 1 ? sides[0] : diag[i];
        const std::string right = i + 1 == sides_count - 1 ? sides[sides_count - 1] : diag[i + 1];
        t.triangles.push_back(Triangle{left, sides[i], right});
    }
    t.validate();
    return t;
}

Refinement refine_boundary(const Triangulation& t, int kappa, int c) {
    if (kappa < 1 || kappa > int(t.boundary.size()))
        throw Error("PreconditionViolated", "boundary index " + std::to_string(kappa) + " out of range");
    if (c < 1) throw Error("PreconditionViolated", "the marked-point count must be positive");
    if (t.boundary[kappa - 1].size() != 1)
        throw Error("PreconditionViolated", "boundary component " + std::to_string(kappa) +
                                                " must carry exactly one marked point");
    const std::string k = t.boundary[kappa - 1][0];
    Refinement out;
    if (c == 1) {
        out.triangulation = t;
        out.boundary_edges = {k};
        return out;
    }
    int where = -1;
    for (int i = 0; i < int(t.triangles.size()); ++i)
        if (std::find(t.triangles[i].begin(), t.triangles[i].end(), k) != t.triangles[i].end()) where = i;
    // Triangle (x, y, kappa) with kappa last in counterclockwise order.
    const Triangle r = rotate_to(t.triangles[where], k);
    const std::string x = r[1];
    const std::string y = r[2];

    LabelSource labels(t);
    std::vector<std::string> ks;
    for (int i = 1; i <= c; ++i) ks.push_back(k + "_" + std::to_string(i));
    std::vector<std::string> in;
    for (int i = 0; i < c - 1; ++i) in.push_back(labels.next());

    Triangulation& u = out.triangulation;
    u.arcs = t.arcs;
    u.arcs.insert(u.arcs.end(), in.begin(), in.end());
    u.boundary = t.boundary;
    u.boundary[kappa - 1] = ks;
    for (int i = 0; i < int(t.triangles.size()); ++i)
        if (i != where) u.triangles.push_back(t.triangles[i]);
    if (c == 2) {
        u.triangles.push_back(Triangle{y, ks[0], in[0]});
        u.triangles.push_back(Triangle{in[0], ks[1], x});
    } else if (c == 3) {
        u.triangles.push_back(Triangle{x, y, in[0]});
        u.triangles.push_back(Triangle{in[0], in[1], ks[2]});
        u.triangles.push_back(Triangle{ks[0], ks[1], in[1]});
    } else {
        u.triangles.push_back(Triangle{x, y, in[0]});
        u.triangles.push_back(Triangle{in[0], ks[0], in[1]});
        for (int j = 1; j < c - 3; ++j) u.triangles.push_back(Triangle{in[j], ks[j], in[j + 1]});
        u.triangles.push_back(Triangle{in[c - 3], in[c - 2], ks[c - 1]});
        u.triangles.push_back(Triangle{ks[c - 3], ks[c - 2], in[c - 2]});
    }
    u.validate();
    out.new_arcs = in;
    out.boundary_edges = ks;
    return out;
}

namespace {

/// Splits the corner between sides t[corner] and t[corner+1] off the triangle:
/// a diagonal cuts a new triangle carrying a loop around a new puncture.
PunctureArcs insert_puncture(Triangulation& t, int tri, int corner, LabelSource& labels) {
    const Triangle old = t.triangles[tri];
    const std::string s2 = old[corner];
    const std::string s0 = old[(corner + 1) % 3];
    const std::string s1 = old[(corner + 2) % 3];
    PunctureArcs p{labels.next(), labels.next(), labels.next()};
    t.triangles.erase(t.triangles.begin() + tri);
    t.triangles.push_back(Triangle{s2, p.loop, p.diagonal});
    t.triangles.push_back(Triangle{p.diagonal, s0, s1});
    t.triangles.push_back(Triangle{p.loop, p.radius, p.radius});
    t.arcs.push_back(p.loop);
    t.arcs.push_back(p.radius);
    t.arcs.push_back(p.diagonal);
    return p;
}

}  // namespace

PunctureInsertion add_punctures(const Triangulation& t, int kappa, int q) {
    if (kappa < 1 || kappa > int(t.boundary.size()))
        throw Error("PreconditionViolated", "boundary index " + std::to_string(kappa) + " out of range");
    if (q < 0) throw Error("PreconditionViolated", "the puncture count must be nonnegative");
    PunctureInsertion out;
    out.triangulation = t;
    if (q == 0) return out;
    Triangulation& u = out.triangulation;
    LabelSource labels(t);
    const auto& ks = t.boundary[kappa - 1];
    const std::string last = ks.back();
    out.punctures.resize(q);

    // p_q first.
    int tri = -1;
    int corner = -1;
    if (ks.size() >= 2) {
        const std::string before = ks[ks.size() - 2];
        for (int i = 0; i < int(u.triangles.size()) && tri < 0; ++i) {
            const auto& tr = u.triangles[i];
            const bool has_last = std::find(tr.begin(), tr.end(), last) != tr.end();
            for (int k = 0; k < 3; ++k)
                if (has_last && tr[k] == before) {
                    tri = i;
                    corner = k;
                }
        }
        if (tri < 0) {
            // Without a triangle on both pieces, use the corner before the last piece.
            for (int i = 0; i < int(u.triangles.size()) && tri < 0; ++i)
                for (int k = 0; k < 3; ++k)
                    if (u.triangles[i][(k + 1) % 3] == last && !u.is_self_folded(u.triangles[i])) {
                        tri = i;
                        corner = k;
                    }
        }
    } else {
        for (int i = 0; i < int(u.triangles.size()) && tri < 0; ++i)
            for (int k = 0; k < 3; ++k)
                if (u.triangles[i][(k + 1) % 3] == last) {
                    tri = i;
                    corner = k;
                }
    }
    if (tri < 0) throw Error("InternalError", "no triangle found for the last puncture");
    out.punctures[q - 1] = insert_puncture(u, tri, corner, labels);

    for (int p = 1; p < q; ++p) {
        tri = -1;
        for (int i = 0; i < int(u.triangles.size()) && tri < 0; ++i) {
            if (u.is_self_folded(u.triangles[i])) continue;
            for (int k = 0; k < 3; ++k)
                if (u.triangles[i][k] == last) {
                    tri = i;
                    corner = k;
                }
        }
        if (tri < 0) throw Error("InternalError", "no triangle found for a puncture");
        out.punctures[p - 1] = insert_puncture(u, tri, corner, labels);
    }
    u.validate();
    return out;
}

// ---------------------------------------------------------------------------
// Nice triangulation
// ---------------------------------------------------------------------------

json ColumnCertificate::to_json() const {
    json t = json::array();
    for (const auto& [arc, coef] : terms) t.push_back({{"arc", arc}, {"coefficient", clustercc::to_string(coef)}});
    return json{{"arc", arc}, {"kind", kind}, {"terms", t}};
}

json NiceTriangulation::to_json() const {
    json certs = json::array();
    for (const auto& c : certificates) certs.push_back(c.to_json());
    json j = surface.to_json();
    j["tau0"] = tau0.to_json();
    j["tau1"] = tau1.to_json();
    j["sigma"] = sigma.to_json();
    j["kappa"] = kappa;
    j["B"] = b_matrix(sigma);
    j["rank"] = rank;
    j["dependent"] = dependent;
    j["certificates"] = certs;
    j["method"] = method;
    if (method != "construction") {
        j["construction"] = {{"sigma", construction_sigma.to_json()},
                             {"B", b_matrix(construction_sigma)},
                             {"kernelConeTrivial", construction_cone.trivial},
                             {"uncertifiedColumns", construction_missing}};
        if (!construction_cone.trivial) j["construction"]["kernelWitness"] = construction_cone.kernel_witness;
    }
    j["kernelConeTrivial"] = cone.trivial;
    if (cone.trivial) j["positiveWitness"] = cone.positive_witness;
    else j["kernelWitness"] = cone.kernel_witness;
    return j;
}

namespace {

std::vector<Rational> column_of(const IntMatrix& b, int j) {
    std::vector<Rational> c(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) c[i] = Rational(long(b[i][j]));
    return c;
}

/// Column of `arc` = sum of the explicit columns (coefficient 1) + e_t - e_s,
/// where e_t - e_s is then written as a nonnegative combination of the base
/// columns, or failing that of all columns outside S. The residual must have
/// exactly that shape; nothing is returned when no combination exists.
std::optional<ColumnCertificate> certify(const Triangulation& sigma, const IntMatrix& b, const std::string& arc,
                                         const std::vector<std::string>& explicit_terms,
                                         const std::vector<std::string>& base, const std::vector<std::string>& outside,
                                         const std::string& kind) {
    const int n = int(b.size());
    auto residual = column_of(b, sigma.arc_index(arc));
    for (const auto& e : explicit_terms) {
        const auto col = column_of(b, sigma.arc_index(e));
        for (int i = 0; i < n; ++i) residual[i] -= col[i];
    }
    int plus = 0;
    int minus = 0;
    for (int i = 0; i < n; ++i) {
        if (residual[i] == 1) ++plus;
        else if (residual[i] == -1) ++minus;
        else if (residual[i] != 0) plus = minus = 99;
    }
    if (plus != 1 || minus != 1)
        throw Error("InternalError", "column of " + arc + " minus its explicit terms is not of the form e_t - e_s");

    for (const auto* pool : {&base, &outside}) {
        std::vector<std::vector<Rational>> cols;
        for (const auto& a : *pool) cols.push_back(column_of(b, sigma.arc_index(a)));
        const auto lp = lp_maximize(RatMatrix::from_columns(cols, n), residual);
        if (lp.status != LpStatus::Optimal) continue;
        std::map<std::string, Rational> coef;
        for (const auto& e : explicit_terms) coef[e] += 1;
        for (std::size_t i = 0; i < pool->size(); ++i)
            if (lp.x[i] != 0) coef[(*pool)[i]] += lp.x[i];
        ColumnCertificate cert{arc, {}, kind};
        // Explicit terms first, then the LP part, each in arc order.
        for (const auto& a : sigma.arcs)
            if (coef.count(a) && std::find(explicit_terms.begin(), explicit_terms.end(), a) != explicit_terms.end())
                cert.terms.push_back({a, coef[a]});
        for (const auto& a : sigma.arcs)
            if (coef.count(a) && std::find(explicit_terms.begin(), explicit_terms.end(), a) == explicit_terms.end())
                cert.terms.push_back({a, coef[a]});
        return cert;
    }
    return std::nullopt;
}

void verify_certificate(const Triangulation& sigma, const IntMatrix& b, const ColumnCertificate& c,
                        const std::set<std::string>& dependent) {
    const int n = int(b.size());
    const auto target = column_of(b, sigma.arc_index(c.arc));
    std::vector<Rational> sum(n, 0);
    for (const auto& [a, coef] : c.terms) {
        if (coef < 0) throw Error("InternalError", "negative coefficient in certificate for " + c.arc);
        if (dependent.count(a)) throw Error("InternalError", "certificate for " + c.arc + " uses a dependent column");
        const auto col = column_of(b, sigma.arc_index(a));
        for (int i = 0; i < n; ++i) sum[i] += coef * col[i];
    }
    if (sum != target) throw Error("InternalError", "certificate for " + c.arc + " does not reproduce its column");
}

/// Looks for a set S of corank-many arcs whose columns are nonnegative
/// combinations of the (independent) columns outside S.
std::optional<std::vector<ColumnCertificate>> subset_certificate(const Triangulation& t, const IntMatrix& b,
                                                                 int corank) {
    const int n = int(b.size());
    if (corank == 0) return std::vector<ColumnCertificate>{};
    std::vector<int> pick(corank);
    // Later arcs first: S = {n-1, n-2, ...} and onwards in reverse lexicographic order.
    std::function<std::optional<std::vector<ColumnCertificate>>(int, int)> rec =
        [&](int slot, int below) -> std::optional<std::vector<ColumnCertificate>> {
        if (slot == corank) {
            std::vector<int> rest;
            for (int j = 0; j < n; ++j)
                if (std::find(pick.begin(), pick.end(), j) == pick.end()) rest.push_back(j);
            std::vector<std::vector<Rational>> cols;
            for (int j : rest) cols.push_back(column_of(b, j));
            const RatMatrix a = RatMatrix::from_columns(cols, n);
            if (rank(a) != n - corank) return std::nullopt;
            std::vector<ColumnCertificate> certs;
            for (int s : pick) {
                const auto lp = lp_maximize(a, column_of(b, s));
                if (lp.status != LpStatus::Optimal) return std::nullopt;
                ColumnCertificate c{t.arcs[s], {}, "search"};
                for (std::size_t i = 0; i < rest.size(); ++i)
                    if (lp.x[i] != 0) c.terms.push_back({t.arcs[rest[i]], lp.x[i]});
                certs.push_back(c);
            }
            return certs;
        }
        for (int j = below - 1; j >= corank - slot - 1; --j) {
            pick[slot] = j;
            if (auto r = rec(slot + 1, j)) return r;
        }
        return std::nullopt;
    };
    return rec(0, n);
}

std::string triangulation_key(const Triangulation& t) {
    std::vector<Triangle> tris = t.triangles;
    // Labels change under flips, so the key uses B(τ) together with the boundary pattern.
    std::ostringstream os;
    for (const auto& row : b_matrix(t)) os << to_string(row) << ";";
    (void)tris;
    return os.str();
}

}  // namespace

NiceTriangulation build_nice_triangulation(const MarkedSurface& s, const std::optional<Triangulation>& tau0) {
    s.validate();
    NiceTriangulation out;
    out.surface = s;
    const int b = int(s.boundary.size());
    out.tau0 = tau0 ? *tau0 : base_triangulation(s.genus, b);
    MarkedSurface base_surface{s.genus, IntVector(b, 1), 0};
    out.tau0.validate(base_surface);

    // τ₁: refine every boundary component.
    Triangulation t = out.tau0;
    std::vector<std::vector<std::string>> fan(b);
    for (int k = 1; k <= b; ++k) {
        auto r = refine_boundary(t, k, int(s.boundary[k - 1]));
        t = r.triangulation;
        fan[k - 1] = r.new_arcs;
    }
    out.tau1 = t;

    // κ: a component with an even count when one exists.
    out.kappa = 1;
    for (int k = 1; k <= b; ++k)
        if (s.boundary[k - 1] % 2 == 0) {
            out.kappa = k;
            break;
        }
    const int ck = int(s.boundary[out.kappa - 1]);
    const int q = s.punctures;

    // τ₂: flip the last arc of κ's fan when punctures follow.
    std::string flipped;
    if (q >= 1 && ck >= 2) {
        flipped = fan[out.kappa - 1].back();
        LabelSource labels(t);
        const std::string label = labels.next();
        t = flip(t, flipped, label);
        flipped = label;
    }
    auto ins = add_punctures(t, out.kappa, q);
    out.sigma = ins.triangulation;
    out.sigma.validate(s);

    const IntMatrix bm = b_matrix(out.sigma);
    const std::vector<std::string>& base = out.tau0.arcs;

    auto odd_fan_terms = [&](int k) {
        std::vector<std::string> terms;
        const auto& in = fan[k - 1];
        for (int l = 1; 2 * l - 1 <= int(in.size()) - 1; ++l) terms.push_back(in[2 * l - 2]);
        return terms;
    };

    // The set S of the construction, then one certificate per element.
    const bool even = ck % 2 == 0;
    std::set<std::string> dependent;
    for (int k = 1; k <= b; ++k)
        if (s.boundary[k - 1] % 2 == 0 && !(k == out.kappa && q >= 1)) dependent.insert(fan[k - 1].back());
    for (int p = 1; p <= q; ++p) dependent.insert(ins.punctures[p - 1].radius);
    if (q >= 1 && even) dependent.insert(ins.punctures[q - 1].loop);
    std::vector<std::string> outside;
    for (const auto& a : out.sigma.arcs)
        if (!dependent.count(a)) outside.push_back(a);

    std::vector<ColumnCertificate> certs;
    std::vector<std::string> missing;
    auto attempt = [&](const std::string& arc, const std::vector<std::string>& terms, const std::string& kind) {
        auto c = certify(out.sigma, bm, arc, terms, base, outside, kind);
        if (c) certs.push_back(*c);
        else missing.push_back(arc);
        return c;
    };
    for (int k = 1; k <= b; ++k) {
        if (s.boundary[k - 1] % 2 != 0) continue;
        if (k == out.kappa && q >= 1) continue;
        attempt(fan[k - 1].back(), odd_fan_terms(k), "boundary");
    }
    if (q >= 1) {
        for (int p = 1; p <= q; ++p) {
            if (p == q && even) continue;
            certs.push_back(ColumnCertificate{ins.punctures[p - 1].radius, {{ins.punctures[p - 1].loop, Rational(1)}},
                                              "coincident"});
        }
        if (even) {
            std::vector<std::string> terms;
            for (int p = 1; p < q; ++p) terms.push_back(ins.punctures[p - 1].loop);
            const auto fan_terms = odd_fan_terms(out.kappa);
            terms.insert(terms.end(), fan_terms.begin(), fan_terms.end());
            terms.push_back(flipped);
            if (auto cert = attempt(ins.punctures[q - 1].loop, terms, "puncture"))
                certs.push_back(ColumnCertificate{ins.punctures[q - 1].radius, cert->terms, "coincident"});
            else
                missing.push_back(ins.punctures[q - 1].radius);
        }
    }
    for (const auto& c : certs) verify_certificate(out.sigma, bm, c, dependent);

    const auto report = corank_check(out.sigma, s);
    if (int(dependent.size()) != report.arcs - report.rank)
        throw Error("InternalError", "dependent set size differs from the corank");
    out.construction_sigma = out.sigma;
    out.construction_cone = kernel_cone_trivial(bm);
    out.construction_missing = missing;

    if (missing.empty() && out.construction_cone.trivial) {
        out.method = "construction";
        out.rank = report.rank;
        for (const auto& a : out.sigma.arcs)
            if (dependent.count(a)) out.dependent.push_back(a);
        out.certificates = std::move(certs);
        out.cone = out.construction_cone;
        return out;
    }

    // The construction's σ is not certified: search the flip graph from it.
    out.method = "flip-search";
    const int corank = report.arcs - report.rank;
    std::set<std::string> seen;
    std::vector<Triangulation> frontier{out.sigma};
    seen.insert(triangulation_key(out.sigma));
    constexpr std::size_t kSearchLimit = 20000;
    while (!frontier.empty() && seen.size() < kSearchLimit) {
        std::vector<Triangulation> next;
        for (const auto& u : frontier) {
            const IntMatrix ub = b_matrix(u);
            const auto cone = kernel_cone_trivial(ub);
            if (cone.trivial) {
                if (auto certs2 = subset_certificate(u, ub, corank)) {
                    std::set<std::string> dep;
                    for (const auto& c : *certs2) dep.insert(c.arc);
                    for (const auto& c : *certs2) verify_certificate(u, ub, c, dep);
                    out.sigma = u;
                    out.rank = report.rank;
                    for (const auto& a : u.arcs)
                        if (dep.count(a)) out.dependent.push_back(a);
                    out.certificates = std::move(*certs2);
                    out.cone = cone;
                    corank_check(u, s);
                    return out;
                }
            }
            for (const auto& a : u.arcs) {
                if (u.is_radius(a)) continue;
                Triangulation f;
                try {
                    f = flip(u, a);
                } catch (const Error&) {
                    continue;
                }
                if (seen.insert(triangulation_key(f)).second) next.push_back(f);
            }
        }
        frontier = std::move(next);
    }
    throw Error("ConstructionFailed", "no certified triangulation found within the flip search limit");
}

json CorankReport::to_json() const {
    return json{{"arcs", arcs},
                {"rank", rank},
                {"expected", expected},
                {"punctures", punctures},
                {"evenComponents", even_components},
                {"holds", rank == expected}};
}

CorankReport corank_check(const Triangulation& t, const MarkedSurface& s) {
    t.validate(s);
    CorankReport r;
    r.arcs = int(t.arcs.size());
    r.rank = rank(to_rational(b_matrix(t), r.arcs));
    r.punctures = s.punctures;
    r.even_components = s.even_components();
    r.expected = r.arcs - r.punctures - r.even_components;
    if (r.rank != r.expected)
        throw Error("RankMismatch", "rank " + std::to_string(r.rank) + " but the formula gives " +
                                        std::to_string(r.expected));
    return r;
}

}  // namespace clustercc
