#include "clustercc/rep.hpp"

#include "clustercc/error.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <set>

namespace clustercc {

namespace {

int dim_at(const DecoratedRep& m, int v) { return int(m.dims[v - 1]); }

RatMatrix zero(int r, int c) { return RatMatrix(r, c); }

const RatMatrix& arrow_matrix(const DecoratedRep& m, const std::string& id) {
    auto it = m.matrices.find(id);
    if (it == m.matrices.end()) throw Error("ShapeMismatch", "no matrix for arrow " + id);
    return it->second;
}

/// Matrix of a path starting at vertex `from`; the empty path is the identity.
RatMatrix path_from(const DecoratedRep& m, const Quiver&, const Path& p, int from) {
    RatMatrix out = RatMatrix::identity(dim_at(m, from));
    for (const auto& id : p) out = arrow_matrix(m, id) * out;
    return out;
}

RatMatrix comb_between(const DecoratedRep& m, const Quiver& q, const PathComb& c, int from, int to) {
    RatMatrix out = zero(dim_at(m, to), dim_at(m, from));
    for (const auto& [path, coef] : c) out = out + path_from(m, q, path, from).scaled(coef);
    return out;
}

/// Embedding of each arrow into the total space, used for the nilpotency test.
std::vector<int> offsets(const IntVector& dims) {
    std::vector<int> off(dims.size() + 1, 0);
    for (std::size_t i = 0; i < dims.size(); ++i) off[i + 1] = off[i] + int(dims[i]);
    return off;
}

RatMatrix block_diag(const RatMatrix& a, const RatMatrix& b) {
    RatMatrix out(a.rows() + b.rows(), a.cols() + b.cols());
    out.set_block(0, 0, a);
    out.set_block(a.rows(), a.cols(), b);
    return out;
}

/// Selection matrix taking the free coordinates of the pivot-canonical kernel
/// basis of a; it is a left inverse of kernel_matrix(a).
RatMatrix free_coordinates(const RatMatrix& a) {
    const auto rr = rref(a);
    std::vector<bool> pivot(a.cols(), false);
    for (int p : rr.pivots) pivot[p] = true;
    std::vector<int> free;
    for (int c = 0; c < a.cols(); ++c)
        if (!pivot[c]) free.push_back(c);
    RatMatrix out(int(free.size()), a.cols());
    for (std::size_t i = 0; i < free.size(); ++i) out(int(i), free[i]) = 1;
    return out;
}

long long mod_inverse(long long a, long long p) {
    long long r = 1, e = p - 2;
    a %= p;
    while (e > 0) {
        if (e & 1) r = r * a % p;
        a = a * a % p;
        e >>= 1;
    }
    return r;
}

using ModMatrix = std::vector<std::vector<long long>>;

ModMatrix reduce_mod(const RatMatrix& a, long long p) {
    ModMatrix out(a.rows(), std::vector<long long>(a.cols(), 0));
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) {
            const Integer den = a(i, j).get_den();
            Integer num = a(i, j).get_num();
            const Integer dm = den % Integer(long(p));
            if (dm == 0) throw Error("BadReduction", "denominator divisible by " + std::to_string(p));
            Integer nm = num % Integer(long(p));
            if (nm < 0) nm += long(p);
            out[i][j] = nm.get_si() * mod_inverse(dm.get_si(), p) % p;
        }
    }
    return out;
}

int rank_mod(ModMatrix a, long long p) {
    const int rows = int(a.size());
    const int cols = rows ? int(a[0].size()) : 0;
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int piv = -1;
        for (int i = r; i < rows; ++i)
            if (a[i][c]) { piv = i; break; }
        if (piv < 0) continue;
        std::swap(a[piv], a[r]);
        const long long inv = mod_inverse(a[r][c], p);
        for (auto& x : a[r]) x = x * inv % p;
        for (int i = 0; i < rows; ++i) {
            if (i == r || !a[i][c]) continue;
            const long long f = a[i][c];
            for (int j = 0; j < cols; ++j) a[i][j] = ((a[i][j] - f * a[r][j]) % p + p) % p;
        }
        ++r;
    }
    return r;
}

/// A subspace of F_p^d given by reduced echelon rows and their pivot columns.
struct Subspace {
    std::vector<std::vector<long long>> rows;
    std::vector<int> pivots;
};

std::vector<Subspace> enumerate_subspaces(int d, int e, long long p) {
    std::vector<Subspace> out;
    std::vector<int> piv(e);
    std::function<void(int, int)> choose = [&](int idx, int start) {
        if (idx == e) {
            // Free positions: row r, column c > piv[r] and c not a pivot.
            std::vector<std::pair<int, int>> free;
            for (int r = 0; r < e; ++r)
                for (int c = piv[r] + 1; c < d; ++c)
                    if (std::find(piv.begin(), piv.end(), c) == piv.end()) free.push_back({r, c});
            std::vector<long long> vals(free.size(), 0);
            while (true) {
                Subspace s;
                s.pivots = piv;
                s.rows.assign(e, std::vector<long long>(d, 0));
                for (int r = 0; r < e; ++r) s.rows[r][piv[r]] = 1;
                for (std::size_t i = 0; i < free.size(); ++i) s.rows[free[i].first][free[i].second] = vals[i];
                out.push_back(std::move(s));
                std::size_t i = 0;
                while (i < vals.size() && ++vals[i] == p) vals[i++] = 0;
                if (i == vals.size()) break;
            }
            return;
        }
        for (int c = start; c <= d - (e - idx); ++c) {
            piv[idx] = c;
            choose(idx + 1, c + 1);
        }
    };
    choose(0, 0);
    return out;
}

bool contains(const Subspace& u, std::vector<long long> w, long long p) {
    for (std::size_t r = 0; r < u.rows.size(); ++r) {
        const long long f = w[u.pivots[r]];
        if (!f) continue;
        for (std::size_t j = 0; j < w.size(); ++j) w[j] = ((w[j] - f * u.rows[r][j]) % p + p) % p;
    }
    return std::all_of(w.begin(), w.end(), [](long long x) { return x == 0; });
}

long long binomial_count(const IntVector& dims, const IntVector& e) {
    long long d = 0;
    for (std::size_t i = 0; i < dims.size(); ++i) d += e[i] * (dims[i] - e[i]);
    return d;
}

}  // namespace

// ---------------------------------------------------------------------------
// DecoratedRep
// ---------------------------------------------------------------------------

int DecoratedRep::total_dim() const { return int(std::accumulate(dims.begin(), dims.end(), 0LL)); }

DecoratedRep DecoratedRep::negative(const Quiver& q, const IntVector& v) {
    DecoratedRep m;
    m.dims.assign(q.num_vertices(), 0);
    m.decoration = v;
    if (int(v.size()) != q.num_vertices()) throw Error("ShapeMismatch", "decoration length");
    for (const auto& a : q.arrows()) m.matrices[a.id] = zero(0, 0);
    return m;
}

DecoratedRep DecoratedRep::simple(const Quiver& q, int k) {
    if (k < 1 || k > q.num_vertices()) throw Error("InvalidIndex", "vertex outside the quiver");
    DecoratedRep m;
    m.dims.assign(q.num_vertices(), 0);
    m.dims[k - 1] = 1;
    m.decoration.assign(q.num_vertices(), 0);
    for (const auto& a : q.arrows()) m.matrices[a.id] = zero(int(m.dims[a.to - 1]), int(m.dims[a.from - 1]));
    return m;
}

nlohmann::json DecoratedRep::to_json() const {
    nlohmann::json mats = nlohmann::json::object();
    for (const auto& [id, a] : matrices) {
        nlohmann::json rows = nlohmann::json::array();
        for (int i = 0; i < a.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (int j = 0; j < a.cols(); ++j) row.push_back(clustercc::to_string(a(i, j)));
            rows.push_back(row);
        }
        mats[id] = rows;
    }
    return {{"dims", dims}, {"decoration", decoration}, {"matrices", mats}};
}

DecoratedRep DecoratedRep::from_json(const nlohmann::json& j, const Quiver& q) {
    DecoratedRep m;
    m.dims = j.at("dims").get<IntVector>();
    m.decoration = j.contains("decoration") ? j.at("decoration").get<IntVector>() : IntVector(m.dims.size(), 0);
    if (int(m.dims.size()) != q.num_vertices() || m.decoration.size() != m.dims.size()) {
        throw Error("ShapeMismatch", "dims and decoration need one entry per vertex");
    }
    for (auto x : m.dims)
        if (x < 0) throw Error("ShapeMismatch", "negative dimension");
    for (auto x : m.decoration)
        if (x < 0) throw Error("ShapeMismatch", "negative decoration");
    const nlohmann::json mats = j.value("matrices", nlohmann::json::object());
    for (const auto& [id, _] : mats.items())
        if (!q.has_arrow(id)) throw Error("ShapeMismatch", "matrix for unknown arrow " + id);
    for (const auto& a : q.arrows()) {
        const int r = int(m.dims[a.to - 1]), c = int(m.dims[a.from - 1]);
        RatMatrix mat(r, c);
        if (mats.contains(a.id)) {
            const auto& rows = mats.at(a.id);
            if (!rows.is_array() || (int(rows.size()) != r && !(r == 0 || c == 0))) {
                throw Error("ShapeMismatch", "matrix of " + a.id + " has the wrong number of rows");
            }
            if (r > 0 && c > 0) {
                for (int i = 0; i < r; ++i) {
                    if (int(rows[i].size()) != c) throw Error("ShapeMismatch", "matrix of " + a.id + " has the wrong number of columns");
                    for (int k = 0; k < c; ++k) {
                        const auto& x = rows[i][k];
                        mat(i, k) = x.is_string() ? parse_rational(x.get<std::string>()) : Rational(x.get<long>());
                    }
                }
            }
        }
        m.matrices[a.id] = mat;
    }
    return m;
}

void check_shapes(const DecoratedRep& m, const Quiver& q) {
    if (int(m.dims.size()) != q.num_vertices() || int(m.decoration.size()) != q.num_vertices()) {
        throw Error("ShapeMismatch", "dims and decoration need one entry per vertex");
    }
    for (const auto& a : q.arrows()) {
        const auto& mat = arrow_matrix(m, a.id);
        if (mat.rows() != m.dims[a.to - 1] || mat.cols() != m.dims[a.from - 1]) {
            throw Error("ShapeMismatch", "matrix of " + a.id + " does not match the dimension vector");
        }
    }
}

RatMatrix path_matrix(const DecoratedRep& m, const Quiver& q, const Path& p) {
    if (p.empty()) throw Error("InvalidPath", "empty path");
    return path_from(m, q, p, q.path_source(p));
}

RatMatrix comb_matrix(const DecoratedRep& m, const Quiver& q, const PathComb& c) {
    if (c.empty()) return zero(0, 0);
    const Path& first = c.begin()->first;
    return comb_between(m, q, c, q.path_source(first), q.path_target(first));
}

// ---------------------------------------------------------------------------
// Validation and truncation
// ---------------------------------------------------------------------------

int default_truncation(int total_dim) {
    if (const char* env = std::getenv("CLUSTERCC_TRUNCATION")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 3) return int(v);
    }
    return std::max(12, total_dim + 2);
}

QP effective_qp(const QP& qp, int total_dim) {
    QP out = qp;
    if (std::getenv("CLUSTERCC_TRUNCATION")) out.p = default_truncation(total_dim);
    else out.p = std::max(qp.p, total_dim + 2);
    if (total_dim >= out.p) {
        throw Error("TruncationTooSmall", "truncation order " + std::to_string(out.p) +
                                              " does not exceed the total dimension " + std::to_string(total_dim));
    }
    return out;
}

RepValidation validate_rep(const DecoratedRep& m, const QP& qp) {
    const Quiver& q = qp.quiver;
    check_shapes(m, q);
    RepValidation res;
    // Nilpotency: the span of the images of all paths of length j must vanish.
    const auto off = offsets(m.dims);
    const int total = off.back();
    RatMatrix span = RatMatrix::identity(total);
    int steps = 0;
    while (span.cols() > 0 && steps <= total) {
        RatMatrix next(total, 0);
        for (const auto& a : q.arrows()) {
            const auto& mat = arrow_matrix(m, a.id);
            if (mat.empty()) continue;
            RatMatrix img(total, span.cols());
            img.set_block(off[a.to - 1], 0, mat * span.block(off[a.from - 1], 0, mat.cols(), span.cols()));
            next = RatMatrix::hstack(next, img);
        }
        span = image_basis(next);
        ++steps;
    }
    res.nilpotent = span.cols() == 0;
    if (!res.nilpotent) {
        res.reason = "the arrows do not act nilpotently";
    } else if (steps > qp.p) {
        res.nilpotent = false;
        res.reason = "a path of length p acts nontrivially";
    }
    res.relations_hold = true;
    for (const auto& a : q.arrows()) {
        const PathComb d = cyclic_derivative(qp.potential, a.id);
        if (!comb_between(m, q, d, a.to, a.from).is_zero()) {
            res.relations_hold = false;
            if (res.reason.empty()) res.reason = "the cyclic derivative along " + a.id + " does not act as zero";
            break;
        }
    }
    res.valid = res.nilpotent && res.relations_hold;
    return res;
}

// ---------------------------------------------------------------------------
// Homomorphisms
// ---------------------------------------------------------------------------

std::vector<std::vector<RatMatrix>> hom_basis(const DecoratedRep& m, const DecoratedRep& n, const Quiver& q) {
    check_shapes(m, q);
    check_shapes(n, q);
    const int nv = q.num_vertices();
    std::vector<int> off(nv + 1, 0);
    for (int v = 0; v < nv; ++v) off[v + 1] = off[v] + int(n.dims[v] * m.dims[v]);
    const int unknowns = off[nv];
    auto var = [&](int v, int r, int c) { return off[v - 1] + r * int(m.dims[v - 1]) + c; };
    std::vector<std::vector<Rational>> rows;
    for (const auto& a : q.arrows()) {
        const auto& ma = arrow_matrix(m, a.id);
        const auto& na = arrow_matrix(n, a.id);
        const int s = a.from, t = a.to;
        const int ns = int(n.dims[s - 1]), nt = int(n.dims[t - 1]);
        const int ms = int(m.dims[s - 1]), mt = int(m.dims[t - 1]);
        // (N_a f_s - f_t M_a)(r, c) = 0 for r < nt, c < ms.
        for (int r = 0; r < nt; ++r) {
            for (int c = 0; c < ms; ++c) {
                std::vector<Rational> row(unknowns);
                for (int j = 0; j < ns; ++j) row[var(s, j, c)] += na(r, j);
                for (int j = 0; j < mt; ++j) row[var(t, r, j)] -= ma(j, c);
                rows.push_back(std::move(row));
            }
        }
    }
    RatMatrix system(int(rows.size()), unknowns);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < unknowns; ++j) system(int(i), j) = rows[i][j];
    std::vector<std::vector<RatMatrix>> out;
    for (const auto& vec : kernel_basis_rational(system)) {
        std::vector<RatMatrix> f;
        for (int v = 1; v <= nv; ++v) {
            RatMatrix fv(int(n.dims[v - 1]), int(m.dims[v - 1]));
            for (int r = 0; r < fv.rows(); ++r)
                for (int c = 0; c < fv.cols(); ++c) fv(r, c) = vec[var(v, r, c)];
            f.push_back(fv);
        }
        out.push_back(std::move(f));
    }
    return out;
}

int hom_dim(const DecoratedRep& m, const DecoratedRep& n, const Quiver& q) {
    return int(hom_basis(m, n, q).size());
}

// ---------------------------------------------------------------------------
// g-vectors
// ---------------------------------------------------------------------------

IntVector g_vector(const DecoratedRep& m, const QP& qp_in) {
    check_shapes(m, qp_in.quiver);
    const QP qp = effective_qp(qp_in, m.total_dim());
    const Quiver& q = qp.quiver;
    IntVector g(q.num_vertices(), 0);
    for (int i = 1; i <= q.num_vertices(); ++i) {
        const auto outs = q.arrows_out_of(i);
        const auto ins = q.arrows_into(i);
        std::vector<int> col_off{0}, row_off{0};
        for (const auto& a : outs) col_off.push_back(col_off.back() + dim_at(m, a.to));
        for (const auto& c : ins) row_off.push_back(row_off.back() + dim_at(m, c.from));
        RatMatrix d2(row_off.back(), col_off.back());
        for (std::size_t ci = 0; ci < ins.size(); ++ci) {
            const PathComb der = cyclic_derivative(qp.potential, ins[ci].id);
            for (std::size_t ai = 0; ai < outs.size(); ++ai) {
                PathComb rest;
                for (const auto& [path, coef] : der) {
                    if (path.front() != outs[ai].id) continue;
                    rest[Path(path.begin() + 1, path.end())] += coef;
                }
                d2.set_block(row_off[ci], col_off[ai], comb_between(m, q, rest, outs[ai].to, ins[ci].from));
            }
        }
        g[i - 1] = -m.dims[i - 1] + m.decoration[i - 1] + (d2.cols() - rank(d2));
    }
    return g;
}

IntVector g_vector_hom_ext(const DecoratedRep& m, const QP& qp_in) {
    check_shapes(m, qp_in.quiver);
    const QP qp = effective_qp(qp_in, m.total_dim() + 1);
    const Quiver& q = qp.quiver;
    IntVector g(q.num_vertices(), 0);
    for (int i = 1; i <= q.num_vertices(); ++i) {
        const long long hom = hom_dim(DecoratedRep::simple(q, i), m, q);
        const int di = dim_at(m, i);
        const auto outs = q.arrows_out_of(i);
        std::vector<int> off{0};
        for (const auto& a : outs) off.push_back(off.back() + dim_at(m, a.to));
        const int f_dim = off.back();
        // Coboundaries: m in M_i gives the cocycle (M_a m)_a.
        RatMatrix d1(0, di);
        for (const auto& a : outs) d1 = RatMatrix::vstack(d1, arrow_matrix(m, a.id));
        // Cocycles: f for which the one-point extension E_f satisfies every relation.
        std::vector<std::vector<Rational>> columns;
        for (int t = 0; t < f_dim; ++t) {
            DecoratedRep e = m;
            e.dims[i - 1] += 1;
            for (const auto& a : q.arrows()) {
                const RatMatrix& old = arrow_matrix(m, a.id);
                RatMatrix mat(int(e.dims[a.to - 1]), int(e.dims[a.from - 1]));
                mat.set_block(0, 0, old);
                if (a.from == i) {
                    for (std::size_t ai = 0; ai < outs.size(); ++ai) {
                        if (outs[ai].id != a.id) continue;
                        const int local = t - off[ai];
                        if (local >= 0 && local < off[ai + 1] - off[ai]) mat(local, di) = 1;
                    }
                }
                e.matrices[a.id] = mat;
            }
            std::vector<Rational> col;
            for (const auto& c : q.arrows()) {
                if (c.to != i) continue;
                const RatMatrix r = comb_between(e, q, cyclic_derivative(qp.potential, c.id), c.to, c.from);
                for (int row = 0; row < r.rows(); ++row) col.push_back(r(row, di));
            }
            columns.push_back(std::move(col));
        }
        long long cocycles = 0;
        if (f_dim > 0) {
            const int len = int(columns.front().size());
            cocycles = f_dim - rank(RatMatrix::from_columns(columns, len));
        }
        const long long ext = cocycles - rank(d1);
        g[i - 1] = -hom + ext + m.decoration[i - 1];
    }
    return g;
}

DecoratedRep restrict_rep(const DecoratedRep& m, const QP& qp_ext) {
    const Quiver& q = qp_ext.quiver;
    const int n = q.n();
    if (int(m.dims.size()) == n) return m;
    check_shapes(m, q);
    for (int v = n + 1; v <= q.num_vertices(); ++v) {
        if (m.dims[v - 1] != 0 || m.decoration[v - 1] != 0) {
            throw Error("ShapeMismatch", "representation is not supported on the mutable vertices");
        }
    }
    DecoratedRep out;
    out.dims.assign(m.dims.begin(), m.dims.begin() + n);
    out.decoration.assign(m.decoration.begin(), m.decoration.begin() + n);
    for (const auto& a : q.arrows())
        if (a.from <= n && a.to <= n) out.matrices[a.id] = arrow_matrix(m, a.id);
    return out;
}

DecoratedRep extend_rep(const DecoratedRep& m, const QP& qp_ext) {
    const Quiver& q = qp_ext.quiver;
    if (int(m.dims.size()) == q.num_vertices()) return m;
    if (int(m.dims.size()) != q.n()) throw Error("ShapeMismatch", "dims need one entry per vertex");
    DecoratedRep out = m;
    out.dims.resize(q.num_vertices(), 0);
    out.decoration.resize(q.num_vertices(), 0);
    for (const auto& a : q.arrows())
        if (!out.matrices.count(a.id)) out.matrices[a.id] = zero(int(out.dims[a.to - 1]), int(out.dims[a.from - 1]));
    return out;
}

GVectorPair g_vectors(const DecoratedRep& m, const QP& qp_ext) {
    GVectorPair res;
    const DecoratedRep full = extend_rep(m, qp_ext);
    res.g_ext = g_vector(full, qp_ext);
    res.g = g_vector(restrict_rep(full, qp_ext), restrict_to_mutable(qp_ext));
    return res;
}

long long e_invariant(const DecoratedRep& m, const DecoratedRep& n, const QP& qp) {
    const IntVector gn = g_vector(n, qp);
    long long e = hom_dim(m, n, qp.quiver);
    for (std::size_t i = 0; i < gn.size(); ++i) e += m.dims[i] * gn[i];
    return e;
}

// ---------------------------------------------------------------------------
// Triangle and mutation
// ---------------------------------------------------------------------------

TriangleData triangle_maps(const DecoratedRep& m, const QP& qp, int k) {
    const Quiver& q = qp.quiver;
    check_mutable_vertex(q, k);
    check_shapes(m, q);
    TriangleData t;
    t.ins = q.arrows_into(k);
    t.outs = q.arrows_out_of(k);
    const int dk = dim_at(m, k);
    std::vector<int> in_off{0}, out_off{0};
    for (const auto& a : t.ins) in_off.push_back(in_off.back() + dim_at(m, a.from));
    for (const auto& b : t.outs) out_off.push_back(out_off.back() + dim_at(m, b.to));
    t.alpha = RatMatrix(dk, in_off.back());
    for (std::size_t i = 0; i < t.ins.size(); ++i) t.alpha.set_block(0, in_off[i], arrow_matrix(m, t.ins[i].id));
    t.beta = RatMatrix(out_off.back(), dk);
    for (std::size_t j = 0; j < t.outs.size(); ++j) t.beta.set_block(out_off[j], 0, arrow_matrix(m, t.outs[j].id));
    t.gamma = RatMatrix(in_off.back(), out_off.back());
    for (std::size_t i = 0; i < t.ins.size(); ++i) {
        for (std::size_t j = 0; j < t.outs.size(); ++j) {
            PathComb rest;
            for (const auto& [cycle, c] : qp.potential) {
                const std::size_t len = cycle.size();
                for (std::size_t pos = 0; pos < len; ++pos) {
                    if (cycle[pos] != t.ins[i].id || cycle[(pos + 1) % len] != t.outs[j].id) continue;
                    Path r;
                    for (std::size_t s = 2; s < len; ++s) r.push_back(cycle[(pos + s) % len]);
                    rest[r] += c;
                }
            }
            t.gamma.set_block(in_off[i], out_off[j], comb_between(m, q, rest, t.outs[j].to, t.ins[i].from));
        }
    }
    return t;
}

RepMutation mutate_rep(const DecoratedRep& m, const QP& qp_in, int k) {
    const Quiver& q0 = qp_in.quiver;
    check_mutable_vertex(q0, k);
    check_shapes(m, q0);
    long long in_dim = 0, out_dim = 0;
    for (const auto& a : q0.arrows_into(k)) in_dim += m.dims[a.from - 1];
    for (const auto& b : q0.arrows_out_of(k)) out_dim += m.dims[b.to - 1];
    const int bound = int(m.total_dim() + in_dim + out_dim + m.decoration[k - 1]);
    const QP qp = effective_qp(qp_in, bound);
    const auto val = validate_rep(m, qp);
    if (!val.valid) throw Error("InvalidRep", val.reason);

    const TriangleData t = triangle_maps(m, qp, k);
    const RatMatrix& alpha = t.alpha;
    const RatMatrix& beta = t.beta;
    const RatMatrix& gamma = t.gamma;
    const int din = alpha.cols(), dout = beta.rows();

    // Ker(gamma)/Im(beta): coordinates on Ker(gamma), then a projection killing Im(beta).
    const RatMatrix rho1 = free_coordinates(gamma);
    const RatMatrix psi2 = left_kernel(rho1 * beta);
    // Im(gamma): a basis G with a left inverse L.
    const RatMatrix big_g = image_basis(gamma);
    const RatMatrix big_l = left_inverse(big_g);
    // Ker(alpha)/Im(gamma): a basis K3 of Ker(alpha) and a section of the projection.
    const RatMatrix k3 = kernel_matrix(alpha);
    const RatMatrix rho3 = free_coordinates(alpha);
    const RatMatrix psi4 = left_kernel(rho3 * gamma);
    const RatMatrix sec = right_inverse(psi4);
    const int vk = int(m.decoration[k - 1]);
    const int d1 = psi2.rows(), d2 = big_g.cols(), d3 = psi4.rows();
    const int new_dk = d1 + d2 + d3 + vk;

    // Maps out-space -> new M_k (the reversed outgoing arrows) and new M_k -> in-space.
    RatMatrix abar(new_dk, dout);
    abar.set_block(0, 0, (psi2 * rho1).scaled(-1));
    abar.set_block(d1, 0, (big_l * gamma).scaled(-1));
    RatMatrix bbar(din, new_dk);
    bbar.set_block(0, d1, big_g);
    bbar.set_block(0, d1 + d2, k3 * sec);

    const int new_vk = (beta.cols() - rank(beta)) - (din - rank(beta * alpha)) + (din - rank(alpha));

    RepMutation res;
    res.premutated_qp = premutate_qp(qp, k);
    DecoratedRep pre;
    pre.dims = m.dims;
    pre.dims[k - 1] = new_dk;
    pre.decoration = m.decoration;
    pre.decoration[k - 1] = new_vk;
    for (const auto& a : q0.arrows())
        if (a.from != k && a.to != k) pre.matrices[a.id] = arrow_matrix(m, a.id);
    int off = 0;
    for (const auto& a : t.ins) {
        const int h = dim_at(m, a.from);
        pre.matrices[reversed_id(a.id)] = bbar.block(off, 0, h, new_dk);
        off += h;
    }
    off = 0;
    for (const auto& b : t.outs) {
        const int w = dim_at(m, b.to);
        pre.matrices[reversed_id(b.id)] = abar.block(0, off, new_dk, w);
        off += w;
    }
    for (const auto& a : t.ins)
        for (const auto& b : t.outs)
            pre.matrices[composite_id(a.id, b.id)] = arrow_matrix(m, b.id) * arrow_matrix(m, a.id);
    res.premutated_rep = pre;

    const ReductionResult red = reduce_qp(res.premutated_qp);
    res.qp = red.reduced;
    res.qp.p = qp_in.p;
    DecoratedRep out;
    out.dims = pre.dims;
    out.decoration = pre.decoration;
    for (const auto& a : red.reduced.quiver.arrows()) out.matrices[a.id] = pre.matrices.at(a.id);
    res.rep = out;
    const auto check = validate_rep(out, red.reduced);
    if (!check.valid) throw Error("InternalError", "mutated representation fails validation: " + check.reason);
    return res;
}

// ---------------------------------------------------------------------------
// Isomorphism and direct sums
// ---------------------------------------------------------------------------

std::string to_string(IsoAnswer a) {
    switch (a) {
        case IsoAnswer::Yes: return "yes";
        case IsoAnswer::No: return "no";
        case IsoAnswer::ProbablyNo: return "probably-no";
    }
    return "";
}

IsoAnswer is_isomorphic(const DecoratedRep& m, const DecoratedRep& n, const Quiver& q, unsigned seed) {
    check_shapes(m, q);
    check_shapes(n, q);
    if (m.dims != n.dims || m.decoration != n.decoration) return IsoAnswer::No;
    const auto basis = hom_basis(m, n, q);
    if (hom_dim(m, m, q) != int(basis.size()) || hom_dim(n, n, q) != hom_dim(n, m, q)) return IsoAnswer::No;
    if (basis.empty()) return m.total_dim() == 0 ? IsoAnswer::Yes : IsoAnswer::No;
    auto invertible_combination = [&](const std::vector<int>& coefs) {
        std::vector<RatMatrix> f;
        for (const auto& part : basis.front()) f.push_back(RatMatrix(part.rows(), part.cols()));
        for (std::size_t i = 0; i < basis.size(); ++i) {
            if (coefs[i] == 0) continue;
            for (std::size_t v = 0; v < f.size(); ++v) f[v] = f[v] + basis[i][v].scaled(coefs[i]);
        }
        return std::all_of(f.begin(), f.end(), [](const RatMatrix& x) { return inverse(x).has_value(); });
    };
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> coef(-6, 6);
    std::vector<int> coefs(basis.size());
    for (int trial = 0; trial < 20; ++trial) {
        for (auto& c : coefs) c = coef(rng);
        if (invertible_combination(coefs)) return IsoAnswer::Yes;
    }
    // Exhaustive search over coefficients in {-1, 0, 1} for small Hom spaces.
    if (basis.size() <= 8) {
        std::fill(coefs.begin(), coefs.end(), -1);
        while (true) {
            if (invertible_combination(coefs)) return IsoAnswer::Yes;
            std::size_t i = 0;
            while (i < coefs.size() && ++coefs[i] == 2) coefs[i++] = -1;
            if (i == coefs.size()) break;
        }
    }
    return IsoAnswer::ProbablyNo;
}

DecoratedRep transport_rep(const DecoratedRep& n, const ArrowMatch& match) {
    DecoratedRep out;
    out.dims = n.dims;
    out.decoration = n.decoration;
    for (const auto& [id, target] : match) out.matrices[id] = arrow_matrix(n, target.first).scaled(target.second);
    return out;
}

IsoAnswer isomorphic_across(const DecoratedRep& m, const QP& qa, const DecoratedRep& n, const QP& qb) {
    if (m.dims != n.dims || m.decoration != n.decoration) return IsoAnswer::No;
    const auto matches = qp_isomorphisms(qa, qb);
    if (matches.empty()) {
        if (compare_qps(qa, qb) == QPComparison::Different) return IsoAnswer::No;
        throw Error("Inconclusive", "no relabeling of arrows identifies the two quivers with potential");
    }
    IsoAnswer best = IsoAnswer::No;
    for (const auto& match : matches) {
        const IsoAnswer a = is_isomorphic(m, transport_rep(n, match), qa.quiver);
        if (a == IsoAnswer::Yes) return a;
        if (a == IsoAnswer::ProbablyNo) best = a;
    }
    return best;
}

namespace {

bool match_preserves_potential(const QP& a, const QP& b, const ArrowMatch& match) {
    PathComb mapped;
    for (const auto& [cycle, c] : a.potential) {
        Path image;
        Rational coef = c;
        for (const auto& id : cycle) {
            const auto& [target, sign] = match.at(id);
            image.push_back(target);
            if (sign < 0) coef = -coef;
        }
        add_cycle(mapped, image, coef);
    }
    return mapped == b.potential;
}

}  // namespace

IsoAnswer involution_check(const DecoratedRep& m, const QP& qp, const DecoratedRep& twice, const QP& twice_qp, int k) {
    if (m.dims != twice.dims || m.decoration != twice.decoration) return IsoAnswer::No;
    const auto matches = qp_isomorphisms(qp, twice_qp);
    if (matches.empty()) {
        if (compare_qps(qp, twice_qp) == QPComparison::Different) return IsoAnswer::No;
        throw Error("Inconclusive", "no relabeling of arrows identifies the two quivers with potential");
    }
    IsoAnswer best = IsoAnswer::No;
    for (const auto& match : matches) {
        ArrowMatch negated = match;
        for (const auto& a : qp.quiver.arrows())
            if (a.to == k) negated[a.id].second = -negated[a.id].second;
        std::vector<ArrowMatch> variants{match};
        if (match_preserves_potential(qp, twice_qp, negated)) variants.push_back(negated);
        for (const auto& v : variants) {
            const IsoAnswer ans = is_isomorphic(m, transport_rep(twice, v), qp.quiver);
            if (ans == IsoAnswer::Yes) return ans;
            if (ans == IsoAnswer::ProbablyNo) best = ans;
        }
    }
    return best;
}

DecoratedRep direct_sum(const DecoratedRep& m, const DecoratedRep& n, const Quiver& q) {
    check_shapes(m, q);
    check_shapes(n, q);
    DecoratedRep out;
    for (std::size_t i = 0; i < m.dims.size(); ++i) {
        out.dims.push_back(m.dims[i] + n.dims[i]);
        out.decoration.push_back(m.decoration[i] + n.decoration[i]);
    }
    for (const auto& a : q.arrows()) out.matrices[a.id] = block_diag(arrow_matrix(m, a.id), arrow_matrix(n, a.id));
    return out;
}

// ---------------------------------------------------------------------------
// Quiver Grassmannians
// ---------------------------------------------------------------------------

ChiMethod parse_chi_method(const std::string& s) {
    if (s == "auto") return ChiMethod::Auto;
    if (s == "fixedpoint") return ChiMethod::FixedPoint;
    if (s == "pointcount") return ChiMethod::PointCount;
    throw Error("ParseError", "unknown chi method '" + s + "'");
}

bool fixedpoint_applicable(const DecoratedRep& m, const Quiver& q) {
    check_shapes(m, q);
    const auto off = offsets(m.dims);
    std::vector<int> parent(off.back());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (const auto& a : q.arrows()) {
        const auto& mat = arrow_matrix(m, a.id);
        std::vector<int> row_count(mat.rows(), 0), col_count(mat.cols(), 0);
        for (int r = 0; r < mat.rows(); ++r) {
            for (int c = 0; c < mat.cols(); ++c) {
                if (mat(r, c) == 0) continue;
                if (mat(r, c) != 1) return false;
                if (++row_count[r] > 1 || ++col_count[c] > 1) return false;
                const int x = find(off[a.from - 1] + c), y = find(off[a.to - 1] + r);
                if (x == y) return false;
                parent[x] = y;
            }
        }
    }
    return true;
}

namespace {

long long fixedpoint_count(const DecoratedRep& m, const Quiver& q, const IntVector& e) {
    const int nv = q.num_vertices();
    std::vector<std::vector<bool>> chosen(nv);
    long long count = 0;
    auto closed = [&]() {
        for (const auto& a : q.arrows()) {
            const auto& mat = arrow_matrix(m, a.id);
            for (int c = 0; c < mat.cols(); ++c) {
                if (!chosen[a.from - 1][c]) continue;
                for (int r = 0; r < mat.rows(); ++r)
                    if (mat(r, c) != 0 && !chosen[a.to - 1][r]) return false;
            }
        }
        return true;
    };
    std::function<void(int)> rec = [&](int v) {
        if (v == nv) {
            if (closed()) ++count;
            return;
        }
        const int d = int(m.dims[v]);
        std::vector<bool> mask(d, false);
        std::fill(mask.begin(), mask.begin() + e[v], true);
        // Enumerate every subset of size e_v through the permutations of the mask.
        std::sort(mask.begin(), mask.end());
        do {
            chosen[v] = mask;
            rec(v + 1);
        } while (std::next_permutation(mask.begin(), mask.end()));
    };
    rec(0);
    return count;
}

}  // namespace

long long count_subreps_mod_p(const DecoratedRep& m, const Quiver& q, const IntVector& e, long long prime) {
    check_shapes(m, q);
    const int nv = q.num_vertices();
    std::map<std::string, ModMatrix> mats;
    for (const auto& a : q.arrows()) mats[a.id] = reduce_mod(arrow_matrix(m, a.id), prime);
    std::vector<std::vector<Subspace>> spaces(nv);
    for (int v = 0; v < nv; ++v) spaces[v] = enumerate_subspaces(int(m.dims[v]), int(e[v]), prime);
    // Arrows are checked at the later of their two endpoints.
    std::vector<std::vector<Arrow>> check_at(nv);
    for (const auto& a : q.arrows()) check_at[std::max(a.from, a.to) - 1].push_back(a);
    std::vector<const Subspace*> pick(nv, nullptr);
    long long count = 0;
    std::function<void(int)> rec = [&](int v) {
        if (v == nv) {
            ++count;
            return;
        }
        for (const auto& s : spaces[v]) {
            pick[v] = &s;
            bool ok = true;
            for (const auto& a : check_at[v]) {
                const ModMatrix& mat = mats.at(a.id);
                const Subspace& src = *pick[a.from - 1];
                const Subspace& tgt = *pick[a.to - 1];
                for (const auto& u : src.rows) {
                    std::vector<long long> w(mat.size(), 0);
                    for (std::size_t r = 0; r < mat.size(); ++r) {
                        long long acc = 0;
                        for (std::size_t c = 0; c < u.size(); ++c) acc = (acc + mat[r][c] * u[c]) % prime;
                        w[r] = acc;
                    }
                    if (!contains(tgt, w, prime)) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) break;
            }
            if (ok) rec(v + 1);
        }
    };
    rec(0);
    return count;
}

long long chi_grassmannian(const DecoratedRep& m, const Quiver& q, const IntVector& e, ChiMethod method) {
    check_shapes(m, q);
    if (e.size() != m.dims.size()) throw Error("ShapeMismatch", "dimension vector length");
    for (std::size_t i = 0; i < e.size(); ++i)
        if (e[i] < 0 || e[i] > m.dims[i]) return 0;
    if (method == ChiMethod::Auto) method = fixedpoint_applicable(m, q) ? ChiMethod::FixedPoint : ChiMethod::PointCount;
    if (method == ChiMethod::FixedPoint) {
        if (!fixedpoint_applicable(m, q)) {
            throw Error("NotApplicable", "fixed-point counting needs partial permutation matrices with a forest coefficient quiver");
        }
        return fixedpoint_count(m, q, e);
    }
    const long long degree = binomial_count(m.dims, e);
    if (degree == 0) {
        // Every U_v is 0 or M_v: the tuple is a subrepresentation unless a
        // nonzero arrow leaves a full space for a zero one.
        for (const auto& a : q.arrows()) {
            if (e[a.from - 1] > 0 && e[a.to - 1] == 0 && !arrow_matrix(m, a.id).is_zero()) return 0;
        }
        return 1;
    }
    if (degree > 4 || m.total_dim() > 8) {
        throw Error("TooLarge", "point counting is limited to Grassmannians of dimension at most 4");
    }
    static const long long primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
    const std::size_t needed = std::size_t(degree) + 2;
    std::vector<std::pair<long long, long long>> samples;
    for (long long p : primes) {
        if (samples.size() == needed) break;
        bool good = true;
        try {
            for (const auto& a : q.arrows()) {
                const auto& mat = arrow_matrix(m, a.id);
                if (rank_mod(reduce_mod(mat, p), p) != rank(mat)) good = false;
            }
        } catch (const Error&) {
            good = false;
        }
        if (good) samples.push_back({p, count_subreps_mod_p(m, q, e, p)});
    }
    if (samples.size() < needed) throw Error("TooLarge", "not enough primes of good reduction");
    // Lagrange interpolation through the first degree + 1 samples.
    auto interpolate = [&](long long x) {
        Rational value = 0;
        for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
            Rational term = long(samples[i].second);
            for (std::size_t j = 0; j + 1 < samples.size(); ++j) {
                if (j == i) continue;
                Rational factor(long(x - samples[j].first), long(samples[i].first - samples[j].first));
                factor.canonicalize();
                term *= factor;
            }
            value += term;
        }
        return value;
    };
    if (interpolate(samples.back().first) != long(samples.back().second)) {
        throw Error("NonPolynomialCount", "point counts are not given by a polynomial of the expected degree");
    }
    return to_int64(interpolate(1));
}

LaurentPoly f_polynomial(const DecoratedRep& m, const Quiver& q, ChiMethod method) {
    check_shapes(m, q);
    const int n = q.n();
    for (int v = n; v < q.num_vertices(); ++v)
        if (m.dims[v] != 0) throw Error("ShapeMismatch", "representation is not supported on the mutable vertices");
    LaurentPoly f(n);
    IntVector e(q.num_vertices(), 0);
    std::function<void(int)> rec = [&](int v) {
        if (v == n) {
            const long long chi = chi_grassmannian(m, q, e, method);
            if (chi != 0) f.add_term(IntVector(e.begin(), e.begin() + n), Rational(long(chi)));
            return;
        }
        for (long long x = 0; x <= m.dims[v]; ++x) {
            e[v] = x;
            rec(v + 1);
        }
        e[v] = 0;
    };
    rec(0);
    return f;
}

LaurentPoly cc_function(const DecoratedRep& m, const QP& qp_ext, const ExchangeMatrix& b, ChiMethod method) {
    const DecoratedRep full = extend_rep(m, qp_ext);
    const IntVector g = g_vector(full, qp_ext);
    const LaurentPoly f = f_polynomial(full, qp_ext.quiver, method);
    if (b.n != qp_ext.quiver.n() || b.n + b.m != qp_ext.quiver.num_vertices()) {
        throw Error("ShapeMismatch", "exchange matrix does not fit the quiver");
    }
    return LaurentPoly::monomial(g) * substitute_monomials(f, yhat_assignment(b));
}

LaurentPoly cc_function(const DecoratedRep& m, const QP& qp_ext, ChiMethod method) {
    return cc_function(m, qp_ext, qp_ext.quiver.exchange_matrix(), method);
}

// ---------------------------------------------------------------------------
// Random representations
// ---------------------------------------------------------------------------

std::optional<DecoratedRep> random_rep(const QP& qp_in, const IntVector& dims, std::mt19937& rng) {
    const Quiver& q = qp_in.quiver;
    if (int(dims.size()) != q.num_vertices()) throw Error("ShapeMismatch", "dims need one entry per vertex");
    DecoratedRep m;
    m.dims = dims;
    m.decoration.assign(dims.size(), 0);
    const QP qp = effective_qp(qp_in, m.total_dim());
    std::map<std::string, int> order;
    for (std::size_t i = 0; i < q.arrows().size(); ++i) order[q.arrows()[i].id] = int(i);
    // Each relation is imposed when the last of its arrows is chosen.
    struct Relation {
        PathComb comb;
        int from = 0, to = 0, last = -1;
    };
    std::vector<Relation> rels;
    for (const auto& c : q.arrows()) {
        Relation r;
        r.comb = cyclic_derivative(qp.potential, c.id);
        if (r.comb.empty()) continue;
        r.from = c.to;
        r.to = c.from;
        for (const auto& [path, _] : r.comb)
            for (const auto& id : path) r.last = std::max(r.last, order[id]);
        rels.push_back(std::move(r));
    }
    std::uniform_int_distribution<int> scalar(-2, 2);
    auto random_scalar = [&]() { return Rational(scalar(rng)); };
    std::bernoulli_distribution keep_zero(0.25);
    for (std::size_t idx = 0; idx < q.arrows().size(); ++idx) {
        const Arrow& a = q.arrows()[idx];
        const int rows = dim_at(m, a.to), cols = dim_at(m, a.from);
        const int unknowns = rows * cols;
        m.matrices[a.id] = RatMatrix(rows, cols);
        if (unknowns == 0) continue;
        std::vector<std::vector<Rational>> sys;
        std::vector<Rational> rhs;
        for (const auto& r : rels) {
            if (r.last != int(idx)) continue;
            const int rr = dim_at(m, r.to), rc = dim_at(m, r.from);
            RatMatrix constant(rr, rc);
            std::vector<std::vector<Rational>> lin(std::size_t(rr) * rc, std::vector<Rational>(unknowns));
            for (const auto& [path, coef] : r.comb) {
                const auto hits = std::count(path.begin(), path.end(), a.id);
                if (hits == 0) {
                    constant = constant + path_from(m, q, path, r.from).scaled(coef);
                } else if (hits == 1) {
                    const auto pos = std::find(path.begin(), path.end(), a.id) - path.begin();
                    const RatMatrix before = path_from(m, q, Path(path.begin(), path.begin() + pos), r.from);
                    const RatMatrix after = path_from(m, q, Path(path.begin() + pos + 1, path.end()), a.to);
                    for (int i = 0; i < rr; ++i)
                        for (int j = 0; j < rc; ++j)
                            for (int x = 0; x < rows; ++x)
                                for (int y = 0; y < cols; ++y)
                                    lin[std::size_t(i) * rc + j][x * cols + y] += coef * after(i, x) * before(y, j);
                }
                // Paths through the new arrow twice are left to the final validation.
            }
            for (int i = 0; i < rr; ++i) {
                for (int j = 0; j < rc; ++j) {
                    sys.push_back(lin[std::size_t(i) * rc + j]);
                    rhs.push_back(-constant(i, j));
                }
            }
        }
        RatMatrix sm(int(sys.size()), unknowns);
        for (std::size_t i = 0; i < sys.size(); ++i)
            for (int j = 0; j < unknowns; ++j) sm(int(i), j) = sys[i][j];
        const auto particular = solve(sm, rhs);
        if (!particular) return std::nullopt;
        std::vector<Rational> x = *particular;
        if (!keep_zero(rng)) {
            for (const auto& kv : kernel_basis_rational(sm)) {
                const Rational s = random_scalar();
                for (int j = 0; j < unknowns; ++j) x[j] += s * kv[j];
            }
        }
        RatMatrix& mat = m.matrices[a.id];
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) mat(i, j) = x[i * cols + j];
    }
    if (!validate_rep(m, qp).valid) return std::nullopt;
    return m;
}

bool cc_mutation_identity(const LaurentPoly& before, const LaurentPoly& after, const ExchangeMatrix& b, int k) {
    const int nv = b.n + b.m;
    if (before.num_vars() != nv || after.num_vars() != nv) throw Error("ShapeMismatch", "variable counts differ");
    IntVector plus(nv, 0), minus(nv, 0);
    for (int i = 0; i < nv; ++i) {
        const long long x = b.at(i, k - 1);
        if (x > 0) plus[i] = x;
        if (x < 0) minus[i] = -x;
    }
    const LaurentPoly binomial = LaurentPoly::monomial(plus) + LaurentPoly::monomial(minus);
    long long shift = 0;
    for (const auto& [e, c] : after.terms()) shift = std::max(shift, -e[k - 1]);
    LaurentPoly rhs(nv);
    for (const auto& [e, c] : after.terms()) {
        IntVector mono = e;
        mono[k - 1] = -e[k - 1];
        rhs += LaurentPoly::monomial(mono, c) * binomial.pow(int(e[k - 1] + shift));
    }
    return before * binomial.pow(int(shift)) == rhs;
}

}  // namespace clustercc
