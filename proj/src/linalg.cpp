#include "clustercc/linalg.hpp"

#include "clustercc/error.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace clustercc {

// ---------------------------------------------------------------------------
// RatMatrix
// ---------------------------------------------------------------------------

RatMatrix RatMatrix::identity(int n) {
    RatMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

RatMatrix RatMatrix::from_ints(const IntMatrix& rows, int cols_if_empty) {
    const int r = int(rows.size());
    const int c = r ? int(rows[0].size()) : cols_if_empty;
    RatMatrix m(r, c);
    for (int i = 0; i < r; ++i) {
        if (int(rows[i].size()) != c) throw Error("ShapeMismatch", "ragged integer matrix");
        for (int j = 0; j < c; ++j) m(i, j) = Rational(static_cast<long>(rows[i][j]));
    }
    return m;
}

RatMatrix RatMatrix::from_rows(const std::vector<std::vector<Rational>>& rows, int cols_if_empty) {
    const int r = int(rows.size());
    const int c = r ? int(rows[0].size()) : cols_if_empty;
    RatMatrix m(r, c);
    for (int i = 0; i < r; ++i) {
        if (int(rows[i].size()) != c) throw Error("ShapeMismatch", "ragged rational matrix");
        for (int j = 0; j < c; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

RatMatrix RatMatrix::transpose() const {
    RatMatrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

RatMatrix RatMatrix::operator*(const RatMatrix& o) const {
    if (cols_ != o.rows_) {
        throw Error("ShapeMismatch", "matrix product of " + std::to_string(rows_) + "x" +
                                         std::to_string(cols_) + " by " + std::to_string(o.rows_) +
                                         "x" + std::to_string(o.cols_));
    }
    RatMatrix p(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i) {
        for (int k = 0; k < cols_; ++k) {
            const Rational& a = (*this)(i, k);
            if (a == 0) continue;
            for (int j = 0; j < o.cols_; ++j) {
                if (o(k, j) != 0) p(i, j) += a * o(k, j);
            }
        }
    }
    return p;
}

RatMatrix RatMatrix::operator+(const RatMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw Error("ShapeMismatch", "matrix sum");
    RatMatrix s(*this);
    for (std::size_t i = 0; i < data_.size(); ++i) s.data_[i] += o.data_[i];
    return s;
}

RatMatrix RatMatrix::operator-(const RatMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw Error("ShapeMismatch", "matrix difference");
    RatMatrix s(*this);
    for (std::size_t i = 0; i < data_.size(); ++i) s.data_[i] -= o.data_[i];
    return s;
}

RatMatrix RatMatrix::scaled(const Rational& f) const {
    RatMatrix s(*this);
    for (auto& x : s.data_) x *= f;
    return s;
}

std::vector<Rational> RatMatrix::apply(const std::vector<Rational>& v) const {
    if (int(v.size()) != cols_) throw Error("ShapeMismatch", "matrix-vector product");
    std::vector<Rational> out(rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j)
            if (v[j] != 0) out[i] += (*this)(i, j) * v[j];
    return out;
}

bool RatMatrix::operator==(const RatMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

bool RatMatrix::is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const Rational& x) { return x == 0; });
}

std::vector<Rational> RatMatrix::column(int c) const {
    std::vector<Rational> v(rows_);
    for (int i = 0; i < rows_; ++i) v[i] = (*this)(i, c);
    return v;
}

RatMatrix RatMatrix::select_columns(const std::vector<int>& cols) const {
    RatMatrix m(rows_, int(cols.size()));
    for (int i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) m(i, int(j)) = (*this)(i, cols[j]);
    return m;
}

RatMatrix RatMatrix::select_rows(const std::vector<int>& rows) const {
    RatMatrix m(int(rows.size()), cols_);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < cols_; ++j) m(int(i), j) = (*this)(rows[i], j);
    return m;
}

RatMatrix RatMatrix::block(int r0, int c0, int nr, int nc) const {
    RatMatrix m(nr, nc);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nc; ++j) m(i, j) = (*this)(r0 + i, c0 + j);
    return m;
}

void RatMatrix::set_block(int r0, int c0, const RatMatrix& b) {
    for (int i = 0; i < b.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

RatMatrix RatMatrix::hstack(const RatMatrix& a, const RatMatrix& b) {
    if (a.rows() != b.rows()) throw Error("ShapeMismatch", "hstack row counts differ");
    RatMatrix m(a.rows(), a.cols() + b.cols());
    m.set_block(0, 0, a);
    m.set_block(0, a.cols(), b);
    return m;
}

RatMatrix RatMatrix::vstack(const RatMatrix& a, const RatMatrix& b) {
    if (a.cols() != b.cols()) throw Error("ShapeMismatch", "vstack column counts differ");
    RatMatrix m(a.rows() + b.rows(), a.cols());
    m.set_block(0, 0, a);
    m.set_block(a.rows(), 0, b);
    return m;
}

RatMatrix RatMatrix::from_columns(const std::vector<std::vector<Rational>>& cols, int rows) {
    RatMatrix m(rows, int(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (int i = 0; i < rows; ++i) m(i, int(j)) = cols[j][i];
    return m;
}

std::string RatMatrix::to_string() const {
    std::string out = "[";
    for (int i = 0; i < rows_; ++i) {
        out += i ? ",[" : "[";
        for (int j = 0; j < cols_; ++j) {
            if (j) out += ",";
            out += clustercc::to_string((*this)(i, j));
        }
        out += "]";
    }
    return out + "]";
}

// ---------------------------------------------------------------------------
// Echelon forms and kernels
// ---------------------------------------------------------------------------

RrefResult rref(const RatMatrix& a) {
    RrefResult res{a, 0, {}};
    RatMatrix& r = res.R;
    int row = 0;
    for (int col = 0; col < r.cols() && row < r.rows(); ++col) {
        int piv = -1;
        for (int i = row; i < r.rows(); ++i) {
            if (r(i, col) != 0) {
                piv = i;
                break;
            }
        }
        if (piv < 0) continue;
        if (piv != row) {
            for (int j = 0; j < r.cols(); ++j) std::swap(r(piv, j), r(row, j));
        }
        const Rational inv = 1 / r(row, col);
        for (int j = col; j < r.cols(); ++j) r(row, j) *= inv;
        for (int i = 0; i < r.rows(); ++i) {
            if (i == row || r(i, col) == 0) continue;
            const Rational f = r(i, col);
            for (int j = col; j < r.cols(); ++j) {
                if (r(row, j) != 0) r(i, j) -= f * r(row, j);
            }
        }
        res.pivots.push_back(col);
        ++row;
    }
    res.rank = row;
    return res;
}

int rank(const RatMatrix& a) { return a.empty() ? 0 : rref(a).rank; }

int nullity(const RatMatrix& a) { return a.cols() - rank(a); }

std::vector<std::vector<Rational>> kernel_basis_rational(const RatMatrix& a) {
    const auto rr = rref(a);
    std::vector<char> is_pivot(a.cols(), 0);
    for (int p : rr.pivots) is_pivot[p] = 1;
    std::vector<std::vector<Rational>> basis;
    for (int f = 0; f < a.cols(); ++f) {
        if (is_pivot[f]) continue;
        std::vector<Rational> v(a.cols());
        v[f] = 1;
        for (int i = 0; i < rr.rank; ++i) v[rr.pivots[i]] = -rr.R(i, f);
        basis.push_back(std::move(v));
    }
    return basis;
}

IntVector clear_denominators(const std::vector<Rational>& v) {
    Integer lcm = 1;
    for (const auto& x : v) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), x.get_den_mpz_t());
    std::vector<Integer> ints;
    Integer g = 0;
    for (const auto& x : v) {
        Integer n = x.get_num() * (lcm / x.get_den());
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
        ints.push_back(n);
    }
    IntVector out;
    for (auto& n : ints) {
        if (g != 0) n /= g;
        if (!n.fits_slong_p()) throw Error("Overflow", "integer vector entry overflows");
        out.push_back(n.get_si());
    }
    return out;
}

std::vector<IntVector> kernel_basis(const RatMatrix& a) {
    std::vector<IntVector> out;
    for (const auto& v : kernel_basis_rational(a)) {
        IntVector iv = clear_denominators(v);
        auto first = std::find_if(iv.begin(), iv.end(), [](long long x) { return x != 0; });
        if (first != iv.end() && *first < 0) {
            for (auto& x : iv) x = -x;
        }
        out.push_back(std::move(iv));
    }
    return out;
}

RatMatrix kernel_matrix(const RatMatrix& a) {
    return RatMatrix::from_columns(kernel_basis_rational(a), a.cols());
}

RatMatrix left_kernel(const RatMatrix& a) {
    const auto basis = kernel_basis_rational(a.transpose());
    RatMatrix m(int(basis.size()), a.rows());
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (int j = 0; j < a.rows(); ++j) m(int(i), j) = basis[i][j];
    return m;
}

RatMatrix image_basis(const RatMatrix& a) {
    if (a.empty()) return RatMatrix(a.rows(), 0);
    return a.select_columns(rref(a).pivots);
}

std::optional<std::vector<Rational>> solve(const RatMatrix& a, const std::vector<Rational>& b) {
    if (int(b.size()) != a.rows()) throw Error("ShapeMismatch", "right-hand side length");
    RatMatrix aug(a.rows(), a.cols() + 1);
    aug.set_block(0, 0, a);
    for (int i = 0; i < a.rows(); ++i) aug(i, a.cols()) = b[i];
    const auto rr = rref(aug);
    if (!rr.pivots.empty() && rr.pivots.back() == a.cols()) return std::nullopt;
    std::vector<Rational> x(a.cols());
    for (int i = 0; i < rr.rank; ++i) x[rr.pivots[i]] = rr.R(i, a.cols());
    return x;
}

std::optional<RatMatrix> solve_matrix(const RatMatrix& a, const RatMatrix& b) {
    RatMatrix x(a.cols(), b.cols());
    for (int j = 0; j < b.cols(); ++j) {
        auto col = solve(a, b.column(j));
        if (!col) return std::nullopt;
        for (int i = 0; i < a.cols(); ++i) x(i, j) = (*col)[i];
    }
    return x;
}

std::optional<RatMatrix> inverse(const RatMatrix& a) {
    if (a.rows() != a.cols()) return std::nullopt;
    const int n = a.rows();
    const auto rr = rref(RatMatrix::hstack(a, RatMatrix::identity(n)));
    if (rr.rank < n || (n > 0 && rr.pivots[n - 1] >= n)) return std::nullopt;
    return rr.R.block(0, n, n, n);
}

RatMatrix left_inverse(const RatMatrix& a) {
    if (a.cols() == 0) return RatMatrix(0, a.rows());
    const RatMatrix at = a.transpose();
    auto inv = inverse(at * a);
    if (!inv) throw Error("Singular", "left inverse of a matrix with dependent columns");
    return *inv * at;
}

RatMatrix right_inverse(const RatMatrix& a) {
    if (a.rows() == 0) return RatMatrix(a.cols(), 0);
    const RatMatrix at = a.transpose();
    auto inv = inverse(a * at);
    if (!inv) throw Error("Singular", "right inverse of a matrix with dependent rows");
    return at * *inv;
}

// ---------------------------------------------------------------------------
// Two-phase simplex over Q with Bland's rule
// ---------------------------------------------------------------------------

namespace {

struct Simplex {
    int m = 0;                                ///< constraint rows
    int n = 0;                                ///< columns including artificials
    std::vector<std::vector<Rational>> t;     ///< m rows of n coefficients + rhs
    std::vector<Rational> cost;               ///< reduced costs (n entries) for maximization
    std::vector<int> basis;
    std::vector<char> banned;                 ///< columns never allowed to enter

    void pivot(int r, int c) {
        const Rational inv = 1 / t[r][c];
        for (auto& x : t[r]) x *= inv;
        for (int i = 0; i < m; ++i) {
            if (i == r || t[i][c] == 0) continue;
            const Rational f = t[i][c];
            for (int j = 0; j <= n; ++j)
                if (t[r][j] != 0) t[i][j] -= f * t[r][j];
        }
        if (cost[c] != 0) {
            const Rational f = cost[c];
            for (int j = 0; j < n; ++j)
                if (t[r][j] != 0) cost[j] -= f * t[r][j];
        }
        basis[r] = c;
    }

    /// Returns false when the objective is unbounded.
    bool optimize() {
        for (;;) {
            int enter = -1;
            for (int j = 0; j < n; ++j) {
                if (!banned[j] && cost[j] > 0) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return true;
            int leave = -1;
            Rational best;
            for (int i = 0; i < m; ++i) {
                if (t[i][enter] <= 0) continue;
                Rational ratio = t[i][n] / t[i][enter];
                if (leave < 0 || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter);
        }
    }

    void set_objective(const std::vector<Rational>& c) {
        cost.assign(n, 0);
        for (std::size_t j = 0; j < c.size(); ++j) cost[j] = c[j];
        for (int i = 0; i < m; ++i) {
            const Rational cb = basis[i] < int(c.size()) ? c[basis[i]] : Rational(0);
            if (cb == 0) continue;
            for (int j = 0; j < n; ++j)
                if (t[i][j] != 0) cost[j] -= cb * t[i][j];
        }
    }
};

}  // namespace

LpResult lp_maximize(const RatMatrix& a, const std::vector<Rational>& b, const std::vector<Rational>& c) {
    const int m = a.rows();
    const int nv = a.cols();
    if (int(b.size()) != m) throw Error("ShapeMismatch", "LP right-hand side length");
    Simplex s;
    s.m = m;
    s.n = nv + m;
    s.t.assign(m, std::vector<Rational>(s.n + 1));
    s.basis.resize(m);
    s.banned.assign(s.n, 0);
    for (int i = 0; i < m; ++i) {
        const bool flip = b[i] < 0;
        for (int j = 0; j < nv; ++j) s.t[i][j] = flip ? Rational(-a(i, j)) : a(i, j);
        s.t[i][nv + i] = 1;
        s.t[i][s.n] = flip ? Rational(-b[i]) : b[i];
        s.basis[i] = nv + i;
    }
    // Phase 1: maximize minus the sum of artificials.
    std::vector<Rational> phase1(s.n, 0);
    for (int i = 0; i < m; ++i) phase1[nv + i] = -1;
    s.set_objective(phase1);
    s.optimize();
    Rational infeas = 0;
    for (int i = 0; i < m; ++i)
        if (s.basis[i] >= nv) infeas += s.t[i][s.n];
    LpResult res;
    if (infeas != 0) {
        res.status = LpStatus::Infeasible;
        return res;
    }
    // Drive remaining artificials out of the basis; drop redundant rows.
    for (int i = 0; i < s.m; ++i) {
        if (s.basis[i] < nv) continue;
        int col = -1;
        for (int j = 0; j < nv; ++j) {
            if (s.t[i][j] != 0) {
                col = j;
                break;
            }
        }
        if (col >= 0) {
            s.pivot(i, col);
        } else {
            s.t.erase(s.t.begin() + i);
            s.basis.erase(s.basis.begin() + i);
            --s.m;
            --i;
        }
    }
    for (int j = nv; j < s.n; ++j) s.banned[j] = 1;
    res.status = LpStatus::Optimal;
    if (!c.empty()) {
        if (int(c.size()) != nv) throw Error("ShapeMismatch", "LP objective length");
        s.set_objective(c);
        if (!s.optimize()) {
            res.status = LpStatus::Unbounded;
            return res;
        }
    }
    res.x.assign(nv, 0);
    for (int i = 0; i < s.m; ++i)
        if (s.basis[i] < nv) res.x[s.basis[i]] = s.t[i][s.n];
    res.value = 0;
    for (std::size_t j = 0; j < c.size(); ++j) res.value += c[j] * res.x[j];
    return res;
}

// ---------------------------------------------------------------------------
// Cone questions
// ---------------------------------------------------------------------------

RatMatrix to_rational(const IntMatrix& m, int cols_if_empty) { return RatMatrix::from_ints(m, cols_if_empty); }

bool is_skew_symmetric(const IntMatrix& b) {
    const std::size_t n = b.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (b[i].size() != n) return false;
        for (std::size_t j = 0; j < n; ++j)
            if (b[i][j] != -b[j][i]) return false;
    }
    return true;
}

namespace {

void require_skew(const IntMatrix& b) {
    if (!is_skew_symmetric(b)) throw Error("InvalidMatrix", "expected a square skew-symmetric matrix");
}

IntVector mat_vec(const IntMatrix& b, const IntVector& u) {
    IntVector out(b.size(), 0);
    for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t j = 0; j < u.size(); ++j) out[i] += b[i][j] * u[j];
    return out;
}

/// Finds y with B y >= 1 componentwise (y free); returns nothing when infeasible.
std::optional<IntVector> positive_image_vector(const IntMatrix& b) {
    const int n = int(b.size());
    // Variables: y+ (n), y- (n), slack s (n):  B y+ - B y- - s = 1.
    RatMatrix a(n, 3 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            a(i, j) = Rational(static_cast<long>(b[i][j]));
            a(i, n + j) = Rational(static_cast<long>(-b[i][j]));
        }
        a(i, 2 * n + i) = -1;
    }
    auto res = lp_maximize(a, std::vector<Rational>(n, 1));
    if (res.status != LpStatus::Optimal) return std::nullopt;
    std::vector<Rational> y(n);
    for (int j = 0; j < n; ++j) y[j] = res.x[j] - res.x[n + j];
    return clear_denominators(y);
}

}  // namespace

KernelConeResult kernel_cone_trivial(const IntMatrix& b) {
    require_skew(b);
    const int n = int(b.size());
    KernelConeResult out;
    if (n == 0) {
        out.trivial = true;
        return out;
    }
    // Is there x >= 0 with B x = 0 and sum x = 1?
    RatMatrix a(n + 1, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = Rational(static_cast<long>(b[i][j]));
    for (int j = 0; j < n; ++j) a(n, j) = 1;
    std::vector<Rational> rhs(n + 1, 0);
    rhs[n] = 1;
    auto res = lp_maximize(a, rhs);
    if (res.status == LpStatus::Optimal) {
        out.trivial = false;
        out.kernel_witness = clear_denominators(res.x);
        const IntVector image = mat_vec(b, out.kernel_witness);
        const bool ok = std::all_of(image.begin(), image.end(), [](long long v) { return v == 0; }) &&
                        std::all_of(out.kernel_witness.begin(), out.kernel_witness.end(),
                                    [](long long v) { return v >= 0; });
        if (!ok) throw Error("InternalError", "kernel witness failed verification");
        return out;
    }
    // Farkas alternative: B^T y > 0, i.e. B(-y) > 0 for skew-symmetric B.
    auto y = positive_image_vector(b);
    if (!y) throw Error("InternalError", "neither kernel witness nor Farkas witness found");
    IntMatrix bt(n, IntVector(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) bt[i][j] = b[j][i];
    IntVector w(n);
    for (int i = 0; i < n; ++i) w[i] = -(*y)[i];
    const IntVector check = mat_vec(bt, w);
    if (!std::all_of(check.begin(), check.end(), [](long long v) { return v > 0; })) {
        throw Error("InternalError", "Farkas witness failed verification");
    }
    out.trivial = true;
    out.positive_witness = w;
    return out;
}

ConeMembership cone_membership(const IntVector& t, const IntMatrix& b, long long bound) {
    if (bound <= 0) throw Error("InvalidArgument", "bound must be positive");
    const int rows = int(b.size());
    const int n = rows ? int(b[0].size()) : int(t.size());
    if (int(t.size()) != rows) throw Error("ShapeMismatch", "target length differs from row count");
    ConeMembership out;
    if (std::all_of(t.begin(), t.end(), [](long long v) { return v == 0; })) {
        out.outcome = ConeOutcome::Feasible;
        out.u.assign(n, 0);
        return out;
    }
    const RatMatrix a = RatMatrix::from_ints(b, n);
    std::vector<Rational> rhs;
    for (long long v : t) rhs.emplace_back(static_cast<long>(v));
    if (!solve(a, rhs)) {
        out.outcome = ConeOutcome::Infeasible;
        return out;
    }
    if (lp_maximize(a, rhs).status == LpStatus::Infeasible) {
        out.outcome = ConeOutcome::Infeasible;
        return out;
    }
    // Parametrize integer solutions by free variables of the echelon form.
    RatMatrix aug(rows, n + 1);
    aug.set_block(0, 0, a);
    for (int i = 0; i < rows; ++i) aug(i, n) = rhs[i];
    const auto rr = rref(aug);
    std::vector<char> is_pivot(n, 0);
    for (int p : rr.pivots) is_pivot[p] = 1;
    std::vector<int> free_vars;
    for (int j = 0; j < n; ++j)
        if (!is_pivot[j]) free_vars.push_back(j);
    const int k = int(free_vars.size());
    // pivot value = R(i,n) - sum_f R(i,f) u_f
    std::vector<long long> assign(k, 0);
    bool found = false;
    bool exhausted = true;
    long long budget = 20'000'000;
    const Rational rbound(static_cast<long>(bound));
    std::function<void(int)> dfs = [&](int depth) {
        if (found || !exhausted) return;
        if (--budget < 0) {
            exhausted = false;
            return;
        }
        // Range check on every pivot variable given the partial assignment.
        for (int i = 0; i < rr.rank; ++i) {
            Rational lo = rr.R(i, n), hi = rr.R(i, n);
            for (int f = 0; f < k; ++f) {
                const Rational& c = rr.R(i, free_vars[f]);
                if (c == 0) continue;
                if (f < depth) {
                    const Rational d = c * Rational(static_cast<long>(assign[f]));
                    lo -= d;
                    hi -= d;
                } else if (c > 0) {
                    lo -= c * rbound;
                } else {
                    hi -= c * rbound;
                }
            }
            if (hi < 0 || lo > rbound) return;
        }
        if (depth == k) {
            IntVector u(n, 0);
            for (int f = 0; f < k; ++f) u[free_vars[f]] = assign[f];
            for (int i = 0; i < rr.rank; ++i) {
                Rational v = rr.R(i, n);
                for (int f = 0; f < k; ++f) v -= rr.R(i, free_vars[f]) * Rational(static_cast<long>(assign[f]));
                if (v.get_den() != 1 || v < 0 || v > rbound) return;
                u[rr.pivots[i]] = v.get_num().get_si();
            }
            out.u = u;
            found = true;
            return;
        }
        for (long long x = 0; x <= bound && !found && exhausted; ++x) {
            assign[depth] = x;
            dfs(depth + 1);
        }
    };
    dfs(0);
    if (found) {
        out.outcome = ConeOutcome::Feasible;
        return out;
    }
    // The search proves emptiness when the polytope {x >= 0 : Bx = t} lies in the box.
    bool bounded_in_box = exhausted;
    for (int j = 0; j < n && bounded_in_box; ++j) {
        std::vector<Rational> c(n, 0);
        c[j] = 1;
        auto res = lp_maximize(a, rhs, c);
        if (res.status != LpStatus::Optimal || res.value > rbound) bounded_in_box = false;
    }
    out.outcome = bounded_in_box ? ConeOutcome::Infeasible : ConeOutcome::UnknownWithinBound;
    return out;
}

OrderOutcome order_compare(const IntVector& a, const IntVector& b, const IntMatrix& bmat, long long bound) {
    if (a.size() != b.size() || a.size() != bmat.size()) throw Error("ShapeMismatch", "order_compare lengths");
    if (!kernel_cone_trivial(bmat).trivial) {
        throw Error("NotAPartialOrder", "Ker(B) meets the nonnegative orthant; the relation is not antisymmetric");
    }
    if (a == b) return OrderOutcome::Equal;
    IntVector d1(a.size()), d2(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        d1[i] = a[i] - b[i];
        d2[i] = b[i] - a[i];
    }
    const auto r1 = cone_membership(d1, bmat, bound);
    if (r1.outcome == ConeOutcome::Feasible) return OrderOutcome::Less;
    const auto r2 = cone_membership(d2, bmat, bound);
    if (r2.outcome == ConeOutcome::Feasible) return OrderOutcome::Greater;
    if (r1.outcome == ConeOutcome::Infeasible && r2.outcome == ConeOutcome::Infeasible) {
        return OrderOutcome::Incomparable;
    }
    return OrderOutcome::Unknown;
}

std::string to_string(ConeOutcome o) {
    switch (o) {
        case ConeOutcome::Feasible: return "Feasible";
        case ConeOutcome::Infeasible: return "Infeasible";
        default: return "UnknownWithinBound";
    }
}

std::string to_string(OrderOutcome o) {
    switch (o) {
        case OrderOutcome::Less: return "Less";
        case OrderOutcome::Greater: return "Greater";
        case OrderOutcome::Equal: return "Equal";
        case OrderOutcome::Incomparable: return "Incomparable";
        default: return "Unknown";
    }
}

std::string to_string(Tri t) {
    switch (t) {
        case Tri::True: return "true";
        case Tri::False: return "false";
        default: return "skipped";
    }
}

ConditionsReport matrix_conditions_report(const IntMatrix& b) {
    require_skew(b);
    const int n = int(b.size());
    ConditionsReport rep;
    const RatMatrix a = RatMatrix::from_ints(b, n);
    rep.rank = rank(a);
    rep.c1 = rep.rank == n ? Tri::True : Tri::False;

    // (2): some rank-sized set of columns spans, and every other column is a
    // nonnegative combination of it (the combination is unique).
    if (n > 12) {
        rep.c2 = Tri::Skipped;
    } else {
        bool zero_col = false;
        for (int j = 0; j < n; ++j) {
            bool all0 = true;
            for (int i = 0; i < n; ++i) all0 = all0 && b[i][j] == 0;
            zero_col = zero_col || all0;
        }
        rep.c2 = Tri::False;
        if (!zero_col) {
            const int r = rep.rank;
            std::vector<int> pick(n, 0);
            std::fill(pick.begin(), pick.begin() + r, 1);
            // Iterate subsets in lexicographic order of chosen indices.
            std::vector<int> sel(r);
            std::iota(sel.begin(), sel.end(), 0);
            bool more = true;
            while (more) {
                const RatMatrix basis = a.select_columns(sel);
                if (rank(basis) == r) {
                    std::vector<int> rest;
                    for (int j = 0; j < n; ++j)
                        if (!std::binary_search(sel.begin(), sel.end(), j)) rest.push_back(j);
                    bool ok = true;
                    std::vector<std::vector<Rational>> combos;
                    for (int d : rest) {
                        auto x = solve(basis, a.column(d));
                        if (!x || std::any_of(x->begin(), x->end(), [](const Rational& v) { return v < 0; })) {
                            ok = false;
                            break;
                        }
                        std::vector<Rational> full(n, 0);
                        for (int i = 0; i < r; ++i) full[sel[i]] = (*x)[i];
                        combos.push_back(full);
                    }
                    if (ok) {
                        rep.c2 = Tri::True;
                        rep.dependent_columns = rest;
                        rep.combinations = combos;
                        break;
                    }
                }
                // next combination
                int i = r - 1;
                while (i >= 0 && sel[i] == n - r + i) --i;
                if (i < 0) {
                    more = false;
                } else {
                    ++sel[i];
                    for (int j = i + 1; j < r; ++j) sel[j] = sel[j - 1] + 1;
                }
                if (r == 0) more = false;
            }
        }
    }

    if (auto y = positive_image_vector(b)) {
        rep.c3 = Tri::True;
        rep.image_witness = *y;
    } else {
        rep.c3 = Tri::False;
    }
    rep.cone = kernel_cone_trivial(b);
    rep.c4 = rep.cone.trivial ? Tri::True : Tri::False;
    rep.c5 = rep.c4;

    auto implies = [](Tri p, Tri q) { return p != Tri::True || q != Tri::False; };
    rep.implications_hold = implies(rep.c1, rep.c2) && implies(rep.c2, rep.c3) && implies(rep.c3, rep.c4) &&
                            implies(rep.c1, rep.c3) && implies(rep.c1, rep.c4) && implies(rep.c2, rep.c4) &&
                            rep.c4 == rep.c5;
    return rep;
}

}  // namespace clustercc
