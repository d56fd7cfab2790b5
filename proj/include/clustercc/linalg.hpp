/**
 * @file linalg.hpp
 * @brief Exact rational matrices, echelon forms, kernels, an exact simplex
 *        solver, and the integer-cone questions asked of exchange matrices.
 */
#pragma once

#include "clustercc/rational.hpp"

#include <optional>
#include <string>
#include <vector>

namespace clustercc {

/// Dense row-major matrix of exact rationals. Zero rows or columns are allowed.
class RatMatrix {
public:
    RatMatrix() = default;
    RatMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(std::size_t(rows) * cols) {}

    static RatMatrix identity(int n);
    static RatMatrix from_ints(const IntMatrix& m, int cols_if_empty = 0);
    static RatMatrix from_rows(const std::vector<std::vector<Rational>>& rows, int cols_if_empty = 0);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    Rational& operator()(int r, int c) { return data_[std::size_t(r) * cols_ + c]; }
    const Rational& operator()(int r, int c) const { return data_[std::size_t(r) * cols_ + c]; }

    RatMatrix transpose() const;
    RatMatrix operator*(const RatMatrix& o) const;
    RatMatrix operator+(const RatMatrix& o) const;
    RatMatrix operator-(const RatMatrix& o) const;
    RatMatrix scaled(const Rational& s) const;
    std::vector<Rational> apply(const std::vector<Rational>& v) const;
    bool operator==(const RatMatrix& o) const;
    bool is_zero() const;

    std::vector<Rational> column(int c) const;
    RatMatrix select_columns(const std::vector<int>& cols) const;
    RatMatrix select_rows(const std::vector<int>& rows) const;
    RatMatrix block(int r0, int c0, int nr, int nc) const;
    void set_block(int r0, int c0, const RatMatrix& b);

    /// [A B] and [A; B]; shapes must agree on the shared dimension.
    static RatMatrix hstack(const RatMatrix& a, const RatMatrix& b);
    static RatMatrix vstack(const RatMatrix& a, const RatMatrix& b);
    static RatMatrix from_columns(const std::vector<std::vector<Rational>>& cols, int rows);

    std::string to_string() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Rational> data_;
};

struct RrefResult {
    RatMatrix R;
    int rank = 0;
    std::vector<int> pivots;
};

RrefResult rref(const RatMatrix& a);
int rank(const RatMatrix& a);
int nullity(const RatMatrix& a);

/// Pivot-canonical null-space basis: one vector per free column with that
/// free coordinate 1 and the other free coordinates 0.
std::vector<std::vector<Rational>> kernel_basis_rational(const RatMatrix& a);

/// The same basis cleared to integers with content 1 and first nonzero entry positive.
std::vector<IntVector> kernel_basis(const RatMatrix& a);

/// Rows spanning {y : y A = 0}, pivot-canonical in the sense above.
RatMatrix left_kernel(const RatMatrix& a);

/// Matrix whose columns are the pivot-canonical kernel basis (cols x nullity).
RatMatrix kernel_matrix(const RatMatrix& a);

/// Columns of a that are pivots in its reduced echelon form (a basis of the image).
RatMatrix image_basis(const RatMatrix& a);

/// Some x with A x = b, or nothing when the system is inconsistent.
std::optional<std::vector<Rational>> solve(const RatMatrix& a, const std::vector<Rational>& b);

/// Some X with A X = B (column by column), or nothing.
std::optional<RatMatrix> solve_matrix(const RatMatrix& a, const RatMatrix& b);

/// A left inverse L (L A = I) of a matrix with independent columns.
RatMatrix left_inverse(const RatMatrix& a);

/// A right inverse R (A R = I) of a matrix with independent rows.
RatMatrix right_inverse(const RatMatrix& a);

std::optional<RatMatrix> inverse(const RatMatrix& a);

/// Scales a rational vector to a primitive integer vector with the same direction.
IntVector clear_denominators(const std::vector<Rational>& v);

// ---------------------------------------------------------------------------
// Exact linear programming
// ---------------------------------------------------------------------------

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    std::vector<Rational> x;
    Rational value;
};

/// Maximizes c.x subject to A x = b, x >= 0 with a two-phase simplex
/// using Bland's rule. An empty objective asks for feasibility only.
LpResult lp_maximize(const RatMatrix& a, const std::vector<Rational>& b,
                     const std::vector<Rational>& c = {});

// ---------------------------------------------------------------------------
// Exchange-matrix cone questions
// ---------------------------------------------------------------------------

RatMatrix to_rational(const IntMatrix& m, int cols_if_empty = 0);
bool is_skew_symmetric(const IntMatrix& b);

struct KernelConeResult {
    bool trivial = false;
    /// Nonzero nonnegative integer kernel vector when the cone is not trivial.
    IntVector kernel_witness;
    /// Integer y with (B^T y)_i > 0 for every i when the cone is trivial.
    IntVector positive_witness;
};

/// Decides Ker(B) ∩ Q^n_{>=0} = {0}. Throws Error("InvalidMatrix") unless B is
/// square and skew-symmetric. The returned witness is verified before returning.
KernelConeResult kernel_cone_trivial(const IntMatrix& b);

enum class ConeOutcome { Feasible, Infeasible, UnknownWithinBound };

struct ConeMembership {
    ConeOutcome outcome = ConeOutcome::UnknownWithinBound;
    IntVector u;  ///< set when Feasible
};

/// Searches u in Z^n_{>=0} with B u = t and entries <= bound.
ConeMembership cone_membership(const IntVector& t, const IntMatrix& b, long long bound = 50);

enum class OrderOutcome { Less, Greater, Equal, Incomparable, Unknown };

/// Compares a and b in the order a <= b iff a - b in B(Z^n_{>=0}).
/// Throws Error("NotAPartialOrder") when the kernel cone of B is not trivial.
OrderOutcome order_compare(const IntVector& a, const IntVector& b, const IntMatrix& bmat,
                           long long bound = 50);

std::string to_string(ConeOutcome o);
std::string to_string(OrderOutcome o);

enum class Tri { True, False, Skipped };

struct ConditionsReport {
    Tri c1 = Tri::False;  ///< rank B = n
    Tri c2 = Tri::False;  ///< column condition
    Tri c3 = Tri::False;  ///< Im B meets the open positive orthant
    Tri c4 = Tri::False;  ///< Ker B ∩ Q^n_{>=0} = 0
    Tri c5 = Tri::False;  ///< Ker B ∩ Z^n_{>=0} = 0
    int rank = 0;
    /// For c2: the columns written as combinations of the others and their coefficients.
    std::vector<int> dependent_columns;
    std::vector<std::vector<Rational>> combinations;
    IntVector image_witness;  ///< y with B y > 0 when c3 holds
    KernelConeResult cone;
    bool implications_hold = true;
};

ConditionsReport matrix_conditions_report(const IntMatrix& b);

std::string to_string(Tri t);

}  // namespace clustercc
