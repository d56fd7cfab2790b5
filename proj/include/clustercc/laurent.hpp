/**
 * @file laurent.hpp
 * @brief Laurent polynomials over Q in a fixed number of variables, together
 *        with monomial substitution homomorphisms.
 */
#pragma once

#include "clustercc/rational.hpp"

#include "json.hpp"

#include <map>
#include <optional>
#include <string>

namespace clustercc {

/// Finite sum of rational multiples of monomials x^e with e in Z^numVars.
/// Zero coefficients are never stored; terms are kept in lexicographic
/// order of exponent vectors, so equality is structural.
class LaurentPoly {
public:
    using Terms = std::map<IntVector, Rational>;

    LaurentPoly() = default;
    explicit LaurentPoly(int num_vars) : num_vars_(num_vars) {}

    static LaurentPoly constant(int num_vars, const Rational& c);
    static LaurentPoly monomial(const IntVector& exps, const Rational& c = 1);
    /// The variable x_i (1-based).
    static LaurentPoly variable(int num_vars, int i);

    int num_vars() const { return num_vars_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_monomial() const { return terms_.size() == 1; }
    /// Coefficient of x^e (zero when absent).
    Rational coeff(const IntVector& e) const;

    void add_term(const IntVector& exps, const Rational& c);

    LaurentPoly operator+(const LaurentPoly& o) const;
    LaurentPoly operator-(const LaurentPoly& o) const;
    LaurentPoly operator-() const;
    LaurentPoly operator*(const LaurentPoly& o) const;
    LaurentPoly scaled(const Rational& c) const;
    LaurentPoly& operator+=(const LaurentPoly& o);
    LaurentPoly& operator*=(const LaurentPoly& o);
    /// Powers; negative exponents only for monomials.
    LaurentPoly pow(int e) const;
    bool operator==(const LaurentPoly& o) const { return num_vars_ == o.num_vars_ && terms_ == o.terms_; }
    bool operator!=(const LaurentPoly& o) const { return !(*this == o); }

    /// Componentwise minimum of the exponents (zero vector for the zero polynomial).
    IntVector min_exponents() const;
    /// Multiplies by the monomial x^e.
    LaurentPoly shifted(const IntVector& e) const;
    /// True when every exponent is nonnegative.
    bool is_polynomial() const;
    /// True when every coefficient is an integer.
    bool has_integer_coefficients() const;

    /// Value at a point with nonzero coordinates.
    Rational evaluate(const std::vector<Rational>& point) const;

    /// Exact quotient f / g in the Laurent ring, or nothing when g does not divide f.
    std::optional<LaurentPoly> divide(const LaurentPoly& g) const;

    /// "c * x1^a x2^b + ..." in term order; "0" for the zero polynomial.
    std::string to_string() const;
    static LaurentPoly parse(const std::string& text, int num_vars);

    nlohmann::json to_json() const;
    static LaurentPoly from_json(const nlohmann::json& j, int num_vars = -1);

private:
    void check_same(const LaurentPoly& o) const;

    int num_vars_ = 0;
    Terms terms_;
};

/// A ring homomorphism x_i -> scalar_i * x^{exps_i} from a Laurent ring in
/// sources.size() variables into one in target_vars variables.
struct MonomialAssignment {
    int target_vars = 0;
    std::vector<IntVector> exps;
    std::vector<Rational> scalars;

    static MonomialAssignment identity(int n);
    nlohmann::json to_json() const;
};

/// Applies the monomial homomorphism. Throws Error("IncompleteAssignment")
/// unless the assignment has exactly one image per variable of f.
LaurentPoly substitute_monomials(const LaurentPoly& f, const MonomialAssignment& sigma);

}  // namespace clustercc
