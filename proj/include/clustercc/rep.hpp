/**
 * @file rep.hpp
 * @brief Decorated representations of quivers with potential: validation,
 *        homomorphisms, g-vectors, the E-invariant, the alpha-beta-gamma
 *        triangle, mutation, quiver Grassmannian Euler characteristics,
 *        F-polynomials and Caldero-Chapoton functions.
 */
#pragma once

#include "clustercc/laurent.hpp"
#include "clustercc/linalg.hpp"
#include "clustercc/qp.hpp"
#include "clustercc/seed.hpp"

#include "json.hpp"

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace clustercc {

/// A representation (one matrix per arrow, of shape d_{t(a)} x d_{s(a)}) together
/// with a decoration vector. Both vectors have one entry per vertex.
struct DecoratedRep {
    IntVector dims;
    IntVector decoration;
    std::map<std::string, RatMatrix> matrices;

    int total_dim() const;
    /// Zero representation with the given decoration.
    static DecoratedRep negative(const Quiver& q, const IntVector& v);
    /// The simple representation S(k) with zero decoration.
    static DecoratedRep simple(const Quiver& q, int k);
    nlohmann::json to_json() const;
    /// Missing matrices are read as zero maps.
    static DecoratedRep from_json(const nlohmann::json& j, const Quiver& q);
};

/// Throws Error("ShapeMismatch") unless dims, decoration and matrix shapes fit the quiver.
void check_shapes(const DecoratedRep& m, const Quiver& q);

/// Matrix of a path (application order) acting on the representation.
RatMatrix path_matrix(const DecoratedRep& m, const Quiver& q, const Path& p);
/// Matrix of a linear combination of paths sharing their endpoints.
RatMatrix comb_matrix(const DecoratedRep& m, const Quiver& q, const PathComb& c);

struct RepValidation {
    bool valid = false;
    bool nilpotent = false;
    bool relations_hold = false;
    std::string reason;
};
RepValidation validate_rep(const DecoratedRep& m, const QP& qp);

/// Default truncation order max(12, total + 2), or CLUSTERCC_TRUNCATION when set.
int default_truncation(int total_dim);
/// Copy of the QP whose truncation order suits a representation of this total
/// dimension: p is raised to total + 2 unless CLUSTERCC_TRUNCATION is set.
/// Throws Error("TruncationTooSmall") when total >= p afterwards.
QP effective_qp(const QP& qp, int total_dim);

/// Basis of the intertwiner space {f : f_{t(a)} M_a = N_a f_{s(a)}}.
std::vector<std::vector<RatMatrix>> hom_basis(const DecoratedRep& m, const DecoratedRep& n, const Quiver& q);
int hom_dim(const DecoratedRep& m, const DecoratedRep& n, const Quiver& q);

/// g-vector over every vertex of the QP from -d_i + v_i + dim Ker d2 at each vertex.
/// Throws Error("TruncationTooSmall") when the total dimension reaches p.
IntVector g_vector(const DecoratedRep& m, const QP& qp);
/// The same vector from dim Hom(S(i), M) and Ext^1(S(i), M), computed through
/// explicit one-point extensions and the general intertwiner solver.
IntVector g_vector_hom_ext(const DecoratedRep& m, const QP& qp);

struct GVectorPair {
    IntVector g;       ///< restricted (vertices of the mutable part)
    IntVector g_ext;   ///< extended (all vertices)
};
/// g from the restriction of qp_ext to its mutable vertices, g_ext from qp_ext.
GVectorPair g_vectors(const DecoratedRep& m, const QP& qp_ext);

/// Restricts a representation supported in the mutable part to those vertices.
DecoratedRep restrict_rep(const DecoratedRep& m, const QP& qp_ext);
/// Extends a representation of the mutable part by zero to the frozen vertices.
DecoratedRep extend_rep(const DecoratedRep& m, const QP& qp_ext);

/// E(M, N) = dim Hom(M, N) + dim(M) . g_N over the QP's vertices.
long long e_invariant(const DecoratedRep& m, const DecoratedRep& n, const QP& qp);

struct TriangleData {
    std::vector<Arrow> ins;   ///< arrows into k: blocks of the in-space
    std::vector<Arrow> outs;  ///< arrows out of k: blocks of the out-space
    RatMatrix alpha;          ///< in-space -> M_k
    RatMatrix beta;           ///< M_k -> out-space
    RatMatrix gamma;          ///< out-space -> in-space
};
/// Throws Error("TwoCycleAtK") / Error("LoopAtK").
TriangleData triangle_maps(const DecoratedRep& m, const QP& qp, int k);

struct RepMutation {
    DecoratedRep rep;
    QP qp;
    DecoratedRep premutated_rep;
    QP premutated_qp;
};
/// Mutation of a decorated representation at k together with its QP.
/// Throws Error("InvalidRep") when validation fails.
RepMutation mutate_rep(const DecoratedRep& m, const QP& qp, int k);

enum class IsoAnswer { Yes, No, ProbablyNo };
std::string to_string(IsoAnswer a);
IsoAnswer is_isomorphic(const DecoratedRep& m, const DecoratedRep& n, const Quiver& q, unsigned seed = 1);

/// Pulls a representation of b back along a match a -> b: M_a = sign * N_{match(a)}.
DecoratedRep transport_rep(const DecoratedRep& n, const ArrowMatch& match);
/// Compares m over qa with n over qb through every relabeling of arrows that
/// identifies the two QPs. Throws Error("Inconclusive") when no such relabeling
/// is found (the QPs may still be right-equivalent by a more general change of arrows).
IsoAnswer isomorphic_across(const DecoratedRep& m, const QP& qa, const DecoratedRep& n, const QP& qb);

/// Compares m over qp with mu_k mu_k m over twice_qp. Mutating twice identifies
/// with the original QP through a right-equivalence that may negate the arrows
/// ending at k, so every relabeling is tried with and without that sign change
/// (the latter only when it preserves the potential). Throws Error("Inconclusive")
/// when no relabeling identifies the two QPs.
IsoAnswer involution_check(const DecoratedRep& m, const QP& qp, const DecoratedRep& twice, const QP& twice_qp, int k);

DecoratedRep direct_sum(const DecoratedRep& m, const DecoratedRep& n, const Quiver& q);

enum class ChiMethod { Auto, FixedPoint, PointCount };
ChiMethod parse_chi_method(const std::string& s);

/// True when every arrow matrix is a partial permutation 0/1 matrix and the
/// coefficient quiver is a forest, so coordinate subrepresentations count chi.
bool fixedpoint_applicable(const DecoratedRep& m, const Quiver& q);

/// Euler characteristic of the quiver Grassmannian Gr_e(M).
/// Errors: "NotApplicable" (fixedpoint on a non-tree module), "TooLarge",
/// "NonPolynomialCount".
long long chi_grassmannian(const DecoratedRep& m, const Quiver& q, const IntVector& e, ChiMethod method = ChiMethod::Auto);

/// Number of e-dimensional subrepresentations over F_q (q prime). Throws
/// Error("BadReduction") when a denominator vanishes mod q.
long long count_subreps_mod_p(const DecoratedRep& m, const Quiver& q, const IntVector& e, long long prime);

/// F_M = sum_e chi(Gr_e(M)) X^e in one variable per mutable vertex (n = qp's n).
LaurentPoly f_polynomial(const DecoratedRep& m, const Quiver& q, ChiMethod method = ChiMethod::Auto);

/// x^{g~} F_M(y-hat) with g~ from qp_ext and y-hat from its exchange matrix.
LaurentPoly cc_function(const DecoratedRep& m, const QP& qp_ext, ChiMethod method = ChiMethod::Auto);
/// The same with an explicit exchange matrix for the y-hat substitution.
LaurentPoly cc_function(const DecoratedRep& m, const QP& qp_ext, const ExchangeMatrix& b, ChiMethod method = ChiMethod::Auto);

/// Random representation satisfying the relations: arrows are chosen one at a
/// time, solving the relations that have become linear in the newest arrow.
/// Returns nothing when the final validation fails.
std::optional<DecoratedRep> random_rep(const QP& qp, const IntVector& dims, std::mt19937& rng);

/// Checks cc(M) against cc(mu_k M) after substituting x_k' = (P+ + P-)/x_k,
/// by clearing the denominator to an exact polynomial identity.
bool cc_mutation_identity(const LaurentPoly& cc_before, const LaurentPoly& cc_after, const ExchangeMatrix& b, int k);

}  // namespace clustercc
