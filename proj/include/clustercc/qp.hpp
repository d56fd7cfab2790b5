/**
 * @file qp.hpp
 * @brief Quivers with potential: cyclic derivatives, restriction, premutation,
 *        reduction of the degree-two part, gentleness and bypasses.
 *
 * Paths are sequences of arrow ids in application order: (a1, a2, ..., al)
 * applies a1 first, so t(a_i) = s(a_{i+1}); the algebraic product is al...a1.
 * Vertices are 1-based; the first n are mutable, the last m frozen.
 */
#pragma once

#include "clustercc/rational.hpp"
#include "clustercc/seed.hpp"

#include "json.hpp"

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace clustercc {

struct Arrow {
    std::string id;
    int from = 0;
    int to = 0;
    bool operator==(const Arrow& o) const { return id == o.id && from == o.from && to == o.to; }
};

using Path = std::vector<std::string>;
/// Linear combination of paths (or of cycles, when used as a potential).
using PathComb = std::map<Path, Rational>;

class Quiver {
public:
    Quiver() = default;
    Quiver(int n, int m, std::vector<Arrow> arrows);

    int n() const { return n_; }
    int m() const { return m_; }
    int num_vertices() const { return n_ + m_; }
    const std::vector<Arrow>& arrows() const { return arrows_; }

    bool has_arrow(const std::string& id) const { return index_.count(id) > 0; }
    const Arrow& arrow(const std::string& id) const;
    /// Arrows ending (resp. starting) at v, in ascending (other endpoint, id) order.
    std::vector<Arrow> arrows_into(int v) const;
    std::vector<Arrow> arrows_out_of(int v) const;

    int path_source(const Path& p) const;
    int path_target(const Path& p) const;
    bool is_path(const Path& p) const;
    bool is_cycle(const Path& p) const;

    /// Exchange matrix b_ij = #(j -> i) - #(i -> j), rows over all vertices, columns over mutable ones.
    ExchangeMatrix exchange_matrix() const;
    /// Square skew-symmetric matrix over all vertices.
    IntMatrix full_skew_matrix() const;
    bool operator==(const Quiver& o) const { return n_ == o.n_ && m_ == o.m_ && arrows_ == o.arrows_; }

private:
    int n_ = 0;
    int m_ = 0;
    std::vector<Arrow> arrows_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Builds a quiver with b_ij arrows j -> i for every positive entry; ids "a1", "a2", ...
Quiver quiver_from_matrix(const ExchangeMatrix& b);

/// Least lexicographic rotation of a cycle.
Path canonical_rotation(const Path& cycle);
/// Adds c times the cycle to a potential, in canonical rotation.
void add_cycle(PathComb& potential, const Path& cycle, const Rational& c);

struct QP {
    Quiver quiver;
    PathComb potential;  ///< keys are cycles in canonical rotation
    int p = 12;          ///< truncation order for paths

    /// Throws Error("InvalidQP") when a cycle is not a cycle of the quiver, p < 3, etc.
    void validate() const;
    nlohmann::json to_json() const;
    static QP from_json(const nlohmann::json& j);
};

/// Linear combination of paths t(a) -> s(a) obtained by rotating each
/// occurrence of a to the front of its cycle and removing it.
PathComb cyclic_derivative(const PathComb& potential, const std::string& a);

/// Keeps the listed vertices (renumbered in ascending order; keep must be
/// of the form [n'] plus optional frozen vertices, here any subset), drops
/// arrows leaving the set and every potential term through a dropped arrow.
QP restrict_qp(const QP& qp, const std::vector<int>& keep);
/// Restriction to the mutable vertices [n].
QP restrict_to_mutable(const QP& qp);

/// Reversed-arrow id: appends "*", or strips a trailing "*".
std::string reversed_id(const std::string& id);
/// Id of the composite arrow for a (into k) followed by b (out of k).
std::string composite_id(const std::string& a, const std::string& b);

/// Throws Error("TwoCycleAtK") / Error("LoopAtK") / Error("InvalidIndex").
void check_mutable_vertex(const Quiver& q, int k);

QP premutate_qp(const QP& qp, int k);

struct ReductionResult {
    QP reduced;
    /// Removed arrow pairs (the arrows of the trivial part).
    std::vector<std::pair<std::string, std::string>> trivial_pairs;
    /// True when terms above the truncation order were discarded.
    bool truncated = false;
};

/// Splits off the trivial (degree-two) part by a change of arrows followed by
/// degree-by-degree substitution up to path length p. Arrows that survive are
/// never rewritten, so representations restrict to them unchanged.
/// Throws Error("NonSplittable2Cycle") for degree-two terms built from loops.
ReductionResult reduce_qp(const QP& qp);

ReductionResult mutate_qp_full(const QP& qp, int k);
QP mutate_qp(const QP& qp, int k);

/// Outcome of comparing two QPs up to arrow relabeling.
enum class QPComparison { Equal, EqualUpToSigns, Inconclusive, Different };
/// Equal when an endpoint-preserving relabeling of arrows makes the potentials
/// agree; EqualUpToSigns when this also needs some arrows multiplied by -1;
/// Different when the arrow counts between vertices differ; Inconclusive
/// otherwise (a more general change of arrows might still exist).
QPComparison compare_qps(const QP& a, const QP& b);

/// Arrow of a mapped to (arrow of b, sign): a |-> sign * b.
using ArrowMatch = std::map<std::string, std::pair<std::string, int>>;
/// Endpoint-preserving relabelings of arrows, possibly with signs, carrying the
/// potential of a onto the potential of b. Unsigned matches come first; at most
/// `limit` are returned, and none when the search space is too large.
std::vector<ArrowMatch> qp_isomorphisms(const QP& a, const QP& b, std::size_t limit = 16);

/// Relations of a QP: the supports of its nonzero cyclic derivatives.
struct GentleReport {
    bool gentle = false;
    std::string reason;
    std::vector<Path> relations;  ///< length-two paths, application order
};
GentleReport gentle_report(const QP& qp);
bool is_gentle(const QP& qp);

enum class BypassKind { Bypass, AlmostBypass };

struct Bypass {
    Path path;        ///< beta_1, ..., beta_{m-1} in application order
    BypassKind kind = BypassKind::Bypass;
    int source = 0;   ///< s(beta_1)
    int sink = 0;     ///< t(beta_{m-1})
    Path closing;     ///< beta_m, or beta_m, beta_{m+1}
};

/// All bypasses and almost bypasses along vertex-simple relation-avoiding paths
/// of length at most p. Throws Error("NotGentle").
std::vector<Bypass> find_bypasses(const QP& qp);

struct ColumnIdentityReport {
    std::vector<int> columns;  ///< j_1, ..., j_m (1-based)
    IntVector lhs;             ///< sum of the columns
    IntVector rhs;             ///< 2(e_{j_m} - e_{j_1}) or e_{j_m} - e_{j_1}
};
/// Checks the column identity for a bypass. Throws Error("IdentityViolated").
ColumnIdentityReport bypass_column_identity(const QP& qp, const Bypass& bypass);

std::string to_string(BypassKind k);
nlohmann::json to_json(const Bypass& b);
std::string path_to_string(const Path& p);

}  // namespace clustercc
