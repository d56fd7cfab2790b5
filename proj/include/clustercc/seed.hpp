/**
 * @file seed.hpp
 * @brief Exchange matrices with frozen rows, seeds, Fomin-Zelevinsky
 *        mutation, cluster variables and the principal-coefficient tools.
 */
#pragma once

#include "clustercc/laurent.hpp"
#include "clustercc/linalg.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace clustercc {

/// Integer (n+m) x n matrix whose top n x n block is skew-symmetric.
struct ExchangeMatrix {
    int n = 0;
    int m = 0;
    IntMatrix rows;

    /// Throws Error("InvalidMatrix") on shape or skew-symmetry violations.
    void validate() const;
    /// The principal n x n block.
    IntMatrix principal() const;
    long long at(int i, int j) const { return rows[i][j]; }  ///< 0-based
    bool operator==(const ExchangeMatrix& o) const { return n == o.n && m == o.m && rows == o.rows; }

    nlohmann::json to_json() const;
    static ExchangeMatrix from_json(const nlohmann::json& j);
    /// Wraps a square skew-symmetric matrix (m = 0).
    static ExchangeMatrix square(const IntMatrix& b);
};

/// Mutates at the 1-based mutable index k. Throws Error("InvalidIndex").
ExchangeMatrix mutate_matrix(const ExchangeMatrix& b, int k);
ExchangeMatrix mutate_matrix(const ExchangeMatrix& b, const std::vector<int>& seq);

/// A rational function stored as numerator / denominator in the initial variables.
struct Fraction {
    LaurentPoly num;
    LaurentPoly den;

    /// Cancels den when it divides num exactly (the Laurent case).
    void normalize();
    bool is_laurent() const;
    bool operator==(const Fraction& o) const;
    std::string to_string() const;
    nlohmann::json to_json() const;
};

struct Seed {
    ExchangeMatrix matrix;
    std::vector<Fraction> cluster;  ///< n + m entries, the last m frozen

    static Seed initial(const ExchangeMatrix& b);
    nlohmann::json to_json() const;
};

/// Exchanges the cluster entry k (1-based) and mutates the matrix.
Seed mutate_seed(const Seed& s, int k);

/// The j-th (1-based) cluster entry after applying seq left to right to the
/// initial seed. Throws Error("NonLaurentResult") if the entry is not Laurent.
LaurentPoly cluster_variable(const ExchangeMatrix& b, const std::vector<int>& seq, int j);

/// All distinct mutable cluster variables reachable by at most depth mutations.
std::vector<LaurentPoly> enumerate_cluster_variables(const ExchangeMatrix& b, int depth);

/// B stacked over the n x n identity.
ExchangeMatrix principal_matrix(const IntMatrix& b);

/// x_j -> x_j for j <= n and y_j = x_{n+j} -> prod_{i>n} x_i^{b_ij}, as a map from
/// the 2n principal-coefficient variables to the n+m variables of b.
MonomialAssignment specialization_phi(const ExchangeMatrix& b);

/// y-hat_j = prod_i x_i^{b_ij} for j = 1..n, as a map from n variables to n+m.
MonomialAssignment yhat_assignment(const ExchangeMatrix& b);

struct IndependenceCertificate {
    bool independent = false;
    KernelConeResult cone;
    std::optional<std::pair<int, int>> repeated_pair;  ///< 0-based positions of equal g-vectors
};

/// The two hypotheses that make CC functions with these g-vectors linearly independent.
IndependenceCertificate certify_independence(const IntMatrix& b, const std::vector<IntVector>& gvectors);

}  // namespace clustercc
