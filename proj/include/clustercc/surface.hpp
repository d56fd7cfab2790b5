/**
 * @file surface.hpp
 * @brief Combinatorial triangulations of marked surfaces with boundary: signed
 *        adjacency matrices, flips, the nice-triangulation construction with its
 *        column certificates, and the corank check.
 *
 * A triangulation is a list of triangles, each given by its three edge labels
 * in counterclockwise order. A self-folded triangle is written (loop, radius,
 * radius). Boundary edges are grouped by boundary component.
 */
#pragma once

#include "clustercc/linalg.hpp"
#include "clustercc/qp.hpp"
#include "clustercc/rational.hpp"

#include "json.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace clustercc {

struct MarkedSurface {
    int genus = 0;
    IntVector boundary;  ///< number of marked points on each boundary component
    int punctures = 0;

    /// Number of arcs in any triangulation: 6g + 3b + 3p + c - 6.
    int num_arcs() const;
    /// Number of boundary components with an even number of marked points.
    int even_components() const;
    /// Throws Error("InvalidSurface").
    void validate() const;
    nlohmann::json to_json() const;
    static MarkedSurface from_json(const nlohmann::json& j);
};

using Triangle = std::array<std::string, 3>;

struct Triangulation {
    std::vector<std::string> arcs;                   ///< row/column order of B
    std::vector<std::vector<std::string>> boundary;  ///< boundary edges per component, in order
    std::vector<Triangle> triangles;

    std::vector<std::string> boundary_edges() const;
    bool is_self_folded(const Triangle& t) const;
    /// True when the arc is the folded side of a self-folded triangle.
    bool is_radius(const std::string& arc) const;
    int arc_index(const std::string& arc) const;
    /// Throws Error("InvalidTriangulation").
    void validate() const;
    /// Also checks the arc and boundary-edge counts against the surface.
    void validate(const MarkedSurface& s) const;

    nlohmann::json to_json() const;
    static Triangulation from_json(const nlohmann::json& j);
};

/// Signed adjacency matrix over the arcs: each non-self-folded triangle adds +1
/// at (a, b) and -1 at (b, a) for consecutive sides a then b; a radius is
/// replaced by its enclosing loop before counting.
IntMatrix b_matrix(const Triangulation& t);

/// Quiver with potential of a triangulation without self-folded triangles:
/// one vertex per arc, arrows read off B(τ) triangle by triangle with opposite
/// pairs cancelled, and one 3-cycle for each triangle whose sides are all arcs
/// and whose arrows all survive. Throws Error("InvalidTriangulation") when a
/// self-folded triangle is present.
QP triangulation_qp(const Triangulation& t);

/// Replaces the arc by the other diagonal of the quadrilateral formed by its two
/// triangles. The new arc keeps the position; its label toggles a trailing "'"
/// unless a label is given. Throws Error("NotFlippable").
Triangulation flip(const Triangulation& t, const std::string& arc, const std::string& new_label = "");

/// Built-in triangulation with one marked point on each boundary component,
/// for genus 0 with 2, 3 or 4 boundary components. Throws Error("BaseTriangulationRequired").
Triangulation base_triangulation(int genus, int boundary_components);

struct Refinement {
    Triangulation triangulation;
    std::vector<std::string> new_arcs;        ///< i_1, ..., i_{c-1}
    std::vector<std::string> boundary_edges;  ///< the c pieces of the component, in order
};

/// Places c marked points on boundary component kappa (1-based), which must carry
/// exactly one boundary edge, and adds c - 1 arcs inside its triangle.
Refinement refine_boundary(const Triangulation& t, int kappa, int c);

struct PunctureArcs {
    std::string loop;      ///< j_{t,1}
    std::string radius;    ///< j_{t,2}
    std::string diagonal;  ///< j_{t,3}
};

struct PunctureInsertion {
    Triangulation triangulation;
    std::vector<PunctureArcs> punctures;  ///< p_1, ..., p_q
};

/// Adds q punctures next to boundary component kappa, each inside a new
/// self-folded triangle. The last puncture p_q is placed at the corner between
/// the last two boundary pieces of kappa (at the triangle containing both when
/// it exists), the others at the corner that follows the last boundary piece.
PunctureInsertion add_punctures(const Triangulation& t, int kappa, int q);

struct ColumnCertificate {
    std::string arc;  ///< column written as a combination of others
    std::vector<std::pair<std::string, Rational>> terms;
    std::string kind;  ///< "boundary", "puncture" or "coincident"
    nlohmann::json to_json() const;
};

struct NiceTriangulation {
    MarkedSurface surface;
    Triangulation tau0;
    Triangulation tau1;
    Triangulation sigma;
    int kappa = 0;                     ///< boundary component used for the punctures
    std::vector<std::string> dependent;  ///< the set S of the construction
    std::vector<ColumnCertificate> certificates;
    KernelConeResult cone;
    int rank = 0;
    /// "construction" when the proof's pipeline output is certified, otherwise
    /// "flip-search" (sigma was then found by flips from the pipeline output).
    std::string method;
    Triangulation construction_sigma;
    KernelConeResult construction_cone;
    std::vector<std::string> construction_missing;  ///< columns the pipeline could not certify
    nlohmann::json to_json() const;
};

/// Runs the construction: refine every boundary component, flip the last new arc
/// of kappa when punctures are added, insert the punctures, then certify that
/// the kernel cone of B(sigma) is trivial and that every column in S is a
/// nonnegative combination of the columns outside S. When two boundary
/// components with even counts interfere (the refinement of one destroys the
/// bypass around the other) the pipeline output is not nice; a breadth-first
/// flip search from it then finds a triangulation that is, certified by a set S
/// of corank-many columns. Each certificate is verified exactly before returning.
/// Throws Error("ConstructionFailed") when the search limit is reached.
NiceTriangulation build_nice_triangulation(const MarkedSurface& s, const std::optional<Triangulation>& tau0 = std::nullopt);

struct CorankReport {
    int arcs = 0;
    int rank = 0;
    int expected = 0;
    int punctures = 0;
    int even_components = 0;
    nlohmann::json to_json() const;
};

/// Checks rank B(t) = |t| - |P| - c_even. Throws Error("RankMismatch").
CorankReport corank_check(const Triangulation& t, const MarkedSurface& s);

}  // namespace clustercc
