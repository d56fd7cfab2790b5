// Shared quivers with potential used across the unit tests.
#pragma once

#include "clustercc/qp.hpp"

namespace fixtures {

using namespace clustercc;

// Two triangles glued along alpha: gamma:1->3, beta:3->2, alpha:2->1 and
// eps:1->4, delta:4->2 with potential alpha beta gamma - alpha delta eps.
// Vertices 1..3 are mutable and 4 is frozen.
inline QP two_triangles() {
    QP qp;
    qp.quiver = Quiver(3, 1, {{"α", 2, 1}, {"β", 3, 2}, {"γ", 1, 3}, {"δ", 4, 2}, {"ε", 1, 4}});
    add_cycle(qp.potential, {"γ", "β", "α"}, 1);
    add_cycle(qp.potential, {"ε", "δ", "α"}, -1);
    return qp;
}

inline QP three_cycle() {
    QP qp;
    qp.quiver = Quiver(3, 0, {{"α", 2, 1}, {"β", 3, 2}, {"γ", 1, 3}});
    add_cycle(qp.potential, {"γ", "β", "α"}, 1);
    return qp;
}

inline QP a2() {
    QP qp;
    qp.quiver = Quiver(2, 0, {{"a", 2, 1}});
    return qp;
}

// Two mutable vertices and one frozen vertex with exchange matrix
// [[0,1],[-1,0],[1,-1]]: alpha:2->1, gamma:1->3, beta:3->2. With
// `with_potential` the 3-cycle carries coefficient 1, otherwise the potential is 0.
inline QP frozen_triangle(bool with_potential) {
    QP qp;
    qp.quiver = Quiver(2, 1, {{"α", 2, 1}, {"γ", 1, 3}, {"β", 3, 2}});
    if (with_potential) add_cycle(qp.potential, {"γ", "β", "α"}, 1);
    return qp;
}

// Principal extension of the three-cycle: one arrow j -> j' per mutable vertex.
inline QP three_cycle_principal() {
    QP qp;
    qp.quiver = Quiver(3, 3, {{"α", 2, 1}, {"β", 3, 2}, {"γ", 1, 3}, {"p1", 1, 4}, {"p2", 2, 5}, {"p3", 3, 6}});
    add_cycle(qp.potential, {"γ", "β", "α"}, 1);
    return qp;
}

}  // namespace fixtures
