#include "clustercc/cli.hpp"
#include "clustercc/error.hpp"

#include <utility>

namespace clustercc::cli {

namespace {

nlohmann::json quiver_json(const Quiver& q) {
    nlohmann::json vertices = nlohmann::json::array();
    for (int v = 1; v <= q.num_vertices(); ++v) vertices.push_back({{"index", v}, {"frozen", v > q.n()}});
    nlohmann::json arrows = nlohmann::json::array();
    for (const auto& a : q.arrows()) arrows.push_back({{"id", a.id}, {"from", a.from}, {"to", a.to}});
    return {{"vertices", vertices}, {"arrows", arrows}};
}

nlohmann::json potential_json(const PathComb& w) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [cycle, c] : w) out.push_back({{"coeff", to_string(c)}, {"cycle", cycle}});
    return out;
}

}  // namespace

Session Session::load(const nlohmann::json& j) {
    if (!j.is_object()) throw Error("InvalidSession", "session must be a JSON object");
    const nlohmann::json& src = j.contains("session") ? j.at("session") : j;
    if (!src.contains("qp") && !src.contains("matrix")) throw Error("InvalidSession", "session needs a matrix or a qp");
    Session s;
    try {
        QP qp;
        ExchangeMatrix b;
        if (src.contains("qp")) {
            qp = QP::from_json(src.at("qp"));
            b = src.contains("matrix") ? ExchangeMatrix::from_json(src.at("matrix")) : qp.quiver.exchange_matrix();
            if (b.n != qp.quiver.n() || b.m != qp.quiver.m()) {
                throw Error("InvalidSession", "matrix and qp disagree on the number of vertices");
            }
        } else {
            b = ExchangeMatrix::from_json(src.at("matrix"));
            qp.quiver = quiver_from_matrix(b);
        }
        s.current_.seed = Seed::initial(b);
        s.current_.qp = qp;
        for (const auto& r : src.value("reps", nlohmann::json::array())) {
            LoadedRep lr;
            lr.id = r.at("id").get<std::string>();
            for (const auto& other : s.current_.reps)
                if (other.id == lr.id) throw Error("InvalidSession", "duplicate representation id " + lr.id);
            DecoratedRep m = DecoratedRep::from_json(r, qp.quiver);
            const RepValidation v = validate_rep(m, qp);
            if (!v.valid) throw Error("InvalidRep", lr.id + ": " + v.reason);
            lr.rep = std::move(m);
            s.current_.reps.push_back(std::move(lr));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error("InvalidSession", e.what());
    }
    s.initial_ = src;
    s.initial_.erase("history");
    for (const auto& k : src.value("history", nlohmann::json::array())) s.mutate(k.get<int>());
    return s;
}

void Session::mutate(int k) {
    const Quiver& q = current_.qp.quiver;
    if (k > q.n() && k <= q.num_vertices()) throw Error("FrozenVertex", "vertex " + std::to_string(k) + " is frozen");
    check_mutable_vertex(q, k);
    Snapshot next;
    next.seed = mutate_seed(current_.seed, k);
    next.qp = mutate_qp(current_.qp, k);
    for (const auto& r : current_.reps) {
        LoadedRep lr{r.id, std::nullopt, r.undefined_reason};
        if (r.rep) {
            try {
                lr.rep = mutate_rep(*r.rep, current_.qp, k).rep;
            } catch (const Error& e) {
                lr.undefined_reason = e.code() + ": " + e.what();
            }
        }
        next.reps.push_back(std::move(lr));
    }
    undo_stack_.push_back(std::move(current_));
    current_ = std::move(next);
    history_.push_back(k);
}

void Session::undo() {
    if (undo_stack_.empty()) throw Error("NothingToUndo", "the history is empty");
    current_ = std::move(undo_stack_.back());
    undo_stack_.pop_back();
    history_.pop_back();
}

nlohmann::json Session::state() const {
    const Seed& seed = current_.seed;
    const QP& qp = current_.qp;
    nlohmann::json cluster = nlohmann::json::array();
    for (const auto& f : seed.cluster) cluster.push_back(f.to_string());
    nlohmann::json blocked = nlohmann::json::array();
    for (int k = 1; k <= qp.quiver.n(); ++k) {
        try {
            check_mutable_vertex(qp.quiver, k);
        } catch (const Error&) {
            blocked.push_back(k);
        }
    }
    nlohmann::json reps = nlohmann::json::array();
    for (const auto& r : current_.reps) {
        nlohmann::json e = {{"id", r.id}, {"defined", r.rep.has_value()}};
        if (r.rep) {
            e["dims"] = r.rep->dims;
            e["decoration"] = r.rep->decoration;
            try {
                const GVectorPair g = g_vectors(*r.rep, qp);
                e["g"] = g.g;
                e["gExt"] = g.g_ext;
            } catch (const Error& err) {
                e["gError"] = err.code();
            }
        } else {
            e["reason"] = r.undefined_reason;
        }
        reps.push_back(e);
    }
    nlohmann::json session = initial_;
    session["history"] = history_;
    return {{"n", seed.matrix.n},
            {"m", seed.matrix.m},
            {"matrix", seed.matrix.rows},
            {"cluster", cluster},
            {"quiver", quiver_json(qp.quiver)},
            {"potential", potential_json(qp.potential)},
            {"blocked", blocked},
            {"reps", reps},
            {"history", history_},
            {"canUndo", !undo_stack_.empty()},
            {"session", session}};
}

nlohmann::json Session::cc(const std::string& rep_id, ChiMethod method) const {
    for (const auto& r : current_.reps) {
        if (r.id != rep_id) continue;
        if (!r.rep) throw Error("RepUndefined", "representation " + rep_id + " is undefined after the mutations: " + r.undefined_reason);
        const LaurentPoly cc = cc_function(*r.rep, current_.qp, method);
        return {{"id", rep_id}, {"cc", cc.to_string()}, {"terms", cc.to_json().at("terms")}, {"history", history_}};
    }
    throw Error("UnknownRep", "no representation with id " + rep_id);
}

nlohmann::json default_session() {
    QP qp;
    qp.quiver = Quiver(3, 1, {{"α", 2, 1}, {"β", 3, 2}, {"γ", 1, 3}, {"δ", 4, 2}, {"ε", 1, 4}});
    add_cycle(qp.potential, {"γ", "β", "α"}, 1);
    add_cycle(qp.potential, {"ε", "δ", "α"}, -1);
    nlohmann::json s2 = DecoratedRep::simple(qp.quiver, 2).to_json();
    s2["id"] = "S2";
    return {{"qp", qp.to_json()}, {"reps", nlohmann::json::array({s2})}};
}

}  // namespace clustercc::cli
