/**
 * @file cli.hpp
 * @brief Command-line dispatch and the single-session JSON/HTTP service.
 *
 * The `clustercc` executable is a thin wrapper around run_command; the tests
 * call it in-process. Session holds the explorer state (seed, quiver with
 * potential, loaded representations and the mutation history) and is what the
 * HTTP handlers operate on.
 */
#pragma once

#include "clustercc/qp.hpp"
#include "clustercc/rep.hpp"
#include "clustercc/seed.hpp"

#include "json.hpp"

#include <iosfwd>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace httplib {
class Server;
}

namespace clustercc::cli {

/// Runs one subcommand. args excludes the program name. Returns the exit
/// status; validation errors give 1 and print {"error": code, "message": ...}.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct LoadedRep {
    std::string id;
    std::optional<DecoratedRep> rep;  ///< empty once a mutation left it undefined
    std::string undefined_reason;
};

/// Mutation state of the explorer. Every mutation goes through mutate(), and the
/// history replays deterministically from the initial session JSON.
class Session {
public:
    /// Accepts {"matrix": ..., "qp": ..., "reps": [{"id", "dims", ...}], "history": [...]};
    /// at least one of matrix and qp is required. A given history is replayed.
    static Session load(const nlohmann::json& j);

    /// Throws Error("FrozenVertex"), Error("InvalidIndex") or Error("TwoCycleAtK");
    /// the state is unchanged on error.
    void mutate(int k);
    /// Throws Error("NothingToUndo").
    void undo();

    nlohmann::json state() const;
    /// CC function of a loaded representation over the current QP.
    nlohmann::json cc(const std::string& rep_id, ChiMethod method = ChiMethod::Auto) const;

    const Seed& seed() const { return current_.seed; }
    const QP& qp() const { return current_.qp; }
    const std::vector<int>& history() const { return history_; }

private:
    struct Snapshot {
        Seed seed;
        QP qp;
        std::vector<LoadedRep> reps;
    };
    nlohmann::json initial_;  ///< the loaded session without its history
    Snapshot current_;
    std::vector<Snapshot> undo_stack_;
    std::vector<int> history_;
};

/// Thread-safe holder used by the HTTP layer: mutations (and loads, undos) take
/// an exclusive lock and so run one at a time in arrival order; reads share it.
class SessionStore {
public:
    explicit SessionStore(Session s) : session_(std::move(s)) {}
    template <class F>
    auto read(F&& f) const {
        std::shared_lock lock(mutex_);
        return f(session_);
    }
    template <class F>
    auto write(F&& f) {
        std::unique_lock lock(mutex_);
        return f(session_);
    }

private:
    mutable std::shared_mutex mutex_;
    Session session_;
};

/// Registers GET /state, POST /mutate, POST /undo, POST /load and GET /cc.
void install_routes(httplib::Server& server, SessionStore& store);

/// The session served when none is given: the two-triangle quiver with potential
/// (three mutable vertices, one frozen) with S(2) loaded as "S2".
nlohmann::json default_session();

}  // namespace clustercc::cli
