// The JSON/HTTP layer, exercised through a real socket on a free local port.
#include "clustercc/cli.hpp"
#include "clustercc/qp.hpp"

#include "doctest.h"
#include "httplib.h"

#include <thread>

using namespace clustercc;

namespace {

class TestServer {
public:
    explicit TestServer(const nlohmann::json& session) : store_(cli::Session::load(session)) {
        cli::install_routes(server_, store_);
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~TestServer() {
        server_.stop();
        thread_.join();
    }

    httplib::Client client() const { return httplib::Client("127.0.0.1", port_); }

private:
    httplib::Server server_;
    cli::SessionStore store_;
    int port_ = 0;
    std::thread thread_;
};

struct Reply {
    int status = 0;
    nlohmann::json body;
};

Reply get(const TestServer& s, const std::string& path) {
    auto res = s.client().Get(path);
    REQUIRE(res);
    return {res->status, nlohmann::json::parse(res->body)};
}

Reply post(const TestServer& s, const std::string& path, const nlohmann::json& body) {
    auto res = s.client().Post(path, body.dump(), "application/json");
    REQUIRE(res);
    return {res->status, nlohmann::json::parse(res->body)};
}

// Premutating twice at 2 without reducing leaves 2-cycles through the
// neighbours 1 and 3 of vertex 2.
nlohmann::json two_cycle_session() {
    const QP qp = QP::from_json(cli::default_session().at("qp"));
    return {{"qp", premutate_qp(premutate_qp(qp, 2), 2).to_json()}};
}

}  // namespace

TEST_CASE("fresh state of the two-triangle example") {
    TestServer server(cli::default_session());
    const Reply r = get(server, "/state");
    REQUIRE(r.status == 200);
    CHECK(r.body.at("n") == 3);
    CHECK(r.body.at("m") == 1);
    CHECK(r.body.at("cluster") == nlohmann::json({"x1", "x2", "x3", "x4"}));
    CHECK(r.body.at("history").empty());
    CHECK(r.body.at("canUndo") == false);
    CHECK(r.body.at("quiver").at("arrows").size() == 5);
    CHECK(r.body.at("quiver").at("vertices")[3].at("frozen") == true);
    const auto& s2 = r.body.at("reps")[0];
    CHECK(s2.at("id") == "S2");
    CHECK(s2.at("g") == nlohmann::json({0, -1, 1}));
    CHECK(s2.at("gExt") == nlohmann::json({0, -1, 1, 1}));
    // Rationals travel as strings.
    for (const auto& t : r.body.at("potential")) CHECK(t.at("coeff").is_string());
}

TEST_CASE("mutate then undo restores the state; mutating twice is the identity on the seed") {
    TestServer server(cli::default_session());
    const nlohmann::json before = get(server, "/state").body;
    const Reply m = post(server, "/mutate", {{"k", 2}});
    REQUIRE(m.status == 200);
    CHECK(m.body.at("history") == nlohmann::json({2}));
    CHECK(m.body.at("cluster")[1] == "x2^-1 x3 x4 + x1 x2^-1");
    CHECK(m.body.at("reps")[0].at("decoration") == nlohmann::json({0, 1, 0, 0}));
    const Reply u = post(server, "/undo", nlohmann::json::object());
    REQUIRE(u.status == 200);
    CHECK(u.body == before);
    CHECK(post(server, "/undo", nlohmann::json::object()).body.at("error") == "NothingToUndo");

    post(server, "/mutate", {{"k", 2}});
    const Reply twice = post(server, "/mutate", {{"k", 2}});
    CHECK(twice.body.at("cluster") == before.at("cluster"));
    CHECK(twice.body.at("matrix") == before.at("matrix"));
    CHECK(twice.body.at("reps")[0].at("g") == before.at("reps")[0].at("g"));
}

TEST_CASE("invalid vertices are rejected with 400 and leave the state alone") {
    TestServer server(cli::default_session());
    const nlohmann::json before = get(server, "/state").body;
    const Reply frozen = post(server, "/mutate", {{"k", 4}});
    CHECK(frozen.status == 400);
    CHECK(frozen.body.at("error") == "FrozenVertex");
    const Reply range = post(server, "/mutate", {{"k", 9}});
    CHECK(range.status == 400);
    CHECK(range.body.at("error") == "InvalidIndex");
    const Reply malformed = post(server, "/mutate", {{"vertex", 1}});
    CHECK(malformed.status == 400);
    CHECK(get(server, "/state").body == before);
}

TEST_CASE("a vertex on a 2-cycle is blocked with TwoCycleAtK") {
    TestServer server(two_cycle_session());
    const nlohmann::json before = get(server, "/state").body;
    CHECK(before.at("blocked") == nlohmann::json({1, 3}));
    const Reply r = post(server, "/mutate", {{"k", 1}});
    CHECK(r.status == 400);
    CHECK(r.body.at("error") == "TwoCycleAtK");
    CHECK(get(server, "/state").body == before);
}

TEST_CASE("cc endpoint") {
    TestServer server(cli::default_session());
    const Reply r = get(server, "/cc?rep=S2");
    REQUIRE(r.status == 200);
    CHECK(r.body.at("cc") == "x2^-1 x3 x4 + x1 x2^-1");
    CHECK(get(server, "/cc?rep=nope").status == 404);
    CHECK(get(server, "/cc").status == 400);
    post(server, "/mutate", {{"k", 2}});
    // mu_2 S(2) is negative simple, whose CC function is the new cluster variable at 2.
    const Reply after = get(server, "/cc?rep=S2");
    CHECK(after.body.at("cc") == "x2");
}

TEST_CASE("load and replay determinism") {
    TestServer server(cli::default_session());
    for (int k : {2, 1, 3, 2}) REQUIRE(post(server, "/mutate", {{"k", k}}).status == 200);
    const nlohmann::json state = get(server, "/state").body;

    TestServer other(cli::default_session());
    const Reply loaded = post(other, "/load", state.at("session"));
    REQUIRE(loaded.status == 200);
    CHECK(loaded.body == state);
    CHECK(cli::Session::load(state).state() == state);

    const Reply bad = post(other, "/load", {{"reps", nlohmann::json::array()}});
    CHECK(bad.status == 400);
    CHECK(get(other, "/state").body == state);
}

TEST_CASE("stale clients get 409 and concurrent mutations are serialized") {
    TestServer server(cli::default_session());
    const Reply stale = post(server, "/mutate", {{"k", 1}, {"expectedHistory", 3}});
    CHECK(stale.status == 409);
    CHECK(stale.body.at("error") == "Conflict");

    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t)
        threads.emplace_back([&server, t] { post(server, "/mutate", {{"k", t % 3 + 1}}); });
    for (auto& th : threads) th.join();
    const nlohmann::json state = get(server, "/state").body;
    CHECK(state.at("history").size() == 8);
    // Whatever the arrival order was, replaying the recorded history reproduces the state.
    CHECK(cli::Session::load(state.at("session")).state() == state);
}
