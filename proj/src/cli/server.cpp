#include "clustercc/cli.hpp"
#include "clustercc/error.hpp"

#include "httplib.h"

namespace clustercc::cli {

namespace {

void send(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
    send(res, status, {{"error", code}, {"message", message}});
}

// Runs a handler body and maps engine errors to HTTP statuses.
template <class F>
void guarded(httplib::Response& res, F&& body) {
    try {
        body();
    } catch (const Error& e) {
        const int status = e.code() == "UnknownRep" ? 404 : e.code() == "Conflict" ? 409 : 400;
        send_error(res, status, e.code(), e.what());
    } catch (const nlohmann::json::exception& e) {
        send_error(res, 400, "InvalidJson", e.what());
    } catch (const std::exception& e) {
        send_error(res, 500, "InternalError", e.what());
    }
}

nlohmann::json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return nlohmann::json::object();
    return nlohmann::json::parse(req.body);
}

}  // namespace

void install_routes(httplib::Server& server, SessionStore& store) {
    server.Get("/state", [&store](const httplib::Request&, httplib::Response& res) {
        guarded(res, [&] { send(res, 200, store.read([](const Session& s) { return s.state(); })); });
    });

    // An optional "expectedHistory" (the history length the client last saw)
    // turns a mutation that raced with another one into a 409.
    server.Post("/mutate", [&store](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const nlohmann::json body = parse_body(req);
            if (!body.contains("k") || !body.at("k").is_number_integer()) {
                throw Error("InvalidRequest", "body must be {\"k\": int}");
            }
            const int k = body.at("k").get<int>();
            send(res, 200, store.write([&](Session& s) {
                if (body.contains("expectedHistory") &&
                    body.at("expectedHistory").get<std::size_t>() != s.history().size()) {
                    throw Error("Conflict", "the session changed since the client last read it");
                }
                s.mutate(k);
                return s.state();
            }));
        });
    });

    server.Post("/undo", [&store](const httplib::Request&, httplib::Response& res) {
        guarded(res, [&] {
            send(res, 200, store.write([](Session& s) {
                s.undo();
                return s.state();
            }));
        });
    });

    server.Post("/load", [&store](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            Session loaded = Session::load(parse_body(req));
            send(res, 200, store.write([&](Session& s) {
                s = std::move(loaded);
                return s.state();
            }));
        });
    });

    server.Get("/cc", [&store](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            if (!req.has_param("rep")) throw Error("InvalidRequest", "missing query parameter rep");
            const std::string id = req.get_param_value("rep");
            const ChiMethod method = req.has_param("method") ? parse_chi_method(req.get_param_value("method")) : ChiMethod::Auto;
            send(res, 200, store.read([&](const Session& s) { return s.cc(id, method); }));
        });
    });
}

}  // namespace clustercc::cli
