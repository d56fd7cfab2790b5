#include "clustercc/cli.hpp"
#include "clustercc/error.hpp"
#include "clustercc/linalg.hpp"
#include "clustercc/properties.hpp"
#include "clustercc/surface.hpp"

#include "CLI11.hpp"
#include "httplib.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

namespace clustercc::cli {

namespace {

struct Output {
    nlohmann::json json;
    std::string text;
    int status = 0;
};

struct GlobalOptions {
    bool json = false;
    std::optional<int> truncation;
    long long bound = 50;
    std::string method = "auto";
};

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("FileError", "cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error("ParseError", path + ": " + e.what());
    }
}

nlohmann::json matrix_rows_json(const nlohmann::json& j) { return j.is_array() ? j : j.at("rows"); }

IntMatrix read_int_matrix(const std::string& path) { return matrix_rows_json(read_json(path)).get<IntMatrix>(); }

ExchangeMatrix read_exchange_matrix(const std::string& path) {
    const nlohmann::json j = read_json(path);
    return ExchangeMatrix::from_json(j.is_array() ? nlohmann::json{{"rows", j}} : j);
}

std::string matrix_text(const IntMatrix& rows) {
    std::ostringstream os;
    for (const auto& r : rows) {
        for (std::size_t j = 0; j < r.size(); ++j) os << (j ? " " : "") << r[j];
        os << "\n";
    }
    return os.str();
}

std::string vector_text(const IntVector& v) { return to_string(v); }

class Context {
public:
    explicit Context(const GlobalOptions& g) : g_(g) {
        if (g_.truncation) {
            if (*g_.truncation < 3) throw Error("InvalidArgument", "truncation order must be at least 3");
            // The flag wins over the environment, which the engine reads for its
            // default; the previous value is restored when the command ends.
            if (const char* old = std::getenv("CLUSTERCC_TRUNCATION")) saved_env_ = old;
            setenv("CLUSTERCC_TRUNCATION", std::to_string(*g_.truncation).c_str(), 1);
        }
    }
    ~Context() {
        if (!g_.truncation) return;
        if (saved_env_) setenv("CLUSTERCC_TRUNCATION", saved_env_->c_str(), 1);
        else unsetenv("CLUSTERCC_TRUNCATION");
    }
    Context(const Context&) = delete;
    Context& operator=(const Context&) = delete;

    QP qp(const std::string& path) const {
        nlohmann::json j = read_json(path);
        if (g_.truncation) j["p"] = *g_.truncation;
        else if (!j.contains("p") || std::getenv("CLUSTERCC_TRUNCATION")) j["p"] = default_truncation(0);
        try {
            return QP::from_json(j);
        } catch (const nlohmann::json::exception& e) {
            throw Error("InvalidQP", path + ": " + e.what());
        }
    }

    DecoratedRep rep(const std::string& path, const QP& qp) const {
        try {
            DecoratedRep m = DecoratedRep::from_json(read_json(path), qp.quiver);
            const RepValidation v = validate_rep(m, qp);
            if (!v.valid) throw Error("InvalidRep", path + ": " + v.reason);
            return m;
        } catch (const nlohmann::json::exception& e) {
            throw Error("InvalidRep", path + ": " + e.what());
        }
    }

    ChiMethod method() const { return parse_chi_method(g_.method); }
    long long bound() const { return g_.bound; }

private:
    GlobalOptions g_;
    std::optional<std::string> saved_env_;
};

// A representation given over the extended QP, with the mutable part checked
// against the separately supplied QP when both are present.
struct RepInput {
    QP qp;                   ///< QP the representation lives on
    std::optional<QP> part;  ///< mutable part when an extended QP was given
    DecoratedRep rep;
};

RepInput read_rep_input(const Context& ctx, const std::string& qp_path, const std::string& ext_path, const std::string& rep_path) {
    if (qp_path.empty() && ext_path.empty()) throw Error("InvalidArgument", "--qp or --ext is required");
    RepInput in;
    if (ext_path.empty()) {
        in.qp = ctx.qp(qp_path);
    } else {
        in.qp = ctx.qp(ext_path);
        QP part = restrict_to_mutable(in.qp);
        if (!qp_path.empty()) {
            const QP given = ctx.qp(qp_path);
            if (compare_qps(given, part) == QPComparison::Different) {
                throw Error("ShapeMismatch", "--qp is not the mutable part of --ext");
            }
        }
        in.part = part;
    }
    in.rep = ctx.rep(rep_path, in.qp);
    return in;
}

std::string tri_text(Tri t) { return to_string(t); }

nlohmann::json conditions_json(const ConditionsReport& r) {
    nlohmann::json combos = nlohmann::json::array();
    for (std::size_t i = 0; i < r.dependent_columns.size(); ++i) {
        nlohmann::json coeffs = nlohmann::json::array();
        for (const auto& c : r.combinations[i]) coeffs.push_back(to_string(c));
        combos.push_back({{"column", r.dependent_columns[i]}, {"coefficients", coeffs}});
    }
    return {{"c1", to_string(r.c1)},
            {"c2", to_string(r.c2)},
            {"c3", to_string(r.c3)},
            {"c4", to_string(r.c4)},
            {"c5", to_string(r.c5)},
            {"rank", r.rank},
            {"dependentColumns", combos},
            {"imageWitness", r.image_witness},
            {"kernelConeTrivial", r.cone.trivial},
            {"implicationsHold", r.implications_hold}};
}

nlohmann::json cone_json(const KernelConeResult& r) {
    return {{"trivial", r.trivial},
            {"certificate", r.trivial ? r.positive_witness : r.kernel_witness},
            {"kernelWitness", r.kernel_witness},
            {"positiveWitness", r.positive_witness}};
}

std::string cone_text(const KernelConeResult& r) {
    if (r.trivial) return "trivial: true\npositive witness y with B^T y > 0: " + vector_text(r.positive_witness) + "\n";
    return "trivial: false\nkernel vector: " + vector_text(r.kernel_witness) + "\n";
}

Output bypass_output(const QP& qp) {
    nlohmann::json list = nlohmann::json::array();
    std::ostringstream os;
    const GentleReport gentle = gentle_report(qp);
    int ok = 0;
    for (const auto& b : find_bypasses(qp)) {
        const ColumnIdentityReport rep = bypass_column_identity(qp, b);
        nlohmann::json e = to_json(b);
        e["columns"] = rep.columns;
        e["lhs"] = rep.lhs;
        e["rhs"] = rep.rhs;
        e["holds"] = rep.lhs == rep.rhs;
        ok += rep.lhs == rep.rhs;
        list.push_back(e);
        os << to_string(b.kind) << " " << path_to_string(b.path) << ": columns " << to_string(IntVector(rep.columns.begin(), rep.columns.end()))
           << " sum to " << vector_text(rep.lhs) << (rep.lhs == rep.rhs ? " (identity holds)" : " (identity FAILS)") << "\n";
    }
    os << list.size() << " bypasses, " << ok << " satisfy the column identity";
    if (!gentle.gentle) os << " (QP is not gentle: " << gentle.reason << ")";
    os << "\n";
    return {{{"gentle", gentle.gentle}, {"gentleReason", gentle.reason}, {"bypasses", list}}, os.str(),
            ok == int(list.size()) ? 0 : 1};
}

int parse_port(const std::string& text) {
    const int p = std::stoi(text);
    if (p < 0 || p > 65535) throw Error("InvalidArgument", "port out of range");
    return p;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact cluster algebra, quiver with potential and surface computations", "clustercc"};
    app.require_subcommand(1);
    GlobalOptions g;
    int truncation = 0;
    app.add_flag("--json", g.json, "Print JSON instead of text");
    auto* trunc_opt = app.add_option("--truncation", truncation, "Path truncation order p (overrides CLUSTERCC_TRUNCATION)");
    app.add_option("--bound", g.bound, "Search bound for cone membership");
    app.add_option("--method", g.method, "Euler characteristic method: auto, fixedpoint or pointcount");

    std::function<Output(const Context&)> action;
    auto on = [&](CLI::App* sub, std::function<Output(const Context&)> f) {
        sub->callback([&action, f] { action = f; });
        sub->fallthrough();
    };

    std::string matrix, qp_path, ext_path, rep_path, rep2_path, tri_path, surface_path, tau0_path, session_path;
    std::vector<int> seq;
    int k = 0, index = 0, reps = 200;
    unsigned seed = PropertyOptions{}.seed;
    IntVector va, vb;
    std::string port_text = "8080", host = "127.0.0.1";

    auto* mm = app.add_subcommand("mutate-matrix", "Mutate an exchange matrix along a sequence");
    mm->add_option("--matrix", matrix)->required();
    mm->add_option("--seq", seq)->delimiter(',')->required();
    on(mm, [&](const Context&) {
        const ExchangeMatrix b = mutate_matrix(read_exchange_matrix(matrix), seq);
        return Output{b.to_json(), matrix_text(b.rows)};
    });

    auto* ms = app.add_subcommand("mutate-seed", "Mutate the initial seed of an exchange matrix");
    ms->add_option("--matrix", matrix)->required();
    ms->add_option("--seq", seq)->delimiter(',')->required();
    on(ms, [&](const Context&) {
        Seed s = Seed::initial(read_exchange_matrix(matrix));
        for (int v : seq) s = mutate_seed(s, v);
        std::ostringstream os;
        os << matrix_text(s.matrix.rows);
        for (std::size_t i = 0; i < s.cluster.size(); ++i) os << "x" << i + 1 << "' = " << s.cluster[i].to_string() << "\n";
        return Output{s.to_json(), os.str()};
    });

    auto* cv = app.add_subcommand("cluster-var", "Cluster variable at a position after a mutation sequence");
    cv->add_option("--matrix", matrix)->required();
    cv->add_option("--seq", seq)->delimiter(',');
    cv->add_option("--index", index)->required();
    on(cv, [&](const Context&) {
        const LaurentPoly f = cluster_variable(read_exchange_matrix(matrix), seq, index);
        nlohmann::json j = f.to_json();
        j["index"] = index;
        j["seq"] = seq;
        return Output{j, f.to_string() + "\n"};
    });

    auto* qm = app.add_subcommand("qp-mutate", "Mutate a quiver with potential (premutation then reduction)");
    qm->add_option("--qp", qp_path)->required();
    qm->add_option("--k", k);
    qm->add_option("--seq", seq)->delimiter(',');
    on(qm, [&](const Context& ctx) {
        std::vector<int> steps = seq;
        if (k) steps.insert(steps.begin(), k);
        if (steps.empty()) throw Error("InvalidArgument", "--k or --seq is required");
        QP qp = ctx.qp(qp_path);
        nlohmann::json pairs = nlohmann::json::array();
        bool truncated = false;
        for (int v : steps) {
            const ReductionResult r = mutate_qp_full(qp, v);
            for (const auto& [a, b] : r.trivial_pairs) pairs.push_back({a, b});
            truncated = truncated || r.truncated;
            qp = r.reduced;
        }
        std::ostringstream os;
        os << "arrows:\n";
        for (const auto& a : qp.quiver.arrows()) os << "  " << a.id << ": " << a.from << " -> " << a.to << "\n";
        os << "potential:\n";
        for (const auto& [cycle, c] : qp.potential) os << "  " << to_string(c) << " * " << path_to_string(cycle) << "\n";
        return Output{{{"qp", qp.to_json()}, {"removedPairs", pairs}, {"truncated", truncated}}, os.str()};
    });

    auto* rm = app.add_subcommand("rep-mutate", "Mutate a decorated representation");
    rm->add_option("--qp", qp_path)->required();
    rm->add_option("--rep", rep_path)->required();
    rm->add_option("--k", k)->required();
    on(rm, [&](const Context& ctx) {
        const QP qp = ctx.qp(qp_path);
        const RepMutation r = mutate_rep(ctx.rep(rep_path, qp), qp, k);
        std::ostringstream os;
        os << "dims " << vector_text(r.rep.dims) << ", decoration " << vector_text(r.rep.decoration) << "\n";
        return Output{{{"rep", r.rep.to_json()}, {"qp", r.qp.to_json()}}, os.str()};
    });

    auto* gv = app.add_subcommand("g-vector", "g-vector of a decorated representation");
    gv->add_option("--qp", qp_path);
    gv->add_option("--ext", ext_path, "Extended QP with frozen vertices; --rep is then over it");
    gv->add_option("--rep", rep_path)->required();
    on(gv, [&](const Context& ctx) {
        const RepInput in = read_rep_input(ctx, qp_path, ext_path, rep_path);
        if (in.part) {
            const GVectorPair g = g_vectors(in.rep, in.qp);
            return Output{{{"g", g.g}, {"gExt", g.g_ext}}, "g = " + vector_text(g.g) + "\ng~ = " + vector_text(g.g_ext) + "\n"};
        }
        const IntVector g = g_vector(in.rep, in.qp);
        return Output{{{"g", g}}, "g = " + vector_text(g) + "\n"};
    });

    auto* ei = app.add_subcommand("e-invariant", "E-invariant E(M), or the pairing with a second representation");
    ei->add_option("--qp", qp_path)->required();
    ei->add_option("--rep", rep_path)->required();
    ei->add_option("--rep2", rep2_path);
    on(ei, [&](const Context& ctx) {
        const QP qp = ctx.qp(qp_path);
        const DecoratedRep m = ctx.rep(rep_path, qp);
        const DecoratedRep n = rep2_path.empty() ? m : ctx.rep(rep2_path, qp);
        const long long e = e_invariant(m, n, qp);
        return Output{{{"e", e}}, "E = " + std::to_string(e) + "\n"};
    });

    auto* cc = app.add_subcommand("cc", "Caldero-Chapoton function of a decorated representation");
    cc->add_option("--qp", qp_path);
    cc->add_option("--ext", ext_path, "Extended QP with frozen vertices; --rep is then over it");
    cc->add_option("--rep", rep_path)->required();
    on(cc, [&](const Context& ctx) {
        const RepInput in = read_rep_input(ctx, qp_path, ext_path, rep_path);
        const LaurentPoly f = cc_function(in.rep, in.qp, ctx.method());
        nlohmann::json j = {{"cc", f.to_string()}, {"terms", f.to_json().at("terms")}};
        std::string text = "CC = " + f.to_string() + "\n";
        if (in.part) {
            const LaurentPoly r = cc_function(restrict_rep(in.rep, in.qp), *in.part, ctx.method());
            j["ccRestricted"] = r.to_string();
            j["termsRestricted"] = r.to_json().at("terms");
            text += "CC without coefficients = " + r.to_string() + "\n";
        }
        return Output{j, text};
    });

    auto* fp = app.add_subcommand("f-poly", "F-polynomial of a representation");
    fp->add_option("--qp", qp_path)->required();
    fp->add_option("--rep", rep_path)->required();
    on(fp, [&](const Context& ctx) {
        const QP qp = ctx.qp(qp_path);
        const LaurentPoly f = f_polynomial(ctx.rep(rep_path, qp), qp.quiver, ctx.method());
        return Output{f.to_json(), f.to_string() + "\n"};
    });

    auto* kc = app.add_subcommand("kernel-cone", "Decide whether Ker B meets the nonnegative orthant only in 0");
    kc->add_option("--matrix", matrix)->required();
    on(kc, [&](const Context&) {
        const KernelConeResult r = kernel_cone_trivial(read_int_matrix(matrix));
        return Output{cone_json(r), cone_text(r)};
    });

    auto* oc = app.add_subcommand("order-compare", "Compare two vectors in the dominance order of B");
    oc->add_option("--matrix", matrix)->required();
    oc->add_option("--a", va)->delimiter(',')->required();
    oc->add_option("--b", vb)->delimiter(',')->required();
    on(oc, [&](const Context& ctx) {
        const OrderOutcome o = order_compare(va, vb, read_int_matrix(matrix), ctx.bound());
        return Output{{{"result", to_string(o)}}, to_string(o) + "\n"};
    });

    auto* co = app.add_subcommand("conditions", "Report the matrix conditions on B and their implications");
    co->add_option("--matrix", matrix)->required();
    on(co, [&](const Context&) {
        const ConditionsReport r = matrix_conditions_report(read_int_matrix(matrix));
        std::ostringstream os;
        os << "rank " << r.rank << "\n";
        os << "c1 " << tri_text(r.c1) << "\nc2 " << tri_text(r.c2) << "\nc3 " << tri_text(r.c3) << "\nc4 " << tri_text(r.c4)
           << "\nc5 " << tri_text(r.c5) << "\nimplications hold: " << (r.implications_hold ? "yes" : "no") << "\n";
        return Output{conditions_json(r), os.str()};
    });

    auto* sb = app.add_subcommand("surface-b", "Signed adjacency matrix of a triangulation");
    sb->add_option("--triangulation", tri_path)->required();
    on(sb, [&](const Context&) {
        const Triangulation t = Triangulation::from_json(read_json(tri_path));
        t.validate();
        const IntMatrix b = b_matrix(t);
        return Output{{{"arcs", t.arcs}, {"matrix", b}}, matrix_text(b)};
    });

    auto* sbld = app.add_subcommand("surface-build", "Build a certified nice triangulation of a marked surface");
    sbld->add_option("--surface", surface_path)->required();
    sbld->add_option("--tau0", tau0_path, "Base triangulation with one marked point per boundary component");
    on(sbld, [&](const Context&) {
        const MarkedSurface s = MarkedSurface::from_json(read_json(surface_path));
        std::optional<Triangulation> tau0;
        if (!tau0_path.empty()) tau0 = Triangulation::from_json(read_json(tau0_path));
        const NiceTriangulation nice = build_nice_triangulation(s, tau0);
        std::ostringstream os;
        os << nice.sigma.arcs.size() << " arcs, rank " << nice.rank << ", method " << nice.method << "\n";
        os << "kernel cone trivial: " << (nice.cone.trivial ? "yes" : "no") << "\n";
        for (const auto& c : nice.certificates) {
            os << "b" << c.arc << " =";
            for (std::size_t i = 0; i < c.terms.size(); ++i)
                os << (i ? " +" : "") << " " << to_string(c.terms[i].second) << " b" << c.terms[i].first;
            os << "  (" << c.kind << ")\n";
        }
        return Output{nice.to_json(), os.str()};
    });

    auto* sc = app.add_subcommand("surface-check", "Check the corank formula and the kernel cone of a triangulation");
    sc->add_option("--surface", surface_path)->required();
    sc->add_option("--triangulation", tri_path)->required();
    on(sc, [&](const Context&) {
        const MarkedSurface s = MarkedSurface::from_json(read_json(surface_path));
        const Triangulation t = Triangulation::from_json(read_json(tri_path));
        t.validate(s);
        const CorankReport corank = corank_check(t, s);
        const KernelConeResult cone = kernel_cone_trivial(b_matrix(t));
        std::ostringstream os;
        os << "rank " << corank.rank << " = " << corank.arcs << " - " << corank.punctures << " - " << corank.even_components << "\n"
           << cone_text(cone);
        return Output{{{"corank", corank.to_json()}, {"kernelCone", cone_json(cone)}}, os.str()};
    });

    auto* bs = app.add_subcommand("bypass-scan", "List bypasses of a gentle QP and check their column identities");
    bs->add_option("--qp", qp_path);
    bs->add_option("--triangulation", tri_path);
    on(bs, [&](const Context& ctx) {
        if (qp_path.empty() == tri_path.empty()) throw Error("InvalidArgument", "give exactly one of --qp and --triangulation");
        return bypass_output(qp_path.empty() ? triangulation_qp(Triangulation::from_json(read_json(tri_path))) : ctx.qp(qp_path));
    });

    auto* vf = app.add_subcommand("verify", "Run the randomized property suites");
    vf->add_option("--reps", reps, "Representations that must pass every representation-level check");
    vf->add_option("--seed", seed);
    on(vf, [&](const Context&) {
        PropertyOptions opt;
        opt.reps = reps;
        opt.seed = seed;
        const PropertyReport r = run_property_suite(opt);
        return Output{r.to_json(), r.to_text(), r.passed() ? 0 : 1};
    });

    auto* sv = app.add_subcommand("serve", "Serve one explorer session over JSON/HTTP");
    sv->add_option("--port", port_text);
    sv->add_option("--host", host);
    sv->add_option("--session", session_path, "Session JSON to load (default: the two-triangle example)");
    on(sv, [&](const Context&) {
        SessionStore store(Session::load(session_path.empty() ? default_session() : read_json(session_path)));
        httplib::Server server;
        install_routes(server, store);
        const int port = parse_port(port_text);
        err << "serving on http://" << host << ":" << port << std::endl;
        if (!server.listen(host, port)) throw Error("ServeFailed", "cannot listen on " + host + ":" + std::to_string(port));
        return Output{{{"stopped", true}}, "stopped\n"};
    });

    auto emit_error = [&](const std::string& code, const std::string& message) {
        out << nlohmann::json{{"error", code}, {"message", message}}.dump() << std::endl;
        if (!g.json) err << "error: " << code << ": " << message << std::endl;
        return 1;
    };

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        return emit_error("UsageError", e.what());
    }
    if (*trunc_opt) g.truncation = truncation;

    try {
        const Context ctx(g);
        const Output o = action(ctx);
        if (g.json) out << o.json.dump(2) << "\n";
        else out << o.text;
        return o.status;
    } catch (const Error& e) {
        return emit_error(e.code(), e.what());
    } catch (const nlohmann::json::exception& e) {
        return emit_error("InvalidJson", e.what());
    } catch (const std::invalid_argument& e) {
        return emit_error("InvalidArgument", e.what());
    } catch (const std::out_of_range& e) {
        return emit_error("InvalidArgument", e.what());
    }
}

}  // namespace clustercc::cli
