#include "clustercc/seed.hpp"

#include "clustercc/error.hpp"

#include <set>

namespace clustercc {

void ExchangeMatrix::validate() const {
    if (n < 0 || m < 0) throw Error("InvalidMatrix", "negative size");
    if (int(rows.size()) != n + m) throw Error("InvalidMatrix", "expected n+m rows");
    for (const auto& r : rows)
        if (int(r.size()) != n) throw Error("InvalidMatrix", "expected n columns in every row");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (rows[i][j] != -rows[j][i]) throw Error("InvalidMatrix", "principal part is not skew-symmetric");
}

IntMatrix ExchangeMatrix::principal() const { return IntMatrix(rows.begin(), rows.begin() + n); }

nlohmann::json ExchangeMatrix::to_json() const { return {{"n", n}, {"m", m}, {"rows", rows}}; }

ExchangeMatrix ExchangeMatrix::from_json(const nlohmann::json& j) {
    ExchangeMatrix b;
    b.rows = j.at("rows").get<IntMatrix>();
    b.n = j.contains("n") ? j.at("n").get<int>() : (b.rows.empty() ? 0 : int(b.rows[0].size()));
    b.m = j.contains("m") ? j.at("m").get<int>() : int(b.rows.size()) - b.n;
    b.validate();
    return b;
}

ExchangeMatrix ExchangeMatrix::square(const IntMatrix& b) {
    ExchangeMatrix e{int(b.size()), 0, b};
    e.validate();
    return e;
}

ExchangeMatrix mutate_matrix(const ExchangeMatrix& b, int k) {
    if (k < 1 || k > b.n) throw Error("InvalidIndex", "mutation index " + std::to_string(k) + " is not mutable");
    const int kk = k - 1;
    ExchangeMatrix out = b;
    for (int i = 0; i < b.n + b.m; ++i) {
        for (int j = 0; j < b.n; ++j) {
            if (i == kk || j == kk) {
                out.rows[i][j] = -b.rows[i][j];
            } else {
                const long long bik = b.rows[i][kk], bkj = b.rows[kk][j];
                const long long sgn = (bik > 0) - (bik < 0);
                out.rows[i][j] = b.rows[i][j] + sgn * std::max(bik * bkj, 0LL);
            }
        }
    }
    return out;
}

ExchangeMatrix mutate_matrix(const ExchangeMatrix& b, const std::vector<int>& seq) {
    ExchangeMatrix out = b;
    for (int k : seq) out = mutate_matrix(out, k);
    return out;
}

void Fraction::normalize() {
    if (num.is_zero()) {
        den = LaurentPoly::constant(num.num_vars(), 1);
        return;
    }
    if (auto q = num.divide(den)) {
        num = *q;
        den = LaurentPoly::constant(num.num_vars(), 1);
    }
}

bool Fraction::is_laurent() const { return den == LaurentPoly::constant(den.num_vars(), 1); }

bool Fraction::operator==(const Fraction& o) const { return num * o.den == o.num * den; }

std::string Fraction::to_string() const {
    if (is_laurent()) return num.to_string();
    return "(" + num.to_string() + ") / (" + den.to_string() + ")";
}

nlohmann::json Fraction::to_json() const {
    return {{"num", num.to_string()}, {"den", den.to_string()}, {"laurent", is_laurent()}, {"text", to_string()}};
}

Seed Seed::initial(const ExchangeMatrix& b) {
    b.validate();
    Seed s;
    s.matrix = b;
    const int nv = b.n + b.m;
    for (int i = 1; i <= nv; ++i) s.cluster.push_back({LaurentPoly::variable(nv, i), LaurentPoly::constant(nv, 1)});
    return s;
}

nlohmann::json Seed::to_json() const {
    nlohmann::json c = nlohmann::json::array();
    for (const auto& f : cluster) c.push_back(f.to_json());
    return {{"matrix", matrix.to_json()}, {"cluster", c}};
}

Seed mutate_seed(const Seed& s, int k) {
    const ExchangeMatrix& b = s.matrix;
    if (k < 1 || k > b.n) throw Error("InvalidIndex", "mutation index " + std::to_string(k) + " is not mutable");
    const int nv = b.n + b.m;
    const LaurentPoly one = LaurentPoly::constant(nv, 1);
    Fraction plus{one, one}, minus{one, one};
    for (int i = 0; i < nv; ++i) {
        const long long e = b.rows[i][k - 1];
        if (e == 0) continue;
        Fraction& target = e > 0 ? plus : minus;
        const int p = int(std::abs(e));
        target.num *= s.cluster[i].num.pow(p);
        target.den *= s.cluster[i].den.pow(p);
    }
    const Fraction& xk = s.cluster[k - 1];
    Fraction u{(plus.num * minus.den + minus.num * plus.den) * xk.den, plus.den * minus.den * xk.num};
    u.normalize();
    Seed out = s;
    out.cluster[k - 1] = u;
    out.matrix = mutate_matrix(b, k);
    return out;
}

LaurentPoly cluster_variable(const ExchangeMatrix& b, const std::vector<int>& seq, int j) {
    Seed s = Seed::initial(b);
    for (int k : seq) s = mutate_seed(s, k);
    if (j < 1 || j > b.n + b.m) throw Error("InvalidIndex", "cluster index out of range");
    const Fraction& f = s.cluster[j - 1];
    if (!f.is_laurent()) throw Error("NonLaurentResult", "cluster entry did not simplify to a Laurent polynomial: " + f.to_string());
    return f.num;
}

std::vector<LaurentPoly> enumerate_cluster_variables(const ExchangeMatrix& b, int depth) {
    std::vector<LaurentPoly> found;
    std::set<std::string> seen;
    auto record = [&](const Seed& s) {
        for (int i = 0; i < b.n; ++i) {
            const Fraction& f = s.cluster[i];
            if (!f.is_laurent()) throw Error("NonLaurentResult", "cluster entry is not Laurent: " + f.to_string());
            if (seen.insert(f.num.to_string()).second) found.push_back(f.num);
        }
    };
    Seed s0 = Seed::initial(b);
    record(s0);
    std::vector<std::pair<Seed, int>> layer{{s0, 0}};  // seed and the last mutated index
    for (int d = 0; d < depth; ++d) {
        std::vector<std::pair<Seed, int>> next;
        for (const auto& [s, last] : layer) {
            for (int k = 1; k <= b.n; ++k) {
                if (k == last) continue;  // mutation is an involution
                Seed t = mutate_seed(s, k);
                record(t);
                next.emplace_back(std::move(t), k);
            }
        }
        layer = std::move(next);
    }
    return found;
}

ExchangeMatrix principal_matrix(const IntMatrix& b) {
    ExchangeMatrix e = ExchangeMatrix::square(b);
    e.m = e.n;
    for (int i = 0; i < e.n; ++i) {
        IntVector row(e.n, 0);
        row[i] = 1;
        e.rows.push_back(row);
    }
    return e;
}

MonomialAssignment specialization_phi(const ExchangeMatrix& b) {
    b.validate();
    MonomialAssignment a;
    a.target_vars = b.n + b.m;
    for (int j = 0; j < b.n; ++j) {
        IntVector e(a.target_vars, 0);
        e[j] = 1;
        a.exps.push_back(e);
        a.scalars.emplace_back(1);
    }
    for (int j = 0; j < b.n; ++j) {
        IntVector e(a.target_vars, 0);
        for (int i = b.n; i < b.n + b.m; ++i) e[i] = b.rows[i][j];
        a.exps.push_back(e);
        a.scalars.emplace_back(1);
    }
    return a;
}

MonomialAssignment yhat_assignment(const ExchangeMatrix& b) {
    MonomialAssignment a;
    a.target_vars = b.n + b.m;
    for (int j = 0; j < b.n; ++j) {
        IntVector e(a.target_vars, 0);
        for (int i = 0; i < b.n + b.m; ++i) e[i] = b.rows[i][j];
        a.exps.push_back(e);
        a.scalars.emplace_back(1);
    }
    return a;
}

IndependenceCertificate certify_independence(const IntMatrix& b, const std::vector<IntVector>& gvectors) {
    IndependenceCertificate cert;
    cert.cone = kernel_cone_trivial(b);
    for (std::size_t i = 0; i < gvectors.size() && !cert.repeated_pair; ++i)
        for (std::size_t j = i + 1; j < gvectors.size(); ++j)
            if (gvectors[i] == gvectors[j]) {
                cert.repeated_pair = {int(i), int(j)};
                break;
            }
    cert.independent = cert.cone.trivial && !cert.repeated_pair;
    return cert;
}

}  // namespace clustercc
