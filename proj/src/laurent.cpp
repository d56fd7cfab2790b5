#include "clustercc/laurent.hpp"

#include "clustercc/error.hpp"

#include <algorithm>
#include <sstream>

namespace clustercc {

LaurentPoly LaurentPoly::constant(int num_vars, const Rational& c) {
    LaurentPoly p(num_vars);
    p.add_term(IntVector(num_vars, 0), c);
    return p;
}

LaurentPoly LaurentPoly::monomial(const IntVector& exps, const Rational& c) {
    LaurentPoly p(int(exps.size()));
    p.add_term(exps, c);
    return p;
}

LaurentPoly LaurentPoly::variable(int num_vars, int i) {
    if (i < 1 || i > num_vars) throw Error("InvalidIndex", "variable index out of range");
    IntVector e(num_vars, 0);
    e[i - 1] = 1;
    return monomial(e);
}

Rational LaurentPoly::coeff(const IntVector& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
}

void LaurentPoly::add_term(const IntVector& exps, const Rational& c) {
    if (int(exps.size()) != num_vars_) throw Error("ShapeMismatch", "exponent vector length differs from variable count");
    if (c == 0) return;
    Rational canon(c);
    canon.canonicalize();
    auto [it, inserted] = terms_.emplace(exps, canon);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

void LaurentPoly::check_same(const LaurentPoly& o) const {
    if (num_vars_ != o.num_vars_) {
        throw Error("NumVarsMismatch", "Laurent polynomials in " + std::to_string(num_vars_) + " and " +
                                           std::to_string(o.num_vars_) + " variables");
    }
}

LaurentPoly LaurentPoly::operator+(const LaurentPoly& o) const {
    LaurentPoly r(*this);
    r += o;
    return r;
}

LaurentPoly& LaurentPoly::operator+=(const LaurentPoly& o) {
    check_same(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

LaurentPoly LaurentPoly::operator-() const { return scaled(-1); }

LaurentPoly LaurentPoly::operator-(const LaurentPoly& o) const { return *this + (-o); }

LaurentPoly LaurentPoly::operator*(const LaurentPoly& o) const {
    check_same(o);
    LaurentPoly r(num_vars_);
    IntVector e(num_vars_);
    for (const auto& [e1, c1] : terms_) {
        for (const auto& [e2, c2] : o.terms_) {
            for (int i = 0; i < num_vars_; ++i) e[i] = e1[i] + e2[i];
            r.add_term(e, c1 * c2);
        }
    }
    return r;
}

LaurentPoly& LaurentPoly::operator*=(const LaurentPoly& o) {
    *this = *this * o;
    return *this;
}

LaurentPoly LaurentPoly::scaled(const Rational& c) const {
    LaurentPoly r(num_vars_);
    if (c == 0) return r;
    for (const auto& [e, v] : terms_) r.terms_.emplace(e, v * c);
    return r;
}

LaurentPoly LaurentPoly::pow(int e) const {
    if (e < 0) {
        if (!is_monomial()) throw Error("NotInvertible", "negative power of a non-monomial");
        const auto& [exps, c] = *terms_.begin();
        IntVector ne(exps.size());
        for (std::size_t i = 0; i < exps.size(); ++i) ne[i] = exps[i] * e;
        Rational ce = 1;
        for (int i = 0; i < -e; ++i) ce /= c;
        return monomial(ne, ce);
    }
    LaurentPoly result = constant(num_vars_, 1);
    LaurentPoly base = *this;
    while (e > 0) {
        if (e & 1) result *= base;
        e >>= 1;
        if (e) base *= base;
    }
    return result;
}

IntVector LaurentPoly::min_exponents() const {
    IntVector m(num_vars_, 0);
    bool first = true;
    for (const auto& [e, c] : terms_) {
        for (int i = 0; i < num_vars_; ++i) m[i] = first ? e[i] : std::min(m[i], e[i]);
        first = false;
    }
    return m;
}

LaurentPoly LaurentPoly::shifted(const IntVector& s) const {
    LaurentPoly r(num_vars_);
    IntVector e(num_vars_);
    for (const auto& [e0, c] : terms_) {
        for (int i = 0; i < num_vars_; ++i) e[i] = e0[i] + s[i];
        r.terms_.emplace(e, c);
    }
    return r;
}

bool LaurentPoly::is_polynomial() const {
    for (const auto& [e, c] : terms_)
        if (std::any_of(e.begin(), e.end(), [](long long x) { return x < 0; })) return false;
    return true;
}

bool LaurentPoly::has_integer_coefficients() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.second.get_den() == 1; });
}

Rational LaurentPoly::evaluate(const std::vector<Rational>& point) const {
    if (int(point.size()) != num_vars_) throw Error("ShapeMismatch", "evaluation point length");
    Rational total = 0;
    for (const auto& [e, c] : terms_) {
        Rational t = c;
        for (int i = 0; i < num_vars_; ++i) {
            for (long long k = 0; k < std::abs(e[i]); ++k) {
                if (e[i] > 0) t *= point[i];
                else t /= point[i];
            }
        }
        total += t;
    }
    return total;
}

std::optional<LaurentPoly> LaurentPoly::divide(const LaurentPoly& g) const {
    check_same(g);
    if (g.is_zero()) throw Error("DivisionByZero", "division by the zero Laurent polynomial");
    if (is_zero()) return LaurentPoly(num_vars_);
    // Units are monomials, so normalize both sides to polynomials without
    // monomial factors. Then f = g h in the Laurent ring iff f' = g' h' as
    // polynomials, and polynomial division by the lex-leading term decides it.
    IntVector sf = min_exponents(), sg = g.min_exponents();
    for (auto& x : sf) x = -x;
    for (auto& x : sg) x = -x;
    LaurentPoly rem = shifted(sf);
    const LaurentPoly gp = g.shifted(sg);
    const auto& [glead, gcoef] = *gp.terms_.rbegin();
    LaurentPoly quot(num_vars_);
    IntVector e(num_vars_);
    while (!rem.is_zero()) {
        const auto& [rlead, rcoef] = *rem.terms_.rbegin();
        for (int i = 0; i < num_vars_; ++i) {
            e[i] = rlead[i] - glead[i];
            if (e[i] < 0) return std::nullopt;
        }
        const Rational c = rcoef / gcoef;
        quot.add_term(e, c);
        IntVector shifted_e(num_vars_);
        const IntVector step = e;
        for (const auto& [ge, gc] : gp.terms_) {
            for (int i = 0; i < num_vars_; ++i) shifted_e[i] = ge[i] + step[i];
            rem.add_term(shifted_e, -c * gc);
        }
    }
    IntVector back(num_vars_);
    for (int i = 0; i < num_vars_; ++i) back[i] = sg[i] - sf[i];
    return quot.shifted(back);
}

std::string LaurentPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        if (!first) out += " + ";
        first = false;
        std::string mono;
        for (int i = 0; i < num_vars_; ++i) {
            if (e[i] == 0) continue;
            if (!mono.empty()) mono += " ";
            mono += "x" + std::to_string(i + 1);
            if (e[i] != 1) mono += "^" + std::to_string(e[i]);
        }
        // Unit coefficients are left implicit on non-constant monomials.
        if (mono.empty()) out += clustercc::to_string(c);
        else if (c == 1) out += mono;
        else if (c == -1) out += "-" + mono;
        else out += clustercc::to_string(c) + " * " + mono;
    }
    return out;
}

LaurentPoly LaurentPoly::parse(const std::string& text, int num_vars) {
    LaurentPoly p(num_vars);
    std::string compact;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) compact.push_back(c);
    if (compact == "0") return p;
    // Terms are separated by '+'; a '-' only ever appears as a sign.
    std::vector<std::string> pieces;
    std::string cur;
    for (char c : compact) {
        if (c == '+') {
            pieces.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    pieces.push_back(cur);
    for (const auto& piece : pieces) {
        if (piece.empty()) throw Error("ParseError", "empty term in '" + text + "'");
        Rational coef = 1;
        std::string mono = piece;
        const auto star = piece.find('*');
        if (star != std::string::npos) {
            coef = parse_rational(piece.substr(0, star));
            mono = piece.substr(star + 1);
        } else if (piece.find('x') == std::string::npos) {
            coef = parse_rational(piece);
            mono.clear();
        } else if (piece[0] == '-') {
            coef = -1;
            mono = piece.substr(1);
        }
        IntVector e(num_vars, 0);
        std::size_t i = 0;
        while (i < mono.size()) {
            if (mono[i] != 'x') throw Error("ParseError", "expected variable in '" + piece + "'");
            std::size_t j = i + 1;
            while (j < mono.size() && std::isdigit(static_cast<unsigned char>(mono[j]))) ++j;
            if (j == i + 1) throw Error("ParseError", "missing variable index in '" + piece + "'");
            const int var = std::stoi(mono.substr(i + 1, j - i - 1));
            if (var < 1 || var > num_vars) throw Error("ParseError", "variable index out of range in '" + piece + "'");
            long long ex = 1;
            if (j < mono.size() && mono[j] == '^') {
                std::size_t k = j + 1;
                if (k < mono.size() && mono[k] == '-') ++k;
                while (k < mono.size() && std::isdigit(static_cast<unsigned char>(mono[k]))) ++k;
                if (k == j + 1) throw Error("ParseError", "missing exponent in '" + piece + "'");
                ex = std::stoll(mono.substr(j + 1, k - j - 1));
                j = k;
            }
            e[var - 1] += ex;
            i = j;
        }
        p.add_term(e, coef);
    }
    return p;
}

nlohmann::json LaurentPoly::to_json() const {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [e, c] : terms_) terms.push_back({{"coeff", clustercc::to_string(c)}, {"exps", e}});
    return {{"numVars", num_vars_}, {"terms", terms}, {"text", to_string()}};
}

LaurentPoly LaurentPoly::from_json(const nlohmann::json& j, int num_vars) {
    if (j.is_string()) {
        if (num_vars < 0) throw Error("ParseError", "text polynomial needs a variable count");
        return parse(j.get<std::string>(), num_vars);
    }
    int nv = num_vars;
    if (j.contains("numVars")) nv = j.at("numVars").get<int>();
    const auto& terms = j.at("terms");
    if (nv < 0) {
        if (terms.empty()) throw Error("ParseError", "cannot infer variable count of an empty polynomial");
        nv = int(terms[0].at("exps").size());
    }
    LaurentPoly p(nv);
    for (const auto& t : terms) {
        const auto& c = t.at("coeff");
        p.add_term(t.at("exps").get<IntVector>(), c.is_string() ? parse_rational(c.get<std::string>())
                                                               : Rational(c.get<long>()));
    }
    return p;
}

MonomialAssignment MonomialAssignment::identity(int n) {
    MonomialAssignment a;
    a.target_vars = n;
    for (int i = 0; i < n; ++i) {
        IntVector e(n, 0);
        e[i] = 1;
        a.exps.push_back(e);
        a.scalars.emplace_back(1);
    }
    return a;
}

nlohmann::json MonomialAssignment::to_json() const {
    nlohmann::json images = nlohmann::json::array();
    for (std::size_t i = 0; i < exps.size(); ++i) {
        images.push_back({{"scalar", clustercc::to_string(scalars[i])},
                          {"exps", exps[i]},
                          {"text", LaurentPoly::monomial(exps[i], scalars[i]).to_string()}});
    }
    return {{"targetVars", target_vars}, {"images", images}};
}

LaurentPoly substitute_monomials(const LaurentPoly& f, const MonomialAssignment& sigma) {
    if (int(sigma.exps.size()) != f.num_vars() || sigma.scalars.size() != sigma.exps.size()) {
        throw Error("IncompleteAssignment", "assignment covers " + std::to_string(sigma.exps.size()) +
                                                " variables, polynomial has " + std::to_string(f.num_vars()));
    }
    for (const auto& e : sigma.exps)
        if (int(e.size()) != sigma.target_vars) throw Error("ShapeMismatch", "image exponent length");
    LaurentPoly out(sigma.target_vars);
    IntVector e(sigma.target_vars);
    for (const auto& [src, c] : f.terms()) {
        std::fill(e.begin(), e.end(), 0);
        Rational coef = c;
        for (int i = 0; i < f.num_vars(); ++i) {
            if (src[i] == 0) continue;
            for (int t = 0; t < sigma.target_vars; ++t) e[t] += src[i] * sigma.exps[i][t];
            Rational s = 1;
            for (long long k = 0; k < std::abs(src[i]); ++k) s *= sigma.scalars[i];
            if (src[i] > 0) coef *= s; else coef /= s;
        }
        out.add_term(e, coef);
    }
    return out;
}

}  // namespace clustercc
