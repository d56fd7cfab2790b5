#include "clustercc/rational.hpp"

#include "clustercc/error.hpp"

namespace clustercc {

Rational parse_rational(const std::string& text) {
    std::string s;
    for (char c : text) {
        if (c != ' ') s.push_back(c);
    }
    if (s.empty()) throw Error("ParseError", "empty rational literal");
    auto valid_int = [](const std::string& part) {
        std::size_t i = (!part.empty() && (part[0] == '-' || part[0] == '+')) ? 1 : 0;
        if (i >= part.size()) return false;
        for (; i < part.size(); ++i) {
            if (part[i] < '0' || part[i] > '9') return false;
        }
        return true;
    };
    const auto slash = s.find('/');
    const std::string num = slash == std::string::npos ? s : s.substr(0, slash);
    const std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (!valid_int(num) || !valid_int(den)) {
        throw Error("ParseError", "malformed rational '" + text + "'");
    }
    Integer n(num[0] == '+' ? num.substr(1) : num, 10);
    Integer d(den[0] == '+' ? den.substr(1) : den, 10);
    if (d == 0) throw Error("ParseError", "zero denominator in '" + text + "'");
    Rational r(n, d);
    r.canonicalize();
    return r;
}

std::string to_string(const Rational& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

long long to_int64(const Rational& r) {
    if (r.get_den() != 1 || !r.get_num().fits_slong_p()) {
        throw Error("Overflow", "value " + to_string(r) + " is not a machine integer");
    }
    return r.get_num().get_si();
}

std::string to_string(const IntVector& v) {
    std::string out = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(v[i]);
    }
    return out + ")";
}

}  // namespace clustercc
