#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "curvint/decompose.hpp"
#include "curvint/periods.hpp"
#include "curvint/polygon.hpp"

namespace curvint {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Coefficient expressions: exact rational/decimal literals, the imaginary
// unit i, named parameters, and + - * / ^ ( ).

class CoeffParser {
  public:
    CoeffParser(std::string src, const std::map<std::string, GaussRational>& params)
        : s_(std::move(src)), params_(params) {}

    GaussRational parse() {
        GaussRational v = expr();
        skip();
        if (pos_ != s_.size()) throw input_error("coefficient parse error at position " +
                                                 std::to_string(pos_) + " in '" + s_ + "'");
        return v;
    }

  private:
    std::string s_;
    const std::map<std::string, GaussRational>& params_;
    size_t pos_ = 0;

    void skip() {
        while (pos_ < s_.size() && std::isspace((unsigned char)s_[pos_])) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    GaussRational expr() {
        GaussRational v = term();
        while (true) {
            if (eat('+'))
                v += term();
            else if (eat('-'))
                v -= term();
            else
                return v;
        }
    }
    GaussRational term() {
        GaussRational v = factor();
        while (true) {
            skip();
            if (eat('*'))
                v *= factor();
            else if (eat('/')) {
                v = v / factor();
            } else
                return v;
        }
    }
    GaussRational factor() {
        skip();
        if (eat('-')) return -factor();
        if (eat('+')) return factor();
        GaussRational v = primary();
        skip();
        if (eat('^')) {
            skip();
            bool neg = eat('-');
            size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) ++pos_;
            if (start == pos_) throw input_error("coefficient parse error: exponent expected");
            long long e = std::stoll(s_.substr(start, pos_ - start));
            GaussRational r{Rational(1)};
            for (long long n = 0; n < e; ++n) r *= v;
            if (neg) r = GaussRational{Rational(1)} / r;
            return r;
        }
        return v;
    }
    GaussRational primary() {
        skip();
        if (eat('(')) {
            GaussRational v = expr();
            if (!eat(')')) throw input_error("coefficient parse error: ')' expected");
            return v;
        }
        if (pos_ < s_.size() && (std::isalpha((unsigned char)s_[pos_]) || s_[pos_] == '_')) {
            size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum((unsigned char)s_[pos_]) || s_[pos_] == '_'))
                ++pos_;
            std::string name = s_.substr(start, pos_ - start);
            if (name == "i") return GaussRational{Rational(0), Rational(1)};
            auto it = params_.find(name);
            if (it == params_.end()) throw input_error("unknown parameter '" + name + "'");
            return it->second;
        }
        size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isdigit((unsigned char)s_[pos_]) || s_[pos_] == '.' || s_[pos_] == '/'))
            ++pos_;
        if (start == pos_) throw input_error("coefficient parse error: number expected");
        return GaussRational{Rational::from_string(s_.substr(start, pos_ - start))};
    }
};

// ---------------------------------------------------------------------------
// CurveSpec

struct CurveSpec {
    bool exact = true;
    BivarPolyQ poly;
    std::map<std::string, GaussRational> parameters;
    json raw;
};

inline CurveSpec parse_curve(const json& j) {
    CurveSpec out;
    out.raw = j;
    if (j.contains("field")) out.exact = j.at("field").get<std::string>() != "float";
    std::map<std::string, GaussRational> params;
    if (j.contains("parameters"))
        for (auto& [name, val] : j.at("parameters").items())
            params[name] = CoeffParser(val.get<std::string>(), {}).parse();
    out.parameters = params;
    if (!j.contains("monomials")) throw input_error("curve: 'monomials' missing");
    for (auto& m : j.at("monomials")) {
        int i = m.at("i").get<int>(), jj = m.at("j").get<int>();
        GaussRational c;
        if (m.contains("coeff")) {
            c = CoeffParser(m.at("coeff").get<std::string>(), params).parse();
        } else {
            Rational re = m.contains("re") ? Rational::from_string(m.at("re").get<std::string>())
                                           : Rational(0);
            Rational im = m.contains("im") ? Rational::from_string(m.at("im").get<std::string>())
                                           : Rational(0);
            c = GaussRational{re, im};
        }
        out.poly.add_term(i, jj, c);
    }
    if (out.poly.is_zero()) throw input_error("curve: zero polynomial");
    return out;
}

inline json curve_to_json(const CurveSpec& c) {
    json j;
    j["field"] = c.exact ? "exact" : "float";
    json mons = json::array();
    for (auto& [pt, coeff] : c.poly.terms()) {
        json m;
        m["i"] = pt.first;
        m["j"] = pt.second;
        m["re"] = coeff.re().to_string();
        m["im"] = coeff.im().to_string();
        mons.push_back(m);
    }
    j["monomials"] = mons;
    return j;
}

// ---------------------------------------------------------------------------
// Cycles

inline json path_to_json(const PathSpec& p) {
    json j;
    json w = json::array();
    for (auto& z : p.waypoints) w.push_back(json::array({z.real(), z.imag()}));
    j["waypoints"] = w;
    j["start_sheet"] = p.start_sheet;
    j["closed"] = p.closed;
    j["label"] = p.label;
    return j;
}

inline PathSpec path_from_json(const json& j) {
    PathSpec p;
    for (auto& w : j.at("waypoints")) p.waypoints.push_back(cplx(w.at(0), w.at(1)));
    p.start_sheet = j.value("start_sheet", 0);
    p.closed = j.value("closed", false);
    p.label = j.value("label", "");
    return p;
}

inline json cycles_to_json(const CycleSet& cs) {
    json j;
    json a = json::array(), b = json::array(), c = json::array();
    for (auto& p : cs.A) a.push_back(path_to_json(p));
    for (auto& p : cs.B) b.push_back(path_to_json(p));
    for (auto& sc : cs.C) {
        json e;
        e["center"] = json::array({sc.center.real(), sc.center.imag()});
        e["radius"] = sc.radius;
        e["sheet"] = sc.sheet;
        e["windings"] = sc.windings;
        e["label"] = sc.label;
        c.push_back(e);
    }
    j["A"] = a;
    j["B"] = b;
    j["C"] = c;
    j["clearance"] = cs.clearance;
    return j;
}

inline CycleSet cycles_from_json(const json& j) {
    CycleSet cs;
    for (auto& p : j.value("A", json::array())) cs.A.push_back(path_from_json(p));
    for (auto& p : j.value("B", json::array())) cs.B.push_back(path_from_json(p));
    for (auto& e : j.value("C", json::array())) {
        CircleSpec sc;
        sc.center = cplx(e.at("center").at(0), e.at("center").at(1));
        sc.radius = e.at("radius");
        sc.sheet = e.value("sheet", 0);
        sc.windings = e.value("windings", 1);
        sc.label = e.value("label", "");
        cs.C.push_back(sc);
    }
    cs.clearance = j.value("clearance", 0.0);
    return cs;
}

// ---------------------------------------------------------------------------
// Complex / matrix serialization: complex as [re, im], matrices row-major.

inline json cplx_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json mat_to_json(const Mat& m) {
    json j;
    j["rows"] = m.rows;
    j["cols"] = m.cols;
    json data = json::array();
    for (auto& v : m.a) data.push_back(cplx_to_json(v));
    j["data"] = data;
    return j;
}

inline Mat mat_from_json(const json& j) {
    Mat m(j.at("rows").get<int>(), j.at("cols").get<int>());
    size_t idx = 0;
    for (auto& v : j.at("data")) m.a[idx++] = cplx(v.at(0), v.at(1));
    return m;
}

// FNV-1a fingerprint of a canonical dump.
inline std::string fingerprint(const json& j) {
    std::string s = j.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return buf;
}

inline json periods_to_json(const PeriodData& pd, const std::string& curve_fp,
                            const std::string& cycles_fp, int precision) {
    json j;
    j["schema"] = "curvint.periods.v1";
    j["genus"] = pd.genus;
    json interior = json::array();
    for (auto& ij : pd.interior) interior.push_back(json::array({ij.first, ij.second}));
    j["interior"] = interior;
    j["K"] = mat_to_json(pd.K);
    j["Khat"] = mat_to_json(pd.Khat);
    j["L"] = mat_to_json(pd.L);
    j["tau"] = mat_to_json(pd.tau);
    j["S"] = mat_to_json(pd.S);
    j["S_asymmetry"] = pd.s_asymmetry;
    j["origin"] = {{"x", cplx_to_json(pd.origin.x)}, {"y", cplx_to_json(pd.origin.y)}};
    j["cycles"] = cycles_to_json(pd.cycles);
    j["degenerate"] = pd.degenerate;
    j["precision"] = precision;
    j["curve_fingerprint"] = curve_fp;
    j["cycles_fingerprint"] = cycles_fp;
    return j;
}

inline json decomposition_to_json(const Decomposition& d, const PeriodData& pd) {
    json j;
    j["schema"] = "curvint.decomposition.v1";
    json poles = json::array();
    for (size_t p = 0; p < d.times.poles.size(); ++p) {
        auto& pole = d.times.poles[p];
        json e;
        e["label"] = pole.label;
        e["at_puncture"] = pole.at_puncture;
        if (!pole.at_puncture) {
            e["x"] = cplx_to_json(pole.point.x);
            e["y"] = cplx_to_json(pole.point.y);
        }
        e["order_of_x"] = pole.a;
        e["deg"] = pole.deg;
        json t = json::array();
        for (auto& v : d.times.t[p]) t.push_back(cplx_to_json(v));
        e["times"] = t;
        poles.push_back(e);
    }
    j["poles"] = poles;
    json th = json::array();
    for (auto& v : d.t_holo) th.push_back(cplx_to_json(v));
    j["t_holomorphic"] = th;
    json rc = json::array();
    for (size_t c = 0; c < d.residual_coeffs.size(); ++c) {
        json e;
        e["monomial"] = json::array({pd.interior[c].first, pd.interior[c].second});
        e["coeff"] = cplx_to_json(d.residual_coeffs[c]);
        rc.push_back(e);
    }
    j["residual_poly"] = rc;
    if (!d.third_kind_comb.empty()) {
        json tk = json::array();
        for (size_t c = 0; c < d.third_kind_comb.size(); ++c) {
            json e;
            e["monomial"] = json::array({d.third_kind_points[c].first, d.third_kind_points[c].second});
            e["coeff"] = cplx_to_json(d.third_kind_comb[c]);
            tk.push_back(e);
        }
        j["third_kind_combination"] = tk;
    }
    j["residual_mismatch"] = d.residual_mismatch;
    return j;
}

// ---------------------------------------------------------------------------
// Gamma expressions: "A1 + 2*B1 - 3*C0" or "arc:(re,im,sheet)->(re,im,sheet)".

struct GammaParsed {
    bool is_arc = false;
    Decomposer::GammaSpec spec;
    cplx arc_from{}, arc_to{};
    int sheet_from = 0, sheet_to = 0;
};

inline GammaParsed parse_gamma(const std::string& s, int genus) {
    GammaParsed out;
    if (s.rfind("arc:", 0) == 0) {
        out.is_arc = true;
        double a, b, c, d;
        int s1, s2;
        if (sscanf(s.c_str(), "arc:(%lf,%lf,%d)->(%lf,%lf,%d)", &a, &b, &s1, &c, &d, &s2) != 6)
            throw input_error("gamma: arc syntax is arc:(re,im,sheet)->(re,im,sheet)");
        out.arc_from = cplx(a, b);
        out.arc_to = cplx(c, d);
        out.sheet_from = s1;
        out.sheet_to = s2;
        return out;
    }
    out.spec.a.assign(genus, 0);
    out.spec.b.assign(genus, 0);
    size_t pos = 0;
    auto skip = [&] {
        while (pos < s.size() && std::isspace((unsigned char)s[pos])) ++pos;
    };
    long long sign = 1;
    skip();
    while (pos < s.size()) {
        skip();
        if (s[pos] == '+') {
            sign = 1;
            ++pos;
            skip();
        } else if (s[pos] == '-') {
            sign = -1;
            ++pos;
            skip();
        }
        long long coef = 1;
        if (std::isdigit((unsigned char)s[pos])) {
            size_t st = pos;
            while (pos < s.size() && std::isdigit((unsigned char)s[pos])) ++pos;
            coef = std::stoll(s.substr(st, pos - st));
            skip();
            if (pos < s.size() && s[pos] == '*') {
                ++pos;
                skip();
            }
        }
        if (pos >= s.size()) throw input_error("gamma: dangling coefficient");
        char kind = s[pos++];
        size_t st = pos;
        while (pos < s.size() && std::isdigit((unsigned char)s[pos])) ++pos;
        if (st == pos) throw input_error("gamma: index expected after basis letter");
        int idx = std::stoi(s.substr(st, pos - st));
        if (kind == 'A' || kind == 'a') {
            if (idx < 1 || idx > genus) throw input_error("gamma: A index out of range");
            out.spec.a[idx - 1] += sign * coef;
        } else if (kind == 'B' || kind == 'b') {
            if (idx < 1 || idx > genus) throw input_error("gamma: B index out of range");
            out.spec.b[idx - 1] += sign * coef;
        } else if (kind == 'C' || kind == 'c') {
            out.spec.c[idx] += sign * coef;
        } else {
            throw input_error(std::string("gamma: unknown basis letter '") + kind + "'");
        }
        sign = 1;
        skip();
    }
    return out;
}

// rational 1-form from JSON {"num": [monomials], "den": [monomials]}
inline RationalForm parse_form(const json& j, const std::map<std::string, GaussRational>& params) {
    auto poly_of = [&](const json& arr) {
        BivarPolyC p;
        for (auto& m : arr) {
            GaussRational c;
            if (m.contains("coeff"))
                c = CoeffParser(m.at("coeff").get<std::string>(), params).parse();
            else
                c = GaussRational{Rational::from_string(m.value("re", "0")),
                                  Rational::from_string(m.value("im", "0"))};
            p.add_term(m.at("i").get<int>(), m.at("j").get<int>(), c.to_cplx());
        }
        return p;
    };
    RationalForm f;
    f.num = poly_of(j.at("num"));
    f.den = j.contains("den") ? poly_of(j.at("den")) : BivarPolyC::monomial(0, 0, cplx(1));
    if (f.den.is_zero()) throw input_error("form: zero denominator");
    return f;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw input_error("JSON parse failure in '" + path + "': " + e.what());
    }
    return j;
}

}  // namespace curvint
