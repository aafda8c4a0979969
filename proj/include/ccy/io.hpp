#pragma once

#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "ccy/cone.hpp"
#include "ccy/linf.hpp"
#include "ccy/masolve.hpp"
#include "ccy/section.hpp"

namespace ccy {

using json = nlohmann::json;

/// Cone input file: { "dim": m, "rays": [[ints or "p/q"]],
///                    "xi": [floats or "p/q"] (optional), "l": [...] (optional) }
struct ConeInput {
    int dim = 0;
    std::vector<RatVec> rays;
    std::optional<Vec> xi;
    std::optional<RatVec> l;
};

namespace detail {

inline Rational rational_from_json(const json& v) {
    if (v.is_string()) return Rational::parse(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long long>());
    if (v.is_number_float()) {
        // exact only for reasonably small dyadic/decimal literals
        double d = v.get<double>();
        long long den = 1;
        while (den < (1LL << 40) && std::floor(d * den) != d * den) den *= 2;
        return Rational((long long)std::llround(d * den), den);
    }
    throw io_error("cannot parse rational from JSON value");
}

inline double double_from_json(const json& v) {
    if (v.is_string()) return Rational::parse(v.get<std::string>()).to_double();
    return v.get<double>();
}

inline json vec_to_json(const Vec& v) { return json(v); }

inline json ratvec_to_json(const RatVec& v) {
    json out = json::array();
    for (const auto& x : v) {
        if (x.is_integer())
            out.push_back(x.num());
        else
            out.push_back(x.str());
    }
    return out;
}

} // namespace detail

inline ConeInput parse_cone_json(const json& j) {
    ConeInput in;
    if (!j.contains("dim") || !j.contains("rays")) throw io_error("cone file needs dim and rays");
    in.dim = j.at("dim").get<int>();
    for (const auto& row : j.at("rays")) {
        RatVec r;
        for (const auto& x : row) r.push_back(detail::rational_from_json(x));
        if ((int)r.size() != in.dim) throw io_error("ray length disagrees with dim");
        in.rays.push_back(std::move(r));
    }
    if (j.contains("xi")) {
        Vec xi;
        for (const auto& x : j.at("xi")) xi.push_back(detail::double_from_json(x));
        if ((int)xi.size() != in.dim) throw io_error("xi length disagrees with dim");
        in.xi = std::move(xi);
    }
    if (j.contains("l")) {
        RatVec l;
        for (const auto& x : j.at("l")) l.push_back(detail::rational_from_json(x));
        in.l = std::move(l);
    }
    return in;
}

inline ConeInput load_cone_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot open cone file: " + path);
    json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        throw io_error("cone file parse error: " + std::string(e.what()));
    }
    return parse_cone_json(j);
}

// ---------------------------------------------------------------------------
// solved-instance serialization (solve-ma output, certify input)
// ---------------------------------------------------------------------------

struct SolvedInstance {
    double m_homog = 0;
    MASolution sol;
    Polytope q;
    std::vector<Vec> basis; // empty when the problem was posed directly on Q
    Vec xi;
    RatVec l;
};

inline json solved_to_json(const SolvedInstance& inst) {
    json j;
    j["m"] = inst.m_homog;
    j["n"] = inst.sol.phi.n;
    j["slopes"] = json::array();
    for (const auto& q : inst.sol.phi.slopes) j["slopes"].push_back(detail::vec_to_json(q));
    j["intercepts"] = inst.sol.phi.intercepts;
    j["weights"] = inst.sol.weights;
    j["q_vertices"] = json::array();
    for (const auto& v : inst.q.vertices) j["q_vertices"].push_back(detail::vec_to_json(v));
    j["basis"] = json::array();
    for (const auto& b : inst.basis) j["basis"].push_back(detail::vec_to_json(b));
    j["xi"] = inst.xi;
    j["l"] = detail::ratvec_to_json(inst.l);
    j["ding"] = {{"total", inst.sol.ding.total},
                 {"log_term", inst.sol.ding.log_term},
                 {"energy_term", inst.sol.ding.energy_term},
                 {"j_value", inst.sol.ding.j_value}};
    j["mass_residual"] = inst.sol.mass_residual;
    j["linf_vs_support"] = inst.sol.linf_vs_support;
    j["translation"] = inst.sol.translation;
    j["iterations"] = inst.sol.iterations;
    j["converged"] = inst.sol.converged;
    j["box"] = inst.sol.box;
    return j;
}

inline SolvedInstance solved_from_json(const json& j) {
    SolvedInstance inst;
    inst.m_homog = j.at("m").get<double>();
    inst.sol.phi.n = j.at("n").get<int>();
    for (const auto& row : j.at("slopes")) inst.sol.phi.slopes.push_back(row.get<Vec>());
    inst.sol.phi.intercepts = j.at("intercepts").get<Vec>();
    inst.sol.weights = j.at("weights").get<Vec>();
    inst.sol.slopes = inst.sol.phi.slopes;
    inst.q.n = inst.sol.phi.n;
    for (const auto& row : j.at("q_vertices")) inst.q.vertices.push_back(row.get<Vec>());
    for (const auto& row : j.at("basis")) inst.basis.push_back(row.get<Vec>());
    inst.xi = j.at("xi").get<Vec>();
    for (const auto& x : j.at("l")) inst.l.push_back(detail::rational_from_json(x));
    inst.sol.ding.total = j.at("ding").at("total").get<double>();
    inst.sol.ding.log_term = j.at("ding").at("log_term").get<double>();
    inst.sol.ding.energy_term = j.at("ding").at("energy_term").get<double>();
    inst.sol.ding.j_value = j.at("ding").at("j_value").get<double>();
    inst.sol.mass_residual = j.at("mass_residual").get<double>();
    inst.sol.linf_vs_support = j.at("linf_vs_support").get<double>();
    inst.sol.translation = j.at("translation").get<Vec>();
    inst.sol.iterations = j.at("iterations").get<int>();
    inst.sol.converged = j.at("converged").get<bool>();
    inst.sol.box = j.at("box").get<double>();
    return inst;
}

inline void write_json_file(const json& j, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw io_error("cannot open for writing: " + path);
    f << j.dump(2) << "\n";
}

inline json read_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot open: " + path);
    json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        throw io_error("json parse error: " + std::string(e.what()));
    }
    return j;
}

/// CSV dump of (s, phi(s), phi_Q(s), e^{-m phi(s)}) over a tensor grid.
/// Locale-independent: numbers formatted by the JSON serializer.
inline void emit_csv(const PiecewiseAffineConvex& phi, const Polytope& q, double m_homog,
                     double radius, int steps, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw io_error("cannot open for writing: " + path);
    int n = phi.n;
    PiecewiseAffineConvex support{n, q.vertices, Vec(q.vertices.size(), 0.0)};
    for (int c = 0; c < n; ++c) f << "s" << (c + 1) << ",";
    f << "phi,phi_Q,density\n";
    if (steps <= 0) return;
    auto num = [](double x) { return json(x).dump(); };
    Vec s(n);
    std::vector<int> idx(n, 0);
    for (;;) {
        for (int c = 0; c < n; ++c)
            s[c] = steps == 1 ? 0.0 : -radius + 2 * radius * idx[c] / double(steps - 1);
        double p = phi(s);
        for (int c = 0; c < n; ++c) f << num(s[c]) << ",";
        f << num(p) << "," << num(support(s)) << "," << num(std::exp(-m_homog * p)) << "\n";
        int c = 0;
        while (c < n && ++idx[c] >= steps) idx[c++] = 0;
        if (c == n) break;
    }
}

} // namespace ccy
