#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pvarlevy/errors.hpp"
#include "pvarlevy/levy.hpp"

namespace pvarlevy {

namespace {

using json = nlohmann::json;

void only_fields(const json& j, const std::set<std::string>& allowed, const char* where) {
    if (!j.is_object()) throw ValidationError(std::string(where) + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ValidationError(std::string("unknown field '") + it.key() + "' in " + where);
}

const json& field(const json& j, const char* key, const char* where) {
    auto it = j.find(key);
    if (it == j.end()) throw ValidationError(std::string("missing field '") + key + "' in " + where);
    return *it;
}

double number(const json& j, const char* what) {
    if (!j.is_number()) throw ValidationError(std::string(what) + " must be a number");
    return j.get<double>();
}

Point point(const json& j, std::size_t d, const char* what) {
    if (!j.is_array() || j.size() != d)
        throw ValidationError(std::string(what) + " must be an array of " + std::to_string(d) + " numbers");
    Point p(d);
    for (std::size_t i = 0; i < d; ++i) p[i] = number(j[i], what);
    return p;
}

Subspace subspace(const json& j, std::size_t d, const char* what) {
    if (!j.is_array()) throw ValidationError(std::string(what) + " must be an array of vectors");
    std::vector<Point> basis;
    for (const auto& v : j) basis.push_back(point(v, d, what));
    return Subspace(d, std::move(basis));
}

StableComponent stable_component(const json& j, std::size_t d) {
    only_fields(j, {"beta", "sphere", "big_jumps"}, "stable");
    StableComponent sc;
    sc.beta = number(field(j, "beta", "stable"), "beta");
    const json& sphere = field(j, "sphere", "stable");
    if (!sphere.is_array()) throw ValidationError("stable.sphere must be an array");
    for (const auto& e : sphere) {
        only_fields(e, {"direction", "weight"}, "stable.sphere entry");
        sc.sphere.push_back({point(field(e, "direction", "sphere entry"), d, "direction"),
                             number(field(e, "weight", "sphere entry"), "weight")});
    }
    if (j.contains("big_jumps")) {
        if (!j["big_jumps"].is_boolean()) throw ValidationError("big_jumps must be a boolean");
        sc.big_jumps = j["big_jumps"].get<bool>();
    }
    return sc;
}

PowerWedgeDensity wedge(const json& j) {
    only_fields(j, {"kind", "q", "r", "one_sided", "floor", "bins", "sub_bins"}, "density");
    const json& kind = field(j, "kind", "density");
    if (!kind.is_string() || kind.get<std::string>() != "power_wedge")
        throw ValidationError("density.kind must be \"power_wedge\"");
    PowerWedgeDensity w;
    w.q = number(field(j, "q", "density"), "q");
    w.r = number(field(j, "r", "density"), "r");
    if (j.contains("one_sided")) w.one_sided = j["one_sided"].get<bool>();
    if (j.contains("floor")) w.floor = number(j["floor"], "floor");
    if (j.contains("bins")) w.bins = j["bins"].get<int>();
    if (j.contains("sub_bins")) w.sub_bins = j["sub_bins"].get<int>();
    return w;
}

}  // namespace

LevyModel parse_model(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("model JSON: ") + e.what());
    }
    try {
        only_fields(j, {"schema", "dimension", "alpha", "atoms", "stable", "density", "K_basis", "L_basis"},
                    "model");
        const json& schema = field(j, "schema", "model");
        if (!schema.is_number_integer() || schema.get<int>() != 1)
            throw ValidationError("unsupported model schema (expected 1)");
        const json& dj = field(j, "dimension", "model");
        if (!dj.is_number_integer() || dj.get<long long>() < 1) throw ValidationError("dimension must be a positive integer");
        const std::size_t d = dj.get<std::size_t>();

        LevyModel m;
        m.dim = d;
        m.alpha = j.contains("alpha") ? point(j["alpha"], d, "alpha") : Point(d);
        if (j.contains("atoms")) {
            if (!j["atoms"].is_array()) throw ValidationError("atoms must be an array");
            for (const auto& a : j["atoms"]) {
                only_fields(a, {"point", "rate"}, "atom");
                m.atoms.push_back({point(field(a, "point", "atom"), d, "atom point"),
                                   number(field(a, "rate", "atom"), "rate")});
            }
        }
        if (j.contains("stable")) {
            const json& s = j["stable"];
            if (s.is_array())
                for (const auto& e : s) m.stable.push_back(stable_component(e, d));
            else
                m.stable.push_back(stable_component(s, d));
        }
        if (j.contains("density")) m.wedge = wedge(j["density"]);
        m.K = subspace(field(j, "K_basis", "model"), d, "K_basis");
        m.L = subspace(field(j, "L_basis", "model"), d, "L_basis");
        return finalize(std::move(m));
    } catch (const json::exception& e) {
        throw ValidationError(std::string("model JSON: ") + e.what());
    }
}

LevyModel load_model(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ValidationError("cannot open model file '" + file + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

}  // namespace pvarlevy
