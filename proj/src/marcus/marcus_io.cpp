#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pvarlevy/errors.hpp"
#include "pvarlevy/marcus.hpp"

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

void check_schema(const json& j) {
    const json& s = field(j, "schema", "file");
    if (!s.is_number_integer() || s.get<int>() != 1) throw ValidationError("unsupported schema (expected 1)");
}

Point point(const json& j, std::size_t d, const char* what) {
    if (!j.is_array() || j.size() != d)
        throw ValidationError(std::string(what) + " must be an array of " + std::to_string(d) + " numbers");
    Point p(d);
    for (std::size_t i = 0; i < d; ++i) {
        if (!j[i].is_number()) throw ValidationError(std::string(what) + " must contain numbers");
        p[i] = j[i].get<double>();
    }
    return p;
}

// m x m matrix given as nested rows.
std::vector<double> matrix(const json& j, std::size_t m) {
    if (!j.is_array() || j.size() != m) throw ValidationError("field matrix must have m rows");
    std::vector<double> a;
    for (const auto& row : j) {
        Point r = point(row, m, "matrix row");
        a.insert(a.end(), r.vec().begin(), r.vec().end());
    }
    return a;
}

VectorFieldSpec vector_field(const json& j) {
    only_fields(j, {"family", "state_dim", "input_dim", "matrices", "offsets", "catalog", "amplitude", "frequency",
                    "phases"},
                "field");
    VectorFieldSpec f;
    std::string fam = field(j, "family", "field").get<std::string>();
    f.m = field(j, "state_dim", "field").get<std::size_t>();
    f.d = field(j, "input_dim", "field").get<std::size_t>();
    if (fam == "linear" || fam == "affine") {
        f.family = fam == "linear" ? FieldFamily::Linear : FieldFamily::Affine;
        for (const auto& a : field(j, "matrices", "field")) f.matrices.push_back(matrix(a, f.m));
        if (f.family == FieldFamily::Affine)
            for (const auto& b : field(j, "offsets", "field")) f.offsets.push_back(point(b, f.m, "offset"));
    } else if (fam == "smooth_bounded") {
        f.family = FieldFamily::SmoothBounded;
        if (j.contains("catalog")) f.catalog = j["catalog"].get<std::string>();
        if (j.contains("amplitude")) f.amplitude = j["amplitude"].get<double>();
        if (j.contains("frequency")) f.frequency = j["frequency"].get<double>();
        if (j.contains("phases")) f.phases = j["phases"].get<std::vector<double>>();
    } else {
        throw ValidationError("unknown field family '" + fam + "'");
    }
    f.validate();
    return f;
}

std::string slurp(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ValidationError("cannot open '" + file + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <class F>
auto guarded(const std::string& text, F&& body) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("JSON: ") + e.what());
    }
    try {
        return body(j);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("JSON: ") + e.what());
    }
}

}  // namespace

MarcusSystem parse_system(const std::string& text) {
    return guarded(text, [](const json& j) {
        only_fields(j, {"schema", "field", "x0", "ode"}, "system");
        check_schema(j);
        MarcusSystem s;
        s.f = vector_field(field(j, "field", "system"));
        s.x0 = point(field(j, "x0", "system"), s.f.m, "x0");
        if (j.contains("ode")) {
            const json& o = j["ode"];
            only_fields(o, {"steps", "richardson_check", "tolerance", "output_substeps"}, "ode");
            if (o.contains("steps")) s.ode.steps = o["steps"].get<int>();
            if (o.contains("richardson_check")) s.ode.richardson_check = o["richardson_check"].get<bool>();
            if (o.contains("tolerance")) s.ode.tolerance = o["tolerance"].get<double>();
            if (o.contains("output_substeps")) s.ode.output_substeps = o["output_substeps"].get<int>();
        }
        s.validate();
        return s;
    });
}

MarcusSystem load_system(const std::string& file) { return parse_system(slurp(file)); }

SupportCurveSpec parse_support_spec(const std::string& text) {
    return guarded(text, [](const json& j) {
        only_fields(j, {"schema", "dimension", "alpha_nu", "phi_L", "jumps"}, "support candidate");
        check_schema(j);
        const std::size_t d = field(j, "dimension", "support candidate").get<std::size_t>();
        if (d < 1) throw ValidationError("dimension must be positive");
        SupportCurveSpec s;
        s.alpha_nu = point(field(j, "alpha_nu", "support candidate"), d, "alpha_nu");
        // phi_L nodes as [t, x1, .., xd]
        PathBuilder b(d);
        for (const auto& node : field(j, "phi_L", "support candidate")) {
            Point row = point(node, d + 1, "phi_L node");
            b.add(row[0], Point(std::vector<double>(row.vec().begin() + 1, row.vec().end())));
        }
        s.phi_L = std::move(b).build();
        if (j.contains("jumps"))
            for (const auto& e : j["jumps"]) {
                only_fields(e, {"time", "size"}, "jump");
                s.jumps.push_back({field(e, "time", "jump").get<double>(), point(field(e, "size", "jump"), d, "size")});
            }
        support_drive(s);  // validates
        return s;
    });
}

SupportCurveSpec load_support_spec(const std::string& file) { return parse_support_spec(slurp(file)); }

}  // namespace pvarlevy
