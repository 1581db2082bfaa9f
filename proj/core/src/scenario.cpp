#include "billiards/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "billiards/correspondence.hpp"
#include "billiards/errors.hpp"
#include "billiards/presets.hpp"

namespace billiards {

using json = nlohmann::ordered_json;

namespace {

const std::vector<CheckInfo> kChecks = {
    {"native_energy_drift", ScenarioKind::Billiard, CheckMode::Max, 1e-9,
     "max |e_native(t) - e_native(0)| over samples and events"},
    {"partner_energy_variation", ScenarioKind::Billiard, CheckMode::Max, 1e-7,
     "total variation of e_partner along samples and across reflections"},
    {"partner_jump_first_reflection", ScenarioKind::Billiard, CheckMode::Min, 1e-3,
     "|e_partner| jump at the first reflection"},
    {"reflection_kinetic_energy", ScenarioKind::Billiard, CheckMode::Max, 1e-12,
     "max kinetic energy change at a reflection"},
    {"reflection_tangential", ScenarioKind::Billiard, CheckMode::Max, 1e-10,
     "max change of the tangential velocity at a reflection"},
    {"twin_correspondence", ScenarioKind::Billiard, CheckMode::Max, 1e-6,
     "max arc-length matched distance between the orbit and its projective partner"},
    {"bounce_count", ScenarioKind::Billiard, CheckMode::Min, 20.0, "number of recorded reflections"},
    {"orbit_deviation", ScenarioKind::ConformalOrbit, CheckMode::Max, 1e-6,
     "max arc-length matched distance between the mapped and the partner orbit"},
    {"level_defect", ScenarioKind::ConformalOrbit, CheckMode::Max, 1e-12,
     "partner energy of the mapped initial data minus the predicted level"},
    {"shell_drift", ScenarioKind::ConformalOrbit, CheckMode::Max, 1e-9,
     "max drift of either orbit off its energy level"},
    {"sphere_residual", ScenarioKind::ConformalImage, CheckMode::Max, 1e-8,
     "residual of the centered conic equation on the sphere"},
    {"factor_residual", ScenarioKind::ConformalImage, CheckMode::Max, 1e-8,
     "residual of the rotated gnomonic factor of each branch"},
    {"foci_error", ScenarioKind::ConformalImage, CheckMode::Max, 1e-8,
     "|measured focus - 2 sqrt(a) / (1 - a)|"},
    {"family_spread", ScenarioKind::ConformalImage, CheckMode::Max, 1e-8,
     "spread of the measured foci across members of one family"},
    {"g1_nonempty_ellipses", ScenarioKind::ConformalImage, CheckMode::Max, 0.5,
     "ellipse members whose complementary factor has real points"},
};

[[noreturn]] void fail(const std::string& what) { throw ConfigError(what); }

const json& require(const json& j, const char* key, const std::string& ctx) {
    if (!j.is_object() || !j.contains(key)) fail(ctx + ": missing '" + key + "'");
    return j.at(key);
}

double num(const json& j, const std::string& ctx) {
    if (!j.is_number()) fail(ctx + ": expected a number");
    double v = j.get<double>();
    if (!std::isfinite(v)) fail(ctx + ": not finite");
    return v;
}

double num_or(const json& j, const char* key, double dflt, const std::string& ctx) {
    if (!j.contains(key)) return dflt;
    return num(j.at(key), ctx + "." + key);
}

std::vector<double> vec(const json& j, const std::string& ctx, std::size_t n = 0) {
    if (!j.is_array()) fail(ctx + ": expected an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(num(j[i], ctx + "[" + std::to_string(i) + "]"));
    if (n != 0 && out.size() != n) fail(ctx + ": expected " + std::to_string(n) + " entries");
    return out;
}

cplx complex_of(const json& j, const std::string& ctx) {
    auto v = vec(j, ctx, 2);
    return {v[0], v[1]};
}

std::string str(const json& j, const std::string& ctx) {
    if (!j.is_string()) fail(ctx + ": expected a string");
    return j.get<std::string>();
}

SpaceSpec parse_space(const json& j) {
    std::string kind = str(require(j, "kind", "space"), "space.kind");
    double a = num_or(j, "a", 0.0, "space");
    try {
        if (kind == "plane") {
            std::string partner = j.contains("partner") ? str(j.at("partner"), "space.partner") : "sphere";
            if (partner != "sphere" && partner != "hyperboloid") fail("space.partner: unknown '" + partner + "'");
            return SpaceSpec::plane(a, partner == "sphere" ? +1 : -1);
        }
        if (kind == "sphere") return SpaceSpec::sphere(a);
        if (kind == "hyperboloid") return SpaceSpec::hyperboloid(a);
    } catch (const DomainError& e) {
        fail(std::string("space: ") + e.what());
    }
    fail("space.kind: unknown '" + kind + "'");
}

json dump_space(const SpaceSpec& s) {
    json j;
    switch (s.kind) {
        case SpaceKind::PlaneAffine: j["kind"] = "plane"; break;
        case SpaceKind::SphereSouth: j["kind"] = "sphere"; break;
        case SpaceKind::HyperboloidLower: j["kind"] = "hyperboloid"; break;
    }
    j["a"] = s.a;
    if (s.kind == SpaceKind::PlaneAffine) j["partner"] = s.partner_sign > 0 ? "sphere" : "hyperboloid";
    return j;
}

Branch parse_branch(const json& j, const std::string& ctx) {
    if (!j.contains("branch")) return Branch::Both;
    std::string b = str(j.at("branch"), ctx + ".branch");
    if (b == "both") return Branch::Both;
    if (b == "positive") return Branch::Positive;
    if (b == "negative") return Branch::Negative;
    fail(ctx + ".branch: unknown '" + b + "'");
}

const char* branch_name(Branch b) {
    switch (b) {
        case Branch::Both: return "both";
        case Branch::Positive: return "positive";
        case Branch::Negative: return "negative";
    }
    return "both";
}

ConicSpec parse_member(const json& j, const SpaceSpec& space, const std::string& ctx) {
    if (!j.is_object()) fail(ctx + ": expected an object");
    ConicSpec c;
    try {
        if (j.contains("circle")) {
            const json& cj = j.at("circle");
            auto center = vec(require(cj, "center", ctx + ".circle"), ctx + ".circle.center", 2);
            double r = num(require(cj, "radius", ctx + ".circle"), ctx + ".circle.radius");
            c = ConicSpec::offset_circle(space, {center[0], center[1]}, r);
        } else if (j.contains("B")) {
            c = ConicSpec::from_B(space, num(j.at("B"), ctx + ".B"), parse_branch(j, ctx));
        } else if (j.contains("alpha")) {
            c = ConicSpec::from_angles(space, num(j.at("alpha"), ctx + ".alpha"),
                                       num(require(j, "beta", ctx), ctx + ".beta"));
            c.branch = parse_branch(j, ctx);
        } else {
            c.space = space;
            c.A2 = num(require(j, "A2", ctx), ctx + ".A2");
            c.B2 = num(require(j, "B2", ctx), ctx + ".B2");
            c.branch = parse_branch(j, ctx);
            if (j.contains("center")) {
                auto center = vec(j.at("center"), ctx + ".center", 2);
                c.center = {center[0], center[1]};
            }
        }
    } catch (const DomainError& e) {
        fail(ctx + ": " + e.what());
    }
    if (j.contains("arc")) {
        auto arc = vec(j.at("arc"), ctx + ".arc", 2);
        c.arc = ArcRange{arc[0], arc[1]};
    }
    return c;
}

json dump_member(const ConicSpec& c) {
    json j;
    j["A2"] = c.A2;
    j["B2"] = c.B2;
    j["branch"] = branch_name(c.branch);
    if (!c.centered()) j["center"] = {c.center.x(), c.center.y()};
    if (c.arc) j["arc"] = {c.arc->lo, c.arc->hi};
    return j;
}

const char* pairing_key(Pairing p) {
    switch (p) {
        case Pairing::SphericalHookeKepler: return "spherical-hooke-kepler";
        case Pairing::HyperbolicHookeKepler: return "hyperbolic-hooke-kepler";
        case Pairing::SphericalHyperbolicHooke: return "spherical-hyperbolic-hooke";
    }
    return "";
}

Pairing parse_pairing(const std::string& s, const std::string& ctx) {
    for (Pairing p : {Pairing::SphericalHookeKepler, Pairing::HyperbolicHookeKepler, Pairing::SphericalHyperbolicHooke})
        if (s == pairing_key(p)) return p;
    fail(ctx + ": unknown pairing '" + s + "'");
}

ScenarioKind parse_kind(const std::string& s) {
    for (ScenarioKind k : {ScenarioKind::Billiard, ScenarioKind::ConformalOrbit, ScenarioKind::ConformalImage})
        if (s == to_string(k)) return k;
    fail("kind: unknown '" + s + "'");
}

std::vector<CheckSpec> default_checks(ScenarioKind kind) {
    std::vector<CheckSpec> out;
    for (const auto& c : kChecks)
        if (c.kind == kind && std::string(c.name) != "partner_jump_first_reflection")
            out.push_back({c.name, c.threshold, false});
    return out;
}

Scenario parse_scenario(const json& j) {
    if (!j.is_object()) fail("scenario: expected an object");
    Scenario s;
    s.name = str(require(j, "name", "scenario"), "name");
    if (s.name.empty() || s.name.find_first_of("/\\ ") != std::string::npos)
        fail("name: must be non-empty without spaces or path separators");
    if (j.contains("description")) s.description = str(j.at("description"), "description");
    if (j.contains("kind")) s.kind = parse_kind(str(j.at("kind"), "kind"));
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) fail("seed: expected a non-negative integer");
        s.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("tolerance")) {
        double tol = num(j.at("tolerance"), "tolerance");
        if (tol <= 0.0) fail("tolerance: must be positive");
        s.tolerance = tol;
    }

    if (s.kind == ScenarioKind::Billiard) {
        s.space = parse_space(require(j, "space", "scenario"));
        const json& pj = require(j, "params", "scenario");
        s.params = {num_or(pj, "m1", 0.0, "params"), num_or(pj, "m2", 0.0, "params"), num_or(pj, "f", 0.0, "params")};
        const json& wj = require(j, "wall", "scenario");
        if (!wj.is_array()) fail("wall: expected an array of members");
        for (std::size_t i = 0; i < wj.size(); ++i)
            s.wall.members.push_back(parse_member(wj[i], s.space, "wall[" + std::to_string(i) + "]"));
        try {
            s.wall.validate();
        } catch (const DomainError& e) {
            fail(std::string("wall: ") + e.what());
        }
        const json& ij = require(j, "init", "scenario");
        std::string chart = ij.contains("chart") ? str(ij.at("chart"), "init.chart") : "gnomonic";
        if (chart == "gnomonic") {
            s.init.chart = Chart::Gnomonic;
        } else if (chart == "ambient") {
            if (!s.space.curved()) fail("init.chart: ambient coordinates need a curved space");
            s.init.chart = Chart::Ambient3;
        } else {
            fail("init.chart: unknown '" + chart + "'");
        }
        std::size_t dim = s.init.chart == Chart::Ambient3 ? 3 : 2;
        s.init.pos = vec(require(ij, "pos", "init"), "init.pos", dim);
        s.init.vel = vec(require(ij, "vel", "init"), "init.vel", dim);
        s.init.t = num_or(ij, "t", 0.0, "init");
        if (j.contains("limits")) {
            const json& lj = j.at("limits");
            s.limits.t_max = num_or(lj, "t_max", s.limits.t_max, "limits");
            s.limits.sample_dt = num_or(lj, "sample_dt", s.limits.sample_dt, "limits");
            if (lj.contains("bounce_max")) {
                if (!lj.at("bounce_max").is_number_integer()) fail("limits.bounce_max: expected an integer");
                s.limits.bounce_max = lj.at("bounce_max").get<int>();
            }
        }
        if (s.limits.t_max <= s.init.t || s.limits.sample_dt <= 0.0 || s.limits.bounce_max < 0)
            fail("limits: need t_max > init.t, sample_dt > 0, bounce_max >= 0");
    } else if (s.kind == ScenarioKind::ConformalOrbit) {
        const json& oj = require(j, "orbits", "scenario");
        if (!oj.is_array() || oj.empty()) fail("orbits: expected a non-empty array");
        for (std::size_t i = 0; i < oj.size(); ++i) {
            std::string ctx = "orbits[" + std::to_string(i) + "]";
            OrbitCase c;
            c.pairing = parse_pairing(str(require(oj[i], "pairing", ctx), ctx + ".pairing"), ctx);
            c.f = num(require(oj[i], "f", ctx), ctx + ".f");
            c.z0 = complex_of(require(oj[i], "z0", ctx), ctx + ".z0");
            c.w0 = complex_of(require(oj[i], "w0", ctx), ctx + ".w0");
            c.t_span = num_or(oj[i], "t_span", 0.0, ctx);
            if (c.z0 == cplx(0.0, 0.0)) fail(ctx + ".z0: must be nonzero");
            s.orbits.push_back(c);
        }
    } else {
        const json& gj = require(j, "image", "scenario");
        s.image.a_values = vec(require(gj, "a", "image"), "image.a");
        if (gj.contains("ellipse_offsets")) s.image.ellipse_offsets = vec(gj.at("ellipse_offsets"), "image.ellipse_offsets");
        if (gj.contains("ellipse_values")) s.image.ellipse_values = vec(gj.at("ellipse_values"), "image.ellipse_values");
        if (gj.contains("hyperbola_fractions"))
            s.image.hyperbola_fractions = vec(gj.at("hyperbola_fractions"), "image.hyperbola_fractions");
        if (gj.contains("samples")) {
            if (!gj.at("samples").is_number_integer()) fail("image.samples: expected an integer");
            s.image.samples = gj.at("samples").get<int>();
        }
        if (s.image.a_values.empty() || s.image.samples < 16) fail("image: need a values and samples >= 16");
        for (double a : s.image.a_values)
            if (!(a > 0.0 && a < 1.0)) fail("image.a: values must lie in (0, 1)");
        for (double f : s.image.hyperbola_fractions)
            if (!(f > 0.0 && f < 1.0)) fail("image.hyperbola_fractions: values must lie in (0, 1)");
        for (double a : s.image.a_values)
            for (double d : s.image.ellipse_offsets)
                if (!(d > 0.0 && a + d < 1.0)) fail("image.ellipse_offsets: need 0 < a + offset < 1");
        for (double B : s.image.ellipse_values)
            if (!(B > 0.0 && B < 1.0)) fail("image.ellipse_values: values must lie in (0, 1)");
    }

    if (j.contains("checks")) {
        const json& cj = j.at("checks");
        if (!cj.is_array()) fail("checks: expected an array");
        for (std::size_t i = 0; i < cj.size(); ++i) {
            std::string ctx = "checks[" + std::to_string(i) + "]";
            CheckSpec c;
            if (cj[i].is_string()) {
                c.name = cj[i].get<std::string>();
                c.threshold = check_info(c.name).threshold;
            } else {
                c.name = str(require(cj[i], "name", ctx), ctx + ".name");
                c.threshold = num_or(cj[i], "threshold", check_info(c.name).threshold, ctx);
                if (cj[i].contains("expect")) {
                    std::string e = str(cj[i].at("expect"), ctx + ".expect");
                    if (e != "pass" && e != "fail") fail(ctx + ".expect: must be 'pass' or 'fail'");
                    c.expect_fail = e == "fail";
                }
            }
            if (check_info(c.name).kind != s.kind)
                fail(ctx + ": check '" + c.name + "' does not apply to " + to_string(s.kind) + " scenarios");
            s.checks.push_back(c);
        }
    } else {
        s.checks = default_checks(s.kind);
    }
    return s;
}

json dump_scenario(const Scenario& s) {
    json j;
    j["name"] = s.name;
    if (!s.description.empty()) j["description"] = s.description;
    j["kind"] = to_string(s.kind);
    j["seed"] = s.seed;
    if (s.tolerance) j["tolerance"] = *s.tolerance;
    if (s.kind == ScenarioKind::Billiard) {
        j["space"] = dump_space(s.space);
        j["params"] = {{"m1", s.params.m1}, {"m2", s.params.m2}, {"f", s.params.f}};
        j["wall"] = json::array();
        for (const auto& m : s.wall.members) j["wall"].push_back(dump_member(m));
        j["init"] = {{"chart", s.init.chart == Chart::Ambient3 ? "ambient" : "gnomonic"},
                     {"pos", s.init.pos},
                     {"vel", s.init.vel},
                     {"t", s.init.t}};
        j["limits"] = {{"t_max", s.limits.t_max}, {"bounce_max", s.limits.bounce_max}, {"sample_dt", s.limits.sample_dt}};
    } else if (s.kind == ScenarioKind::ConformalOrbit) {
        j["orbits"] = json::array();
        for (const auto& o : s.orbits)
            j["orbits"].push_back({{"pairing", pairing_key(o.pairing)},
                                   {"f", o.f},
                                   {"z0", {o.z0.real(), o.z0.imag()}},
                                   {"w0", {o.w0.real(), o.w0.imag()}},
                                   {"t_span", o.t_span}});
    } else {
        j["image"] = {{"a", s.image.a_values},
                      {"ellipse_offsets", s.image.ellipse_offsets},
                      {"ellipse_values", s.image.ellipse_values},
                      {"hyperbola_fractions", s.image.hyperbola_fractions},
                      {"samples", s.image.samples}};
    }
    j["checks"] = json::array();
    for (const auto& c : s.checks)
        j["checks"].push_back({{"name", c.name}, {"threshold", c.threshold}, {"expect", c.expect_fail ? "fail" : "pass"}});
    return j;
}

json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        fail(std::string("invalid JSON: ") + e.what());
    }
}

}  // namespace

const char* to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::Billiard: return "billiard";
        case ScenarioKind::ConformalOrbit: return "conformal-orbit";
        case ScenarioKind::ConformalImage: return "conformal-image";
    }
    return "unknown";
}

const std::vector<CheckInfo>& known_checks() { return kChecks; }

const CheckInfo& check_info(const std::string& name) {
    for (const auto& c : kChecks)
        if (name == c.name) return c;
    fail("unknown check '" + name + "'");
}

IntegratorOptions Scenario::integrator_options() const {
    IntegratorOptions opt = IntegratorOptions::defaults();
    if (tolerance) opt.rtol = opt.atol = *tolerance;
    return opt;
}

bool operator==(const ConicSpec& a, const ConicSpec& b) {
    bool arcs = a.arc.has_value() == b.arc.has_value() &&
                (!a.arc || (a.arc->lo == b.arc->lo && a.arc->hi == b.arc->hi));
    return a.space == b.space && a.A2 == b.A2 && a.B2 == b.B2 && a.branch == b.branch && arcs && a.center == b.center;
}

bool operator==(const Scenario& a, const Scenario& b) {
    return a.name == b.name && a.description == b.description && a.kind == b.kind && a.space == b.space &&
           a.params == b.params && a.wall.members == b.wall.members && a.init == b.init &&
           a.limits.t_max == b.limits.t_max && a.limits.bounce_max == b.limits.bounce_max &&
           a.limits.sample_dt == b.limits.sample_dt && a.tolerance == b.tolerance && a.checks == b.checks &&
           a.seed == b.seed && a.orbits == b.orbits && a.image == b.image;
}

Scenario scenario_from_json(const std::string& text) {
    try {
        return parse_scenario(parse_text(text));
    } catch (const json::exception& e) {
        fail(std::string("invalid scenario: ") + e.what());
    }
}

std::string scenario_to_json(const Scenario& s) { return dump_scenario(s).dump(2); }

std::vector<Scenario> scenarios_from_json(const std::string& text) {
    json j = parse_text(text);
    try {
        if (!j.is_object() || !j.contains("scenarios")) return {parse_scenario(j)};
        const json& arr = j.at("scenarios");
        if (!arr.is_array() || arr.empty()) fail("scenarios: expected a non-empty array");
        std::vector<Scenario> out;
        for (const auto& e : arr) {
            if (e.is_string()) {
                auto p = find_preset(e.get<std::string>());
                if (!p) fail("scenarios: unknown preset '" + e.get<std::string>() + "'");
                out.push_back(*p);
            } else {
                out.push_back(parse_scenario(e));
            }
        }
        for (std::size_t i = 0; i < out.size(); ++i)
            for (std::size_t k = i + 1; k < out.size(); ++k)
                if (out[i].name == out[k].name) fail("scenarios: duplicate name '" + out[i].name + "'");
        return out;
    } catch (const json::exception& e) {
        fail(std::string("invalid scenario: ") + e.what());
    }
}

std::vector<Scenario> load_scenarios(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return scenarios_from_json(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

PlaneState plane_init(const Scenario& s) {
    if (s.space.curved() || s.init.chart != Chart::Gnomonic) throw ConfigError("plane_init: not a planar scenario");
    PlaneState st;
    st.pos.coords = {s.init.pos[0], s.init.pos[1]};
    st.vel.comps = {s.init.vel[0], s.init.vel[1]};
    st.t = s.init.t;
    return st;
}

CurvedState curved_init(const Scenario& s) {
    if (!s.space.curved()) throw ConfigError("curved_init: not a curved scenario");
    if (s.init.chart == Chart::Gnomonic) {
        PlaneState p;
        p.pos.coords = {s.init.pos[0], s.init.pos[1]};
        p.vel.comps = {s.init.vel[0], s.init.vel[1]};
        p.t = s.init.t;
        try {
            return partner_state(p, s.space.partner());
        } catch (const std::exception& e) {
            throw ConfigError(std::string("init: ") + e.what());
        }
    }
    CurvedState st;
    Eigen::Vector3d q(s.init.pos[0], s.init.pos[1], s.init.pos[2]);
    if (manifold_residual(q, s.space) > 1e-9) throw ConfigError("init.pos: not on the manifold");
    st.pos = project_to_manifold(q, s.space);
    Eigen::Vector3d v(s.init.vel[0], s.init.vel[1], s.init.vel[2]);
    st.vel = tangent_project(st.pos, v, s.space);
    if ((st.vel.comps - v).norm() > 1e-9 * std::max(1.0, v.norm())) throw ConfigError("init.vel: not tangent");
    st.t = s.init.t;
    return st;
}

}  // namespace billiards
