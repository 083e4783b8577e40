#pragma once

#include <array>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "currod/curve.hpp"
#include "currod/frame.hpp"
#include "currod/material.hpp"
#include "currod/minimize.hpp"
#include "currod/rod_state.hpp"
#include "currod/section.hpp"

namespace currod {

using nlohmann::json;

/// Validated run configuration; see docs/config.example.json for the schema.
struct RunConfig {
    struct Curve {
        std::string preset = "helix"; // line | circle | helix | fourier
        double radius = 1.0;
        double pitch = 1.0;
        double turns = 3.0;
        double length = 0.0; // 0 = derive from preset
        int n_s = 200;
        std::array<FourierSeries, 3> fourier;
    } curve;

    struct Frame {
        std::string mode = "frenet"; // frenet | rotation_minimizing | prescribed
        FourierSeries rho;
    } frame;

    struct Section {
        std::string preset = "disc"; // disc | square | rectangle | polygon
        double aspect = 1.0;
        std::vector<Vector2d> vertices;
        double edge_length = 0.08;
        int refine = 0;
    } section;

    struct MaterialCfg {
        double lambda = 1.0;
        double mu = 1.0;
        std::string density = "svk"; // svk | dist2so3
    } material;

    double alpha = 4.0;

    struct State {
        FourierSeries a, b, w, u;
        double u_linear = 0.0; // linear-in-s part of u (ring jump tests)
    } state;

    struct Reduce {
        std::string boundary = "clamped_both";
        std::array<FourierSeries, 3> f;
        FourierSeries g, m;
    } reduce;

    struct Gamma {
        std::vector<double> h{1e-2, 3e-3, 1e-3};
        std::string phi = "zero";             // zero | fem
        std::string reference = "unrelaxed";  // unrelaxed | fem
    } gamma;

    std::uint64_t seed = 42;
};

namespace cfgdetail {

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
    throw std::invalid_argument("config: " + path + ": " + what);
}

inline double num(const json& j, const std::string& path, const char* key, double fallback,
                  bool required = false) {
    if (!j.contains(key)) {
        if (required) fail(path + "." + key, "missing required number");
        return fallback;
    }
    if (!j[key].is_number()) fail(path + "." + key, "expected a number");
    const double v = j[key].get<double>();
    if (!std::isfinite(v)) fail(path + "." + key, "must be finite");
    return v;
}

inline std::string str(const json& j, const std::string& path, const char* key,
                       const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_string()) fail(path + "." + key, "expected a string");
    return j[key].get<std::string>();
}

inline FourierSeries series(const json& j, const std::string& path) {
    FourierSeries s;
    if (j.is_null()) return s;
    if (!j.is_object()) fail(path, "expected an object with cos/sin arrays");
    for (const char* key : {"cos", "sin"}) {
        if (!j.contains(key)) continue;
        if (!j[key].is_array()) fail(path + "." + key, "expected an array of numbers");
        auto& dst = key[0] == 'c' ? s.cos_coeff : s.sin_coeff;
        for (const auto& v : j[key]) {
            if (!v.is_number()) fail(path + "." + key, "expected numbers");
            dst.push_back(v.get<double>());
        }
    }
    return s;
}

} // namespace cfgdetail

inline RunConfig parse_config(const json& j) {
    using namespace cfgdetail;
    RunConfig c;
    if (!j.is_object()) fail("$", "top-level config must be an object");

    if (j.contains("curve")) {
        const json& jc = j["curve"];
        c.curve.preset = str(jc, "curve", "preset", c.curve.preset);
        c.curve.radius = num(jc, "curve", "radius", c.curve.radius);
        c.curve.pitch = num(jc, "curve", "pitch", c.curve.pitch);
        c.curve.turns = num(jc, "curve", "turns", c.curve.turns);
        c.curve.length = num(jc, "curve", "length", c.curve.length);
        c.curve.n_s = static_cast<int>(num(jc, "curve", "n_s", c.curve.n_s));
        if (c.curve.n_s < 2) fail("curve.n_s", "need at least 2 segments");
        if (jc.contains("fourier")) {
            const json& jf = jc["fourier"];
            if (!jf.is_array() || jf.size() != 3)
                fail("curve.fourier", "expected an array of 3 component series");
            for (int k = 0; k < 3; ++k)
                c.curve.fourier[k] = series(jf[k], "curve.fourier[" + std::to_string(k) + "]");
        }
    }
    if (j.contains("frame")) {
        c.frame.mode = str(j["frame"], "frame", "mode", c.frame.mode);
        if (c.frame.mode != "frenet" && c.frame.mode != "rotation_minimizing" &&
            c.frame.mode != "prescribed")
            fail("frame.mode", "unknown mode '" + c.frame.mode + "'");
        if (j["frame"].contains("rho")) c.frame.rho = series(j["frame"]["rho"], "frame.rho");
    }
    if (j.contains("section")) {
        const json& js = j["section"];
        c.section.preset = str(js, "section", "preset", c.section.preset);
        c.section.aspect = num(js, "section", "aspect", c.section.aspect);
        c.section.edge_length = num(js, "section", "edge_length", c.section.edge_length);
        c.section.refine = static_cast<int>(num(js, "section", "refine", 0));
        if (!(c.section.edge_length > 0)) fail("section.edge_length", "must be positive");
        if (js.contains("vertices")) {
            if (!js["vertices"].is_array()) fail("section.vertices", "expected an array");
            for (const auto& v : js["vertices"]) {
                if (!v.is_array() || v.size() != 2) fail("section.vertices", "expected [x, y] pairs");
                c.section.vertices.emplace_back(v[0].get<double>(), v[1].get<double>());
            }
        }
    }
    if (j.contains("material")) {
        const json& jm = j["material"];
        c.material.lambda = num(jm, "material", "lambda", c.material.lambda);
        c.material.mu = num(jm, "material", "mu", c.material.mu);
        c.material.density = str(jm, "material", "density", c.material.density);
        if (!(c.material.mu > 0) || !(3 * c.material.lambda + 2 * c.material.mu > 0))
            fail("material", "need mu > 0 and 3*lambda + 2*mu > 0");
        if (c.material.density != "svk" && c.material.density != "dist2so3")
            fail("material.density", "unknown density '" + c.material.density + "'");
    }
    if (j.contains("regime")) {
        c.alpha = num(j["regime"], "regime", "alpha", c.alpha);
        if (!(c.alpha > 2)) fail("regime.alpha", "alpha must exceed 2");
    }
    if (j.contains("state")) {
        const json& js = j["state"];
        for (const char* key : {"a", "b", "w", "u"}) {
            if (!js.contains(key)) continue;
            FourierSeries s = series(js[key], std::string("state.") + key);
            if (key[0] == 'a') c.state.a = s;
            else if (key[0] == 'b') c.state.b = s;
            else if (key[0] == 'w') c.state.w = s;
            else c.state.u = s;
        }
        c.state.u_linear = num(js, "state", "u_linear", 0.0);
    }
    if (j.contains("reduce")) {
        const json& jr = j["reduce"];
        c.reduce.boundary = str(jr, "reduce", "boundary", c.reduce.boundary);
        if (jr.contains("loads")) {
            const json& jl = jr["loads"];
            if (jl.contains("f")) {
                if (!jl["f"].is_array() || jl["f"].size() != 3)
                    fail("reduce.loads.f", "expected 3 component series");
                for (int k = 0; k < 3; ++k)
                    c.reduce.f[k] = series(jl["f"][k], "reduce.loads.f[" + std::to_string(k) + "]");
            }
            if (jl.contains("g")) c.reduce.g = series(jl["g"], "reduce.loads.g");
            if (jl.contains("m")) c.reduce.m = series(jl["m"], "reduce.loads.m");
        }
    }
    if (j.contains("gamma")) {
        const json& jg = j["gamma"];
        if (jg.contains("h")) {
            if (!jg["h"].is_array()) fail("gamma.h", "expected an array");
            c.gamma.h.clear();
            for (const auto& v : jg["h"]) {
                const double h = v.get<double>();
                if (!(h > 0)) fail("gamma.h", "h values must be positive");
                c.gamma.h.push_back(h);
            }
            if (c.gamma.h.empty()) fail("gamma.h", "need at least one h");
        }
        c.gamma.phi = str(jg, "gamma", "phi", c.gamma.phi);
        c.gamma.reference = str(jg, "gamma", "reference", c.gamma.reference);
        if (c.gamma.phi != "zero" && c.gamma.phi != "fem")
            fail("gamma.phi", "unknown warping mode '" + c.gamma.phi + "'");
        if (c.gamma.reference != "unrelaxed" && c.gamma.reference != "fem")
            fail("gamma.reference", "unknown reference '" + c.gamma.reference + "'");
    }
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument("config: JSON parse error in '" + path + "': " + e.what());
    }
    return parse_config(j);
}

inline CurvePtr build_curve(const RunConfig& c) {
    const auto& cc = c.curve;
    if (cc.preset == "line") return std::make_shared<LineCurve>(cc.length > 0 ? cc.length : 1.0);
    if (cc.preset == "circle") {
        if (cc.length > 0) return std::make_shared<CircleCurve>(cc.radius, cc.length);
        return std::make_shared<CircleCurve>(cc.radius);
    }
    if (cc.preset == "helix") {
        const double cpar = cc.pitch / (2 * M_PI);
        const double len = cc.length > 0
                               ? cc.length
                               : cc.turns * 2 * M_PI * std::sqrt(cc.radius * cc.radius + cpar * cpar);
        return std::make_shared<HelixCurve>(cc.radius, cc.pitch, len);
    }
    if (cc.preset == "fourier") return std::make_shared<FourierCurve>(cc.fourier);
    throw std::invalid_argument("config: curve.preset: unknown preset '" + cc.preset + "'");
}

inline std::shared_ptr<const FramedCurve> build_frame(const RunConfig& c, CurvePtr curve) {
    FrameMode mode = FrameMode::Frenet;
    TwistSpec twist;
    if (c.frame.mode == "rotation_minimizing") mode = FrameMode::RotationMinimizing;
    else if (c.frame.mode == "prescribed") {
        mode = FrameMode::PrescribedTwist;
        const double L = curve->length();
        ScalarField rho = fourier_field(c.frame.rho, L);
        twist.rho = rho.value;
        twist.drho = rho.derivative;
    }
    return std::make_shared<FramedCurve>(std::move(curve), mode, c.curve.n_s, std::nullopt,
                                         std::move(twist));
}

inline SectionMesh build_section(const RunConfig& c) {
    SectionPreset preset;
    if (c.section.preset == "disc") preset.kind = SectionPreset::Disc;
    else if (c.section.preset == "square") preset.kind = SectionPreset::Square;
    else if (c.section.preset == "rectangle") {
        preset.kind = SectionPreset::Rectangle;
        preset.aspect = c.section.aspect;
    } else if (c.section.preset == "polygon") {
        preset.kind = SectionPreset::Polygon;
        preset.vertices = c.section.vertices;
    } else {
        throw std::invalid_argument("config: section.preset: unknown preset '" + c.section.preset +
                                    "'");
    }
    RawMesh raw = make_section(preset, c.section.edge_length);
    for (int r = 0; r < c.section.refine; ++r) refine_uniform(raw);
    return normalize_section(std::move(raw));
}

inline std::shared_ptr<const AnalyticRodState> build_state(
    const RunConfig& c, std::shared_ptr<const FramedCurve> frame) {
    const double L = frame->length();
    ScalarField u = fourier_field(c.state.u, L);
    if (c.state.u_linear != 0) {
        const double slope = c.state.u_linear;
        auto base_v = u.value;
        auto base_d = u.derivative;
        u.value = [base_v, slope](double s) { return base_v(s) + slope * s; };
        u.derivative = [base_d, slope](double s) { return base_d(s) + slope; };
    }
    return std::make_shared<AnalyticRodState>(std::move(frame), fourier_field(c.state.a, L),
                                              fourier_field(c.state.b, L),
                                              fourier_field(c.state.w, L), std::move(u));
}

inline BoundarySpec build_boundary(const RunConfig& c) {
    const std::string& b = c.reduce.boundary;
    if (b == "free") return {BoundarySpec::Free};
    if (b == "clamped_left") return {BoundarySpec::ClampedLeft};
    if (b == "clamped_right") return {BoundarySpec::ClampedRight};
    if (b == "clamped_both") return {BoundarySpec::ClampedBoth};
    if (b == "periodic_ring") return {BoundarySpec::PeriodicRing};
    throw std::invalid_argument("config: reduce.boundary: unknown boundary '" + b + "'");
}

inline LoadCase build_loads(const RunConfig& c, const FramedCurve& frame, int nodes) {
    const double L = frame.length();
    LoadCase lc = LoadCase::zero(nodes);
    std::array<ScalarField, 3> f;
    for (int k = 0; k < 3; ++k) f[k] = fourier_field(c.reduce.f[k], L);
    ScalarField g = fourier_field(c.reduce.g, L), m = fourier_field(c.reduce.m, L);
    for (int i = 0; i < nodes; ++i) {
        const double s = frame.node_s(i);
        lc.f[i] = Vector3d(f[0].value(s), f[1].value(s), f[2].value(s));
        lc.g[i] = g.value(s);
        lc.m[i] = m.value(s);
    }
    return lc;
}

inline NonlinearDensity build_density(const RunConfig& c) {
    NonlinearDensity d;
    d.kind = c.material.density == "svk" ? NonlinearDensity::SaintVenantKirchhoff
                                         : NonlinearDensity::SquaredDistanceToSO3;
    d.lambda = c.material.lambda;
    d.mu = c.material.mu;
    return d;
}

} // namespace currod
