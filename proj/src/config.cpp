#include "ksmix/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ksmix/errors.hpp"
#include "ksmix/snapshot.hpp"

namespace ksmix {

namespace {
using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw config_error("config: " + path + ": " + msg);
}

void require_object(const json& v, const std::string& path) {
    if (!v.is_object()) fail(path, "expected an object");
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

long as_integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<long>();
}

bool as_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) fail(path, "expected a boolean");
    return v.get<bool>();
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
}

FlowKind parse_flow_kind(const std::string& s, const std::string& path) {
    if (s == "zero") return FlowKind::ZERO;
    if (s == "steady_shear") return FlowKind::STEADY_SHEAR;
    if (s == "alternating_shear") return FlowKind::ALTERNATING_SHEAR;
    if (s == "stream_function") return FlowKind::STREAM_FUNCTION;
    fail(path, "unknown flow kind \"" + s +
                   "\" (expected zero|steady_shear|alternating_shear|stream_function)");
}

ShearProfile parse_profile(const std::string& s, const std::string& path) {
    if (s == "sin") return ShearProfile::SIN;
    if (s == "cos") return ShearProfile::COS;
    fail(path, "unknown profile \"" + s + "\" (expected sin|cos)");
}

InitialKind parse_initial_kind(const std::string& s, const std::string& path) {
    if (s == "bump") return InitialKind::BUMP;
    if (s == "two_bump") return InitialKind::TWO_BUMP;
    if (s == "random_smooth") return InitialKind::RANDOM_SMOOTH;
    if (s == "snapshot") return InitialKind::SNAPSHOT;
    fail(path, "unknown initial kind \"" + s + "\" (expected bump|two_bump|random_smooth|snapshot)");
}

SweepAxis parse_axis(const std::string& s, const std::string& path) {
    if (s == "A") return SweepAxis::A;
    if (s == "alpha") return SweepAxis::ALPHA;
    if (s == "beta") return SweepAxis::BETA;
    if (s == "n") return SweepAxis::N;
    if (s == "mass") return SweepAxis::MASS;
    fail(path, "unknown sweep axis \"" + s + "\" (expected A|alpha|beta|n|mass)");
}

void parse_flow(const json& v, const std::string& path, FlowSpec& flow) {
    require_object(v, path);
    for (const auto& [key, val] : v.items()) {
        const std::string p = path + "." + key;
        if (key == "kind") {
            flow.kind = parse_flow_kind(as_string(val, p), p);
        } else if (key == "amplitude") {
            flow.amplitude = as_number(val, p);
        } else if (key == "profile") {
            flow.profile = parse_profile(as_string(val, p), p);
        } else if (key == "switch_period") {
            flow.switch_period = as_number(val, p);
        } else if (key == "stream_snapshot") {
            flow.stream = std::make_shared<ScalarField>(read_snapshot(as_string(val, p)).field);
        } else {
            fail(p, "unknown key");
        }
    }
}

void parse_initial(const json& v, const std::string& path, InitialSpec& init) {
    require_object(v, path);
    for (const auto& [key, val] : v.items()) {
        const std::string p = path + "." + key;
        if (key == "kind") {
            init.kind = parse_initial_kind(as_string(val, p), p);
        } else if (key == "mass") {
            init.mass = as_number(val, p);
        } else if (key == "width") {
            init.width = as_number(val, p);
        } else if (key == "center") {
            if (!val.is_array() || val.empty() || val.size() > 3)
                fail(p, "expected an array of 1..3 numbers");
            for (std::size_t a = 0; a < val.size(); ++a)
                init.center[a] = as_number(val[a], p + "[" + std::to_string(a) + "]");
        } else if (key == "separation") {
            init.separation = as_number(val, p);
        } else if (key == "seed") {
            const long s = as_integer(val, p);
            if (s < 0) fail(p, "seed must be nonnegative");
            init.seed = static_cast<std::uint64_t>(s);
        } else if (key == "decay") {
            init.decay = as_number(val, p);
        } else if (key == "path") {
            init.path = as_string(val, p);
        } else {
            fail(p, "unknown key");
        }
    }
}

void parse_dt_policy(const json& v, const std::string& path, DtPolicy& pol) {
    require_object(v, path);
    for (const auto& [key, val] : v.items()) {
        const std::string p = path + "." + key;
        if (key == "kind") {
            const std::string s = as_string(val, p);
            if (s == "cfl")
                pol.kind = DtPolicyKind::CFL;
            else if (s == "fixed")
                pol.kind = DtPolicyKind::FIXED;
            else
                fail(p, "unknown dt policy \"" + s + "\" (expected cfl|fixed)");
        } else if (key == "dt") {
            pol.dt = as_number(val, p);
        } else if (key == "c_adv") {
            pol.c_adv = as_number(val, p);
        } else if (key == "c_max") {
            pol.c_max = as_number(val, p);
        } else {
            fail(p, "unknown key");
        }
    }
}

Sweep parse_sweep(const json& v, const std::string& path) {
    require_object(v, path);
    Sweep sw;
    bool have_axis = false, have_values = false;
    for (const auto& [key, val] : v.items()) {
        const std::string p = path + "." + key;
        if (key == "axis") {
            sw.axis = parse_axis(as_string(val, p), p);
            have_axis = true;
        } else if (key == "values") {
            if (!val.is_array() || val.empty()) fail(p, "expected a non-empty array of numbers");
            for (std::size_t i = 0; i < val.size(); ++i)
                sw.values.push_back(as_number(val[i], p + "[" + std::to_string(i) + "]"));
            have_values = true;
        } else {
            fail(p, "unknown key");
        }
    }
    if (!have_axis) fail(path, "sweep.axis is required");
    if (!have_values) fail(path, "sweep.values is required");
    return sw;
}

std::vector<double> parse_p_list(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array (numbers or \"inf\")");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        if (v[i].is_string()) {
            if (v[i].get<std::string>() != "inf") fail(p, "only \"inf\" is accepted as a string");
            out.push_back(p_inf);
        } else {
            out.push_back(as_number(v[i], p));
        }
    }
    return out;
}
}  // namespace

const char* to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::A: return "A";
        case SweepAxis::ALPHA: return "alpha";
        case SweepAxis::BETA: return "beta";
        case SweepAxis::N: return "n";
        case SweepAxis::MASS: return "mass";
    }
    return "?";
}

std::string sweep_point_label(SweepAxis axis, double value) {
    char buf[48];
    if (axis == SweepAxis::N)
        std::snprintf(buf, sizeof buf, "n=%ld", static_cast<long>(value));
    else
        std::snprintf(buf, sizeof buf, "%s=%g", to_string(axis), value);
    return buf;
}

SimConfig apply_sweep_value(const SimConfig& base, SweepAxis axis, double value) {
    SimConfig cfg = base;
    switch (axis) {
        case SweepAxis::A:
            cfg.flow.amplitude = value;
            break;
        case SweepAxis::ALPHA:
            cfg.alpha = value;
            break;
        case SweepAxis::BETA:
            cfg.beta = value;
            break;
        case SweepAxis::N:
            if (value != std::floor(value))
                throw config_error("config: sweep.values: n must be an integer (got " +
                                   std::to_string(value) + ")");
            cfg.n = static_cast<int>(value);
            break;
        case SweepAxis::MASS:
            if (cfg.initial.kind == InitialKind::SNAPSHOT)
                throw config_error("config: sweep.axis: mass sweep needs a synthetic initial kind");
            cfg.initial.mass = value;
            break;
    }
    return cfg;
}

Scenario parse_config_text(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw config_error("config: " + origin + ": " + e.what());
    }
    require_object(root, origin);

    Scenario sc;
    for (const auto& [key, val] : root.items()) {
        const std::string p = key;
        if (key == "version") {
            const long ver = as_integer(val, p);
            if (ver != 1) fail(p, "unsupported config version " + std::to_string(ver));
            sc.version = static_cast<int>(ver);
        } else if (key == "name") {
            sc.name = as_string(val, p);
            if (sc.name.empty()) fail(p, "name must be non-empty");
        } else if (key == "d") {
            sc.base.d = static_cast<int>(as_integer(val, p));
        } else if (key == "n") {
            sc.base.n = static_cast<int>(as_integer(val, p));
        } else if (key == "alpha") {
            sc.base.alpha = as_number(val, p);
        } else if (key == "beta") {
            sc.base.beta = as_number(val, p);
        } else if (key == "t_end") {
            sc.base.t_end = as_number(val, p);
        } else if (key == "flow") {
            parse_flow(val, p, sc.base.flow);
        } else if (key == "initial") {
            parse_initial(val, p, sc.base.initial);
        } else if (key == "dt_policy") {
            parse_dt_policy(val, p, sc.base.dt_policy);
        } else if (key == "diag_every") {
            sc.base.diag_every = as_integer(val, p);
        } else if (key == "blowup_threshold") {
            sc.base.blowup_threshold = as_number(val, p);
        } else if (key == "blowup_tail_frac") {
            sc.base.blowup_tail_frac = as_number(val, p);
        } else if (key == "positivity_tol") {
            sc.base.positivity_tol = as_number(val, p);
        } else if (key == "p_list") {
            sc.base.p_list = parse_p_list(val, p);
        } else if (key == "dichotomy_p") {
            sc.base.dichotomy_p = as_number(val, p);
        } else if (key == "seed") {
            const long s = as_integer(val, p);
            if (s < 0) fail(p, "seed must be nonnegative");
            sc.base.seed = static_cast<std::uint64_t>(s);
        } else if (key == "drift_enabled") {
            sc.base.drift_enabled = as_bool(val, p);
        } else if (key == "sweep") {
            sc.sweep = parse_sweep(val, p);
        } else if (key == "outputs") {
            sc.outputs = as_string(val, p);
        } else if (key == "snapshot_times") {
            if (!val.is_array()) fail(p, "expected an array of numbers");
            for (std::size_t i = 0; i < val.size(); ++i) {
                const double t = as_number(val[i], p + "[" + std::to_string(i) + "]");
                if (t < 0.0) fail(p + "[" + std::to_string(i) + "]", "snapshot time must be >= 0");
                sc.snapshot_times.push_back(t);
            }
        } else if (key == "expect") {
            const std::string s = as_string(val, p);
            if (s == "blowup")
                sc.expect = ExpectOutcome::BLOWUP;
            else if (s == "completed")
                sc.expect = ExpectOutcome::COMPLETED;
            else
                fail(p, "unknown expectation \"" + s + "\" (expected blowup|completed)");
        } else {
            fail(p, "unknown key");
        }
    }

    // Range-check the base and every sweep child up front so a bad sweep value
    // is a parse-time error, not a mid-sweep surprise.
    validate_config(sc.base);
    if (sc.sweep)
        for (double v : sc.sweep->values) validate_config(apply_sweep_value(sc.base, sc.sweep->axis, v));
    return sc;
}

Scenario parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

}  // namespace ksmix
