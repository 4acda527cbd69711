#include "ksmix/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "ksmix/errors.hpp"
#include "ksmix/operators.hpp"
#include "ksmix/snapshot.hpp"
#include "ksmix/transport.hpp"

namespace fs = std::filesystem;

namespace ksmix {

namespace {
std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void ensure_writable_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw io_error("cannot create output directory " + dir + ": " + ec.message());
    const std::string probe = dir + "/.write_probe";
    {
        std::ofstream out(probe, std::ios::trunc);
        out << "probe";
        if (!out) throw io_error("output directory " + dir + " is not writable");
    }
    fs::remove(probe, ec);
}

nlohmann::json snapshot_meta(const SimConfig& cfg, const std::string& field_name,
                             double requested_t) {
    return {{"alpha", cfg.alpha},
            {"beta", cfg.beta},
            {"A", cfg.flow.amplitude},
            {"field_name", field_name},
            {"requested_t", requested_t}};
}

// Unit-L2 mean-zero fluctuation of the run's initial datum, or nullopt when
// the datum is constant.
std::optional<ScalarField> normalized_fluctuation(const SimConfig& cfg, const Grid& g) {
    const ScalarField rho0 = dealias(make_initial(cfg.initial, g));
    ArrayXd fluct = rho0.samples() - mean(rho0);
    ScalarField f = ScalarField::from_samples(g, std::move(fluct));
    const double l2 = lp_norm(f, 2.0);
    if (!(l2 > 1e-12)) return std::nullopt;
    return ScalarField::from_samples(g, f.samples() / l2);
}

ChildResult run_child(const Scenario& sc, const SimConfig& cfg, const std::string& label,
                      const std::string& dir) {
    ChildResult res;
    res.label = label;
    res.config = cfg;
    res.dir = dir;

    DiagContext ctx(cfg);
    DiagSeries series = ctx.empty_series();

    std::vector<double> pending = sc.snapshot_times;
    std::sort(pending.begin(), pending.end());
    std::size_t next_snap = 0, snap_written = 0;

    const SimState final_state = run_loop(cfg, [&](const Evolver& ev) {
        const SimState st = ev.snapshot();
        series.records.push_back(ctx.record(st));
        while (next_snap < pending.size() && st.t >= pending[next_snap] - 1e-12) {
            write_snapshot(dir + "/snap_" + std::to_string(snap_written++), st.rho, st.t,
                           snapshot_meta(cfg, "rho", pending[next_snap]));
            ++next_snap;
        }
    });
    // Requested times past the recorded range resolve to the terminal state.
    while (next_snap < pending.size()) {
        write_snapshot(dir + "/snap_" + std::to_string(snap_written++), final_state.rho,
                       final_state.t, snapshot_meta(cfg, "rho", pending[next_snap]));
        ++next_snap;
    }

    write_diag_csv(dir + "/diag.csv", series);

    res.status = final_state.status;
    if (final_state.blowup) res.blowup_time = final_state.blowup->t;
    for (const DiagRecord& r : series.records)
        res.sup_linf = std::max({res.sup_linf, r.rho_tilde, std::abs(r.min_rho)});

    // Verification rows: fluctuation-energy decay always, the running-maximum
    // bound when its quadratic forms apply (beta <= d, alpha < 2, p tracked).
    std::vector<CheckRow> rows;
    if (series.records.size() >= 2) {
        const L2DecayReport l2 = check_l2_decay(series);
        if (l2.checked > 0) rows.push_back(l2.worst);
        rows.insert(rows.end(), l2.violations.begin(), l2.violations.end());

        const bool p_tracked = std::any_of(cfg.p_list.begin(), cfg.p_list.end(), [&](double q) {
            return std::abs(q - cfg.dichotomy_p) < 1e-12;
        });
        if (cfg.beta <= static_cast<double>(cfg.d) && cfg.alpha < 2.0 && p_tracked) {
            const double c0 = cfg.beta == static_cast<double>(cfg.d)
                                  ? 0.0
                                  : estimate_c0(make_grid(cfg.d, cfg.n), cfg.beta, 20, 9001);
            const OdeBoundReport ode =
                check_ode_bound(series, cfg.alpha, cfg.dichotomy_p, cfg.beta, c0);
            if (ode.checked > 0) rows.push_back(ode.worst);
            rows.insert(rows.end(), ode.violations.begin(), ode.violations.end());
        }
    }
    {
        std::ofstream out(dir + "/verification.json", std::ios::trunc);
        if (!out) throw io_error("cannot open " + dir + "/verification.json for writing");
        out << check_rows_json(rows) << "\n";
    }

    // Summary observables.  rage: time-averaged low-mode energy of the pure
    // transport of the normalized initial fluctuation (N = 9 modes, horizon
    // min(1, t_end)).  approx: L2 distance between the full evolution and pure
    // transport at t_probe = min(0.1, t_end).
    const Grid g = make_grid(cfg.d, cfg.n);
    if (const auto fluct = normalized_fluctuation(cfg, g)) {
        const double T = cfg.t_end > 0.0 ? std::min(1.0, cfg.t_end) : 1.0;
        res.rage_avg = rage_average(*fluct, cfg.flow, cfg.flow.amplitude, 9, T);
    }
    const ApproxResult ap = approximation_distance(cfg, cfg.flow.amplitude, std::min(0.1, cfg.t_end));
    if (ap.distance) res.approx_distance = *ap.distance;

    return res;
}

std::string cell(const std::optional<double>& v) { return v ? fmt17(*v) : std::string(); }
}  // namespace

std::string resolve_output_dir(const Scenario& sc) {
    if (!sc.outputs.empty()) return sc.outputs;
    if (const char* root = std::getenv("KSMIX_OUTPUT_ROOT"); root && *root)
        return std::string(root) + "/" + sc.name;
    return "out/" + sc.name;
}

std::string summary_csv(const ScenarioResult& res) {
    std::string s = "label,status,sup_linf,blowup_time,rage_average,approximation_distance\n";
    for (const ChildResult& c : res.children) {
        s += c.label;
        s += ',';
        s += to_string(c.status);
        s += ',';
        s += fmt17(c.sup_linf);
        s += ',';
        s += cell(c.blowup_time);
        s += ',';
        s += cell(c.rage_avg);
        s += ',';
        s += cell(c.approx_distance);
        s += '\n';
    }
    return s;
}

ScenarioResult run_scenario(const Scenario& sc) {
    ScenarioResult res;
    res.out_dir = resolve_output_dir(sc);
    ensure_writable_dir(res.out_dir);

    struct Point {
        std::string label;
        SimConfig cfg;
    };
    std::vector<Point> points;
    if (sc.sweep) {
        for (double v : sc.sweep->values)
            points.push_back({sweep_point_label(sc.sweep->axis, v),
                              apply_sweep_value(sc.base, sc.sweep->axis, v)});
    } else {
        points.push_back({"base", sc.base});
    }
    for (const Point& pt : points) ensure_writable_dir(res.out_dir + "/" + pt.label);

    for (const Point& pt : points) {
        std::printf("[%s] %s: running (d=%d n=%d alpha=%g beta=%g A=%g t_end=%g)\n",
                    sc.name.c_str(), pt.label.c_str(), pt.cfg.d, pt.cfg.n, pt.cfg.alpha,
                    pt.cfg.beta, pt.cfg.flow.amplitude, pt.cfg.t_end);
        std::fflush(stdout);
        ChildResult child = run_child(sc, pt.cfg, pt.label, res.out_dir + "/" + pt.label);
        const std::string bt =
            child.blowup_time ? " blowup_t=" + std::to_string(*child.blowup_time) : std::string();
        std::printf("[%s] %s: %s sup|rho|=%.6g%s\n", sc.name.c_str(), pt.label.c_str(),
                    to_string(child.status), child.sup_linf, bt.c_str());
        std::fflush(stdout);
        res.children.push_back(std::move(child));
    }

    const std::string summary = summary_csv(res);
    {
        std::ofstream out(res.out_dir + "/summary.csv", std::ios::trunc);
        if (!out) throw io_error("cannot open " + res.out_dir + "/summary.csv for writing");
        out << summary;
    }
    std::printf("\n%s\n", summary.c_str());

    // Reported, never asserted: across a mass sweep, heavier data should not
    // blow up later (tolerance: one diagnostic interval of the earlier child).
    if (sc.sweep && sc.sweep->axis == SweepAxis::MASS) {
        bool ok = true;
        std::string detail;
        for (std::size_t i = 0; i + 1 < res.children.size(); ++i) {
            const auto& a = res.children[i];
            const auto& b = res.children[i + 1];
            if (sc.sweep->values[i] > sc.sweep->values[i + 1] || !a.blowup_time || !b.blowup_time)
                continue;
            const double tol = a.config.dt_policy.kind == DtPolicyKind::FIXED
                                   ? a.config.dt_policy.dt * static_cast<double>(a.config.diag_every)
                                   : 0.05 * *a.blowup_time;
            if (*b.blowup_time > *a.blowup_time + tol) {
                ok = false;
                detail += " " + a.label + "->" + b.label;
            }
        }
        std::printf("mass-sweep blowup-time monotonicity: %s%s\n", ok ? "ok" : "violated at",
                    detail.c_str());
    }

    bool any_failed = false, any_unexpected_blowup = false;
    for (const ChildResult& c : res.children) {
        if (c.status == SimStatus::FAILED) any_failed = true;
        if (c.status == SimStatus::BLOWUP && sc.expect != ExpectOutcome::BLOWUP)
            any_unexpected_blowup = true;
    }
    res.exit_code = any_failed ? 1 : any_unexpected_blowup ? 2 : 0;
    return res;
}

int run_transport_scenario(const Scenario& sc) {
    const std::string dir = resolve_output_dir(sc);
    ensure_writable_dir(dir);
    const SimConfig& cfg = sc.base;
    const Grid g = make_grid(cfg.d, cfg.n);
    const ScalarField rho0 = dealias(make_initial(cfg.initial, g));
    validate_flow(cfg.flow, g);

    write_snapshot(dir + "/transport_initial", rho0, 0.0, snapshot_meta(cfg, "rho_transport", 0.0));

    const double vmax = max_speed(cfg.flow, g);
    const double dt = vmax > 0.0 ? g.h / (2.0 * vmax) : std::max(cfg.t_end, 1.0);
    TransportSolver solver(rho0, cfg.flow, dt);

    std::ofstream csv(dir + "/transport.csv", std::ios::trunc);
    if (!csv) throw io_error("cannot open " + dir + "/transport.csv for writing");
    csv << "t,l2,low9_energy\n";
    auto row = [&](double t, const ScalarField& f) {
        double e9 = 0.0;
        {
            const ScalarField low = project_low(f, 9);
            const ArrayXcd& spec = low.spectrum();
            for_each_mode(g, [&](std::int64_t idx, const std::array<int, 3>& k) {
                e9 += mode_weight(g, k) * std::norm(spec[idx]);
            });
        }
        csv << fmt17(t) << ',' << fmt17(lp_norm(f, 2.0)) << ',' << fmt17(e9) << '\n';
    };
    row(0.0, rho0);

    std::vector<double> pending = sc.snapshot_times;
    std::sort(pending.begin(), pending.end());
    int snap_written = 0;
    const long samples = cfg.t_end > 0.0 ? std::min<long>(256, std::max<long>(1, std::lround(cfg.t_end / dt))) : 0;
    for (long i = 1; i <= samples; ++i) {
        const double target = cfg.t_end * static_cast<double>(i) / samples;
        while (!pending.empty() && pending.front() <= target && pending.front() <= cfg.t_end) {
            solver.advance_to(pending.front());
            const ScalarField f = solver.state();
            write_snapshot(dir + "/transport_snap_" + std::to_string(snap_written++), f,
                           pending.front(), snapshot_meta(cfg, "rho_transport", pending.front()));
            pending.erase(pending.begin());
        }
        solver.advance_to(target);
        row(target, solver.state());
    }
    if (!csv) throw io_error("short write to " + dir + "/transport.csv");

    // Requested times at or past the horizon resolve to the terminal state.
    for (double tq : pending)
        write_snapshot(dir + "/transport_snap_" + std::to_string(snap_written++), solver.state(),
                       cfg.t_end, snapshot_meta(cfg, "rho_transport", tq));

    write_snapshot(dir + "/transport_final", solver.state(), cfg.t_end,
                   snapshot_meta(cfg, "rho_transport", cfg.t_end));
    std::printf("[%s] transport: COMPLETED t=%.6g, final l2=%.6g\n", sc.name.c_str(), cfg.t_end,
                lp_norm(solver.state(), 2.0));
    return 0;
}

}  // namespace ksmix
