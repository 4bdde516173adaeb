#include "wavekit/commands.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>
#include <vector>

#include "wavekit/svg.hpp"

namespace wavekit::cli {

namespace {

std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Loaded {
    ProblemFile pf;
    model::Problem p;
    model::Decomposition d;
    model::ValidationReport report;
};

Loaded load_and_validate(const std::string& path,
                         const std::map<std::string, double>& overrides) {
    Loaded out;
    out.pf = load_problem_file(path);
    for (const auto& [k, v] : overrides) out.pf.params[k] = v;
    out.p = build_problem(out.pf);
    out.d = model::decompose(out.p, decompose_options(out.pf));
    out.report = model::validate_hypotheses(out.p, out.d);
    return out;
}

Json validation_json(const Loaded& l) {
    Json checks = Json::array();
    for (const auto& c : l.report.checks) {
        Json j;
        j["id"] = c.id;
        j["pass"] = c.pass;
        if (std::isnan(c.violating_u))
            j["violating_u"] = nullptr;
        else
            j["violating_u"] = c.violating_u;
        j["detail"] = c.detail;
        checks.push_back(j);
    }
    Json out;
    out["name"] = l.pf.name;
    out["pass"] = l.report.all_pass();
    out["checks"] = std::move(checks);
    Json warn = Json::array();
    for (double u : l.d.tangent_zero_warnings) warn.push_back(u);
    out["tangent_zero_warnings"] = std::move(warn);
    return out;
}

Json bracket_json(const bounds::SpeedBracket& br) {
    Json out;
    out["lower"] = br.lower;
    out["upper"] = br.upper;
    if (br.k0_term)
        out["k0_term"] = *br.k0_term;
    else
        out["k0_term"] = nullptr;
    return out;
}

Json threshold_json(const Loaded& l, const wave::ThresholdSpeed& ts) {
    Json per = Json::array();
    for (const auto& r : ts.per_interval) {
        const auto& iv = l.d.interval(r.k);
        Json j;
        j["k"] = r.k;
        j["alpha"] = iv.alpha;
        j["beta"] = iv.beta;
        j["h_sign"] = iv.h_positive ? "positive" : "negative";
        for (const auto& pb : ts.bracket.per_interval) {
            if (pb.k != r.k) continue;
            j["lower"] = pb.lower_k;
            j["upper"] = pb.upper_k;
        }
        j["c_star"] = r.c_star;
        j["iterations"] = r.iterations;
        j["bracket_degenerate"] = r.bracket_degenerate;
        per.push_back(j);
    }
    Json out;
    out["name"] = l.pf.name;
    out["c_hat"] = ts.c_hat;
    out["c_star"] = ts.c_star;
    out["bracket"] = bracket_json(ts.bracket);
    out["per_interval"] = std::move(per);
    return out;
}

const char* zero_kind_name(wave::ZeroKind k) {
    switch (k) {
        case wave::ZeroKind::smooth_quotient: return "smooth_quotient";
        case wave::ZeroKind::degenerate_limit: return "degenerate_limit";
        case wave::ZeroKind::jump: return "jump";
        case wave::ZeroKind::infinite_quotient: return "infinite_quotient";
    }
    return "?";
}

const char* existence_name(wave::Existence e) {
    switch (e) {
        case wave::Existence::yes: return "yes";
        case wave::Existence::no: return "no";
        case wave::Existence::undetermined_at_c_hat: return "undetermined_at_c_hat";
    }
    return "?";
}

const char* flip_name(wave::SingleFlipExistence f) {
    switch (f) {
        case wave::SingleFlipExistence::applies_exists: return "applies_exists";
        case wave::SingleFlipExistence::applies_conditions_fail: return "applies_conditions_fail";
        case wave::SingleFlipExistence::not_applicable: return "not_applicable";
    }
    return "?";
}

const char* class_name(wave::WaveClass c) {
    switch (c) {
        case wave::WaveClass::classical: return "classical";
        case wave::WaveClass::sharp_type_1: return "sharp_type_1";
        case wave::WaveClass::sharp_type_2: return "sharp_type_2";
        case wave::WaveClass::sharp_type_3: return "sharp_type_3";
        case wave::WaveClass::undetermined: return "undetermined";
    }
    return "?";
}

int sweep_thread_cap() {
    const char* env = std::getenv("WAVEKIT_THREADS");
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 4;
    if (!env) return hw;
    const int v = std::atoi(env);
    return v >= 1 ? std::min(v, hw) : hw;
}

}  // namespace

CommandResult cmd_validate(const std::string& path,
                           const std::map<std::string, double>& overrides) {
    CommandResult res;
    auto l = load_and_validate(path, overrides);
    res.json = validation_json(l);
    res.exit_code = l.report.all_pass() ? kExitOk : kExitHypothesisFailure;

    std::ostringstream text;
    text << "problem " << l.pf.name << ": " << l.d.intervals.size()
         << " sign interval(s)";
    if (!l.d.D0.empty()) {
        text << ", zeros of D at";
        for (double z : l.d.D0) text << ' ' << z;
    }
    text << '\n';
    for (const auto& c : l.report.checks) {
        text << "  " << (c.pass ? "[pass] " : "[FAIL] ") << c.id;
        if (!c.pass) text << "  (" << c.detail << ")";
        text << '\n';
    }
    for (double u : l.d.tangent_zero_warnings)
        text << "  [warn] |D| dips near zero around u = " << u
             << " without a confirmed root (possible even-order zero)\n";
    res.text = text.str();
    return res;
}

CommandResult cmd_threshold(const std::string& path,
                            const std::map<std::string, double>& overrides) {
    CommandResult res;
    auto l = load_and_validate(path, overrides);
    if (!l.report.all_pass()) {
        res.exit_code = kExitHypothesisFailure;
        res.json = validation_json(l);
        res.text = "hypotheses fail; run the validate command for details\n";
        return res;
    }
    const auto ts = wave::compute_c_hat(l.p, l.d, wave_options(l.pf));
    res.json = threshold_json(l, ts);
    std::ostringstream text;
    text << "c_hat = " << ts.c_hat << "  (bracket [" << ts.bracket.lower << ", "
         << ts.bracket.upper << "])\n";
    res.text = text.str();
    return res;
}

CommandResult cmd_wave(const std::string& path, std::optional<double> speed,
                       std::optional<double> speed_offset, const std::string& out_prefix,
                       const std::map<std::string, double>& overrides) {
    CommandResult res;
    auto l = load_and_validate(path, overrides);
    if (!l.report.all_pass()) {
        res.exit_code = kExitHypothesisFailure;
        res.json = validation_json(l);
        res.text = "hypotheses fail; run the validate command for details\n";
        return res;
    }
    const auto opts = wave_options(l.pf);
    const auto ts = wave::compute_c_hat(l.p, l.d, opts);
    const double c = speed ? *speed : ts.c_hat + speed_offset.value_or(0.5);

    Json out;
    out["name"] = l.pf.name;
    out["c"] = c;
    out["c_hat"] = ts.c_hat;
    out["bracket"] = bracket_json(ts.bracket);
    const auto flip = wave::single_flip_existence(l.p, l.d, decompose_options(l.pf));
    out["existence_at_c_hat"] = flip_name(flip);

    // glue at the requested speed; at the threshold knife-edge nudge the
    // speed upward by a few bisection tolerances
    auto outcome = wave::glue(l.p, l.d, c, opts);
    double c_used = c;
    if (!outcome.glued && std::fabs(c - ts.c_hat) <= opts.at_threshold_band) {
        for (int j : {1, 2, 4, 8}) {
            c_used = std::max(c, ts.c_hat) + j * opts.tol_c;
            outcome = wave::glue(l.p, l.d, c_used, opts);
            if (outcome.glued) break;
        }
    }
    out["c_used"] = c_used;

    std::string csv_path, svg_path;
    wave::Existence exists;
    if (!outcome.glued) {
        exists = wave::Existence::no;
        out["exists"] = existence_name(exists);
        out["reason"] = "interval " + std::to_string(outcome.failed_interval) +
                        " admits no connection at this speed";
        out["per_zero"] = Json::array();
        out["classification"] = "none";
        out["a_finite"] = nullptr;
        out["b_finite"] = nullptr;
        out["profile_points"] = 0;
    } else {
        const auto& g = *outcome.glued;
        auto verdict = wave::extension_check(l.p, l.d, g, opts);
        exists = wave::resolve_existence(l.p, l.d, ts.c_hat, c_used, verdict, flip, opts);
        out["exists"] = existence_name(exists);
        std::string reason;
        if (exists != wave::Existence::yes) {
            reason = verdict.reason;
            if (reason.empty() && c_used < ts.c_hat - opts.at_threshold_band)
                reason = "below the threshold speed";
            if (reason.empty() && exists == wave::Existence::undetermined_at_c_hat)
                reason = "at the threshold speed; existence is asserted there only in the "
                         "single-sign-change case";
        }
        out["reason"] = reason;

        Json zeros = Json::array();
        for (const auto& zv : verdict.zeros) {
            Json j;
            j["u0"] = zv.u0;
            j["kind"] = zero_kind_name(zv.kind);
            if (zv.phi_value)
                j["phi"] = *zv.phi_value;
            else
                j["phi"] = nullptr;
            j["slope_left"] = zv.slope_left;
            j["slope_right"] = zv.slope_right;
            j["d_slope"] = std::isfinite(zv.d_slope) ? Json(zv.d_slope) : Json(nullptr);
            j["cross_check"] = zv.cross_check_ok ? "confirmed" : "unconfirmed";
            zeros.push_back(j);
        }
        out["per_zero"] = std::move(zeros);

        if (exists == wave::Existence::yes) {
            const bool at_threshold = std::fabs(c_used - ts.c_hat) <= opts.at_threshold_band;
            const auto cls = at_threshold ? wave::classify_at_threshold(l.p, g, verdict)
                                          : wave::classify(l.p, l.d, c_used, verdict);
            out["classification"] = class_name(cls.wave_class);
            out["a_finite"] = cls.a_finite;
            out["b_finite"] = cls.b_finite;

            auto prof = wave::reconstruct_profile(l.p, g, verdict, opts.t_span_cap);
            out["profile_points"] = prof.t.size();
            out["profile_a_finite"] = prof.a_finite;
            out["profile_b_finite"] = prof.b_finite;

            csv_path = out_prefix + "_wave.csv";
            std::ofstream csv(csv_path, std::ios::binary);
            csv << "t,u,z,phi\n";
            for (std::size_t i = 0; i < prof.t.size(); ++i)
                csv << csv_num(prof.t[i]) << ',' << csv_num(prof.u[i]) << ','
                    << csv_num(prof.z[i]) << ',' << csv_num(prof.phi[i]) << '\n';

            svg::Panel left{"wave profile", "t", "u", {}};
            left.series.push_back({"u(t)", "#1f77b4", prof.t, prof.u});
            svg::Panel right{"first-order solution", "u", "z", {}};
            std::vector<double> zu, zz;
            for (const auto& piece : g.pieces)
                for (std::size_t i = 0; i < piece.u.size();
                     i += std::max<std::size_t>(1, piece.u.size() / 600)) {
                    zu.push_back(piece.u[i]);
                    zz.push_back(piece.z[i]);
                }
            right.series.push_back({"z(u)", "#d62728", zu, zz});
            svg_path = out_prefix + "_wave.svg";
            std::ofstream svg_file(svg_path, std::ios::binary);
            svg_file << svg::render({left, right});
        } else {
            out["classification"] = "none";
            out["a_finite"] = nullptr;
            out["b_finite"] = nullptr;
            out["profile_points"] = 0;
        }
    }
    out["csv"] = csv_path;
    out["svg"] = svg_path;
    res.json = std::move(out);

    std::ostringstream text;
    text << "c = " << c_used << " (c_hat = " << ts.c_hat
         << "): exists = " << existence_name(exists);
    if (res.json["reason"].is_string() && !res.json["reason"].get<std::string>().empty())
        text << "  [" << res.json["reason"].get<std::string>() << "]";
    text << '\n';
    res.text = text.str();
    return res;
}

CommandResult cmd_sweep(const std::string& path, double from, double to, int steps,
                        const std::string& out_prefix,
                        const std::map<std::string, double>& overrides) {
    CommandResult res;
    if (steps < 1 || !(to >= from)) {
        res.exit_code = kExitUsage;
        res.text = "sweep needs --from <= --to and --steps >= 1\n";
        return res;
    }
    auto l = load_and_validate(path, overrides);
    if (!l.report.all_pass()) {
        res.exit_code = kExitHypothesisFailure;
        res.json = validation_json(l);
        res.text = "hypotheses fail; run the validate command for details\n";
        return res;
    }
    const auto opts = wave_options(l.pf);
    const auto ts = wave::compute_c_hat(l.p, l.d, opts);
    const auto flip = wave::single_flip_existence(l.p, l.d, decompose_options(l.pf));

    struct Row {
        double c = 0.0;
        std::vector<bool> feasible;
        wave::Existence exists = wave::Existence::no;
    };
    std::vector<Row> rows(static_cast<std::size_t>(steps));
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= rows.size()) return;
            Row& row = rows[i];
            row.c = steps == 1 ? from : from + (to - from) * static_cast<double>(i) / (steps - 1);
            bool all_ok = true;
            for (const auto& iv : l.d.intervals) {
                auto ode = shoot::reflect_interval(l.p, iv);
                const bool ok = shoot::solve_interval(ode, row.c, opts.shoot).feasibility ==
                                shoot::Feasibility::feasible;
                row.feasible.push_back(ok);
                all_ok = all_ok && ok;
            }
            if (!all_ok) {
                row.exists = wave::Existence::no;
            } else {
                auto outcome = wave::glue(l.p, l.d, row.c, opts);
                if (!outcome.glued) {
                    row.exists = wave::Existence::no;
                } else {
                    auto verdict = wave::extension_check(l.p, l.d, *outcome.glued, opts);
                    row.exists =
                        wave::resolve_existence(l.p, l.d, ts.c_hat, row.c, verdict, flip, opts);
                }
            }
        }
    };
    const int nthreads = std::min<int>(sweep_thread_cap(), steps);
    std::vector<std::thread> pool;
    for (int i = 1; i < nthreads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    const std::string csv_path = out_prefix + "_sweep.csv";
    std::ofstream csv(csv_path, std::ios::binary);
    csv << "c";
    for (const auto& iv : l.d.intervals) csv << ",feasible_k" << iv.k;
    csv << ",exists\n";
    for (const auto& row : rows) {
        csv << csv_num(row.c);
        for (bool f : row.feasible) csv << ',' << (f ? 1 : 0);
        csv << ',' << existence_name(row.exists) << '\n';
    }

    Json out;
    out["name"] = l.pf.name;
    out["c_hat"] = ts.c_hat;
    out["rows"] = steps;
    out["threads"] = nthreads;
    out["csv"] = csv_path;
    res.json = std::move(out);
    res.text = "sweep of " + std::to_string(steps) + " speeds written to " + csv_path + "\n";
    return res;
}

}  // namespace wavekit::cli
