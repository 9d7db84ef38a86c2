#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "surfsim/decoder.hpp"
#include "surfsim/experiment.hpp"
#include "surfsim/fit.hpp"
#include "surfsim/plot.hpp"

using namespace surfsim;
using nlohmann::json;

namespace {

// Exit codes: 0 ok, 1 usage, 2 runtime, 3 nonconvergence.
constexpr int kUsage = 1, kRuntime = 2, kNonconverged = 3;

NoiseKind parse_model(const std::string& s) {
    for (auto k : {NoiseKind::CODE_CAPACITY, NoiseKind::PHENOMENOLOGICAL,
                   NoiseKind::STANDARD, NoiseKind::BALANCED, NoiseKind::PERFECT_1Q})
        if (s == noise_kind_name(k)) return k;
    throw CLI::ValidationError("--model", "unknown model '" + s + "'");
}

Variant parse_variant(const std::string& s) {
    for (auto v : {Variant::DEPTH8, Variant::DEPTH6, Variant::DEPTH5})
        if (s == variant_name(v)) return v;
    throw CLI::ValidationError("--variant", "unknown variant '" + s + "'");
}

// p list entries are either plain numbers or start:stop:count ranges.
std::vector<double> expand_p(const std::vector<std::string>& specs) {
    std::vector<double> out;
    for (const auto& s : specs) {
        size_t c1 = s.find(':');
        if (c1 == std::string::npos) {
            out.push_back(std::stod(s));
            continue;
        }
        size_t c2 = s.find(':', c1 + 1);
        if (c2 == std::string::npos)
            throw CLI::ValidationError("--p", "range needs start:stop:count");
        double start = std::stod(s.substr(0, c1));
        double stop = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
        int count = std::stoi(s.substr(c2 + 1));
        if (count < 2) throw CLI::ValidationError("--p", "range count must be >= 2");
        for (int k = 0; k < count; ++k)
            out.push_back(start + (stop - start) * k / (count - 1));
    }
    return out;
}

struct CommonOpts {
    std::string model = "standard";
    std::string variant = "depth6";
    std::string weighting = "circuit";
    std::string component = "auto";
    std::vector<int> d_list;
    std::vector<std::string> p_specs;
    long shots = 100000;
    long min_failures = 0;
    long max_shots = 0;
    uint64_t seed = 1;
    int workers = 1;
    std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_run_opts) {
    cmd->add_option("--model", o.model,
                    "capacity | pheno | standard | balanced | perfect1q");
    cmd->add_option("--variant", o.variant, "depth8 | depth6 | depth5");
    cmd->add_option("--weighting", o.weighting, "circuit | rectilinear");
    cmd->add_option("--d", o.d_list, "code distances")->delimiter(',');
    cmd->add_option("--p", o.p_specs, "physical error rates (value or start:stop:count)")
        ->delimiter(',');
    cmd->add_option("-o,--out", o.out, "output path (default stdout)");
    if (with_run_opts) {
        cmd->add_option("--component", o.component, "x | z | auto");
        cmd->add_option("--shots", o.shots, "trials per point");
        cmd->add_option("--min-failures", o.min_failures,
                        "extend the run until this many failures");
        cmd->add_option("--max-shots", o.max_shots, "cap for min-failures extension");
        cmd->add_option("--seed", o.seed, "master seed");
        cmd->add_option("--workers", o.workers, "worker threads");
    }
    cmd->set_config("--config", "", "flat key=value config file");
}

SweepConfig to_sweep_config(const CommonOpts& o) {
    SweepConfig cfg;
    cfg.model = parse_model(o.model);
    cfg.variant = parse_variant(o.variant);
    if (o.weighting != "circuit" && o.weighting != "rectilinear")
        throw CLI::ValidationError("--weighting", "must be circuit or rectilinear");
    cfg.rectilinear = o.weighting == "rectilinear";
    if (o.component == "auto")
        cfg.component = 'a';
    else if (o.component == "x" || o.component == "z")
        cfg.component = o.component[0];
    else
        throw CLI::ValidationError("--component", "must be x, z or auto");
    cfg.d_list = o.d_list;
    cfg.p_list = expand_p(o.p_specs);
    cfg.shots = o.shots;
    cfg.min_failures = o.min_failures;
    cfg.max_shots = o.max_shots;
    cfg.seed = o.seed;
    cfg.workers = o.workers;
    return cfg;
}

std::vector<std::string> config_lines(const CommonOpts& o, const SweepConfig& cfg) {
    std::vector<std::string> lines;
    lines.push_back("model=" + o.model);
    if (parse_model(o.model) != NoiseKind::CODE_CAPACITY &&
        parse_model(o.model) != NoiseKind::PHENOMENOLOGICAL)
        lines.push_back("variant=" + o.variant);
    lines.push_back("weighting=" + o.weighting);
    lines.push_back(std::string("component=") +
                    (cfg.resolved_component() == Component::X ? "x" : "z"));
    std::string ds;
    for (int d : cfg.d_list) ds += (ds.empty() ? "" : ",") + std::to_string(d);
    lines.push_back("d=" + ds);
    std::string ps;
    char buf[64];
    for (double p : cfg.p_list) {
        std::snprintf(buf, sizeof buf, "%.10g", p);
        ps += (ps.empty() ? "" : ",") + std::string(buf);
    }
    lines.push_back("p=" + ps);
    lines.push_back("shots=" + std::to_string(cfg.shots));
    lines.push_back("min_failures=" + std::to_string(cfg.min_failures));
    lines.push_back("max_shots=" + std::to_string(cfg.max_shots));
    lines.push_back("seed=" + std::to_string(cfg.seed));
    return lines;
}

// Streams to the output path, or stdout when none given.
int with_output(const std::string& path, const std::function<void(std::ostream&)>& fn) {
    if (path.empty()) {
        fn(std::cout);
        return 0;
    }
    std::ofstream os(path);
    if (!os) {
        std::cerr << "error: cannot open '" << path << "' for writing\n";
        return kRuntime;
    }
    fn(os);
    return os.good() ? 0 : kRuntime;
}

int cmd_run(const CommonOpts& o) {
    SweepConfig cfg = to_sweep_config(o);
    cfg.validate();
    auto lines = config_lines(o, cfg);
    bool all_converged = true;
    auto points = run_sweep(cfg, [&](const SweepPoint& pt) {
        std::cerr << "d=" << pt.d << " p=" << pt.p << " shots=" << pt.shots
                  << " failures=" << pt.failures << " p_l=" << pt.p_l << "\n";
        all_converged = all_converged && pt.converged;
    });
    int rc = with_output(o.out, [&](std::ostream& os) { write_csv(points, lines, os); });
    if (rc) return rc;
    if (!all_converged) {
        std::cerr << "warning: some points did not reach min-failures\n";
        return kNonconverged;
    }
    return 0;
}

json fit_to_json(const FitResult& f, int d_min) {
    json j;
    j["p_th"] = f.p_th;
    j["p_th_err"] = f.p_th_err;
    j["nu0"] = f.nu0;
    j["nu0_err"] = f.nu0_err;
    j["A"] = f.A;
    j["A_err"] = f.A_err;
    j["B"] = f.B;
    j["B_err"] = f.B_err;
    j["C"] = f.C;
    j["C_err"] = f.C_err;
    j["chi2"] = f.chi2;
    j["dof"] = f.dof;
    j["r_squared"] = f.r2;
    j["d_min"] = d_min;
    j["points_used"] = f.points_used;
    j["converged"] = f.converged;
    j["good"] = f.good;
    return j;
}

int cmd_fit(const std::string& csv_path, int d_min, int bootstrap,
            const std::string& out) {
    std::ifstream is(csv_path);
    if (!is) {
        std::cerr << "error: cannot read '" << csv_path << "'\n";
        return kRuntime;
    }
    std::vector<SweepPoint> points;
    FitOptions opt;
    opt.d_min = d_min;
    opt.bootstrap = bootstrap;
    FitResult fit;
    try {
        points = read_csv(is);
        fit = fit_threshold(points, opt);
    } catch (const std::invalid_argument& e) {
        // Bad schema or too little data is a data problem, not a usage one.
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }

    json j;
    j["method"] =
        "weighted least squares, quadratic scaling ansatz; errors from inverse "
        "curvature" +
        std::string(bootstrap > 0 ? " cross-checked by bootstrap" : "");
    j["fit"] = fit_to_json(fit, d_min);
    // d_min sensitivity: refit with the other conventional cutoff when the
    // data supports it, so the report shows both side by side.
    int alt = d_min >= 7 ? 5 : 7;
    try {
        FitOptions alt_opt = opt;
        alt_opt.d_min = alt;
        alt_opt.bootstrap = 0;
        j["fit_d_min_" + std::to_string(alt)] = fit_to_json(fit_threshold(points, alt_opt), alt);
    } catch (const std::exception&) {
    }
    int rc = with_output(out, [&](std::ostream& os) { os << j.dump(2) << "\n"; });
    if (rc) return rc;
    return fit.converged ? 0 : kNonconverged;
}

int cmd_plot(const std::string& csv_path, const std::string& fit_path,
             const std::string& out) {
    std::ifstream is(csv_path);
    if (!is) {
        std::cerr << "error: cannot read '" << csv_path << "'\n";
        return kRuntime;
    }
    auto points = read_csv(is);
    FitResult fit;
    bool have_fit = false;
    if (!fit_path.empty()) {
        std::ifstream fs(fit_path);
        if (!fs) {
            std::cerr << "error: cannot read '" << fit_path << "'\n";
            return kRuntime;
        }
        json j = json::parse(fs);
        const json& f = j.contains("fit") ? j["fit"] : j;
        fit.p_th = f["p_th"];
        fit.nu0 = f["nu0"];
        fit.A = f["A"];
        fit.B = f["B"];
        fit.C = f["C"];
        have_fit = true;
    }
    if (points.empty()) {
        std::cerr << "error: no data rows in '" << csv_path << "'\n";
        return kRuntime;
    }
    return with_output(out, [&](std::ostream& os) {
        write_svg_plot(points, have_fit ? &fit : nullptr, os);
    });
}

int cmd_weights(const CommonOpts& o) {
    if (o.d_list.size() != 1)
        throw CLI::ValidationError("--d", "weights needs exactly one distance");
    auto ps = expand_p(o.p_specs);
    if (o.weighting == "circuit" && ps.size() != 1)
        throw CLI::ValidationError("--p", "circuit weights need exactly one p");
    CodeLayout L = build_code(o.d_list[0]);
    EdgeWeightTable T;
    if (o.weighting == "rectilinear") {
        T = rectilinear_weights(L);
    } else {
        NoiseKind kind = parse_model(o.model);
        NoiseModel m(kind, ps[0]);
        if (m.is_circuit_level()) {
            CircuitSchedule S = build_schedule(L, parse_variant(o.variant));
            T = derive_circuit_weights(L, S, m);
        } else {
            T = derive_simple_weights(L, kind, ps[0]);
        }
    }
    return with_output(o.out, [&](std::ostream& os) { dump_weights_csv(L, T, os); });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"surface-code threshold simulator"};
    app.require_subcommand(1);

    CommonOpts run_o, weights_o;
    auto* run = app.add_subcommand("run", "Monte Carlo sweep -> CSV");
    add_common(run, run_o, true);

    std::string fit_csv, fit_out;
    int fit_dmin = 0, fit_bootstrap = 0;
    auto* fit = app.add_subcommand("fit", "fit universal scaling to a sweep CSV");
    fit->add_option("csv", fit_csv, "input CSV from `run`")->required();
    fit->add_option("--d-min", fit_dmin, "drop distances below this");
    fit->add_option("--bootstrap", fit_bootstrap, "bootstrap replicas for errors");
    fit->add_option("-o,--out", fit_out, "output path (default stdout)");

    std::string plot_csv, plot_fit, plot_out;
    auto* plot = app.add_subcommand("plot", "render a sweep CSV as SVG");
    plot->add_option("csv", plot_csv, "input CSV from `run`")->required();
    plot->add_option("--fit", plot_fit, "fit JSON to overlay");
    plot->add_option("-o,--out", plot_out, "output path (default stdout)");

    auto* weights = app.add_subcommand("weights", "dump a matching weight table as CSV");
    add_common(weights, weights_o, false);

    int layout_d = 3;
    std::string layout_out;
    auto* layout = app.add_subcommand("dump-layout", "print the code layout");
    layout->add_option("--d", layout_d, "code distance");
    layout->add_option("-o,--out", layout_out, "output path (default stdout)");

    int sched_d = 3;
    std::string sched_variant = "depth6", sched_out;
    auto* sched = app.add_subcommand("dump-schedule", "print the extraction schedule");
    sched->add_option("--d", sched_d, "code distance");
    sched->add_option("--variant", sched_variant, "depth8 | depth6 | depth5");
    sched->add_option("-o,--out", sched_out, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? kUsage : 0;
    }

    try {
        if (run->parsed()) return cmd_run(run_o);
        if (fit->parsed()) return cmd_fit(fit_csv, fit_dmin, fit_bootstrap, fit_out);
        if (plot->parsed()) return cmd_plot(plot_csv, plot_fit, plot_out);
        if (weights->parsed()) return cmd_weights(weights_o);
        if (layout->parsed()) {
            CodeLayout L = build_code(layout_d);
            return with_output(layout_out, [&](std::ostream& os) { dump_layout(L, os); });
        }
        if (sched->parsed()) {
            CodeLayout L = build_code(sched_d);
            CircuitSchedule S = build_schedule(L, parse_variant(sched_variant));
            return with_output(sched_out, [&](std::ostream& os) { dump_schedule(S, os); });
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
    return 0;
}
