#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "surfsim/decoder.hpp"
#include "surfsim/lattice.hpp"
#include "surfsim/noise.hpp"
#include "surfsim/schedule.hpp"
#include "surfsim/weights.hpp"

namespace surfsim {

enum class Accounting { PER_D_ROUNDS, PER_ROUND };

inline const char* accounting_name(Accounting a) {
    return a == Accounting::PER_D_ROUNDS ? "per_d_rounds" : "per_round";
}

enum class Component { X, Z };

struct SweepPoint {
    NoiseKind model = NoiseKind::STANDARD;
    Variant variant = Variant::DEPTH6;
    bool rectilinear = false;
    Component component = Component::X;
    int d = 0;
    double p = 0.0;
    int rounds = 0;
    long shots = 0;
    long failures = 0;
    double p_l = 0.0;
    double stderr_ = 0.0;
    Accounting accounting = Accounting::PER_D_ROUNDS;
    bool converged = true;
};

struct SweepConfig {
    NoiseKind model = NoiseKind::STANDARD;
    Variant variant = Variant::DEPTH6;
    bool rectilinear = false;
    // 'x', 'z' or 'a' (auto: Z for DEPTH8, X otherwise).
    char component = 'a';
    std::vector<int> d_list;
    std::vector<double> p_list;
    long shots = 100000;
    long min_failures = 0;
    long max_shots = 0;  // 0: no extension beyond `shots`
    uint64_t seed = 1;
    int workers = 1;
    Accounting accounting = Accounting::PER_D_ROUNDS;

    Component resolved_component() const {
        if (component == 'x') return Component::X;
        if (component == 'z') return Component::Z;
        return variant == Variant::DEPTH8 ? Component::Z : Component::X;
    }

    void validate() const {
        if (d_list.empty() || p_list.empty())
            throw std::invalid_argument("sweep config: need d and p lists");
        for (int d : d_list)
            if (d < 2) throw std::invalid_argument("sweep config: d must be >= 2");
        for (double p : p_list)
            if (p <= 0.0 || p > 0.2)
                throw std::invalid_argument("sweep config: p must be in (0, 0.2]");
        if (shots <= 0) throw std::invalid_argument("sweep config: shots must be positive");
        if (component != 'x' && component != 'z' && component != 'a')
            throw std::invalid_argument("sweep config: component must be x, z or a");
    }
};

// Failure count over trial indices [begin, end); each trial draws its RNG
// stream from (seed, d, p_index, trial), so results do not depend on how
// trials are distributed over workers.
inline long run_trials(const DecoderContext& ctx, uint64_t seed, int d, int p_index,
                       long begin, long end, Component comp, int workers) {
    std::atomic<long> failures{0};
    auto work = [&](int w) {
        long local = 0;
        for (long t = begin + w; t < end; t += workers) {
            Rng rng = Rng::from_key(seed, static_cast<uint64_t>(d),
                                    static_cast<uint64_t>(p_index),
                                    static_cast<uint64_t>(t));
            bool check = (t & 0xff) == 0;  // sampled syndrome-neutrality audit
            auto out = decode_trial(ctx, rng, check);
            bool fail = comp == Component::X ? out.failure_x : out.failure_z;
            local += fail;
        }
        failures += local;
    };
    if (workers <= 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }
    return failures.load();
}

inline DecoderContext make_context(const CodeLayout& L, const CircuitSchedule* S,
                                   const SweepConfig& cfg, double p, int rounds) {
    NoiseModel m(cfg.model, p);
    EdgeWeightTable T = cfg.rectilinear ? rectilinear_weights(L)
                                        : (m.is_circuit_level()
                                               ? derive_circuit_weights(L, *S, m)
                                               : derive_simple_weights(L, m.kind, p));
    return DecoderContext::make(L, S, m, T, rounds);
}

using SweepProgress = std::function<void(const SweepPoint&)>;

inline std::vector<SweepPoint> run_sweep(const SweepConfig& cfg,
                                         const SweepProgress& progress = {}) {
    cfg.validate();
    std::vector<SweepPoint> out;
    Component comp = cfg.resolved_component();
    int workers = std::max(1, cfg.workers);
    for (int d : cfg.d_list) {
        CodeLayout L = build_code(d);
        CircuitSchedule S;
        NoiseModel probe(cfg.model, 0.0);
        bool circuit = probe.is_circuit_level();
        if (circuit || cfg.rectilinear) S = build_schedule(L, cfg.variant);
        int rounds = cfg.model == NoiseKind::CODE_CAPACITY ? 0 : d;
        for (size_t pi = 0; pi < cfg.p_list.size(); ++pi) {
            double p = cfg.p_list[pi];
            auto ctx = make_context(L, circuit ? &S : nullptr, cfg, p, rounds);
            ctx.decode_x = comp == Component::X;
            ctx.decode_z = comp == Component::Z;
            SweepPoint pt;
            pt.model = cfg.model;
            pt.variant = cfg.variant;
            pt.rectilinear = cfg.rectilinear;
            pt.component = comp;
            pt.d = d;
            pt.p = p;
            pt.rounds = rounds == 0 ? 1 : rounds;
            pt.accounting = Accounting::PER_D_ROUNDS;
            long done = 0;
            long fails = 0;
            // First the fixed budget, then fixed-size extensions until the
            // failure target is met or the cap is reached. The schedule of
            // batch boundaries is deterministic, so reruns are bit-identical.
            fails += run_trials(ctx, cfg.seed, d, static_cast<int>(pi), 0, cfg.shots,
                                comp, workers);
            done = cfg.shots;
            while (fails < cfg.min_failures && done < cfg.max_shots) {
                long batch = std::min(cfg.shots, cfg.max_shots - done);
                fails += run_trials(ctx, cfg.seed, d, static_cast<int>(pi), done,
                                    done + batch, comp, workers);
                done += batch;
            }
            pt.shots = done;
            pt.failures = fails;
            pt.p_l = static_cast<double>(fails) / static_cast<double>(done);
            pt.stderr_ = std::sqrt(pt.p_l * (1.0 - pt.p_l) / static_cast<double>(done));
            pt.converged = cfg.min_failures <= 0 || fails >= cfg.min_failures;
            if (progress) progress(pt);
            out.push_back(pt);
        }
    }
    return out;
}

// Converts a per-d-rounds failure probability to the equivalent per-round
// rate, inverting d identical rounds composing by parity:
// 1 - 2*p_l = (1 - 2r)^d.
inline SweepPoint to_per_round(const SweepPoint& pt) {
    if (pt.accounting != Accounting::PER_D_ROUNDS)
        throw std::invalid_argument("to_per_round: point already per-round");
    if (pt.p_l >= 0.5) throw std::invalid_argument("to_per_round: p_l must be < 1/2");
    SweepPoint out = pt;
    int d = pt.rounds;
    out.p_l = 0.5 * (1.0 - std::pow(1.0 - 2.0 * pt.p_l, 1.0 / d));
    // First-order error propagation through the transform.
    double deriv = std::pow(1.0 - 2.0 * pt.p_l, 1.0 / d - 1.0) / d;
    out.stderr_ = pt.stderr_ * deriv;
    out.accounting = Accounting::PER_ROUND;
    return out;
}

inline SweepPoint from_per_round(const SweepPoint& pt) {
    if (pt.accounting != Accounting::PER_ROUND)
        throw std::invalid_argument("from_per_round: point not per-round");
    SweepPoint out = pt;
    int d = pt.rounds;
    out.p_l = 0.5 * (1.0 - std::pow(1.0 - 2.0 * pt.p_l, static_cast<double>(d)));
    double deriv = std::pow(1.0 - 2.0 * pt.p_l, d - 1.0) * d;
    out.stderr_ = pt.stderr_ * deriv;
    out.accounting = Accounting::PER_D_ROUNDS;
    return out;
}

// CSV with the resolved configuration embedded as leading # comments, so a
// result file is self-describing and reruns are byte-comparable.
inline void write_csv(const std::vector<SweepPoint>& points,
                      const std::vector<std::string>& config_lines, std::ostream& os) {
    for (const auto& line : config_lines) os << "# " << line << "\n";
    os << "model,variant,weighting,component,d,p,rounds,shots,failures,p_l,stderr,"
          "accounting\n";
    char buf[64];
    for (const auto& pt : points) {
        os << noise_kind_name(pt.model) << "," << variant_name(pt.variant) << ","
           << (pt.rectilinear ? "rectilinear" : "circuit") << ","
           << (pt.component == Component::X ? "x" : "z") << "," << pt.d << ",";
        std::snprintf(buf, sizeof buf, "%.17g", pt.p);
        os << buf << "," << pt.rounds << "," << pt.shots << "," << pt.failures << ",";
        std::snprintf(buf, sizeof buf, "%.17g", pt.p_l);
        os << buf << ",";
        std::snprintf(buf, sizeof buf, "%.17g", pt.stderr_);
        os << buf << "," << accounting_name(pt.accounting) << "\n";
    }
}

// Reads back what write_csv produced. Comment lines are collected so a
// caller can inspect the embedded config.
inline std::vector<SweepPoint> read_csv(std::istream& is,
                                        std::vector<std::string>* config_lines = nullptr) {
    std::string line;
    bool saw_header = false;
    std::vector<SweepPoint> pts;
    auto parse_model = [](const std::string& s) {
        for (auto k : {NoiseKind::CODE_CAPACITY, NoiseKind::PHENOMENOLOGICAL,
                       NoiseKind::STANDARD, NoiseKind::BALANCED, NoiseKind::PERFECT_1Q})
            if (s == noise_kind_name(k)) return k;
        throw std::invalid_argument("csv: unknown model '" + s + "'");
    };
    auto parse_variant = [](const std::string& s) {
        for (auto v : {Variant::DEPTH8, Variant::DEPTH6, Variant::DEPTH5})
            if (s == variant_name(v)) return v;
        throw std::invalid_argument("csv: unknown variant '" + s + "'");
    };
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (config_lines)
                config_lines->push_back(line.size() > 2 ? line.substr(2) : "");
            continue;
        }
        if (!saw_header) {
            if (line !=
                "model,variant,weighting,component,d,p,rounds,shots,failures,p_l,"
                "stderr,accounting")
                throw std::invalid_argument("csv: unexpected header '" + line + "'");
            saw_header = true;
            continue;
        }
        std::vector<std::string> f;
        size_t start = 0;
        while (true) {
            size_t comma = line.find(',', start);
            f.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (f.size() != 12) throw std::invalid_argument("csv: bad row '" + line + "'");
        SweepPoint pt;
        pt.model = parse_model(f[0]);
        pt.variant = parse_variant(f[1]);
        pt.rectilinear = f[2] == "rectilinear";
        pt.component = f[3] == "z" ? Component::Z : Component::X;
        pt.d = std::stoi(f[4]);
        pt.p = std::stod(f[5]);
        pt.rounds = std::stoi(f[6]);
        pt.shots = std::stol(f[7]);
        pt.failures = std::stol(f[8]);
        pt.p_l = std::stod(f[9]);
        pt.stderr_ = std::stod(f[10]);
        pt.accounting =
            f[11] == "per_round" ? Accounting::PER_ROUND : Accounting::PER_D_ROUNDS;
        pts.push_back(pt);
    }
    if (!saw_header) throw std::invalid_argument("csv: missing header");
    return pts;
}

}  // namespace surfsim
