#include "iqpe/commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <system_error>

#include "iqpe/io.hpp"
#include "iqpe/qpe.hpp"

namespace iqpe {

namespace {

void emit(const RunConfig& cfg, std::ostream& artifact, const std::string& contents) {
    if (cfg.out.empty()) {
        artifact << contents;
    } else {
        write_file_atomically(cfg.out, contents);
    }
}

std::string slot_list(const PeakReport& peak) {
    std::ostringstream os;
    os << '{';
    const auto slots = peak.plateau();
    for (std::size_t i = 0; i < slots.size(); ++i) os << (i ? "," : "") << slots[i];
    os << '}';
    return os.str();
}

double expectation(const CMatrix& op, const CVector& v) { return inner(v, op * v).real(); }

// Runs a command body, mapping exceptions onto exit codes.
template <class Body>
int guarded(std::ostream& report, Body&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        report << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const RefinementError& e) {
        report << "refinement failed (" << to_string(e.kind()) << "): " << e.what() << '\n';
        return kExitRefinementFailure;
    } catch (const std::system_error& e) {
        report << "i/o error: " << e.what() << '\n';
        return kExitIoError;
    } catch (const Error& e) {
        report << "config error: " << e.what() << '\n';
        return kExitConfigError;
    }
}

}  // namespace

void validate(const RunConfig& cfg) {
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (cfg.model != "hubbard" && cfg.model != "pauli" && cfg.model != "phase") {
        fail("--model must be one of hubbard, pauli, phase (got '" + cfg.model + "')");
    }
    if (!std::isfinite(cfg.t) || !std::isfinite(cfg.u)) fail("--t and --u must be finite");
    if (cfg.model == "pauli" && cfg.pauli_file.empty()) fail("--model pauli needs --pauli-file <path>");
    if (cfg.model == "phase" && !(cfg.phase >= 0.0 && cfg.phase < 1.0)) fail("--phase must be in [0, 1)");
    if (cfg.n_ancilla < 1 || cfg.n_ancilla > kMaxAncilla) {
        fail("--n-ancilla must be in [1, " + std::to_string(kMaxAncilla) + "]");
    }
    if (!(cfg.delta_t > 0.0) || !std::isfinite(cfg.delta_t)) fail("--delta-t must be a positive number");
    if (cfg.mode != "exact" && cfg.mode != "sampled") fail("--mode must be 'exact' or 'sampled'");
    if (cfg.shots == 0) fail("--shots must be >= 1");
    if (!(cfg.beta > 0.0 && cfg.beta <= 1.0)) fail("--beta must be in (0, 1]");
    if (!(cfg.eps_max > 0.0)) fail("--eps-max must be positive");
    if (cfg.max_iterations < 0) fail("--max-iterations must be >= 0");
    if (cfg.max_n < 0) fail("--max-n must be >= 0");
    for (int n : cfg.n_list) {
        if (n < 1 || n > kMaxAncilla) fail("--n-list entries must be in [1, " + std::to_string(kMaxAncilla) + "]");
    }
    if (cfg.state_index != "highest") {
        std::size_t consumed = 0;
        long long idx = -1;
        try {
            idx = std::stoll(cfg.state_index, &consumed);
        } catch (const std::exception&) {
            consumed = 0;
        }
        if (consumed != cfg.state_index.size() || idx < 0) {
            fail("--state-index must be 'highest' or a non-negative integer");
        }
    }
}

PauliSum build_model(const RunConfig& cfg) {
    if (cfg.model == "hubbard") return build_hubbard({cfg.t, cfg.u});
    if (cfg.model == "phase") return single_level(2.0 * std::numbers::pi * cfg.phase / cfg.delta_t);
    std::ifstream in(cfg.pauli_file);
    if (!in) throw std::system_error(errno, std::generic_category(), "cannot open " + cfg.pauli_file);
    return read_pauli_sum(in);
}

PreparedState prepare_state(const RunConfig& cfg) {
    validate(cfg);
    Propagator prop = exact_propagator(build_model(cfg));
    std::size_t index = prop.dim() - 1;
    if (cfg.state_index != "highest") {
        index = std::stoull(cfg.state_index);
        if (index >= prop.dim()) {
            throw ConfigError("--state-index " + cfg.state_index + " out of range for a " +
                              std::to_string(prop.dim()) + "-dimensional model");
        }
    }
    CVector state = prop.eigenstate(index);
    const double energy = prop.energy(index);
    return PreparedState{std::move(prop), index, std::move(state), energy};
}

int cmd_distribution(const RunConfig& cfg, std::ostream& artifact, std::ostream& report) {
    return guarded(report, [&] {
        const PreparedState ps = prepare_state(cfg);
        const QpeConfig qcfg{cfg.n_ancilla, cfg.delta_t, 1.0};
        OutcomeDistribution dist = simulate_circuit(ps.propagator, ps.eigenstate, qcfg);
        if (parse_sampling_mode(cfg.mode) == SamplingMode::Sampled) {
            dist = sample_distribution(dist, cfg.shots, cfg.seed);
        }
        std::ostringstream csv;
        write_distribution_csv(csv, dist);
        emit(cfg, artifact, csv.str());

        const PeakReport peak = detect_peak_plateau(dist, cfg.beta);
        const double slots = static_cast<double>(dist.size());
        report << std::setprecision(10);
        report << "state " << ps.index << "  energy " << ps.energy << "  phase "
               << eigenphase(ps.energy, qcfg) << '\n';
        report << "peak x=" << peak.y << "  Pr=" << dist[peak.y] << "  plateau=" << slot_list(peak)
               << "  C=" << peak.c_slots << "  (beta " << cfg.beta << ")\n";
        report << "slot [" << (static_cast<double>(peak.y) - 0.5) / slots << ", "
               << (static_cast<double>(peak.y) + 0.5) / slots << "]\n";
        return static_cast<int>(kExitOk);
    });
}

int cmd_iterate(const RunConfig& cfg, std::ostream& artifact, std::ostream& report) {
    return guarded(report, [&] {
        const PreparedState ps = prepare_state(cfg);
        const SamplingMode mode = parse_sampling_mode(cfg.mode);
        RefinementOptions opts;
        opts.eps_max = cfg.eps_max;
        opts.mode = mode;
        opts.shots = cfg.shots;
        opts.seed = cfg.seed;
        opts.beta = cfg.beta;
        opts.max_iterations = cfg.max_iterations;
        const QpeConfig qcfg{cfg.n_ancilla, cfg.delta_t, 1.0};

        auto print = [&](const RefinementTrace& trace) {
            report << std::setprecision(10);
            for (const auto& r : trace.iterations) {
                report << "n=" << r.n << "  alpha=" << r.alpha << "  y=" << r.y << "  C=" << r.c_slots
                       << "  phase in [" << r.interval.lo() << ", " << r.interval.hi() << "]  eps="
                       << r.epsilon << '\n';
            }
        };

        try {
            const RefinementTrace trace = run_refinement(ps.propagator, ps.eigenstate, qcfg, opts);
            std::ostringstream js;
            write_trace_json(js, trace, mode);
            emit(cfg, artifact, js.str());
            print(trace);
            report << std::setprecision(17) << "energy in [" << trace.energy_low << ", " << trace.energy_high
                   << "]\n";
            return static_cast<int>(kExitOk);
        } catch (const RefinementError& e) {
            if (!e.partial_trace().iterations.empty()) {
                std::ostringstream js;
                write_trace_json(js, e.partial_trace(), mode);
                emit(cfg, artifact, js.str());
                print(e.partial_trace());
            }
            throw;
        }
    });
}

void write_width_sweep_csv(std::ostream& os, const std::vector<int>& n_list, int max_n) {
    const auto old_precision = os.precision(17);
    os << "N,n,width\n";
    for (int n_ancilla : n_list)
        for (int n = 0; n <= max_n; ++n) os << n_ancilla << ',' << n << ',' << error_bound(1, n_ancilla, n) << '\n';
    os.precision(old_precision);
}

int cmd_width_sweep(const RunConfig& cfg, std::ostream& artifact, std::ostream& report) {
    return guarded(report, [&] {
        validate(cfg);
        if (cfg.n_list.empty()) throw ConfigError("--n-list must name at least one register size");
        std::ostringstream csv;
        write_width_sweep_csv(csv, cfg.n_list, cfg.max_n);
        emit(cfg, artifact, csv.str());
        report << "wrote " << cfg.n_list.size() * static_cast<std::size_t>(cfg.max_n + 1) << " rows\n";
        return static_cast<int>(kExitOk);
    });
}

int cmd_hubbard_info(const RunConfig& cfg, std::ostream& artifact, std::ostream& report) {
    return guarded(report, [&] {
        validate(cfg);
        const PauliSum h = build_hubbard({cfg.t, cfg.u});
        const Propagator prop = exact_propagator(h);
        const CMatrix number = pauli_sum_to_matrix(number_operator(4));
        const CMatrix sz = pauli_sum_to_matrix(hubbard_sz_operator());

        std::ostringstream table;
        table << std::setprecision(17);
        table << "index,energy,particles,sz\n";
        std::ptrdiff_t highest_half_filling = -1;
        for (std::size_t j = 0; j < prop.dim(); ++j) {
            const CVector v = prop.eigenstate(j);
            const double n = expectation(number, v);
            const double s = expectation(sz, v);
            table << j << ',' << prop.energy(j) << ',' << std::round(n * 1e6) / 1e6 << ','
                  << std::round(s * 1e6) / 1e6 + 0.0 << '\n';
            if (std::abs(n - 2.0) < 1e-6 && std::abs(s) < 1e-6) highest_half_filling = static_cast<std::ptrdiff_t>(j);
        }
        emit(cfg, artifact, table.str());
        report << std::setprecision(10) << "two-site Hubbard t=" << cfg.t << " u=" << cfg.u << ", "
               << h.terms().size() << " Pauli terms\n";
        if (highest_half_filling >= 0) {
            const auto j = static_cast<std::size_t>(highest_half_filling);
            report << "highest half-filling (N=2, Sz=0) state: index " << j << ", energy " << prop.energy(j) << '\n';
        }
        return static_cast<int>(kExitOk);
    });
}

}  // namespace iqpe
