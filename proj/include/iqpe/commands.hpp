#pragma once

// Experiment commands behind the `iqpe` executable. Each command reads a
// RunConfig, writes its artifact to `out` (or the given stream when `out` is
// empty) and prints a human-readable summary to `report`.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "iqpe/model.hpp"
#include "iqpe/refine.hpp"

namespace iqpe {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfigError = 2,
    kExitRefinementFailure = 3,
    kExitIoError = 4,
};

/// Invalid or inconsistent command configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

struct RunConfig {
    std::string model = "hubbard";  // hubbard | pauli | phase
    double t = 1.0;
    double u = 1.0;
    std::string pauli_file;
    double phase = 0.25;              // eigenphase of the synthetic one-level model
    std::string state_index = "highest";  // "highest" or an ascending eigenvalue index

    int n_ancilla = 3;
    double delta_t = 1.0;
    std::string mode = "exact";
    std::uint64_t shots = 100000;
    std::uint64_t seed = 0;
    double beta = kDefaultPlateauBeta;
    double eps_max = 1e-3;
    int max_iterations = 12;

    std::vector<int> n_list = {2, 3, 4};  // width-sweep
    int max_n = 4;                         // width-sweep

    std::string out;
};

/// Checks every numeric range; throws ConfigError with an actionable message.
void validate(const RunConfig& cfg);

/// The Hamiltonian selected by the config.
PauliSum build_model(const RunConfig& cfg);

struct PreparedState {
    Propagator propagator;
    std::size_t index;
    CVector eigenstate;
    double energy;
};
PreparedState prepare_state(const RunConfig& cfg);

/// Each returns an ExitCode; errors are reported on `report`.
int cmd_distribution(const RunConfig& cfg, std::ostream& artifact, std::ostream& report);
int cmd_iterate(const RunConfig& cfg, std::ostream& artifact, std::ostream& report);
int cmd_width_sweep(const RunConfig& cfg, std::ostream& artifact, std::ostream& report);
int cmd_hubbard_info(const RunConfig& cfg, std::ostream& artifact, std::ostream& report);

/// CSV header `N,n,width`; one row per (N, n) with width 1/(2^N (2^N - 1)^n).
void write_width_sweep_csv(std::ostream& os, const std::vector<int>& n_list, int max_n);

}  // namespace iqpe
