#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mfl {

enum class ExperimentKind { simulate, solve_pde, chaos_study, lde_audit, enumerate };

/// One config file = one experiment.  Sweeps (over N, over enumeration sizes)
/// are expressed inside the config, so a manifest captures full provenance.
/// The JSON key list is documented in the README; parse() validates every
/// constraint and reports all violations at once.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::chaos_study;
    std::string output_dir = "out";
    std::uint64_t seed = 1;

    struct Kernel {
        int dim = 1;
        std::string drift = "trig_drift";
        std::vector<double> drift_params{0.4, 1.0};
        std::string sigma = "trig_sigma";
        std::vector<double> sigma_params{1.0, 0.01, 1.0, 0.5};
    } kernel;

    struct Init {
        /// Cosine amplitudes: rho0 = 1 + sum_m amps[m-1] sum_axis cos(2 pi m x).
        std::vector<double> amps{0.1};
    } init;

    struct Pde {
        int n = 128;
        double dt = 0.0;  ///< 0 selects the CFL-limited step automatically
        double t_end = 0.25;
        std::string stepper = "rk2";
        std::vector<double> checkpoints;  ///< empty selects {t_end}
    } pde;

    struct Particles {
        std::vector<int> n_list{16, 32, 64, 128, 256, 512};
        int replicas = 64;
        double dt = 1e-3;
        bool include_self = true;
        std::string interaction = "direct";
        double cutoff = 0.5;
    } particles;

    struct Metrics {
        int bins = 16;  ///< 0 selects the sample-size rule
        int grid_cap = 128;
        int bootstrap = 200;
        long pair_cap = 200000;
        double universal_c = 1.0;
    } metrics;

    struct Lde {
        std::string eta_mode = "canonical";  ///< "canonical" (1/(12 e^2 B)) or "given"
        double eta = 0.0;                    ///< used when eta_mode == "given"
        int n_mc = 10000;
        std::vector<int> mc_n_list{8, 32, 128};
        int probe_count = 64;
        int quad_n = 32;
        std::vector<int> enum_n_list{2, 3, 4};
        std::vector<int> enum_m_list{1};
    } lde;

    /// Parses and fully validates; throws ConfigError listing every violation
    /// (unknown keys are reported with the nearest valid key).
    static ExperimentConfig parse(const std::string& json_text);

    /// Canonical JSON with every key present; parse(serialize()) round-trips
    /// losslessly.
    std::string serialize() const;
};

std::string to_string(ExperimentKind kind);

} // namespace mfl
