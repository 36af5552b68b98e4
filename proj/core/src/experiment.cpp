#include "mfl/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "mfl/chaos.hpp"
#include "mfl/csv.hpp"
#include "mfl/enumeration.hpp"
#include "mfl/ensemble.hpp"
#include "mfl/errors.hpp"
#include "mfl/kernel.hpp"
#include "mfl/lde.hpp"
#include "mfl/pde.hpp"
#include "mfl/phi.hpp"
#include "mfl/svg.hpp"

namespace mfl {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) { return format_number(v); }

struct Runner {
    const ExperimentConfig& cfg;
    fs::path dir;
    RunManifest manifest;

    explicit Runner(const ExperimentConfig& c) : cfg(c), dir(c.output_dir) {
        manifest.artifact_version = "mflab 0.1.0";
        manifest.config_hash = fnv1a64(cfg.serialize());
        manifest.seed = cfg.seed;
    }

    void emit(const fs::path& name, const std::string& content) {
        const fs::path path = dir / name;
        write_text_atomic(path, content);
        manifest.add_file(dir, path);
    }

    // Runs one stage with wall-clock accounting; on error the manifest is
    // flushed with the failure recorded, then the error propagates.
    void stage(const std::string& name, const std::function<void()>& body) {
        const auto start = std::chrono::steady_clock::now();
        auto seconds = [&start] {
            return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        };
        try {
            body();
        } catch (const Error& e) {
            manifest.add_stage(name, std::string("failed: ") + e.what(), seconds());
            manifest.write(dir / "manifest.json");
            throw;
        }
        manifest.add_stage(name, "ok", seconds());
    }

    std::vector<double> checkpoints() const {
        if (!cfg.pde.checkpoints.empty()) return cfg.pde.checkpoints;
        return {cfg.pde.t_end};
    }

    SimConfig sim_config() const {
        SimConfig sim;
        sim.dt = cfg.particles.dt;
        sim.t_end = cfg.pde.t_end;
        sim.seed = cfg.seed;
        sim.interaction = cfg.particles.interaction;
        sim.cutoff = cfg.particles.cutoff;
        sim.include_self = cfg.particles.include_self;
        return sim;
    }

    MetricsConfig metrics_config() const {
        MetricsConfig m;
        m.bins = cfg.metrics.bins;
        m.grid_cap = cfg.metrics.grid_cap;
        m.bootstrap = cfg.metrics.bootstrap;
        m.pair_cap = cfg.metrics.pair_cap;
        m.universal_c = cfg.metrics.universal_c;
        m.seed = cfg.seed;
        return m;
    }

    void write_snapshot(const std::string& name, const EnsembleSnapshot& snap,
                        const KernelSpec& kernel) {
        std::string head;
        head += "# n_particles=" + std::to_string(snap.n_particles) + "\n";
        head += "# dim=" + std::to_string(snap.dim) + "\n";
        head += "# replicas=" + std::to_string(snap.n_replicas) + "\n";
        head += "# t=" + fmt(snap.time) + "\n";
        head += "# seed=" + std::to_string(cfg.seed) + "\n";
        head += "# kernel=" + kernel.name() + "\n";
        std::vector<std::string> cols{"replica", "particle", "x0"};
        if (snap.dim == 2) cols.push_back("x1");
        CsvTable table(cols);
        for (int r = 0; r < snap.n_replicas; ++r) {
            for (int i = 0; i < snap.n_particles; ++i) {
                std::vector<std::string> row{std::to_string(r), std::to_string(i),
                                             fmt(snap.at(r, i, 0))};
                if (snap.dim == 2) row.push_back(fmt(snap.at(r, i, 1)));
                table.add_row(row);
            }
        }
        emit(name, head + table.str());
    }

    void write_density(const std::string& name, const DensityGrid& grid) {
        std::vector<std::string> cols{"node", "x0"};
        if (grid.dim == 2) cols.push_back("x1");
        cols.push_back("value");
        CsvTable table(cols);
        for (std::size_t f = 0; f < grid.values.size(); ++f) {
            std::vector<std::string> row{std::to_string(f), fmt(grid.coord(f, 0))};
            if (grid.dim == 2) row.push_back(fmt(grid.coord(f, 1)));
            row.push_back(fmt(grid.values[f]));
            table.add_row(row);
        }
        emit(name, table.str());
    }

    void run_simulate(const KernelSpec& kernel, const DensityGrid& rho0) {
        ParticleEnsemble ensemble(kernel.dim(), cfg.particles.n_list.front(),
                                  cfg.particles.replicas, cfg.seed);
        stage("sample", [&] {
            ensemble = ParticleEnsemble::sample_initial(rho0, cfg.particles.n_list.front(),
                                                        cfg.particles.replicas, cfg.seed);
        });
        std::vector<EnsembleSnapshot> snaps;
        stage("march", [&] { snaps = ensemble.run(kernel, sim_config(), checkpoints()); });
        stage("write", [&] {
            for (std::size_t c = 0; c < snaps.size(); ++c) {
                write_snapshot("snapshot_" + std::to_string(c) + ".csv", snaps[c], kernel);
            }
        });
    }

    void run_solve_pde(const KernelSpec& kernel, const DensityGrid& rho0) {
        MeanFieldSolver solver(kernel, kernel.dim(), cfg.pde.n);
        std::vector<DensityGrid> snaps;
        TrajectoryNorms norms;
        SolveOptions opt;
        opt.dt = cfg.pde.dt;
        opt.scheme = cfg.pde.stepper;
        stage("march", [&] {
            snaps = solver.run(rho0, cfg.pde.t_end, opt, checkpoints(), &norms);
        });
        stage("write", [&] {
            double mass_drift = 0.0;
            double min_value = rho0.min_value();
            for (std::size_t c = 0; c < snaps.size(); ++c) {
                write_density("density_" + std::to_string(c) + ".csv", snaps[c]);
                mass_drift = std::max(mass_drift, std::abs(snaps[c].integral() - 1.0));
                min_value = std::min(min_value, snaps[c].min_value());
            }
            const double dt_eff = opt.dt > 0.0 ? opt.dt : solver.stable_dt(opt.cfl_safety);
            CsvTable meta({"n", "dim", "dt", "stepper", "kernel", "mass_drift", "min_value"});
            meta.add_row({std::to_string(cfg.pde.n), std::to_string(kernel.dim()),
                          fmt(dt_eff), cfg.pde.stepper, kernel.name(), fmt(mass_drift),
                          fmt(min_value)});
            emit("pde_meta.csv", meta.str());
        });
    }

    void run_chaos(const KernelSpec& kernel, const DensityGrid& rho0) {
        std::vector<DensityGrid> traj;
        TrajectoryNorms norms;
        stage("pde", [&] {
            MeanFieldSolver solver(kernel, kernel.dim(), cfg.pde.n);
            SolveOptions opt;
            opt.dt = cfg.pde.dt;
            opt.scheme = cfg.pde.stepper;
            traj = solver.run(rho0, cfg.pde.t_end, opt, checkpoints(), &norms);
        });
        ChaosReport report;
        stage("sweep", [&] {
            report = chaos_sweep(cfg.particles.n_list, checkpoints(), kernel, rho0, 0.0, traj,
                                 norms, sim_config(), cfg.particles.replicas, metrics_config());
        });
        stage("write", [&] {
            CsvTable table({"N", "t", "H1", "H2", "L1_1", "L1_2", "ckp_1", "ckp_2", "envelope",
                            "M", "slope"});
            CsvTable extras({"N", "t", "status", "sigma_H1", "sigma_H2", "sigma_L1_1",
                             "sigma_L1_2", "samples_1", "samples_2", "bins"});
            for (const auto& row : report.rows) {
                if (row.status == "ok") {
                    table.add_row({std::to_string(row.n_particles), fmt(row.t), fmt(row.h1),
                                   fmt(row.h2), fmt(row.l1_1), fmt(row.l1_2), fmt(row.ckp_1),
                                   fmt(row.ckp_2), fmt(row.envelope), fmt(row.m_value),
                                   fmt(row.slope)});
                }
                extras.add_row({std::to_string(row.n_particles), fmt(row.t), row.status,
                                fmt(row.sigma_h1), fmt(row.sigma_h2), fmt(row.sigma_l1_1),
                                fmt(row.sigma_l1_2), std::to_string(row.samples_1),
                                std::to_string(row.samples_2), std::to_string(row.bins)});
            }
            emit("chaos_report.csv", table.str());
            emit("chaos_status.csv", extras.str());

            std::vector<SvgSeries> series;
            for (double t : checkpoints()) {
                SvgSeries s;
                s.label = "t=" + fmt(t);
                for (const auto& row : report.rows) {
                    if (row.status == "ok" && std::abs(row.t - t) < 1e-12) {
                        s.x.push_back(static_cast<double>(row.n_particles));
                        s.y.push_back(row.h1);
                    }
                }
                series.push_back(std::move(s));
            }
            emit("chaos_h1.svg",
                 loglog_svg("marginal entropy vs ensemble size", "N", "H1", series));
        });
    }

    void run_lde(const KernelSpec& kernel, const DensityGrid& rho0, bool audit) {
        if (audit) {
            PhiField field(kernel, rho0);
            stage("cancellations", [&] {
                const auto r1 = field.check_cancellations_phi1(cfg.lde.probe_count, cfg.seed);
                const auto r2 = field.check_cancellations_phi2(cfg.lde.probe_count, cfg.seed);
                CsvTable table({"field", "probes", "quad_n", "first_slot_max",
                                "other_slots_max"});
                table.add_row({"phi1", std::to_string(r1.probes), std::to_string(r1.quad_n),
                               fmt(r1.first_slot_max), fmt(r1.other_slots_max)});
                table.add_row({"phi2", std::to_string(r2.probes), std::to_string(r2.quad_n),
                               fmt(r2.first_slot_max), fmt(r2.other_slots_max)});
                emit("cancellations.csv", table.str());
                if (!r1.passed(1e-8) || !r2.passed(1e-8)) {
                    throw NumericalError(
                        "cancellation residuals exceed 1e-8 (phi1 worst " +
                        fmt(std::max(r1.first_slot_max, r1.other_slots_max)) + ", phi2 worst " +
                        fmt(std::max(r2.first_slot_max, r2.other_slots_max)) +
                        "); the cached convolutions disagree with the kernel evaluations");
                }
            });
            BoundConstants bc;
            stage("constants", [&] {
                const double eta_given = (cfg.lde.eta_mode == "given") ? cfg.lde.eta : 0.0;
                bc = constants(field, eta_given);
                CsvTable table({"B", "eta", "m_p_sup", "alpha", "beta", "C"});
                table.add_row({fmt(bc.b_amplitude), fmt(bc.eta), fmt(bc.m_p_sup), fmt(bc.alpha),
                               fmt(bc.beta), fmt(bc.c_bound)});
                emit("constants.csv", table.str());
                CsvTable mp({"p", "norm_p", "ratio"});
                for (std::size_t i = 0; i < bc.table.p.size(); ++i) {
                    mp.add_row({fmt(bc.table.p[i]), fmt(bc.table.norm_p[i]),
                                fmt(bc.table.norm_p[i] / bc.table.p[i])});
                }
                emit("mp_table.csv", mp.str());
            });
            stage("moments", [&] {
                CsvTable table({"N", "n_mc", "mean", "sigma", "mean_plus_3sigma", "C", "pass"});
                for (int n : cfg.lde.mc_n_list) {
                    const MomentEstimate est =
                        exp_moment_mc(field, bc.eta, n, cfg.lde.n_mc, cfg.seed);
                    const double upper = est.mean + 3.0 * est.sigma;
                    table.add_row({std::to_string(n), std::to_string(est.n_mc), fmt(est.mean),
                                   fmt(est.sigma), fmt(upper), fmt(bc.c_bound),
                                   upper <= bc.c_bound ? "1" : "0"});
                }
                emit("moment_mc.csv", table.str());
            });
        }
        stage("enumerate", [&] {
            CsvTable table({"N", "m", "survivors", "cap", "identity_checks_passed"});
            for (int m : cfg.lde.enum_m_list) {
                for (int n : cfg.lde.enum_n_list) {
                    const EnumerationReport rep = enumerate_survivors(n, m);
                    table.add_row({std::to_string(rep.n_particles), std::to_string(rep.m),
                                   std::to_string(rep.survivors), fmt(rep.cap),
                                   rep.identities_ok ? "1" : "0"});
                }
            }
            emit("enumeration.csv", table.str());
        });
    }
};

} // namespace

RunManifest execute(const ExperimentConfig& cfg) {
    Runner runner(cfg);
    std::filesystem::create_directories(runner.dir);
    runner.emit("config_used.json", cfg.serialize());

    const KernelSpec kernel = make_kernel(cfg.kernel.drift, cfg.kernel.drift_params,
                                          cfg.kernel.sigma, cfg.kernel.sigma_params,
                                          cfg.kernel.dim);
    const DensityGrid rho0 = cosine_density(cfg.kernel.dim, cfg.pde.n, cfg.init.amps);

    switch (cfg.kind) {
    case ExperimentKind::simulate: runner.run_simulate(kernel, rho0); break;
    case ExperimentKind::solve_pde: runner.run_solve_pde(kernel, rho0); break;
    case ExperimentKind::chaos_study: runner.run_chaos(kernel, rho0); break;
    case ExperimentKind::lde_audit: runner.run_lde(kernel, rho0, true); break;
    case ExperimentKind::enumerate: runner.run_lde(kernel, rho0, false); break;
    }

    runner.manifest.write(runner.dir / "manifest.json");
    return runner.manifest;
}

} // namespace mfl
