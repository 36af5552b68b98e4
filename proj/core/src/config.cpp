#include "mfl/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mfl/errors.hpp"
#include "mfl/kernel.hpp"

#include "json.hpp"

namespace mfl {

namespace {

using json = nlohmann::ordered_json;

int edit_distance(const std::string& a, const std::string& b) {
    std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::string nearest_key(const std::string& key, const std::vector<std::string>& valid) {
    std::string best;
    int best_d = 1 << 30;
    for (const auto& v : valid) {
        const int d = edit_distance(key, v);
        if (d < best_d) {
            best_d = d;
            best = v;
        }
    }
    return best;
}

// Gathers violations instead of throwing on the first one.
struct Checker {
    std::vector<std::string> problems;

    void complain(const std::string& msg) { problems.push_back(msg); }

    void unknown_keys(const json& obj, const std::string& where,
                      const std::vector<std::string>& valid) {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            if (std::find(valid.begin(), valid.end(), it.key()) == valid.end()) {
                complain(where + ": unknown key '" + it.key() + "' (nearest valid key: '" +
                         nearest_key(it.key(), valid) + "')");
            }
        }
    }

    template <typename T>
    void read(const json& obj, const std::string& where, const std::string& key, T& out) {
        if (!obj.contains(key)) return;
        try {
            out = obj.at(key).get<T>();
        } catch (const json::exception&) {
            complain(where + "." + key + ": wrong type");
        }
    }
};

} // namespace

std::string to_string(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::simulate: return "simulate";
    case ExperimentKind::solve_pde: return "solve_pde";
    case ExperimentKind::chaos_study: return "chaos_study";
    case ExperimentKind::lde_audit: return "lde_audit";
    case ExperimentKind::enumerate: return "enumerate";
    }
    return "?";
}

ExperimentConfig ExperimentConfig::parse(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be a JSON object");

    ExperimentConfig cfg;
    Checker ck;

    ck.unknown_keys(root, "config",
                    {"experiment", "output_dir", "seed", "kernel", "init", "pde", "particles",
                     "metrics", "lde"});

    std::string kind_name = to_string(cfg.kind);
    ck.read(root, "config", "experiment", kind_name);
    if (kind_name == "simulate") cfg.kind = ExperimentKind::simulate;
    else if (kind_name == "solve_pde") cfg.kind = ExperimentKind::solve_pde;
    else if (kind_name == "chaos_study") cfg.kind = ExperimentKind::chaos_study;
    else if (kind_name == "lde_audit") cfg.kind = ExperimentKind::lde_audit;
    else if (kind_name == "enumerate") cfg.kind = ExperimentKind::enumerate;
    else
        ck.complain("experiment: '" + kind_name +
                    "' is not one of simulate, solve_pde, chaos_study, lde_audit, enumerate");
    ck.read(root, "config", "output_dir", cfg.output_dir);
    ck.read(root, "config", "seed", cfg.seed);

    if (root.contains("kernel")) {
        const json& k = root["kernel"];
        ck.unknown_keys(k, "kernel", {"dim", "drift", "drift_params", "sigma", "sigma_params"});
        ck.read(k, "kernel", "dim", cfg.kernel.dim);
        ck.read(k, "kernel", "drift", cfg.kernel.drift);
        ck.read(k, "kernel", "drift_params", cfg.kernel.drift_params);
        ck.read(k, "kernel", "sigma", cfg.kernel.sigma);
        ck.read(k, "kernel", "sigma_params", cfg.kernel.sigma_params);
    }
    if (root.contains("init")) {
        const json& i = root["init"];
        ck.unknown_keys(i, "init", {"amps"});
        ck.read(i, "init", "amps", cfg.init.amps);
    }
    if (root.contains("pde")) {
        const json& p = root["pde"];
        ck.unknown_keys(p, "pde", {"n", "dt", "t_end", "stepper", "checkpoints"});
        ck.read(p, "pde", "n", cfg.pde.n);
        ck.read(p, "pde", "dt", cfg.pde.dt);
        ck.read(p, "pde", "t_end", cfg.pde.t_end);
        ck.read(p, "pde", "stepper", cfg.pde.stepper);
        ck.read(p, "pde", "checkpoints", cfg.pde.checkpoints);
    }
    if (root.contains("particles")) {
        const json& p = root["particles"];
        ck.unknown_keys(p, "particles",
                        {"n_list", "replicas", "dt", "include_self", "interaction", "cutoff"});
        ck.read(p, "particles", "n_list", cfg.particles.n_list);
        ck.read(p, "particles", "replicas", cfg.particles.replicas);
        ck.read(p, "particles", "dt", cfg.particles.dt);
        ck.read(p, "particles", "include_self", cfg.particles.include_self);
        ck.read(p, "particles", "interaction", cfg.particles.interaction);
        ck.read(p, "particles", "cutoff", cfg.particles.cutoff);
    }
    if (root.contains("metrics")) {
        const json& m = root["metrics"];
        ck.unknown_keys(m, "metrics",
                        {"bins", "grid_cap", "bootstrap", "pair_cap", "universal_c"});
        ck.read(m, "metrics", "bins", cfg.metrics.bins);
        ck.read(m, "metrics", "grid_cap", cfg.metrics.grid_cap);
        ck.read(m, "metrics", "bootstrap", cfg.metrics.bootstrap);
        ck.read(m, "metrics", "pair_cap", cfg.metrics.pair_cap);
        ck.read(m, "metrics", "universal_c", cfg.metrics.universal_c);
    }
    if (root.contains("lde")) {
        const json& l = root["lde"];
        ck.unknown_keys(l, "lde",
                        {"eta_mode", "eta", "n_mc", "mc_n_list", "probe_count", "quad_n",
                         "enum_n_list", "enum_m_list"});
        ck.read(l, "lde", "eta_mode", cfg.lde.eta_mode);
        ck.read(l, "lde", "eta", cfg.lde.eta);
        ck.read(l, "lde", "n_mc", cfg.lde.n_mc);
        ck.read(l, "lde", "mc_n_list", cfg.lde.mc_n_list);
        ck.read(l, "lde", "probe_count", cfg.lde.probe_count);
        ck.read(l, "lde", "quad_n", cfg.lde.quad_n);
        ck.read(l, "lde", "enum_n_list", cfg.lde.enum_n_list);
        ck.read(l, "lde", "enum_m_list", cfg.lde.enum_m_list);
    }

    // Cross-module constraints, phrased after the owning module's
    // preconditions.
    if (cfg.kernel.dim < 1 || cfg.kernel.dim > kMaxDim) {
        ck.complain("kernel.dim: must be 1 or 2");
    } else {
        try {
            (void)make_kernel(cfg.kernel.drift, cfg.kernel.drift_params, cfg.kernel.sigma,
                              cfg.kernel.sigma_params, cfg.kernel.dim);
        } catch (const Error& e) {
            ck.complain(std::string("kernel: ") + e.what());
        }
        double amp_sum = 0.0;
        for (double a : cfg.init.amps) amp_sum += std::abs(a);
        if (cfg.kernel.dim * amp_sum >= 1.0) {
            ck.complain("init.amps: dim * sum |amps| must stay below 1 so the initial density "
                        "is strictly positive");
        }
    }
    if (cfg.pde.n < 8 || cfg.pde.n % 2 != 0) {
        ck.complain("pde.n: grid resolution must be an even integer >= 8");
    }
    if (cfg.pde.dt < 0.0) ck.complain("pde.dt: must be >= 0 (0 selects the CFL step)");
    if (!(cfg.pde.t_end > 0.0)) ck.complain("pde.t_end: must be > 0");
    if (cfg.pde.stepper != "rk2" && cfg.pde.stepper != "imex") {
        ck.complain("pde.stepper: must be 'rk2' or 'imex'");
    }
    double prev = 0.0;
    for (double c : cfg.pde.checkpoints) {
        if (!(c > prev) || c > cfg.pde.t_end + 1e-12) {
            ck.complain("pde.checkpoints: must be strictly increasing within (0, t_end]");
            break;
        }
        prev = c;
    }
    for (std::size_t i = 0; i < cfg.particles.n_list.size(); ++i) {
        if (cfg.particles.n_list[i] < 2) {
            ck.complain("particles.n_list: every N must be >= 2");
            break;
        }
        if (i > 0 && cfg.particles.n_list[i] <= cfg.particles.n_list[i - 1]) {
            ck.complain("particles.n_list: values must be strictly increasing");
            break;
        }
    }
    if (cfg.kind == ExperimentKind::chaos_study && cfg.particles.n_list.size() < 2) {
        ck.complain("particles.n_list: a chaos_study sweep needs at least 2 values of N to fit "
                    "a slope");
    }
    if (cfg.particles.replicas < 2) {
        ck.complain("particles.replicas: need >= 2 replicas for bootstrap tolerances");
    }
    if (!(cfg.particles.dt > 0.0)) {
        ck.complain("particles.dt: particle stepping requires a strictly positive time step");
    } else {
        const double steps = cfg.pde.t_end / cfg.particles.dt;
        if (std::abs(steps - std::round(steps)) > 1e-9) {
            ck.complain("particles.dt: t_end must be an integer multiple of dt");
        }
    }
    if (cfg.particles.interaction != "direct" && cfg.particles.interaction != "cell_list") {
        ck.complain("particles.interaction: must be 'direct' or 'cell_list'");
    } else if (cfg.particles.interaction == "cell_list" && cfg.particles.cutoff < 0.5) {
        ck.complain("particles.cutoff: cell_list needs cutoff >= 0.5 because the builtin "
                    "kernels act at every distance (the cell list is then exact)");
    }
    if (cfg.metrics.bins < 0) {
        ck.complain("metrics.bins: must be >= 0 (0 selects the sample-size rule)");
    } else if (cfg.metrics.bins > 0 && cfg.pde.n % cfg.metrics.bins != 0) {
        ck.complain("metrics.bins: must divide pde.n so histogram cells align with grid cells");
    }
    if (cfg.metrics.grid_cap < 2) ck.complain("metrics.grid_cap: must be >= 2");
    if (cfg.metrics.bootstrap < 10) ck.complain("metrics.bootstrap: need >= 10 resamples");
    if (cfg.metrics.pair_cap < 100) ck.complain("metrics.pair_cap: must be >= 100");
    if (!(cfg.metrics.universal_c > 0.0)) ck.complain("metrics.universal_c: must be > 0");
    if (cfg.lde.eta_mode != "canonical" && cfg.lde.eta_mode != "given") {
        ck.complain("lde.eta_mode: must be 'canonical' or 'given'");
    } else if (cfg.lde.eta_mode == "given" && !(cfg.lde.eta > 0.0)) {
        ck.complain("lde.eta: eta_mode 'given' requires eta > 0");
    }
    if (cfg.lde.n_mc < 2) ck.complain("lde.n_mc: need at least 2 Monte Carlo configurations");
    for (int n : cfg.lde.mc_n_list) {
        if (n < 2) {
            ck.complain("lde.mc_n_list: every N must be >= 2");
            break;
        }
    }
    if (cfg.lde.probe_count < 1) ck.complain("lde.probe_count: must be >= 1");
    if (cfg.lde.quad_n < 32) ck.complain("lde.quad_n: quadrature needs at least 32 nodes");
    for (int n : cfg.lde.enum_n_list) {
        if (n < 1) {
            ck.complain("lde.enum_n_list: every N must be >= 1");
            break;
        }
    }
    for (int m : cfg.lde.enum_m_list) {
        if (m < 1) {
            ck.complain("lde.enum_m_list: every m must be >= 1");
            break;
        }
    }

    if (!ck.problems.empty()) {
        std::string msg = "config invalid (" + std::to_string(ck.problems.size()) +
                          " violation(s)):";
        for (const auto& p : ck.problems) msg += "\n  - " + p;
        throw ConfigError(msg);
    }
    return cfg;
}

std::string ExperimentConfig::serialize() const {
    json root;
    root["experiment"] = to_string(kind);
    root["output_dir"] = output_dir;
    root["seed"] = seed;
    root["kernel"] = {{"dim", kernel.dim},
                      {"drift", kernel.drift},
                      {"drift_params", kernel.drift_params},
                      {"sigma", kernel.sigma},
                      {"sigma_params", kernel.sigma_params}};
    root["init"] = {{"amps", init.amps}};
    root["pde"] = {{"n", pde.n},
                   {"dt", pde.dt},
                   {"t_end", pde.t_end},
                   {"stepper", pde.stepper},
                   {"checkpoints", pde.checkpoints}};
    root["particles"] = {{"n_list", particles.n_list},
                         {"replicas", particles.replicas},
                         {"dt", particles.dt},
                         {"include_self", particles.include_self},
                         {"interaction", particles.interaction},
                         {"cutoff", particles.cutoff}};
    root["metrics"] = {{"bins", metrics.bins},
                       {"grid_cap", metrics.grid_cap},
                       {"bootstrap", metrics.bootstrap},
                       {"pair_cap", metrics.pair_cap},
                       {"universal_c", metrics.universal_c}};
    root["lde"] = {{"eta_mode", lde.eta_mode},
                   {"eta", lde.eta},
                   {"n_mc", lde.n_mc},
                   {"mc_n_list", lde.mc_n_list},
                   {"probe_count", lde.probe_count},
                   {"quad_n", lde.quad_n},
                   {"enum_n_list", lde.enum_n_list},
                   {"enum_m_list", lde.enum_m_list}};
    return root.dump(2) + "\n";
}

} // namespace mfl
