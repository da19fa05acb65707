#include "metrokit/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include <CLI11.hpp>

#include "metrokit/channel.hpp"
#include "metrokit/control.hpp"
#include "metrokit/fisher.hpp"
#include "metrokit/mzi.hpp"
#include "metrokit/qec.hpp"
#include "metrokit/rng.hpp"
#include "metrokit/serialize.hpp"
#include "metrokit/stateopt.hpp"

namespace metrokit::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int log_level() {
    const char* env = std::getenv("METROKIT_LOG");
    if (!env) return 0;
    const std::string v = env;
    if (v == "debug") return 2;
    if (v == "info") return 1;
    return 0;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::fprintf(stderr, "[metrokit] %s\n", msg.c_str());
}

void require_keys(const json& j, const std::vector<std::string>& required,
                  const std::vector<std::string>& optional, const std::string& ctx) {
    if (!j.is_object()) throw ConfigError(ctx + ": expected an object");
    for (const auto& key : required)
        if (!j.contains(key)) throw ConfigError(ctx + ": missing key '" + key + "'");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        const bool known =
            std::find(required.begin(), required.end(), k) != required.end() ||
            std::find(optional.begin(), optional.end(), k) != optional.end();
        if (!known) throw ConfigError(ctx + ": unknown key '" + k + "'");
    }
}

std::string format17(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Artifacts {
    json result;
    std::vector<std::pair<std::string, std::string>> csv_files;
};

Matrix named_matrix(const json& j, const std::string& ctx) {
    if (j.is_string()) {
        const std::string name = j.get<std::string>();
        if (name == "sigma-x") return pauli_x();
        if (name == "sigma-y") return pauli_y();
        if (name == "sigma-z") return pauli_z();
        throw ConfigError(ctx + ": unknown matrix name '" + name + "'");
    }
    return serialize::matrix_from_json(j);
}

channel::ParameterizedChannel channel_from_config(const json& j, const std::string& ctx) {
    require_keys(j, {"family"}, {"p", "noise", "generator"}, ctx);
    const std::string family = j.at("family").get<std::string>();
    if (family == "dephasing") {
        require_keys(j, {"family", "p"}, {}, ctx);
        return channel::dephasing_channel_family(j.at("p").get<double>());
    }
    if (family == "unitary-z") {
        require_keys(j, {"family"}, {}, ctx);
        return channel::unitary_channel_family(pauli_z());
    }
    if (family == "unitary") {
        require_keys(j, {"family", "generator"}, {}, ctx);
        return channel::unitary_channel_family(named_matrix(j.at("generator"), ctx));
    }
    if (family == "encoded") {
        require_keys(j, {"family", "noise", "generator"}, {}, ctx);
        auto noise = serialize::kraus_from_json(j.at("noise"));
        return channel::encoded_channel_family(noise.kraus, named_matrix(j.at("generator"), ctx));
    }
    throw ConfigError(ctx + ": unknown channel family '" + family + "'");
}

qcore::KrausChannel plain_channel_from_config(const json& j, double x, const std::string& ctx) {
    if (j.is_object() && j.contains("kraus")) return serialize::kraus_from_json(j);
    return channel_from_config(j, ctx).evaluator(x);
}

const char* status_name(sdp::Status s) {
    switch (s) {
        case sdp::Status::Optimal: return "optimal";
        case sdp::Status::Infeasible: return "infeasible";
        default: return "max_iter";
    }
}

// --- command handlers ----------------------------------------------------

Artifacts run_qfi(const RunConfig& cfg) {
    require_keys(cfg.parameters, {"channel", "x"}, {"dx", "method"}, "qfi");
    const double x = cfg.parameters.at("x").get<double>();
    const double dx = cfg.parameters.value("dx", channel::default_dx(x));
    const std::string method = cfg.parameters.value("method", std::string("both"));
    auto pc = channel_from_config(cfg.parameters.at("channel"), "qfi.channel");
    pc.validate_at(x);

    Artifacts art;
    art.result["records"] = json::array();
    std::string csv = "method,value,dx\n";
    auto add = [&](const std::string& name, double value, const char* status) {
        json rec;
        rec["method"] = name;
        rec["value"] = value;
        rec["dx"] = dx;
        rec["solver_status"] = status;
        art.result["records"].push_back(std::move(rec));
        csv += name + "," + format17(value) + "," + format17(dx) + "\n";
    };
    if (method == "channel-fd" || method == "both")
        add("channel-fd", channel::channel_qfi_fd(pc, x, dx), "optimal");
    if (method == "optimal-probe" || method == "both") {
        auto res = channel::optimal_probe(pc, x, dx);
        add("optimal-probe", res.qfi, status_name(res.status));
    }
    if (art.result["records"].empty()) throw ConfigError("qfi: unknown method '" + method + "'");
    art.csv_files.push_back({"table.csv", csv});
    return art;
}

Artifacts run_channel_fidelity(const RunConfig& cfg) {
    require_keys(cfg.parameters, {"channel1", "channel2"}, {"x"}, "channel-fidelity");
    const double x = cfg.parameters.value("x", 0.0);
    auto e1 = plain_channel_from_config(cfg.parameters.at("channel1"), x, "channel-fidelity");
    auto e2 = plain_channel_from_config(cfg.parameters.at("channel2"), x, "channel-fidelity");
    auto res = channel::channel_fidelity(e1, e2);
    Artifacts art;
    art.result["value"] = res.value;
    art.result["bures_angle"] = std::acos(std::clamp(res.value, -1.0, 1.0));
    art.result["solver_status"] = status_name(res.status);
    art.result["gauge_w"] = serialize::matrix_to_json(res.gauge.w);
    art.csv_files.push_back(
        {"table.csv", "quantity,value\nfidelity," + format17(res.value) + "\n"});
    return art;
}

Artifacts run_optimal_probe(const RunConfig& cfg) {
    require_keys(cfg.parameters, {"channel", "x"}, {"dx"}, "optimal-probe");
    const double x = cfg.parameters.at("x").get<double>();
    const double dx = cfg.parameters.value("dx", channel::default_dx(x));
    auto pc = channel_from_config(cfg.parameters.at("channel"), "optimal-probe.channel");
    auto res = channel::optimal_probe(pc, x, dx);
    Artifacts art;
    art.result["qfi"] = res.qfi;
    art.result["dx"] = dx;
    art.result["solver_status"] = status_name(res.status);
    art.result["probe"] = serialize::matrix_to_json(res.rho_s.matrix());
    art.result["purity"] = res.rho_s.purity();
    Eigen::SelfAdjointEigenSolver<Matrix> es(res.rho_s.matrix());
    std::string csv = "index,eigenvalue\n";
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        csv += std::to_string(i) + "," + format17(es.eigenvalues()(i)) + "\n";
    art.csv_files.push_back({"table.csv", csv});
    return art;
}

Artifacts run_grape(const RunConfig& cfg) {
    require_keys(cfg.parameters, {"t_total", "steps", "iters"},
                 {"gamma", "omega0", "controls", "learning_rate", "mode", "init_amplitude",
                  "v_min", "v_max"},
                 "grape");
    control::ControlProblem p;
    const double omega0 = cfg.parameters.value("omega0", 1.0);
    p.h0 = [](double xv) { return Matrix(0.5 * xv * pauli_z()); };
    p.dh0 = [](double) { return Matrix(0.5 * pauli_z()); };
    p.x = omega0;
    const double gamma = cfg.parameters.value("gamma", 0.0);
    if (gamma > 0.0) {
        p.noise_ops = {pauli_z()};
        p.rates = {gamma};
    }
    std::vector<std::string> names =
        cfg.parameters.value("controls", std::vector<std::string>{"x", "y", "z"});
    for (const auto& n : names) {
        if (n == "x") p.controls.push_back(pauli_x());
        else if (n == "y") p.controls.push_back(pauli_y());
        else if (n == "z") p.controls.push_back(pauli_z());
        else throw ConfigError("grape: unknown control '" + n + "'");
    }
    p.t_total = cfg.parameters.at("t_total").get<double>();
    p.steps = cfg.parameters.at("steps").get<int>();
    p.v_min = cfg.parameters.value("v_min", -5.0);
    p.v_max = cfg.parameters.value("v_max", 5.0);
    const int iters = cfg.parameters.at("iters").get<int>();
    const double rate = cfg.parameters.value("learning_rate", 0.05);
    const std::string mode_name = cfg.parameters.value("mode", std::string("adjoint"));
    if (mode_name != "adjoint" && mode_name != "fd")
        throw ConfigError("grape: unknown gradient mode '" + mode_name + "'");
    const auto mode = mode_name == "adjoint" ? control::GradientMode::Adjoint
                                             : control::GradientMode::FiniteDifference;
    const double amp0 = cfg.parameters.value("init_amplitude", 0.05);

    Vector plus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    auto probe = qcore::DensityMatrix::pure(plus);
    const double baseline = control::terminal_qfi(p, control::ControlField::zero(p), probe);

    Rng rng(cfg.seed);
    RealMatrix amps(p.steps, p.controls.size());
    for (int t = 0; t < p.steps; ++t)
        for (std::size_t k = 0; k < p.controls.size(); ++k)
            amps(t, k) = rng.uniform(-amp0, amp0);
    auto res = control::grape(p, control::ControlField{amps}, probe, rate, iters, mode);

    Artifacts art;
    art.result["baseline_qfi"] = baseline;
    art.result["final_qfi"] = res.qfi_history.back();
    art.result["iterations"] = static_cast<int>(res.qfi_history.size()) - 1;
    art.result["gradient_mode"] = mode_name;
    std::string csv = "iter,qfi\n";
    for (std::size_t i = 0; i < res.qfi_history.size(); ++i)
        csv += std::to_string(i) + "," + format17(res.qfi_history[i]) + "\n";
    art.csv_files.push_back({"table.csv", csv});

    std::string field_csv = "t";
    for (const auto& n : names) field_csv += ",V_" + n;
    field_csv += "\n";
    for (int t = 0; t < p.steps; ++t) {
        field_csv += format17((t + 0.5) * p.t_total / p.steps);
        for (std::size_t k = 0; k < p.controls.size(); ++k)
            field_csv += "," + format17(res.field.amplitudes(t, k));
        field_csv += "\n";
    }
    art.csv_files.push_back({"control_field.csv", field_csv});
    return art;
}

Artifacts run_qec_code(const RunConfig& cfg) {
    require_keys(cfg.parameters, {"generator", "lindblad_ops"}, {"t"}, "qec-code");
    const Matrix g = named_matrix(cfg.parameters.at("generator"), "qec-code.generator");
    std::vector<Matrix> noise;
    for (const auto& jn : cfg.parameters.at("lindblad_ops"))
        noise.push_back(named_matrix(jn, "qec-code.lindblad_ops"));
    const double t = cfg.parameters.value("t", 1.0);

    auto span = qec::lindblad_span(noise);
    auto rep = qec::hnls_decompose(g, span);
    Artifacts art;
    art.result["hnls"] = rep.hnls;
    art.result["perp_norm"] = rep.perp_norm;
    std::string csv = "quantity,value\n";
    csv += "hnls," + std::string(rep.hnls ? "1" : "0") + "\n";
    csv += "perp_norm," + format17(rep.perp_norm) + "\n";
    if (rep.hnls) {
        auto gap = qec::optimize_code_gap(rep.h_perp, span);
        auto code = qec::build_code(rep.h_perp);
        auto report = qec::verify_code(code, noise, g);
        art.result["primal_gap"] = gap.primal_value;
        art.result["dual_value"] = gap.dual_value;
        art.result["solver_status"] = status_name(gap.status);
        art.result["code"] = serialize::code_pair_to_json(code);
        art.result["conditions"] = {{"noise_linear", report.cond_noise_linear},
                                    {"noise_quadratic", report.cond_noise_quadratic},
                                    {"signal", report.cond_signal}};
        art.result["code_gap"] = report.gap;
        art.result["effective_qfi"] = qec::effective_qfi(report.gap, t);
        csv += "primal_gap," + format17(gap.primal_value) + "\n";
        csv += "dual_value," + format17(gap.dual_value) + "\n";
        csv += "code_gap," + format17(report.gap) + "\n";
        csv += "effective_qfi," + format17(qec::effective_qfi(report.gap, t)) + "\n";
    }
    art.csv_files.push_back({"table.csv", csv});
    return art;
}

mzi::TwoModeFockState mzi_input_from_config(const json& params, int photons) {
    const std::string input = params.value("input", std::string("berry-wiseman"));
    if (input == "berry-wiseman") return mzi::berry_wiseman_input(photons);
    if (input == "single-photon-a") {
        Vector v = Vector::Zero(photons + 1);
        v(photons) = 1.0;
        return mzi::TwoModeFockState(photons, v);
    }
    throw ConfigError("adaptive-mzi: unknown input '" + input + "'");
}

Artifacts run_adaptive_mzi(const RunConfig& cfg) {
    require_keys(cfg.parameters, {"photons", "mode"},
                 {"policy", "deltas", "phi_1", "phi_true", "seeds", "grid", "input",
                  "pso"},
                 "adaptive-mzi");
    const int photons = cfg.parameters.at("photons").get<int>();
    const int grid = cfg.parameters.value("grid", 2048);
    const std::string mode = cfg.parameters.at("mode").get<std::string>();
    auto input = mzi_input_from_config(cfg.parameters, photons);
    Artifacts art;
    art.result["photons"] = photons;
    art.result["mode"] = mode;

    if (mode == "likelihood") {
        const double fb = cfg.parameters.value("phi_1", 0.0);
        auto prior = mzi::PhasePrior::uniform(grid);
        std::string csv = "phi,p0,p1\n";
        for (Eigen::Index i = 0; i < prior.grid.size(); ++i) {
            const double p0 = mzi::detection_prob(input, prior.grid(i), fb, 0);
            csv += format17(prior.grid(i)) + "," + format17(p0) + "," + format17(1.0 - p0) + "\n";
        }
        art.csv_files.push_back({"table.csv", csv});
        return art;
    }

    if (mode == "sweep") {
        const std::string policy_name = cfg.parameters.value("policy", std::string("online"));
        mzi::AdaptivePolicy policy;
        if (policy_name == "online") {
            policy = mzi::AdaptivePolicy::online(cfg.parameters.value("phi_1", 0.0));
        } else if (policy_name == "fixed") {
            policy = mzi::AdaptivePolicy::fixed_phase(photons, cfg.parameters.value("phi_1", 0.0));
        } else if (policy_name == "offline") {
            auto deltas = cfg.parameters.at("deltas").get<std::vector<double>>();
            RealVector d(deltas.size());
            for (std::size_t i = 0; i < deltas.size(); ++i) d(i) = deltas[i];
            policy = mzi::AdaptivePolicy::offline(d, cfg.parameters.value("phi_1", 0.0));
        } else {
            throw ConfigError("adaptive-mzi: unknown policy '" + policy_name + "'");
        }
        const int seeds = cfg.parameters.value("seeds", 100);
        const bool random_phase = !cfg.parameters.contains("phi_true") ||
                                  (cfg.parameters.at("phi_true").is_string() &&
                                   cfg.parameters.at("phi_true").get<std::string>() == "random");

        std::vector<mzi::AdaptiveOutcome> outcomes(seeds);
        std::vector<double> phases(seeds);
        Rng master(cfg.seed);
        for (int s = 0; s < seeds; ++s)
            phases[s] = random_phase ? master.uniform(-M_PI, M_PI)
                                     : cfg.parameters.at("phi_true").get<double>();
        const int jobs = std::max(1, cfg.jobs);
        auto worker = [&](int begin, int end) {
            for (int s = begin; s < end; ++s)
                outcomes[s] =
                    mzi::simulate_adaptive(policy, input, phases[s], cfg.seed + 1000 + s, grid);
        };
        if (jobs == 1) {
            worker(0, seeds);
        } else {
            std::vector<std::thread> pool;
            const int chunk = (seeds + jobs - 1) / jobs;
            for (int j = 0; j < jobs; ++j) {
                const int b = j * chunk, e = std::min(seeds, (j + 1) * chunk);
                if (b < e) pool.emplace_back(worker, b, e);
            }
            for (auto& th : pool) th.join();
        }

        std::string csv = "seed,phi_true,estimate,holevo_variance\n";
        std::vector<double> holevo;
        for (int s = 0; s < seeds; ++s) {
            csv += std::to_string(s) + "," + format17(phases[s]) + "," +
                   format17(outcomes[s].estimate) + "," + format17(outcomes[s].holevo) + "\n";
            holevo.push_back(outcomes[s].holevo);
        }
        std::sort(holevo.begin(), holevo.end());
        art.result["policy"] = policy_name;
        art.result["seeds"] = seeds;
        art.result["median_holevo_variance"] = holevo[holevo.size() / 2];
        art.csv_files.push_back({"table.csv", csv});
        return art;
    }

    if (mode == "pso") {
        mzi::PsoConfig pso;
        const json jp = cfg.parameters.value("pso", json::object());
        require_keys(jp, {}, {"particles", "rounds", "inertia", "cognitive", "social",
                              "sample_budget"},
                     "adaptive-mzi.pso");
        pso.particles = jp.value("particles", 20);
        pso.rounds = jp.value("rounds", 50);
        pso.inertia = jp.value("inertia", pso.inertia);
        pso.cognitive = jp.value("cognitive", pso.cognitive);
        pso.social = jp.value("social", pso.social);
        pso.sample_budget = jp.value("sample_budget", 2000);
        pso.grid_size = grid;
        pso.seed = cfg.seed;
        auto res = mzi::pso_offline(input, pso);
        art.result["best_m_off"] = res.best_value;
        json deltas = json::array();
        for (Eigen::Index i = 0; i < res.best_deltas.size(); ++i)
            deltas.push_back(res.best_deltas(i));
        art.result["best_deltas"] = deltas;
        std::string csv = "round,global_best\n";
        for (Eigen::Index r = 0; r < res.history.size(); ++r)
            csv += std::to_string(r) + "," + format17(res.history(r)) + "\n";
        art.csv_files.push_back({"table.csv", csv});
        return art;
    }
    throw ConfigError("adaptive-mzi: unknown mode '" + mode + "'");
}

Artifacts run_state_opt(const RunConfig& cfg) {
    require_keys(cfg.parameters, {"qubits", "kind", "gamma", "t_total"},
                 {"omega", "max_iter", "epsilon"}, "state-opt");
    stateopt::SpinModel model;
    model.n_qubits = cfg.parameters.at("qubits").get<int>();
    model.gamma = cfg.parameters.at("gamma").get<double>();
    model.omega = cfg.parameters.value("omega", 1.0);
    const std::string kind = cfg.parameters.at("kind").get<std::string>();
    if (kind == "local") model.kind = stateopt::SpinModel::Kind::Local;
    else if (kind == "collective") model.kind = stateopt::SpinModel::Kind::Collective;
    else throw ConfigError("state-opt: unknown kind '" + kind + "'");
    const double t_total = cfg.parameters.at("t_total").get<double>();
    const int n = model.n_qubits;

    // Symmetric nonnegative coefficients c_m = c_{-m}: one parameter per
    // orbit {k, N-k}.
    const int half = n / 2 + 1;
    auto expand = [&](const RealVector& v) {
        Vector c(n + 1);
        for (int k = 0; k <= n; ++k) c(k) = std::abs(v(std::min(k, n - k)));
        const double norm = c.norm();
        return Vector(c / norm);
    };
    auto objective = [&](const RealVector& v) {
        stateopt::SpinModel m = model;
        m.coeffs = expand(v);
        return stateopt::spin_dephasing_objective(m, t_total);
    };

    RealVector bw = stateopt::berry_wiseman_state(n);
    RealVector start(half);
    for (int k = 0; k < half; ++k) start(k) = bw(k);
    std::vector<RealVector> simplex{start};
    for (int i = 0; i < half; ++i) {
        RealVector p = start;
        p(i) += 0.05;
        simplex.push_back(p);
    }
    stateopt::NelderMeadConfig nm;
    nm.max_iter = cfg.parameters.value("max_iter", 400);
    nm.epsilon = cfg.parameters.value("epsilon", 1e-10);

    std::string csv = "iter,f_best,f_worst,spread\n";
    auto observer = [&](int iter, double fb, double fw) {
        csv += std::to_string(iter) + "," + format17(fb) + "," + format17(fw) + "," +
               format17(fw - fb) + "\n";
    };
    auto res = stateopt::nelder_mead(objective, simplex, nm, observer);

    Artifacts art;
    art.result["best_objective"] = res.value;
    art.result["qfi"] = -res.value * t_total;
    art.result["iterations"] = res.iterations;
    Vector c = expand(res.best);
    json coeffs = json::array();
    for (int k = 0; k <= n; ++k) coeffs.push_back(c(k).real());
    art.result["coefficients"] = coeffs;
    art.csv_files.push_back({"table.csv", csv});
    return art;
}

Artifacts dispatch(const RunConfig& cfg) {
    if (cfg.command == "qfi") return run_qfi(cfg);
    if (cfg.command == "channel-fidelity") return run_channel_fidelity(cfg);
    if (cfg.command == "optimal-probe") return run_optimal_probe(cfg);
    if (cfg.command == "grape") return run_grape(cfg);
    if (cfg.command == "qec-code") return run_qec_code(cfg);
    if (cfg.command == "adaptive-mzi") return run_adaptive_mzi(cfg);
    if (cfg.command == "state-opt") return run_state_opt(cfg);
    throw ConfigError("unknown command '" + cfg.command + "'");
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << text;
}

json canonical_config(const RunConfig& cfg) {
    json j;
    j["command"] = cfg.command;
    j["parameters"] = cfg.parameters;
    j["seed"] = cfg.seed;
    return j;
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
    require_keys(j, {"command", "parameters"}, {"seed", "output_dir", "jobs"}, "config");
    RunConfig cfg;
    cfg.command = j.at("command").get<std::string>();
    cfg.parameters = j.at("parameters");
    if (!cfg.parameters.is_object()) throw ConfigError("config: parameters must be an object");
    cfg.seed = j.value("seed", 0ULL);
    cfg.output_dir = j.value("output_dir", std::string());
    cfg.jobs = j.value("jobs", 1);
    if (cfg.jobs < 1) throw ConfigError("config: jobs must be >= 1");
    return cfg;
}

std::string config_hash(const json& canonical) {
    const std::string text = canonical.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

int run(const RunConfig& config) {
    const auto started = std::chrono::steady_clock::now();
    json manifest;
    manifest["tool"] = "metrokit";
    manifest["version"] = kToolVersion;
    manifest["command"] = config.command;
    manifest["seed"] = config.seed;
    manifest["config_hash"] = config_hash(canonical_config(config));

    Artifacts art;
    try {
        if (config.dry_run) {
            json plan = canonical_config(config);
            plan["output_dir"] = config.output_dir;
            plan["jobs"] = config.jobs;
            plan["dry_run"] = true;
            std::fputs(serialize::dump_json(plan).c_str(), stdout);
            return kExitOk;
        }
        if (config.output_dir.empty())
            throw ConfigError("config: output_dir (or --out) is required");
        log_info("running " + config.command);
        art = dispatch(config);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfigError;
    } catch (const std::exception& e) {
        // Numerical failure: record diagnostics in the manifest.
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        fs::create_directories(config.output_dir);
        manifest["status"] = "error";
        manifest["error"] = e.what();
        const auto elapsed = std::chrono::duration<double>(
            std::chrono::steady_clock::now() - started);
        manifest["wall_time_s"] = elapsed.count();
        write_text(fs::path(config.output_dir) / "manifest.json",
                   serialize::dump_json(manifest));
        return kExitNumericalError;
    }

    fs::create_directories(config.output_dir);
    write_text(fs::path(config.output_dir) / "result.json", serialize::dump_json(art.result));
    for (const auto& [name, text] : art.csv_files)
        write_text(fs::path(config.output_dir) / name, text);
    manifest["status"] = "ok";
    const auto elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started);
    manifest["wall_time_s"] = elapsed.count();
    write_text(fs::path(config.output_dir) / "manifest.json", serialize::dump_json(manifest));
    log_info("done in " + std::to_string(elapsed.count()) + " s");
    return kExitOk;
}

int main_entry(int argc, char** argv) {
    CLI::App app{"metrokit: quantum metrology optimization toolkit"};
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int jobs = 0;
    bool dry_run = false;
    bool have_seed = false;

    app.add_option("--config", config_path, "JSON run configuration")->required();
    auto* seed_opt = app.add_option("--seed", seed, "Override the config seed");
    app.add_option("--out", out_dir, "Output directory (overrides config)");
    app.add_option("--jobs", jobs, "Concurrent evaluation cap");
    app.add_flag("--dry-run", dry_run, "Validate and print the resolved plan only");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfigError;
    }
    have_seed = seed_opt->count() > 0;

    json j;
    try {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("cannot open config file " + config_path);
        in >> j;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfigError;
    }

    try {
        RunConfig cfg = RunConfig::from_json(j);
        if (have_seed) cfg.seed = seed;
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (jobs > 0) cfg.jobs = jobs;
        cfg.dry_run = dry_run;
        return run(cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfigError;
    }
}

}  // namespace metrokit::cli
