// Command-line runner: exact/Monte Carlo concentration values, smoothing-law
// utilities, inequality reports, GAP fitting and structure-recovery
// harnesses, planted-instance generation, and parameter sweeps.
//
// Exit codes: 0 success (including reports with vacuous/hypothesis flags),
// 1 computation failure, 2 bad usage or invalid configuration.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "concfn/json_io.hpp"
#include "concfn/version.hpp"

using namespace concfn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitComputation = 1;
constexpr int kExitUsage = 2;

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return j;
}

// Inline document or path to one.
json load_doc(const json& node) {
    if (node.is_string()) return load_json_file(node.get<std::string>());
    return node;
}

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

// Writes the result (stdout when path is "-") and a manifest with the full
// config echo next to file outputs. The timestamp stays on its own line.
void emit(const std::string& out_path, const std::string& command, const json& config_echo,
          const std::string& content) {
    if (out_path == "-" || out_path.empty()) {
        std::cout << content;
        if (!content.empty() && content.back() != '\n') std::cout << "\n";
        return;
    }
    {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + out_path);
        out << content;
        if (!content.empty() && content.back() != '\n') out << "\n";
    }
    json manifest{{"command", command},
                  {"config", config_echo},
                  {"version", kVersion},
                  {"timestamp", iso_timestamp()}};
    std::ofstream mout(out_path + ".manifest.json", std::ios::binary);
    mout << manifest.dump(2) << "\n";
}

// Fills flag values that were not given on the command line from the
// --config document, so files provide defaults and flags override.
class ConfigFill {
public:
    ConfigFill(CLI::App* app, std::string* config_path) : app_(app), path_(config_path) {}

    void load() {
        if (path_ && !path_->empty()) cfg_ = load_json_file(*path_);
    }
    const json& doc() const { return cfg_; }

    template <typename T>
    void fill(const std::string& flag, const std::string& key, T& var) const {
        if (!cfg_.is_object() || !cfg_.contains(key)) return;
        const CLI::Option* opt = app_->get_option(flag);
        if (opt->count() > 0) return;
        var = cfg_.at(key).get<T>();
    }

private:
    CLI::App* app_;
    std::string* path_;
    json cfg_;
};

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stod(item));
    return out;
}

DiscreteDist require_dist(const std::string& path) {
    if (path.empty()) throw ConfigError("a distribution document is required (--dist)");
    return dist_from_json(load_json_file(path));
}

WeightVector require_weights(const std::string& path) {
    if (path.empty()) throw ConfigError("a weight vector document is required (--weights)");
    return weights_from_json(load_json_file(path));
}

json param_echo(std::initializer_list<std::pair<std::string, json>> kv) {
    json j = json::object();
    for (const auto& [k, v] : kv) j[k] = v;
    return j;
}

// ---------------------------------------------------------------------------
// Subcommand runners. Each returns the result document/content to emit.
// ---------------------------------------------------------------------------

struct CommonArgs {
    std::string config_path;
    std::string out_path = "-";
    std::string dist_path;
    std::string weights_path;
    std::uint64_t seed = 1;
    std::string format = "json";
    std::string exec = "";
};

ExecMode exec_mode_of(const std::string& s) {
    if (s == "serial") return ExecMode::serial;
    if (s == "openmp") return ExecMode::openmp;
    if (s.empty()) return default_exec_mode();
    throw ConfigError("exec must be serial or openmp");
}

std::string bound_report_content(const BoundReport& rep, const std::string& format) {
    if (format == "csv") return bound_report_csv_header() + bound_report_csv_row(rep);
    if (format == "json") return bound_report_to_json(rep).dump(2);
    throw ConfigError("format must be json or csv");
}

void add_q_command(CLI::App& app) {
    auto args = std::make_shared<CommonArgs>();
    auto tau = std::make_shared<double>(0.0);
    auto monte_carlo = std::make_shared<bool>(false);
    auto samples = std::make_shared<std::uint64_t>(100000);
    CLI::App* cmd = app.add_subcommand("q", "Concentration value of a law or weighted sum");
    cmd->add_option("--config", args->config_path);
    cmd->add_option("--out", args->out_path);
    cmd->add_option("--dist", args->dist_path);
    cmd->add_option("--weights", args->weights_path);
    cmd->add_option("--tau", *tau);
    cmd->add_flag("--mc", *monte_carlo, "force the Monte Carlo estimate");
    cmd->add_option("--samples", *samples);
    cmd->add_option("--seed", args->seed);
    cmd->add_option("--exec", args->exec);
    cmd->callback([&app, cmd, args, tau, monte_carlo, samples] {
        ConfigFill cf(cmd, &args->config_path);
        cf.load();
        cf.fill("--dist", "dist", args->dist_path);
        cf.fill("--weights", "weights", args->weights_path);
        cf.fill("--tau", "tau", *tau);
        cf.fill("--samples", "samples", *samples);
        cf.fill("--seed", "seed", args->seed);
        (void)app;

        const DiscreteDist dist = require_dist(args->dist_path);
        ConcentrationResult res;
        if (args->weights_path.empty()) {
            if (*monte_carlo) {
                MCConfig mc;
                mc.sample_count = *samples;
                mc.seed = args->seed;
                mc.exec = exec_mode_of(args->exec);
                res = q_monte_carlo(dist_sampler(dist), *tau, mc);
            } else {
                res = q_exact(dist, rational_from_double(*tau));
            }
        } else {
            const WeightVector a = require_weights(args->weights_path);
            if (a.d() != 1) throw ConfigError("q needs d = 1 weights");
            try {
                if (*monte_carlo) throw AtomBudgetExceeded("forced");
                res = q_exact(weighted_sum_law(a, dist), rational_from_double(*tau));
            } catch (const AtomBudgetExceeded&) {
                MCConfig mc;
                mc.sample_count = *samples;
                mc.seed = args->seed;
                mc.exec = exec_mode_of(args->exec);
                PointSampler s;
                s.dim = 1;
                s.draw = [&a, &dist](Xoshiro256& rng, double* out) {
                    double acc = 0.0;
                    for (int k = 0; k < a.n(); ++k) acc += a.coord(k, 0) * dist.sample(rng);
                    out[0] = acc;
                };
                res = q_monte_carlo(s, *tau, mc);
            }
        }
        json out = concentration_to_json(res);
        out["params"] = param_echo({{"tau", *tau},
                                    {"dist", args->dist_path},
                                    {"weights", args->weights_path},
                                    {"seed", args->seed}});
        emit(args->out_path, "q", cf.doc().is_null() ? json::object() : cf.doc(),
             out.dump(2));
    });
}

void add_smooth_command(CLI::App& app) {
    auto args = std::make_shared<CommonArgs>();
    auto op = std::make_shared<std::string>("mass_zero");
    auto intensity = std::make_shared<double>(1.0);
    auto tpoint = std::make_shared<std::string>("");
    auto delta = std::make_shared<double>(0.5);
    auto count = std::make_shared<std::uint64_t>(10);
    auto tol = std::make_shared<double>(1e-10);
    CLI::App* cmd = app.add_subcommand(
        "smooth", "Smoothing law: cf values, samples, mass at zero, integral bound");
    cmd->add_option("--config", args->config_path);
    cmd->add_option("--out", args->out_path);
    cmd->add_option("--weights", args->weights_path);
    cmd->add_option("--op", *op, "cf | sample | mass_zero | esseen");
    cmd->add_option("--intensity", *intensity);
    cmd->add_option("--t", *tpoint, "comma-separated point for --op cf");
    cmd->add_option("--delta", *delta);
    cmd->add_option("--count", *count, "draw count for --op sample");
    cmd->add_option("--tol", *tol);
    cmd->add_option("--seed", args->seed);
    cmd->add_option("--exec", args->exec);
    cmd->callback([cmd, args, op, intensity, tpoint, delta, count, tol] {
        ConfigFill cf(cmd, &args->config_path);
        cf.load();
        cf.fill("--weights", "weights", args->weights_path);
        cf.fill("--op", "op", *op);
        cf.fill("--intensity", "intensity", *intensity);
        cf.fill("--delta", "delta", *delta);
        cf.fill("--seed", "seed", args->seed);

        const WeightVector a = require_weights(args->weights_path);
        const SmoothingLaw law = make_smoothing_law(a, *intensity);
        json out;
        if (*op == "cf") {
            std::vector<double> t = parse_list(*tpoint);
            if (static_cast<int>(t.size()) != a.d())
                throw ConfigError("--t needs one coordinate per dimension");
            out = json{{"t", t}, {"cf", h_cf(law, t)}};
        } else if (*op == "sample") {
            auto pts = sample_h_batch(law, args->seed, *count, exec_mode_of(args->exec));
            json rows = json::array();
            for (std::uint64_t i = 0; i < *count; ++i) {
                json row = json::array();
                for (int j = 0; j < a.d(); ++j)
                    row.push_back(pts[i * static_cast<std::size_t>(a.d()) +
                                      static_cast<std::size_t>(j)]);
                rows.push_back(row);
            }
            out = json{{"samples", rows}, {"seed", args->seed}};
        } else if (*op == "mass_zero") {
            MassAtZeroConfig mz;
            mz.tolerance = *tol;
            mz.seed = args->seed;
            mz.exec = exec_mode_of(args->exec);
            out = mass_at_zero_to_json(mass_at_zero(law, mz));
        } else if (*op == "esseen") {
            out = esseen_to_json(esseen_upper_bound(law, *delta));
        } else {
            throw ConfigError("unknown smooth op: " + *op);
        }
        out["params"] = param_echo({{"intensity", *intensity},
                                    {"op", *op},
                                    {"weights", args->weights_path},
                                    {"seed", args->seed}});
        emit(args->out_path, "smooth", cf.doc().is_null() ? json::object() : cf.doc(),
             out.dump(2));
    });
}

void add_lemma1_command(CLI::App& app) {
    auto args = std::make_shared<CommonArgs>();
    auto tau = std::make_shared<double>(0.0);
    auto kappa = std::make_shared<double>(1.0);
    auto delta = std::make_shared<double>(0.5);
    auto samples = std::make_shared<std::uint64_t>(100000);
    CLI::App* cmd =
        app.add_subcommand("lemma1", "Window-splitting concentration bound report");
    cmd->add_option("--config", args->config_path);
    cmd->add_option("--out", args->out_path);
    cmd->add_option("--dist", args->dist_path);
    cmd->add_option("--weights", args->weights_path);
    cmd->add_option("--tau", *tau);
    cmd->add_option("--kappa", *kappa);
    cmd->add_option("--delta", *delta);
    cmd->add_option("--samples", *samples);
    cmd->add_option("--seed", args->seed);
    cmd->add_option("--format", args->format);
    cmd->add_option("--exec", args->exec);
    cmd->callback([cmd, args, tau, kappa, delta, samples] {
        ConfigFill cf(cmd, &args->config_path);
        cf.load();
        cf.fill("--dist", "dist", args->dist_path);
        cf.fill("--weights", "weights", args->weights_path);
        cf.fill("--tau", "tau", *tau);
        cf.fill("--kappa", "kappa", *kappa);
        cf.fill("--delta", "delta", *delta);
        cf.fill("--seed", "seed", args->seed);

        Lemma1Config cfg;
        cfg.mc.sample_count = *samples;
        cfg.mc.seed = args->seed;
        cfg.mc.exec = exec_mode_of(args->exec);
        const BoundReport rep = lemma1_report(require_weights(args->weights_path),
                                              require_dist(args->dist_path), *tau, *kappa,
                                              *delta, cfg);
        emit(args->out_path, "lemma1", cf.doc().is_null() ? json::object() : cf.doc(),
             bound_report_content(rep, args->format));
    });
}

void add_thm1_command(CLI::App& app) {
    auto args = std::make_shared<CommonArgs>();
    auto tau = std::make_shared<double>(0.0);
    auto kappa = std::make_shared<double>(1.0);
    auto delta = std::make_shared<double>(0.5);
    auto r = std::make_shared<int>(1);
    auto m = std::make_shared<int>(3);
    CLI::App* cmd = app.add_subcommand("thm1", "Rank/volume-structured bound report");
    cmd->add_option("--config", args->config_path);
    cmd->add_option("--out", args->out_path);
    cmd->add_option("--dist", args->dist_path);
    cmd->add_option("--weights", args->weights_path);
    cmd->add_option("--tau", *tau);
    cmd->add_option("--kappa", *kappa);
    cmd->add_option("--delta", *delta);
    cmd->add_option("--r", *r);
    cmd->add_option("--m", *m);
    cmd->add_option("--format", args->format);
    cmd->add_option("--exec", args->exec);
    cmd->callback([cmd, args, tau, kappa, delta, r, m] {
        ConfigFill cf(cmd, &args->config_path);
        cf.load();
        cf.fill("--dist", "dist", args->dist_path);
        cf.fill("--weights", "weights", args->weights_path);
        cf.fill("--tau", "tau", *tau);
        cf.fill("--kappa", "kappa", *kappa);
        cf.fill("--delta", "delta", *delta);
        cf.fill("--r", "r", *r);
        cf.fill("--m", "m", *m);

        Thm1Config cfg;
        cfg.beta.exec = exec_mode_of(args->exec);
        const BoundReport rep = thm1_report(require_weights(args->weights_path),
                                            require_dist(args->dist_path), *tau, *kappa,
                                            *delta, *r, *m, cfg);
        emit(args->out_path, "thm1", cf.doc().is_null() ? json::object() : cf.doc(),
             bound_report_content(rep, args->format));
    });
}

void add_beta_command(CLI::App& app) {
    auto args = std::make_shared<CommonArgs>();
    auto measure_path = std::make_shared<std::string>("");
    auto r = std::make_shared<int>(1);
    auto m = std::make_shared<int>(3);
    auto tau = std::make_shared<double>(0.0);
    CLI::App* cmd = app.add_subcommand(
        "beta", "Least mass escaping a rank/volume-capped progression neighborhood");
    cmd->add_option("--config", args->config_path);
    cmd->add_option("--out", args->out_path);
    cmd->add_option("--weights", args->weights_path,
                    "build the base measure from a weight vector");
    cmd->add_option("--measure", *measure_path, "explicit atomic measure document");
    cmd->add_option("--r", *r);
    cmd->add_option("--m", *m);
    cmd->add_option("--tau", *tau);
    cmd->add_option("--exec", args->exec);
    cmd->callback([cmd, args, measure_path, r, m, tau] {
        ConfigFill cf(cmd, &args->config_path);
        cf.load();
        cf.fill("--weights", "weights", args->weights_path);
        cf.fill("--measure", "measure", *measure_path);
        cf.fill("--r", "r", *r);
        cf.fill("--m", "m", *m);
        cf.fill("--tau", "tau", *tau);

        AtomicMeasure w = [&] {
            if (!measure_path->empty()) return measure_from_json(load_json_file(*measure_path));
            if (!args->weights_path.empty())
                return levy_base_measure(require_weights(args->weights_path));
            throw ConfigError("beta needs --measure or --weights");
        }();
        BetaConfig cfg;
        cfg.exec = exec_mode_of(args->exec);
        const BetaResult res = beta(w, *r, *m, *tau, cfg);
        json out{{"value", rational_to_string(res.value)},
                 {"value_float", res.value.get_d()},
                 {"witness", gap_to_json(res.witness)},
                 {"exhaustive", res.exhaustive},
                 {"params", param_echo({{"r", *r}, {"m", *m}, {"tau", *tau}})}};
        emit(args->out_path, "beta", cf.doc().is_null() ? json::object() : cf.doc(),
             out.dump(2));
    });
}

void add_fit_command(CLI::App& app) {
    auto args = std::make_shared<CommonArgs>();
    auto tol = std::make_shared<double>(0.0);
    auto nprime = std::make_shared<int>(1);
    auto rank_cap = std::make_shared<int>(4);
    auto volume_cap = std::make_shared<std::uint64_t>(512);
    CLI::App* cmd = app.add_subcommand("fit", "Fit a small symmetric progression to a");
    cmd->add_option("--config", args->config_path);
    cmd->add_option("--out", args->out_path);
    cmd->add_option("--weights", args->weights_path);
    cmd->add_option("--tol", *tol);
    cmd->add_option("--nprime", *nprime);
    cmd->add_option("--rank-cap", *rank_cap);
    cmd->add_option("--volume-cap", *volume_cap);
    cmd->add_option("--exec", args->exec);
    cmd->callback([cmd, args, tol, nprime, rank_cap, volume_cap] {
        ConfigFill cf(cmd, &args->config_path);
        cf.load();
        cf.fill("--weights", "weights", args->weights_path);
        cf.fill("--tol", "tol", *tol);
        cf.fill("--nprime", "nprime", *nprime);
        cf.fill("--rank-cap", "rank_cap", *rank_cap);
        cf.fill("--volume-cap", "volume_cap", *volume_cap);

        FitConfig cfg;
        cfg.rank_cap = *rank_cap;
        cfg.volume_cap = *volume_cap;
        cfg.exec = exec_mode_of(args->exec);
        const InversePrincipleReport rep =
            fit_gap(require_weights(args->weights_path), *tol, *nprime, cfg);
        emit(args->out_path, "fit", cf.doc().is_null() ? json::object() : cf.doc(),
             inverse_report_to_json(rep).dump(2));
    });
}

void add_thm2_command(CLI::App& app) {
    auto args = std::make_shared<CommonArgs>();
    auto p = std::make_shared<Thm2Params>();
    auto nprime = std::make_shared<int>(0);
    auto rank_cap = std::make_shared<int>(4);
    auto volume_cap = std::make_shared<std::uint64_t>(512);
    auto samples = std::make_shared<std::uint64_t>(100000);
    CLI::App* cmd = app.add_subcommand("thm2", "Structure-recovery harness report");
    cmd->add_option("--config", args->config_path);
    cmd->add_option("--out", args->out_path);
    cmd->add_option("--dist", args->dist_path);
    cmd->add_option("--weights", args->weights_path);
    cmd->add_option("--tau", p->tau);
    cmd->add_option("--epsilon", p->epsilon);
    cmd->add_option("--theta", p->theta);
    cmd->add_option("--A", p->A);
    cmd->add_option("--B", p->B);
    cmd->add_option("--rho", p->rho);
    cmd->add_option("--nprime", *nprime, "0 = geometric midpoint default");
    cmd->add_option("--rank-cap", *rank_cap);
    cmd->add_option("--volume-cap", *volume_cap);
    cmd->add_option("--samples", *samples);
    cmd->add_option("--seed", args->seed);
    cmd->add_option("--exec", args->exec);
    cmd->callback([cmd, args, p, nprime, rank_cap, volume_cap, samples] {
        ConfigFill cf(cmd, &args->config_path);
        cf.load();
        cf.fill("--dist", "dist", args->dist_path);
        cf.fill("--weights", "weights", args->weights_path);
        cf.fill("--tau", "tau", p->tau);
        cf.fill("--rho", "rho", p->rho);
        cf.fill("--A", "A", p->A);
        cf.fill("--B", "B", p->B);
        cf.fill("--nprime", "nprime", *nprime);
        cf.fill("--seed", "seed", args->seed);

        if (*nprime > 0) p->nprime = *nprime;
        FitConfig fcfg;
        fcfg.rank_cap = *rank_cap;
        fcfg.volume_cap = *volume_cap;
        fcfg.exec = exec_mode_of(args->exec);
        MCConfig mc;
        mc.sample_count = *samples;
        mc.seed = args->seed;
        mc.exec = fcfg.exec;
        const InversePrincipleReport rep = verify_thm2(
            require_weights(args->weights_path), require_dist(args->dist_path), *p, fcfg, mc);
        emit(args->out_path, "thm2", cf.doc().is_null() ? json::object() : cf.doc(),
             inverse_report_to_json(rep).dump(2));
    });
}

void add_region_command(CLI::App& app, const std::string& name, bool logn_form) {
    auto args = std::make_shared<CommonArgs>();
    auto tau_list = std::make_shared<std::string>("0");
    auto delta_list = std::make_shared<std::string>("0");
    auto A = std::make_shared<double>(1.0);
    auto B = std::make_shared<double>(1.0);
    auto rank_cap = std::make_shared<int>(6);
    CLI::App* cmd = app.add_subcommand(
        name, logn_form ? "Product-region report, log-n right-hand sides"
                        : "Product-region report, log-q right-hand sides");
    cmd->add_option("--config", args->config_path);
    cmd->add_option("--out", args->out_path);
    cmd->add_option("--dist", args->dist_path);
    cmd->add_option("--weights", args->weights_path);
    cmd->add_option("--tau", *tau_list, "comma-separated, one per coordinate");
    cmd->add_option("--delta", *delta_list, "comma-separated, one per coordinate");
    if (logn_form) {
        cmd->add_option("--A", *A);
        cmd->add_option("--B", *B);
    }
    cmd->add_option("--block-rank-cap", *rank_cap);
    cmd->add_option("--seed", args->seed);
    cmd->add_option("--exec", args->exec);
    cmd->callback([cmd, args, tau_list, delta_list, A, B, rank_cap, logn_form, name] {
        ConfigFill cf(cmd, &args->config_path);
        cf.load();
        cf.fill("--dist", "dist", args->dist_path);
        cf.fill("--weights", "weights", args->weights_path);
        cf.fill("--tau", "tau", *tau_list);
        cf.fill("--delta", "delta", *delta_list);

        const WeightVector a = require_weights(args->weights_path);
        std::vector<double> tau = parse_list(*tau_list);
        std::vector<double> delta = parse_list(*delta_list);
        if (static_cast<int>(tau.size()) == 1 && a.d() > 1)
            tau.assign(static_cast<std::size_t>(a.d()), tau[0]);
        if (static_cast<int>(delta.size()) == 1 && a.d() > 1)
            delta.assign(static_cast<std::size_t>(a.d()), delta[0]);

        RegionSearchConfig cfg;
        cfg.block_rank_cap = *rank_cap;
        cfg.exec = exec_mode_of(args->exec);
        cfg.mc.seed = args->seed;
        const RegionWitnessReport rep =
            logn_form ? verify_thm4(a, require_dist(args->dist_path), tau, delta, *A, *B, cfg)
                      : verify_thm3(a, require_dist(args->dist_path), tau, delta, cfg);
        emit(args->out_path, name, cf.doc().is_null() ? json::object() : cf.doc(),
             region_report_to_json(rep).dump(2));
    });
}

void add_plant_command(CLI::App& app) {
    auto args = std::make_shared<CommonArgs>();
    auto spec = std::make_shared<PlantSpec>();
    auto gens = std::make_shared<std::string>("");
    auto limits = std::make_shared<std::string>("");
    CLI::App* cmd = app.add_subcommand("plant", "Generate a planted structured instance");
    cmd->add_option("--config", args->config_path);
    cmd->add_option("--out", args->out_path);
    cmd->add_option("--rank", spec->rank);
    cmd->add_option("--n", spec->n);
    cmd->add_option("--d", spec->d);
    cmd->add_option("--noise", spec->noise);
    cmd->add_option("--outliers", spec->outlier_fraction);
    cmd->add_option("--generators", *gens, "semicolon-separated points, e.g. \"1,0;0,2\"");
    cmd->add_option("--limits", *limits, "comma-separated");
    cmd->add_option("--seed", args->seed);
    cmd->callback([cmd, args, spec, gens, limits] {
        ConfigFill cf(cmd, &args->config_path);
        cf.load();
        cf.fill("--rank", "rank", spec->rank);
        cf.fill("--n", "n", spec->n);
        cf.fill("--d", "d", spec->d);
        cf.fill("--noise", "noise", spec->noise);
        cf.fill("--outliers", "outliers", spec->outlier_fraction);
        cf.fill("--seed", "seed", args->seed);
        cf.fill("--generators", "generators", *gens);
        cf.fill("--limits", "limits", *limits);

        if (!gens->empty()) {
            std::stringstream ss(*gens);
            std::string block;
            while (std::getline(ss, block, ';'))
                spec->generators.push_back(parse_list(block));
        }
        if (!limits->empty()) spec->limits = parse_list(*limits);
        const PlantedInstance inst = plant(*spec, args->seed);
        emit(args->out_path, "plant", cf.doc().is_null() ? json::object() : cf.doc(),
             planted_to_json(inst).dump(2));
    });
}

// ---------------------------------------------------------------------------
// sweep: cartesian parameter grids -> long-form CSV
// ---------------------------------------------------------------------------

struct SweepCell {
    std::map<std::string, double> params;
};

void add_sweep_command(CLI::App& app) {
    auto args = std::make_shared<CommonArgs>();
    CLI::App* cmd =
        app.add_subcommand("sweep", "Run a metric over a parameter grid, emit CSV");
    cmd->add_option("--config", args->config_path)->required();
    cmd->add_option("--out", args->out_path);
    cmd->add_option("--seed", args->seed);
    cmd->add_option("--exec", args->exec);
    cmd->callback([cmd, args] {
        ConfigFill cf(cmd, &args->config_path);
        cf.load();
        const json& cfg = cf.doc();
        if (!cfg.is_object() || !cfg.contains("metric") || !cfg.contains("grid"))
            throw ConfigError("sweep config needs metric and grid");
        const std::string metric = cfg.at("metric").get<std::string>();
        if (cfg.contains("seed") && cmd->get_option("--seed")->count() == 0)
            args->seed = cfg.at("seed").get<std::uint64_t>();

        // Axis order: sorted names; cells in row-major order over the grid.
        std::vector<std::string> axes;
        std::vector<std::vector<double>> values;
        for (const auto& [key, vals] : cfg.at("grid").items()) {
            axes.push_back(key);
            values.push_back(vals.get<std::vector<double>>());
        }
        std::size_t cell_count = 1;
        for (const auto& v : values) cell_count *= v.size();
        if (cell_count == 0) throw ConfigError("sweep grid has an empty axis");

        std::vector<SweepCell> cells(cell_count);
        for (std::size_t c = 0; c < cell_count; ++c) {
            std::size_t rest = c;
            for (std::size_t ax = axes.size(); ax-- > 0;) {
                cells[c].params[axes[ax]] = values[ax][rest % values[ax].size()];
                rest /= values[ax].size();
            }
        }
        json fixed = cfg.value("fixed", json::object());
        auto fixed_or = [&](const SweepCell& cell, const std::string& key,
                            double fallback) -> double {
            auto it = cell.params.find(key);
            if (it != cell.params.end()) return it->second;
            if (fixed.contains(key)) return fixed.at(key).get<double>();
            return fallback;
        };

        // Inputs are loaded once; metrics pick what they need.
        std::optional<DiscreteDist> dist;
        if (cfg.contains("dist")) dist = dist_from_json(load_doc(cfg.at("dist")));
        std::optional<WeightVector> weights;
        if (cfg.contains("weights")) weights = weights_from_json(load_doc(cfg.at("weights")));

        // Validate up front; cell workers must not throw across threads.
        const std::set<std::string> known{"mass_at_zero", "q_exact", "esseen_bound",
                                          "tail_mass", "beta_value"};
        if (!known.count(metric)) throw ConfigError("unknown sweep metric: " + metric);
        if ((metric == "mass_at_zero" || metric == "esseen_bound" || metric == "beta_value") &&
            !weights)
            throw ConfigError(metric + " sweep needs weights");
        if ((metric == "q_exact" || metric == "tail_mass") && !dist)
            throw ConfigError(metric + " sweep needs dist");

        const ExecMode exec = exec_mode_of(args->exec);
        std::vector<std::string> rows(cell_count);
        std::vector<std::string> errors(cell_count);
        parallel_for(cell_count, exec, [&](std::size_t c) {
          try {
            const SweepCell& cell = cells[c];
            const std::uint64_t cell_seed = derive_seed(args->seed, c);
            double value = 0.0;
            if (metric == "mass_at_zero") {
                if (!weights) throw ConfigError("mass_at_zero sweep needs weights");
                MassAtZeroConfig mz;
                mz.seed = cell_seed;
                mz.exec = ExecMode::serial;  // cells are already parallel
                value = mass_at_zero(
                            make_smoothing_law(*weights, fixed_or(cell, "intensity", 1.0)), mz)
                            .value;
            } else if (metric == "q_exact") {
                if (!dist) throw ConfigError("q_exact sweep needs dist");
                const double tau = fixed_or(cell, "tau", 0.0);
                if (weights)
                    value = q_exact(weighted_sum_law(*weights, *dist),
                                    rational_from_double(tau))
                                .value;
                else
                    value = q_exact(*dist, rational_from_double(tau)).value;
            } else if (metric == "esseen_bound") {
                if (!weights) throw ConfigError("esseen_bound sweep needs weights");
                value = esseen_upper_bound(
                            make_smoothing_law(*weights, fixed_or(cell, "intensity", 1.0)),
                            fixed_or(cell, "delta", 0.5))
                            .bound;
            } else if (metric == "tail_mass") {
                if (!dist) throw ConfigError("tail_mass sweep needs dist");
                value = dist->symmetrize()
                            .tail_mass(rational_from_double(fixed_or(cell, "delta", 0.0)))
                            .get_d();
            } else if (metric == "beta_value") {
                if (!weights) throw ConfigError("beta_value sweep needs weights");
                BetaConfig bc;
                bc.exec = ExecMode::serial;
                value = beta(levy_base_measure(*weights),
                             static_cast<int>(fixed_or(cell, "r", 1)),
                             static_cast<int>(fixed_or(cell, "m", 3)),
                             fixed_or(cell, "tau", 0.0), bc)
                            .value.get_d();
            } else {
                throw ConfigError("unknown sweep metric: " + metric);
            }
            std::ostringstream row;
            row << c;
            for (const auto& ax : axes) row << "," << format_double(cell.params.at(ax));
            row << "," << metric << "," << format_double(value) << "\n";
            rows[c] = row.str();
          } catch (const std::exception& e) {
            errors[c] = e.what();
          }
        });
        for (const auto& err : errors)
            if (!err.empty()) throw std::runtime_error("sweep cell failed: " + err);

        std::ostringstream out;
        out << "cell";
        for (const auto& ax : axes) out << "," << ax;
        out << ",metric,value\n";
        for (const auto& row : rows) out << row;
        emit(args->out_path, "sweep", cfg, out.str());
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"concentration functions, smoothing laws, and progression structure"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    add_q_command(app);
    add_smooth_command(app);
    add_lemma1_command(app);
    add_thm1_command(app);
    add_beta_command(app);
    add_fit_command(app);
    add_thm2_command(app);
    add_region_command(app, "thm3", false);
    add_region_command(app, "thm4", true);
    add_plant_command(app);
    add_sweep_command(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitComputation;
    }
    return kExitOk;
}
