#include <array>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <CLI11.hpp>

#include "qfa/baseline.hpp"
#include "qfa/diagnostics.hpp"
#include "qfa/errors.hpp"
#include "qfa/hierarchy.hpp"
#include "qfa/io.hpp"
#include "qfa/kalman.hpp"
#include "qfa/lna.hpp"
#include "qfa/mcmc.hpp"
#include "qfa/random.hpp"
#include "qfa/sde.hpp"

namespace fs = std::filesystem;
using namespace qfa;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct Common {
    int threads = 0;
    std::uint64_t seed = 1;
    std::string config;
    std::string schedule_preset;
    std::optional<std::size_t> burn_in, thin, samples;
};

int thread_count(const Common& c)
{
    if (c.threads > 0) return c.threads;
    if (const char* env = std::getenv("QFA_INFER_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
        }
        throw UsageError("QFA_INFER_THREADS must be a positive integer");
    }
    return 1;
}

// Runs tasks on at most n threads and rethrows the first failure.
void run_pool(std::vector<std::function<void()>> tasks, int n)
{
    std::vector<std::exception_ptr> errs(tasks.size());
    std::size_t next = 0;
    std::mutex mu;
    auto worker = [&] {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard<std::mutex> lk(mu);
                if (next >= tasks.size()) return;
                i = next++;
            }
            try {
                tasks[i]();
            } catch (...) {
                errs[i] = std::current_exception();
            }
        }
    };
    const int k = std::max(1, std::min<int>(n, static_cast<int>(tasks.size())));
    std::vector<std::thread> pool;
    for (int i = 1; i < k; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

std::map<std::string, std::string> load_config(const Common& c)
{
    return c.config.empty() ? std::map<std::string, std::string>{} : read_config(c.config);
}

std::size_t config_size(const std::map<std::string, std::string>& cfg, const std::string& key,
                        std::size_t dflt)
{
    const auto it = cfg.find(key);
    if (it == cfg.end()) return dflt;
    try {
        const long long v = std::stoll(it->second);
        if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw UsageError("config key " + key + " must be a positive integer");
}

// Preset from the command line, then the config file, then the library default; explicit
// burn-in/thin/samples override.
Schedule resolve_schedule(const Common& c, const std::map<std::string, std::string>& cfg,
                          Schedule desk, Schedule paper)
{
    std::string preset = c.schedule_preset;
    if (preset.empty() && cfg.count("preset")) preset = cfg.at("preset");
    if (preset.empty()) preset = "desk";
    if (preset != "desk" && preset != "paper")
        throw UsageError("schedule preset must be desk or paper, got '" + preset + "'");
    Schedule s = preset == "paper" ? paper : desk;
    s.burn_in = config_size(cfg, "burn_in", s.burn_in);
    s.thin = config_size(cfg, "thin", s.thin);
    s.samples = config_size(cfg, "samples", s.samples);
    if (c.burn_in) s.burn_in = *c.burn_in;
    if (c.thin) s.thin = *c.thin;
    if (c.samples) s.samples = *c.samples;
    if (s.thin == 0 || s.samples == 0) throw UsageError("thin and samples must be positive");
    return s;
}

std::uint64_t resolve_seed(const Common& c, const std::map<std::string, std::string>& cfg,
                           bool seed_given)
{
    if (!seed_given && cfg.count("seed")) return std::stoull(cfg.at("seed"));
    return c.seed;
}

void add_common(CLI::App* app, Common& c, bool with_schedule)
{
    app->add_option("--threads", c.threads, "worker threads (falls back to QFA_INFER_THREADS)")
        ->check(CLI::PositiveNumber);
    app->add_option("--seed", c.seed, "top-level random seed");
    app->add_option("--config", c.config, "key=value configuration file")->check(CLI::ExistingFile);
    if (!with_schedule) return;
    app->add_option("--schedule", c.schedule_preset, "schedule preset")
        ->check(CLI::IsMember({"desk", "paper"}));
    app->add_option("--burn-in", c.burn_in, "burn-in iterations");
    app->add_option("--thin", c.thin, "thinning interval");
    app->add_option("--samples", c.samples, "retained draws");
}

void ensure_dir(const std::string& dir)
{
    if (dir.empty()) return;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory " + dir);
}

// simulate ------------------------------------------------------------------

struct SimulateArgs {
    std::string preset, kind = "slgm", model, error = "normal", out, truth;
    double K = 0.15, r = 3.0, P = 1e-4, sigma = 0.01, nu = 0.0;
    double t_max = 6.0, steps_per_unit = 1e4;
    std::size_t paths = 1, points = 27;
};

int cmd_simulate(const SimulateArgs& a, const Common& c, bool seed_given)
{
    const auto cfg = load_config(c);
    const std::uint64_t seed = resolve_seed(c, cfg, seed_given);
    if (a.preset == "screen-desk" || a.preset == "screen-paper") {
        HyperParams hyper = hyper_from_config(cfg);
        GeneratorConfig gc;
        std::size_t planted = 10;
        if (a.preset == "screen-paper") {
            gc.genes = 4300;
            gc.repeats = 8;
            planted = 430;
        }
        const auto plants = fold_plants(gc.genes, planted, 2.0);
        const auto g = generate_screen(hyper, gc, plants, derive_seed(seed, "screen"));
        if (a.out.empty()) throw UsageError("simulate: --out is required");
        write_screen(a.out, g.data);
        if (!a.truth.empty()) {
            std::ofstream t(a.truth);
            if (!t) throw DataError("cannot write " + a.truth);
            t << "gene,interactor,gamma,omega\n";
            for (const auto& [gene, is] : g.truth) {
                const auto it = g.effects.find(gene);
                t << gene << ',' << (is ? 1 : 0) << ','
                  << format_double(it == g.effects.end() ? 0.0 : it->second.gamma) << ','
                  << format_double(it == g.effects.end() ? 0.0 : it->second.omega) << '\n';
            }
        }
        std::cerr << "simulated " << g.data.genes.size() << " genes, " << g.data.repeats.size()
                  << " repeats\n";
        return 0;
    }

    SdeParams p{{a.K, a.r, a.P}, a.sigma, a.nu};
    std::size_t paths = a.paths, points = a.points;
    if (a.preset == "fig4nonu") {
        p = {{0.11, 4.0, 5e-5}, 0.05, 0.0};
        paths = 100;
        points = 61;
    } else if (a.preset == "row-a") {
        p = {{0.15, 3.0, 1e-4}, 0.01, 0.005};
        points = 27;
    } else if (!a.preset.empty()) {
        throw UsageError("unknown simulate preset '" + a.preset + "'");
    }
    if (paths == 0 || points == 0) throw UsageError("paths and points must be positive");
    const auto grid = uniform_grid(0.0, a.t_max, points);
    const ErrorKind ek = parse_error_kind(a.error);
    std::vector<Trajectory> trs(paths);
    std::vector<GrowthCurve> obs(paths);
    std::vector<std::function<void()>> tasks;
    for (std::size_t i = 0; i < paths; ++i)
        tasks.push_back([&, i] {
            const std::uint64_t s = derive_seed(derive_seed(seed, "path"), i);
            if (a.model.empty())
                trs[i] = euler_maruyama_fine(p, parse_sde_kind(a.kind), grid, a.steps_per_unit, s);
            else
                trs[i] = simulate_approx(parse_model_kind(a.model), p, grid, s);
            obs[i] = p.nu > 0 ? observe(trs[i], ek, p.nu, derive_seed(s, "obs"))
                              : GrowthCurve{trs[i].times, trs[i].values};
        });
    run_pool(std::move(tasks), thread_count(c));

    std::ofstream file;
    if (!a.out.empty()) {
        file.open(a.out);
        if (!file) throw DataError("cannot write " + a.out);
    }
    std::ostream& out = a.out.empty() ? std::cout : file;
    out << "path,time,state,observed\n";
    for (std::size_t i = 0; i < paths; ++i)
        for (std::size_t k = 0; k < grid.size(); ++k)
            out << i + 1 << ',' << format_double(trs[i].times[k]) << ','
                << format_double(trs[i].values[k]) << ',' << format_double(obs[i].values[k])
                << '\n';
    std::cerr << "simulated " << paths << " trajectories (K=" << p.growth.K << ", r=" << p.growth.r
              << ", P=" << p.growth.P << ", sigma=" << p.sigma << ")\n";
    return 0;
}

// fit-growth ----------------------------------------------------------------

struct FitGrowthArgs {
    std::string data, model = "lnaa", error, out_chain, out_summary;
    int imputed = 15;
    std::size_t chains = 1;
    bool make_positive = false;
    bool model_given = false;
};

int cmd_fit_growth(const FitGrowthArgs& a, const Common& c, bool seed_given)
{
    const auto cfg = load_config(c);
    const std::uint64_t seed = resolve_seed(c, cfg, seed_given);
    const Schedule sch = resolve_schedule(c, cfg, desk_sde_schedule(), paper_sde_schedule());
    const SdePriors priors = sde_priors_from_config(cfg);
    GrowthCurve curve = load_curve(a.data);
    const std::string model = !a.model_given && cfg.count("model") ? cfg.at("model") : a.model;
    if (model != "exact") parse_model_kind(model);
    const bool exact = model == "exact";
    ErrorKind ek = ErrorKind::Normal;
    if (!a.error.empty()) ek = parse_error_kind(a.error);
    else if (!exact) ek = natural_error(parse_model_kind(model));
    if (a.make_positive) curve = make_positive(curve);
    if (a.chains == 0) throw UsageError("--chains must be positive");

    std::vector<Chain> chains(a.chains);
    std::vector<std::function<void()>> tasks;
    for (std::size_t k = 0; k < a.chains; ++k)
        tasks.push_back([&, k] {
            const std::uint64_t s = a.chains == 1 ? seed : derive_seed(derive_seed(seed, "chain"), k);
            if (exact) {
                ExactFitOptions o;
                o.error = ek;
                o.priors = priors;
                o.schedule = sch;
                o.imputed_per_interval = a.imputed;
                o.seed = s;
                chains[k] = fit_sde_exact(curve, o);
            } else {
                SdeFitOptions o;
                o.kind = parse_model_kind(model);
                o.error = ek;
                o.priors = priors;
                o.schedule = sch;
                o.seed = s;
                chains[k] = fit_sde(curve, o);
            }
        });
    run_pool(std::move(tasks), thread_count(c));

    for (std::size_t k = 0; k < chains.size(); ++k) {
        const std::string sfx = chains.size() == 1 ? "" : "." + std::to_string(k + 1);
        if (!a.out_chain.empty()) write_chain_csv(a.out_chain + sfx, chains[k]);
        const std::string js = diagnostics_json(diagnose(chains[k]));
        if (!a.out_summary.empty()) write_text(a.out_summary + sfx, js);
        else std::cout << js;
    }
    return 0;
}

// fit-screen ----------------------------------------------------------------

struct ScreenArgs {
    std::string data, control, query, labels = "control,query", exclude, out_dir = ".";
    bool one_stage = false, two_stage = false, batch = false, transform = false,
         drop_edges = false;
};

std::vector<std::string> split_labels(const std::string& s)
{
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    if (out.size() != 2 || out[0].empty() || out[1].empty() || out[0] == out[1])
        throw UsageError("--labels needs two distinct comma-separated names");
    return out;
}

ScreenDataset load_screen_args(const ScreenArgs& a, const std::map<std::string, std::string>& cfg)
{
    LoadOptions lo;
    lo.condition_labels = split_labels(a.labels);
    lo.drop_edges = a.drop_edges;
    ScreenDataset ds;
    if (!a.data.empty()) {
        if (!a.control.empty() || !a.query.empty())
            throw UsageError("give either --data or --control/--query");
        ds = load_screen(a.data, lo);
    } else if (!a.control.empty() && !a.query.empty()) {
        ds = load_screen_pair(a.control, a.query, lo);
    } else {
        throw UsageError("input screen required: --data or --control and --query");
    }
    std::string exclude = a.exclude;
    if (exclude.empty() && cfg.count("exclude")) exclude = cfg.at("exclude");
    if (!exclude.empty()) ds = ds.without(read_gene_list(exclude));
    return ds;
}

std::string resolve_out_dir(const std::string& arg, const std::map<std::string, std::string>& cfg)
{
    if (arg == "." && cfg.count("out_dir")) return cfg.at("out_dir");
    return arg;
}

void write_missing(const std::string& dir, const std::vector<std::string>& missing)
{
    if (missing.empty()) return;
    std::ofstream m(fs::path(dir) / "missing.txt");
    for (const auto& g : missing) m << g << '\n';
    std::cerr << missing.size() << " genes lack data in a condition; see missing.txt\n";
}

// SHM per condition in parallel, then per-repeat fitnesses.
std::pair<FitnessTable, FitnessTable> two_stage_fitnesses(const ScreenDataset& ds,
                                                          const HyperParams& hyper,
                                                          const HierarchyOptions& base, int threads,
                                                          std::vector<std::string>& missing)
{
    std::array<FitnessTable, 2> fits;
    std::vector<std::function<void()>> tasks;
    for (int cnd = 0; cnd < 2; ++cnd)
        tasks.push_back([&, cnd] {
            const ScreenDataset slice = ds.condition_slice(cnd);
            HierarchyOptions o = base;
            o.seed = derive_seed(base.seed, cnd == 0 ? "shm-control" : "shm-query");
            o.record_genes = false;
            const auto fit = fit_shm(slice, hyper, o);
            fits[cnd] = shm_fitnesses(fit, slice);
        });
    run_pool(std::move(tasks), threads);
    for (const auto& g : ds.genes)
        if (!fits[0].count(g) || !fits[1].count(g)) missing.push_back(g);
    return {fits[0], fits[1]};
}

int cmd_fit_screen(const ScreenArgs& a, const Common& c, bool seed_given)
{
    if (a.one_stage == a.two_stage) throw UsageError("choose exactly one of --one-stage or --two-stage");
    if (a.batch && a.transform) throw UsageError("--batch and --transform are exclusive");
    if (a.two_stage && (a.batch || a.transform))
        throw UsageError("--batch/--transform apply to the one-stage model");
    const auto cfg = load_config(c);
    const HyperParams hyper = hyper_from_config(cfg);
    const ScreenDataset ds = load_screen_args(a, cfg);
    const std::string dir = resolve_out_dir(a.out_dir, cfg);
    ensure_dir(dir);
    const std::uint64_t seed = resolve_seed(c, cfg, seed_given);
    const Schedule sch = resolve_schedule(c, cfg, desk_hierarchy_schedule(), paper_hierarchy_schedule());

    if (a.one_stage) {
        HierarchyOptions o;
        o.schedule = sch;
        o.seed = seed;
        const JhmVariant v = a.batch ? JhmVariant::Batch
                                     : (a.transform ? JhmVariant::Transform : JhmVariant::None);
        const auto fit = fit_jhm(ds, hyper, v, o);
        write_interactions_csv((fs::path(dir) / "interactions.csv").string(), fit.interactions);
        write_chain_csv((fs::path(dir) / "chain.csv").string(), fit.chain);
        write_text((fs::path(dir) / "diagnostics.json").string(), diagnostics_json(diagnose(fit.chain)));
        write_missing(dir, fit.missing);
    } else {
        HierarchyOptions o;
        o.schedule = sch;
        o.seed = seed;
        std::vector<std::string> missing;
        const auto [ctl, qry] = two_stage_fitnesses(ds, hyper, o, thread_count(c), missing);
        write_fitness_csv((fs::path(dir) / "fitness.csv").string(), ctl, qry);
        IhmOptions io;
        io.schedule = sch;
        io.seed = derive_seed(seed, "ihm");
        const auto fit = fit_ihm(ctl, qry, hyper, io);
        write_interactions_csv((fs::path(dir) / "interactions.csv").string(), fit.interactions);
        write_chain_csv((fs::path(dir) / "chain.csv").string(), fit.chain);
        write_text((fs::path(dir) / "diagnostics.json").string(), diagnostics_json(diagnose(fit.chain)));
        for (const auto& g : fit.missing) missing.push_back(g);
        write_missing(dir, missing);
    }
    std::cerr << "wrote results to " << dir << "\n";
    return 0;
}

// baseline ------------------------------------------------------------------

struct BaselineArgs {
    ScreenArgs screen;
    std::string fitness, out;
    double threshold = 0.05;
};

int cmd_baseline(const BaselineArgs& a, const Common& c, bool seed_given)
{
    const auto cfg = load_config(c);
    FitnessTable ctl, qry;
    if (!a.fitness.empty()) {
        std::tie(ctl, qry) = read_fitness_csv(a.fitness);
    } else {
        const ScreenDataset ds = load_screen_args(a.screen, cfg);
        HierarchyOptions o;
        o.schedule = resolve_schedule(c, cfg, desk_hierarchy_schedule(), paper_hierarchy_schedule());
        o.seed = resolve_seed(c, cfg, seed_given);
        std::vector<std::string> missing;
        std::tie(ctl, qry) = two_stage_fitnesses(ds, hyper_from_config(cfg), o, thread_count(c), missing);
    }
    if (!(a.threshold > 0 && a.threshold < 1)) throw UsageError("--threshold must lie in (0,1)");
    const auto rep = run_baseline(ctl, qry, a.threshold);
    if (a.out.empty()) throw UsageError("baseline: --out is required");
    write_baseline_csv(a.out, rep);
    if (!rep.skipped.empty())
        std::cerr << rep.skipped.size() << " genes skipped (fewer than 2 repeats in a condition)\n";
    return 0;
}

// diagnose / export-plot-data ------------------------------------------------

int cmd_diagnose(const std::string& chain_path, const std::string& out, bool with_acf)
{
    const Chain chain = read_chain_csv(chain_path);
    const std::string js = diagnostics_json(diagnose(chain), with_acf);
    if (out.empty()) std::cout << js;
    else write_text(out, js);
    return 0;
}

int cmd_export_plot(const std::string& in, const std::string& out)
{
    write_plot_csv(out, read_interactions_csv(in));
    return 0;
}

void add_screen_inputs(CLI::App* app, ScreenArgs& s)
{
    app->add_option("--data", s.data, "screen TSV with a condition column")->check(CLI::ExistingFile);
    app->add_option("--control", s.control, "control screen TSV")->check(CLI::ExistingFile);
    app->add_option("--query", s.query, "query screen TSV")->check(CLI::ExistingFile);
    app->add_option("--labels", s.labels, "control and query condition labels");
    app->add_option("--exclude", s.exclude, "file listing genes to drop")->check(CLI::ExistingFile);
    app->add_flag("--drop-edges", s.drop_edges, "drop cultures on plate edges");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Quantitative fitness analysis: growth-curve inference and interaction screens"};
    app.require_subcommand(1);
    Common common;

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "simulate growth curves or a planted screen");
    add_common(s, common, false);
    s->add_option("--preset", sim.preset, "fig4nonu | row-a | screen-desk | screen-paper")
        ->check(CLI::IsMember({"fig4nonu", "row-a", "screen-desk", "screen-paper"}));
    s->add_option("--kind", sim.kind, "slgm | demographic-sqrt | demographic-sym")
        ->check(CLI::IsMember({"slgm", "demographic-sqrt", "demographic-sym"}));
    s->add_option("--model", sim.model, "sample from an approximation instead: rrtr | lnam | lnaa")
        ->check(CLI::IsMember({"rrtr", "lnam", "lnaa"}));
    s->add_option("--error", sim.error, "normal | lognormal")->check(CLI::IsMember({"normal", "lognormal"}));
    s->add_option("--K", sim.K, "carrying capacity")->check(CLI::PositiveNumber);
    s->add_option("--r", sim.r, "growth rate")->check(CLI::PositiveNumber);
    s->add_option("--P", sim.P, "inoculum density")->check(CLI::PositiveNumber);
    s->add_option("--sigma", sim.sigma, "process noise")->check(CLI::NonNegativeNumber);
    s->add_option("--nu", sim.nu, "measurement noise")->check(CLI::NonNegativeNumber);
    s->add_option("--paths", sim.paths, "number of trajectories");
    s->add_option("--points", sim.points, "grid points on [0, t-max]");
    s->add_option("--t-max", sim.t_max, "final time")->check(CLI::PositiveNumber);
    s->add_option("--steps-per-unit", sim.steps_per_unit, "Euler-Maruyama steps per unit time")
        ->check(CLI::PositiveNumber);
    s->add_option("--out", sim.out, "output file (CSV, or TSV for screens)");
    s->add_option("--truth", sim.truth, "planted-effect table for screen presets");

    FitGrowthArgs fg;
    auto* f = app.add_subcommand("fit-growth", "fit one growth curve");
    add_common(f, common, true);
    f->add_option("--data", fg.data, "CSV with time and value columns")->required()->check(CLI::ExistingFile);
    f->add_option("--model", fg.model, "rrtr | lnam | lnaa | exact")
        ->check(CLI::IsMember({"rrtr", "lnam", "lnaa", "exact"}));
    f->add_option("--error", fg.error, "measurement error (defaults to the model's own)")
        ->check(CLI::IsMember({"normal", "lognormal"}));
    f->add_option("--imputed", fg.imputed, "latent states per interval for the exact sampler")
        ->check(CLI::PositiveNumber);
    f->add_option("--chains", fg.chains, "independent chains");
    f->add_flag("--make-positive", fg.make_positive, "replace data by |y| floored at 1e-12");
    f->add_option("--out-chain", fg.out_chain, "chain CSV");
    f->add_option("--out-summary", fg.out_summary, "summary JSON (stdout if omitted)");

    ScreenArgs sc;
    auto* fs_ = app.add_subcommand("fit-screen", "fit a control/query screen");
    add_common(fs_, common, true);
    add_screen_inputs(fs_, sc);
    fs_->add_flag("--one-stage", sc.one_stage, "joint hierarchical model");
    fs_->add_flag("--two-stage", sc.two_stage, "per-condition growth fits then interaction model");
    fs_->add_flag("--batch", sc.batch, "batch-effect variant");
    fs_->add_flag("--transform", sc.transform, "transformation variant");
    fs_->add_option("--out-dir", sc.out_dir, "output directory");

    BaselineArgs bl;
    auto* b = app.add_subcommand("baseline", "frequentist two-stage comparison");
    add_common(b, common, true);
    add_screen_inputs(b, bl.screen);
    b->add_option("--fitness", bl.fitness, "gene,condition,fitness CSV")->check(CLI::ExistingFile);
    b->add_option("--threshold", bl.threshold, "q-value threshold");
    b->add_option("--out", bl.out, "output CSV");

    std::string chain_path, diag_out;
    bool with_acf = false;
    auto* d = app.add_subcommand("diagnose", "convergence diagnostics for an exported chain");
    d->add_option("--chain", chain_path, "chain CSV")->required()->check(CLI::ExistingFile);
    d->add_option("--out", diag_out, "output JSON (stdout if omitted)");
    d->add_flag("--acf", with_acf, "include autocorrelations");

    std::string plot_in, plot_out;
    auto* e = app.add_subcommand("export-plot-data", "fitness-plot table from interaction results");
    e->add_option("--interactions", plot_in, "interaction CSV")->required()->check(CLI::ExistingFile);
    e->add_option("--out", plot_out, "output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& ex) {
        return app.exit(ex);
    } catch (const CLI::CallForAllHelp& ex) {
        return app.exit(ex);
    } catch (const CLI::ParseError& ex) {
        app.exit(ex);
        return kExitUsage;
    }

    auto seed_given = [&](CLI::App* sub) { return sub->count("--seed") > 0; };
    fg.model_given = f->count("--model") > 0;
    try {
        if (*s) return cmd_simulate(sim, common, seed_given(s));
        if (*f) return cmd_fit_growth(fg, common, seed_given(f));
        if (*fs_) return cmd_fit_screen(sc, common, seed_given(fs_));
        if (*b) return cmd_baseline(bl, common, seed_given(b));
        if (*d) return cmd_diagnose(chain_path, diag_out, with_acf);
        if (*e) return cmd_export_plot(plot_in, plot_out);
    } catch (const UsageError& ex) {
        std::cerr << "usage error: " << ex.what() << "\n";
        return kExitUsage;
    } catch (const DataError& ex) {
        std::cerr << "data error: " << ex.what() << "\n";
        return kExitData;
    } catch (const NumericError& ex) {
        std::cerr << "numeric error: " << ex.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return kExitUsage;
}
