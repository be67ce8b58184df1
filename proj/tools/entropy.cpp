// entropy: rateless erasure-coded decentralized storage toolkit.
//
//   entropy sim      discrete-event simulations (repair traffic, survival
//                    traces, byzantine and targeted-attack sweeps, baseline)
//   entropy analyze  absorbing-chain durability calculator and attack bounds
//   entropy node     local deployment: init/run nodes, store/query/evict

#include <CLI11.hpp>

#include <filesystem>
#include <future>
#include <iostream>
#include <thread>

#include "entropy/analysis.hpp"
#include "entropy/files.hpp"
#include "entropy/sim.hpp"
#include "entropy/transport_http.hpp"

namespace fs = std::filesystem;
using namespace entropy;
using files::json;

namespace {

constexpr const char* kVersion = "entropy 0.1.0";

uint64_t env_seed() {
    const char* s = std::getenv("ENTROPY_SEED");
    return s ? std::strtoull(s, nullptr, 10) : 0;
}

// "a,b,c" or "a..b" (6 points) or "a..b:n"
std::vector<double> parse_points(const std::string& spec) {
    std::vector<double> out;
    auto range_pos = spec.find("..");
    if (range_pos != std::string::npos) {
        double lo = std::stod(spec.substr(0, range_pos));
        std::string rest = spec.substr(range_pos + 2);
        size_t n = 6;
        auto colon = rest.find(':');
        if (colon != std::string::npos) {
            n = std::stoul(rest.substr(colon + 1));
            rest = rest.substr(0, colon);
        }
        double hi = std::stod(rest);
        if (n < 2) n = 2;
        for (size_t i = 0; i < n; ++i)
            out.push_back(lo + (hi - lo) * double(i) / double(n - 1));
        return out;
    }
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(std::stod(tok));
    return out;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct OutputSink {
    fs::path dir;
    json manifest;
    std::vector<std::string> outputs;

    OutputSink(const std::string& out_dir, const std::string& command, int argc, char** argv,
               uint64_t seed) {
        dir = out_dir;
        fs::create_directories(dir);
        manifest["tool"] = kVersion;
        manifest["command"] = command;
        json args = json::array();
        for (int i = 0; i < argc; ++i) args.push_back(argv[i]);
        manifest["argv"] = args;
        manifest["seed"] = seed;
        manifest["schema_version"] = 1;
    }

    void add_config(const json& cfg) { manifest["config"] = cfg; }

    void write_csv(const std::string& name, const std::string& content) {
        files::write_text((dir / name).string(), content);
        outputs.push_back(name);
    }

    void finish() {
        manifest["outputs"] = outputs;
        files::write_text((dir / "manifest.json").string(), manifest.dump(2) + "\n");
        std::cout << "wrote " << (dir / "manifest.json").string() << "\n";
    }
};

json sim_config_json(const sim::SimConfig& cfg) {
    return json{{"nodes", cfg.nodes},
                {"byzantine_fraction", cfg.byzantine_fraction},
                {"churn_per_year", cfg.churn_per_year},
                {"objects", cfg.objects},
                {"k_inner", cfg.codec.k_inner},
                {"r_group", cfg.codec.r_group},
                {"k_outer", cfg.codec.k_outer},
                {"n_chunks", cfg.codec.n_chunks},
                {"scale_exponent", cfg.scale_exponent},
                {"cache_ttl_hours", cfg.cache_ttl_hours},
                {"years", cfg.years},
                {"heartbeat_hours", cfg.heartbeat_hours},
                {"liveness_multiple", cfg.liveness_multiple},
                {"repair_jitter_hours", cfg.repair_jitter_hours},
                {"repair_latency_hours", cfg.repair_latency_hours},
                {"object_expiry_years", cfg.object_expiry_years},
                {"fragment_cap_per_node", cfg.fragment_cap_per_node},
                {"real_vrf", cfg.real_vrf},
                {"seed", cfg.seed}};
}

// Applies values from a JSON config file for flags the user did not pass.
template <typename T>
void config_default(const CLI::App* app, const json& cfg, const std::string& flag,
                    const std::string& key, T& target) {
    const CLI::Option* opt = app->get_option_no_throw(flag);
    if (opt && opt->count() > 0) return;  // explicit flag wins
    if (cfg.contains(key)) target = cfg.at(key).get<T>();
}

const char* kTrafficHeader =
    "system,sweep,sweep_value,seed,nodes,objects,churn_per_year,cache_ttl_hours,"
    "repair_traffic_objects,lost_objects,lost_fraction,storage_redundancy_nominal,"
    "storage_redundancy_placed,repairs,cache_hits\n";

void traffic_row(std::string& csv, const std::string& system, const std::string& sweep,
                 double sweep_value, uint64_t seed, const sim::SimConfig& cfg,
                 const sim::Metrics& m) {
    csv += system + "," + sweep + "," + fmt(sweep_value) + "," + std::to_string(seed) + "," +
           std::to_string(cfg.nodes) + "," + std::to_string(cfg.objects) + "," +
           fmt(cfg.churn_per_year) + "," + fmt(cfg.cache_ttl_hours) + "," +
           fmt(m.repair_traffic_objects) + "," + std::to_string(m.lost_objects) + "," +
           fmt(m.lost_fraction) + "," + fmt(m.storage_redundancy_nominal) + "," +
           fmt(m.storage_redundancy_placed) + "," + std::to_string(m.repairs) + "," +
           std::to_string(m.cache_hits) + "\n";
}

// run sweep points in parallel, deterministic per (cfg, seed)
template <typename Item, typename Fn>
std::vector<std::pair<Item, sim::Metrics>> parallel_runs(const std::vector<Item>& items, Fn&& fn,
                                                         unsigned threads) {
    std::vector<std::pair<Item, sim::Metrics>> results(items.size());
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= items.size()) return;
            results[i] = {items[i], fn(items[i])};
        }
    };
    std::vector<std::thread> pool;
    unsigned n = std::max(1u, std::min<unsigned>(threads, unsigned(items.size())));
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return results;
}

struct RunKey {
    double sweep_value;
    uint64_t seed;
    int variant;
};

}  // namespace

// ---------------------------------------------------------------- sim ----

static int cmd_sim(CLI::App& app, int argc, char** argv) {
    auto* simc = app.get_subcommand("sim");

    static std::string objects_spec = "100", churn_spec = "52", byz_spec = "0",
                       attacked_spec = "0.02..0.25:6", inner_spec = "", outer_spec = "",
                       system = "entropy", strategy = "greedy", out_dir = "out",
                       config_path;
    static uint64_t nodes = 1000, seeds = 1, seed0 = 0, mu_cap = 0;
    static double years = 1.0, cache_hours = 0.0, heartbeat_hours = 1.0, latency_hours = 1.0,
                  jitter_hours = 1.0, expiry_years = 0.0, attack_time = 0.01,
                  scale_exponent = 0.0;
    static bool real_vrf = false, audit = false;
    static unsigned threads = std::max(1u, std::thread::hardware_concurrency());

    auto add_common = [&](CLI::App* sc) {
        sc->add_option("--nodes", nodes, "total node count N");
        sc->add_option("--objects", objects_spec, "object count(s), comma list or a..b[:n]");
        sc->add_option("--churns", churn_spec, "churn per honest node per year, list or range");
        sc->add_option("--years", years, "simulated duration in years");
        sc->add_option("--seeds", seeds, "number of seeds (seed, seed+1, ...)");
        sc->add_option("--seed", seed0, "base seed (default ENTROPY_SEED or 0)");
        sc->add_option("--cache-hours", cache_hours, "chunk cache TTL in hours (0 = off)");
        sc->add_option("--inner", inner_spec, "inner code as k_inner,r_group (default 32,80)");
        sc->add_option("--outer", outer_spec, "outer code as n_chunks,k_outer (default 10,8)");
        sc->add_option("--heartbeat-hours", heartbeat_hours, "heartbeat interval");
        sc->add_option("--repair-latency-hours", latency_hours, "per-repair transfer+decode time");
        sc->add_option("--jitter-hours", jitter_hours, "repair jitter window");
        sc->add_option("--expiry-years", expiry_years, "object expiration (0 = never)");
        sc->add_option("--scale-exponent", scale_exponent, "selection scale m (0 = (R+8)/2)");
        sc->add_option("--mu", mu_cap, "fragments-per-node cap (0 = uncapped)");
        sc->add_option("--threads", threads, "parallel runs");
        sc->add_flag("--real-vrf", real_vrf, "use the full VRF instead of the seeded PRG");
        sc->add_flag("--audit", audit, "verify fragment conservation after the run");
        sc->add_option("--out", out_dir, "output directory");
        sc->add_option("--config", config_path, "JSON config file (flags override it)");
    };

    auto* traffic = simc->add_subcommand("repair-traffic", "repair traffic vs objects and churn");
    add_common(traffic);
    auto* trace = simc->add_subcommand("trace", "fragment-survival time series for one chunk");
    add_common(trace);
    static std::string rgroups_spec = "80";
    trace->add_option("--r-groups", rgroups_spec, "group sizes to trace, comma list");
    auto* byz = simc->add_subcommand("byzantine", "lost objects vs byzantine fraction");
    add_common(byz);
    byz->add_option("--fractions", byz_spec, "byzantine fractions, list or range");
    byz->add_option("--system", system, "entropy | baseline");
    auto* targeted = simc->add_subcommand("targeted", "lost objects vs attacked fraction");
    add_common(targeted);
    targeted->add_option("--attacked", attacked_spec, "attacked fractions, list or range");
    targeted->add_option("--system", system, "entropy | baseline");
    targeted->add_option("--strategy", strategy, "greedy | random");
    targeted->add_option("--attack-time", attack_time, "attack time in years");
    auto* baseline = simc->add_subcommand("baseline", "3-replica baseline traffic and loss");
    add_common(baseline);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    CLI::App* active = nullptr;
    for (auto* sc : {traffic, trace, byz, targeted, baseline})
        if (sc->parsed()) active = sc;
    if (!active) {
        std::cerr << "error: pick a sim subcommand (repair-traffic, trace, byzantine, targeted, "
                     "baseline)\n";
        return 1;
    }

    json file_cfg = json::object();
    if (!config_path.empty()) file_cfg = json::parse(files::read_file(config_path));
    config_default(active, file_cfg, "--nodes", "nodes", nodes);
    config_default(active, file_cfg, "--years", "years", years);
    config_default(active, file_cfg, "--cache-hours", "cache_ttl_hours", cache_hours);
    config_default(active, file_cfg, "--heartbeat-hours", "heartbeat_hours", heartbeat_hours);
    config_default(active, file_cfg, "--scale-exponent", "scale_exponent", scale_exponent);
    config_default(active, file_cfg, "--objects", "objects", objects_spec);
    config_default(active, file_cfg, "--churns", "churn_per_year", churn_spec);

    if (seed0 == 0) seed0 = env_seed();

    sim::SimConfig base;
    base.nodes = nodes;
    base.years = years;
    base.cache_ttl_hours = cache_hours;
    base.heartbeat_hours = heartbeat_hours;
    base.repair_latency_hours = latency_hours;
    base.repair_jitter_hours = jitter_hours;
    base.object_expiry_years = expiry_years;
    base.scale_exponent = scale_exponent;
    base.fragment_cap_per_node = mu_cap;
    base.real_vrf = real_vrf;
    base.audit = audit;
    if (!inner_spec.empty()) {
        auto v = parse_points(inner_spec);
        if (v.size() != 2) throw std::runtime_error("--inner expects k_inner,r_group");
        base.codec.k_inner = uint32_t(v[0]);
        base.codec.r_group = uint32_t(v[1]);
    }
    if (!outer_spec.empty()) {
        auto v = parse_points(outer_spec);
        if (v.size() != 2) throw std::runtime_error("--outer expects n_chunks,k_outer");
        base.codec.n_chunks = uint32_t(v[0]);
        base.codec.k_outer = uint32_t(v[1]);
    }
    base.codec.validate();

    auto objects_pts = parse_points(objects_spec);
    auto churn_pts = parse_points(churn_spec);

    OutputSink sink(out_dir, active->get_name(), argc, argv, seed0);
    sink.add_config(sim_config_json(base));

    try {
        if (active == traffic || active == baseline) {
            bool is_baseline = active == baseline;
            std::vector<RunKey> keys;
            std::vector<std::tuple<std::string, double, uint64_t, sim::SimConfig>> runs;
            for (double omega : objects_pts)
                for (double churn : churn_pts)
                    for (uint64_t s = 0; s < seeds; ++s) {
                        sim::SimConfig cfg = base;
                        cfg.objects = uint64_t(omega);
                        cfg.churn_per_year = churn;
                        cfg.seed = seed0 + s;
                        std::string sweep = objects_pts.size() > 1 ? "objects" : "churn";
                        double val = objects_pts.size() > 1 ? omega : churn;
                        runs.push_back({sweep, val, cfg.seed, cfg});
                    }
            auto results = parallel_runs(
                runs,
                [&](const auto& r) {
                    return is_baseline ? sim::run_baseline(std::get<3>(r))
                                       : sim::run_entropy(std::get<3>(r));
                },
                threads);
            std::string csv = kTrafficHeader;
            for (auto& [r, m] : results)
                traffic_row(csv, is_baseline ? "baseline" : "entropy", std::get<0>(r),
                            std::get<1>(r), std::get<2>(r), std::get<3>(r), m);
            sink.write_csv(is_baseline ? "baseline_traffic.csv" : "repair_traffic.csv", csv);
        } else if (active == trace) {
            auto rgroups = parse_points(rgroups_spec);
            std::string csv = "r_group,seed,t_years,honest_alive\n";
            std::vector<std::pair<double, uint64_t>> runs;
            for (double r : rgroups)
                for (uint64_t s = 0; s < seeds; ++s) runs.push_back({r, seed0 + s});
            auto results = parallel_runs(
                runs,
                [&](const auto& p) {
                    sim::SimConfig cfg = base;
                    cfg.objects = uint64_t(objects_pts[0]);
                    cfg.churn_per_year = churn_pts[0];
                    cfg.codec.r_group = uint32_t(p.first);
                    cfg.seed = p.second;
                    return sim::trace_fragments(cfg, 0);
                },
                threads);
            for (auto& [p, m] : results)
                for (const auto& pt : m.trace)
                    csv += fmt(p.first) + "," + std::to_string(p.second) + "," + fmt(pt.t) + "," +
                           std::to_string(pt.honest_alive) + "\n";
            sink.write_csv("trace.csv", csv);
        } else if (active == byz) {
            auto fractions = parse_points(byz_spec);
            std::string csv =
                "system,byzantine_fraction,seed,lost_objects,lost_fraction,absorbed_groups\n";
            std::vector<std::pair<double, uint64_t>> runs;
            for (double f : fractions)
                for (uint64_t s = 0; s < seeds; ++s) runs.push_back({f, seed0 + s});
            auto results = parallel_runs(
                runs,
                [&](const auto& p) {
                    sim::SimConfig cfg = base;
                    cfg.objects = uint64_t(objects_pts[0]);
                    cfg.churn_per_year = churn_pts[0];
                    cfg.byzantine_fraction = p.first;
                    cfg.seed = p.second;
                    return system == "baseline" ? sim::run_baseline(cfg) : sim::run_entropy(cfg);
                },
                threads);
            for (auto& [p, m] : results)
                csv += system + "," + fmt(p.first) + "," + std::to_string(p.second) + "," +
                       std::to_string(m.lost_objects) + "," + fmt(m.lost_fraction) + "," +
                       std::to_string(m.absorbed_groups) + "\n";
            sink.write_csv("byzantine.csv", csv);
        } else if (active == targeted) {
            auto fractions = parse_points(attacked_spec);
            std::string csv =
                "system,attacked_fraction,seed,lost_objects,lost_fraction,attack_kills,"
                "absorbed_groups\n";
            std::vector<std::pair<double, uint64_t>> runs;
            for (double f : fractions)
                for (uint64_t s = 0; s < seeds; ++s) runs.push_back({f, seed0 + s});
            auto results = parallel_runs(
                runs,
                [&](const auto& p) {
                    sim::SimConfig cfg = base;
                    cfg.objects = uint64_t(objects_pts[0]);
                    cfg.churn_per_year = churn_pts[0];
                    cfg.seed = p.second;
                    sim::AttackerConfig atk;
                    atk.strategy = strategy == "random"
                                       ? sim::AttackerConfig::Strategy::Random
                                       : sim::AttackerConfig::Strategy::OmniscientGreedy;
                    atk.attacked_fraction = p.first;
                    atk.attack_time_years = attack_time;
                    atk.mu = mu_cap ? mu_cap : 1;
                    return system == "baseline" ? sim::run_baseline_attacked(cfg, atk)
                                                : sim::run_entropy_attacked(cfg, atk);
                },
                threads);
            for (auto& [p, m] : results)
                csv += system + "," + fmt(p.first) + "," + std::to_string(p.second) + "," +
                       std::to_string(m.lost_objects) + "," + fmt(m.lost_fraction) + "," +
                       std::to_string(m.attack_kills) + "," + std::to_string(m.absorbed_groups) +
                       "\n";
            sink.write_csv("targeted.csv", csv);
        }
        sink.finish();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

// ------------------------------------------------------------- analyze ----

static int cmd_analyze(CLI::App& app, int argc, char** argv) {
    auto* an = app.get_subcommand("analyze");

    static int64_t N = 60, F = 20, n = 12, k = 4, evict = 1, horizon = 50;
    static double lambda = 0.05, omega = 100, phi = 0, mu = 1, phi_mu = 0;
    static int64_t K = 8, R = 2, an_n = 80, an_k = 32;
    static uint64_t trials = 100000, mc_seed = 1;
    static bool validate = false, paper_sum = false;
    static std::string out_path;

    auto* ctmc = an->add_subcommand("ctmc", "group absorption probability over time");
    ctmc->add_option("--N", N, "total nodes");
    ctmc->add_option("--F", F, "byzantine nodes");
    ctmc->add_option("--n", n, "group size");
    ctmc->add_option("--k", k, "recovery threshold");
    ctmc->add_option("--lambda", lambda, "churn per honest member per step");
    ctmc->add_option("--evict", evict, "members evicted per step");
    ctmc->add_option("--t", horizon, "horizon in steps");
    ctmc->add_flag("--validate", validate, "cross-check against Monte Carlo");
    ctmc->add_option("--trials", trials, "Monte Carlo trials");
    ctmc->add_option("--mc-seed", mc_seed, "Monte Carlo seed");
    ctmc->add_flag("--paper-sum", paper_sum, "also report the summed-form variant");
    ctmc->add_option("--out", out_path, "write JSON here as well");

    auto* attack = an->add_subcommand("attack", "targeted-attack durability bound");
    attack->add_option("--omega", omega, "total objects");
    attack->add_option("--K", K, "outer threshold");
    attack->add_option("--R", R, "outer redundancy");
    attack->add_option("--phi-mu", phi_mu, "compromised groups times fragments per node");
    attack->add_option("--phi", phi, "attacker node budget");
    attack->add_option("--mu", mu, "fragments per node");
    attack->add_option("--n", an_n, "inner group size (for budget conversion)");
    attack->add_option("--k", an_k, "inner threshold (for budget conversion)");
    attack->add_option("--out", out_path, "write JSON here as well");

    auto* bounds = an->add_subcommand("bounds", "initial-state tail and Hoeffding bound");
    bounds->add_option("--n", an_n, "group size");
    bounds->add_option("--k", an_k, "recovery threshold");
    bounds->add_option("--N", N, "total nodes (optional, for the exact tail)");
    bounds->add_option("--F", F, "byzantine nodes (optional)");
    bounds->add_option("--out", out_path, "write JSON here as well");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    json out;
    try {
        if (ctmc->parsed()) {
            analysis::CtmcParams p;
            p.total_nodes = N;
            p.byzantine = F;
            p.group_size = n;
            p.threshold = k;
            p.churn = lambda;
            p.evict = evict;
            p.horizon = horizon;
            auto init = analysis::initial_vector(p);
            auto theta = analysis::transition_matrix(p);
            double absorb = analysis::absorption_probability(init, theta, p.horizon);
            out["params"] = {{"N", N}, {"F", F}, {"n", n},         {"k", k},
                             {"lambda", lambda}, {"evict", evict}, {"t", horizon}};
            out["initial_absorbing_mass"] = init.back();
            out["hypergeom_tail"] = analysis::hypergeom_tail(p);
            out["absorption_probability"] = absorb;
            out["group_durability"] = 1.0 - absorb;
            if (paper_sum)
                out["absorption_probability_summed_form"] =
                    analysis::absorption_probability(init, theta, p.horizon, true);
            if (validate) {
                auto mc = analysis::mc_absorption(p, trials, mc_seed);
                out["mc"] = {{"estimate", mc.estimate},
                             {"stderr", mc.stderr_est},
                             {"trials", mc.trials},
                             {"sigma_distance",
                              mc.stderr_est > 0 ? std::abs(absorb - mc.estimate) / mc.stderr_est
                                                : 0.0}};
            }
        } else if (attack->parsed()) {
            analysis::AttackParams ap;
            ap.objects = omega;
            ap.K = K;
            ap.R = R;
            ap.phi = phi;
            ap.mu = mu;
            ap.group_n = an_n;
            ap.group_k = an_k;
            ap.phi_mu_override = phi_mu;
            out["params"] = {{"omega", omega}, {"K", K},   {"R", R},
                             {"phi", phi},     {"mu", mu}, {"phi_mu", ap.phi_mu()}};
            out["attack_success_bound"] = analysis::targeted_attack_bound(ap);
        } else if (bounds->parsed()) {
            out["params"] = {{"n", an_n}, {"k", an_k}};
            out["hoeffding_bound"] = analysis::hoeffding_bound(an_n, an_k);
            if (bounds->count("--N") > 0) {
                analysis::CtmcParams p;
                p.total_nodes = N;
                p.byzantine = bounds->count("--F") ? F : N / 3;
                p.group_size = an_n;
                p.threshold = an_k;
                p.horizon = 1;
                out["params"]["N"] = p.total_nodes;
                out["params"]["F"] = p.byzantine;
                out["exact_tail"] = analysis::hypergeom_tail(p);
            }
        } else {
            std::cerr << "error: pick an analyze subcommand (ctmc, attack, bounds)\n";
            return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    std::cout << out.dump(2) << "\n";
    if (!out_path.empty()) files::write_text(out_path, out.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------- node ----

namespace {

protocol::NodeConfig node_config_from_cluster(const json& cluster, const std::string& listen,
                                              const std::array<uint8_t, 32>& seed,
                                              size_t total_nodes) {
    protocol::NodeConfig nc;
    nc.keys = crypto::keygen(BytesView(seed.data(), seed.size()));
    nc.address = listen;
    nc.codec.k_inner = cluster.value("k_inner", 8u);
    nc.codec.r_group = cluster.value("r_group", 16u);
    nc.codec.k_outer = cluster.value("k_outer", 4u);
    nc.codec.n_chunks = cluster.value("n_chunks", 5u);
    nc.sel.total_nodes = total_nodes;
    nc.sel.r_group = nc.codec.r_group;
    nc.sel.scale_exponent = cluster.value("scale_exponent", 16.0);
    nc.heartbeat_interval = cluster.value("heartbeat_s", 1.0);
    nc.liveness_timeout = cluster.value("liveness_s", 0.0);
    nc.sync_interval = cluster.value("sync_s", 0.0);
    nc.repair_jitter = cluster.value("jitter_s", 0.0);
    nc.cache_ttl = cluster.value("cache_ttl_s", 600.0);
    nc.tick_interval = cluster.value("tick_s", 0.0);
    return nc;
}

net::HttpNodeRunner* g_runner = nullptr;
void handle_signal(int) {
    if (g_runner) g_runner->stop();
}

json http_get(const std::string& addr, const std::string& path) {
    auto [host, port] = net::split_address(addr);
    httplib::Client cli(host, port);
    cli.set_connection_timeout(2, 0);
    cli.set_read_timeout(10, 0);
    auto res = cli.Get(path.c_str());
    if (!res || res->status != 200)
        throw std::runtime_error("GET " + addr + path + " failed" +
                                 (res ? ": " + res->body : " (unreachable)"));
    return json::parse(res->body);
}

}  // namespace

static int cmd_node(CLI::App& app, int argc, char** argv) {
    auto* nodec = app.get_subcommand("node");

    static std::string dir = "cluster", host = "127.0.0.1", listen, seed_file, membership_path,
                       cluster_path, via, file_path, recipe_path, out_file, chunk_hex;
    static uint64_t count = 50, base_port = 46000, init_seed = 1;
    static double expire_days = 0, wait_seconds = 30;
    static bool oldest = false, byzantine = false;
    static uint32_t p_k_inner = 8, p_r_group = 16, p_k_outer = 4, p_n_chunks = 5;
    static double p_scale = 16.0, p_heartbeat = 1.0, p_cache_ttl = 600.0;

    auto* init = nodec->add_subcommand("init", "generate seeds, membership and cluster config");
    init->add_option("--count", count, "number of nodes");
    init->add_option("--base-port", base_port, "first port; node i listens on base+i");
    init->add_option("--host", host, "listen host");
    init->add_option("--dir", dir, "output directory");
    init->add_option("--seed", init_seed, "key generation seed");
    init->add_option("--k-inner", p_k_inner, "inner threshold");
    init->add_option("--r-group", p_r_group, "target group size");
    init->add_option("--k-outer", p_k_outer, "outer threshold");
    init->add_option("--n-chunks", p_n_chunks, "chunks per object");
    init->add_option("--scale-exponent", p_scale, "selection scale m");
    init->add_option("--heartbeat-s", p_heartbeat, "heartbeat seconds");
    init->add_option("--cache-ttl-s", p_cache_ttl, "chunk cache TTL seconds");

    auto* run = nodec->add_subcommand("run", "serve one node");
    run->add_option("--listen", listen, "host:port to serve")->required();
    run->add_option("--seed-file", seed_file, "32-byte key seed")->required();
    run->add_option("--membership", membership_path, "membership JSON")->required();
    run->add_option("--cluster", cluster_path, "cluster config JSON");
    run->add_flag("--byzantine", byzantine, "acknowledge stores but serve no data");

    auto* store = nodec->add_subcommand("store", "store a file through a node");
    store->add_option("--via", via, "proxy node host:port")->required();
    store->add_option("--file", file_path, "object to store")->required();
    store->add_option("--recipe", recipe_path, "recipe output path")->required();
    store->add_option("--expire-days", expire_days, "expiration in days (0 = never)");

    auto* query = nodec->add_subcommand("query", "retrieve an object from a recipe");
    query->add_option("--via", via, "proxy node host:port")->required();
    query->add_option("--recipe", recipe_path, "recipe JSON")->required();
    query->add_option("--out", out_file, "output file")->required();

    auto* evict = nodec->add_subcommand("evict", "force-evict a group member and watch repair");
    evict->add_option("--membership", membership_path, "membership JSON")->required();
    evict->add_option("--chunk", chunk_hex, "chunk hash (hex)")->required();
    evict->add_flag("--oldest", oldest, "evict the longest-standing member");
    evict->add_option("--wait-seconds", wait_seconds, "repair wait budget");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (init->parsed()) {
            fs::create_directories(fs::path(dir) / "seeds");
            std::mt19937_64 rng(init_seed);
            std::vector<selection::NodeRecord> records;
            for (uint64_t i = 0; i < count; ++i) {
                std::array<uint8_t, 32> seed{};
                for (auto& b : seed) b = uint8_t(rng());
                auto kp = crypto::keygen(BytesView(seed.data(), seed.size()));
                std::string sf = (fs::path(dir) / "seeds" / ("node_" + std::to_string(i) + ".seed")).string();
                files::write_file(sf, BytesView(seed.data(), seed.size()));
                selection::NodeRecord rec;
                rec.node_id = crypto::node_id(kp.pk);
                rec.address = host + ":" + std::to_string(base_port + i);
                rec.pk = kp.pk;
                records.push_back(rec);
            }
            files::write_text((fs::path(dir) / "membership.json").string(),
                              files::membership_to_json(records).dump(2) + "\n");
            files::write_text((fs::path(dir) / "registry.json").string(),
                              files::registry_to_json(records).dump(2) + "\n");
            json cluster{{"nodes", count},
                         {"k_inner", p_k_inner},
                         {"r_group", p_r_group},
                         {"k_outer", p_k_outer},
                         {"n_chunks", p_n_chunks},
                         {"scale_exponent", p_scale},
                         {"heartbeat_s", p_heartbeat},
                         {"cache_ttl_s", p_cache_ttl}};
            files::write_text((fs::path(dir) / "cluster.json").string(), cluster.dump(2) + "\n");
            std::cout << "initialized " << count << " node identities under " << dir << "\n";
        } else if (run->parsed()) {
            auto records = files::load_membership(membership_path);
            json cluster = json::object();
            if (!cluster_path.empty())
                cluster = json::parse(files::read_file(cluster_path));
            else {
                fs::path guess = fs::path(membership_path).parent_path() / "cluster.json";
                if (fs::exists(guess)) cluster = json::parse(files::read_file(guess));
            }
            auto seed = files::read_seed(seed_file);
            auto nc = node_config_from_cluster(cluster, listen, seed, records.size());
            nc.byzantine = byzantine;
            auto ring = std::make_shared<selection::MemoryRing>();
            for (const auto& r : records) ring->add(r);
            net::HttpNodeRunner runner(std::move(nc), ring);
            g_runner = &runner;
            std::signal(SIGINT, handle_signal);
            std::signal(SIGTERM, handle_signal);
            runner.start();
            std::cout << "node " << to_hex(runner.node().id()).substr(0, 16) << " serving on "
                      << listen << "\n"
                      << std::flush;
            runner.wait();
        } else if (store->parsed()) {
            Bytes object = files::read_file(file_path);
            auto [h, p] = net::split_address(via);
            httplib::Client cli(h, p);
            cli.set_read_timeout(600, 0);
            std::string target = "/ctrl/store";
            if (expire_days > 0) target += "?expire_days=" + std::to_string(expire_days);
            auto res = cli.Post(target.c_str(), std::string(object.begin(), object.end()),
                                "application/octet-stream");
            if (!res || res->status != 200)
                throw std::runtime_error("store failed" + (res ? ": " + res->body : " (unreachable)"));
            files::write_text(recipe_path, res->body + "\n");
            auto recipe = files::recipe_from_json(json::parse(res->body));
            std::cout << "stored " << object.size() << " bytes as "
                      << to_hex(recipe.object_hash).substr(0, 16) << "... ("
                      << recipe.chunk_hashes.size() << " chunks); recipe: " << recipe_path << "\n";
        } else if (query->parsed()) {
            std::string recipe_text(reinterpret_cast<const char*>(files::read_file(recipe_path).data()),
                                    files::read_file(recipe_path).size());
            auto recipe = files::recipe_from_json(json::parse(recipe_text));
            auto [h, p] = net::split_address(via);
            httplib::Client cli(h, p);
            cli.set_read_timeout(600, 0);
            auto res = cli.Post("/ctrl/query", recipe_text, "application/json");
            if (!res || res->status != 200)
                throw std::runtime_error("query failed" + (res ? ": " + res->body : " (unreachable)"));
            Bytes object(res->body.begin(), res->body.end());
            if (content_hash(view(object)) != recipe.object_hash)
                throw std::runtime_error("retrieved object fails the content hash check");
            files::write_file(out_file, view(object));
            std::cout << "retrieved " << object.size() << " bytes, content hash verified\n";
        } else if (evict->parsed()) {
            auto records = files::load_membership(membership_path);
            // find holders by asking every node for its view of the chunk
            json best_view;
            std::string holder_addr;
            std::vector<json> holder_views;
            for (const auto& r : records) {
                try {
                    json v = http_get(r.address, "/ctrl/view?chunk=" + chunk_hex);
                    if (v.value("holds", false)) {
                        holder_views.push_back(v);
                        if (holder_addr.empty()) {
                            holder_addr = r.address;
                            best_view = v;
                        }
                    }
                } catch (const std::exception&) {
                }
            }
            if (holder_views.empty()) throw std::runtime_error("no node holds this chunk");

            std::set<std::string> original;
            std::string victim_addr, victim_id;
            double oldest_seen = 0;
            for (const auto& m : best_view.at("members")) {
                if (!m.value("fresh", false)) continue;
                original.insert(m.at("node_id").get<std::string>());
                double fs_seen = m.at("first_seen").get<double>();
                if (!oldest) continue;
                if (victim_id.empty() || fs_seen < oldest_seen ||
                    (fs_seen == oldest_seen && m.at("node_id").get<std::string>() < victim_id)) {
                    victim_id = m.at("node_id").get<std::string>();
                    victim_addr = m.at("address").get<std::string>();
                    oldest_seen = fs_seen;
                }
            }
            if (victim_id.empty()) throw std::runtime_error("no fresh member to evict");

            auto [vh, vp] = net::split_address(victim_addr);
            httplib::Client vc(vh, vp);
            auto res = vc.Post(("/ctrl/drop?chunk=" + chunk_hex).c_str(), "", "text/plain");
            if (!res || res->status != 200) throw std::runtime_error("drop request failed");
            std::cout << "evicted " << victim_id.substr(0, 16) << "... from group " << chunk_hex.substr(0, 16)
                      << "...\n";

            // wait until a fresh member outside the original set claims storage
            auto t0 = std::chrono::steady_clock::now();
            uint32_t r_group = 0;
            for (const auto& m : best_view.at("members")) (void)m, ++r_group;
            for (;;) {
                double elapsed =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                if (elapsed > wait_seconds)
                    throw std::runtime_error("repair not observed within " +
                                             std::to_string(wait_seconds) + "s");
                std::this_thread::sleep_for(std::chrono::milliseconds(300));
                try {
                    json v = http_get(holder_addr, "/ctrl/view?chunk=" + chunk_hex);
                    for (const auto& m : v.at("members")) {
                        if (!m.value("fresh", false)) continue;
                        std::string id = m.at("node_id").get<std::string>();
                        if (!original.count(id) && id != victim_id) {
                            std::cout << "repair completed in " << fmt(elapsed) << "s: new member "
                                      << id.substr(0, 16) << "... claimed fragment "
                                      << m.at("index").get<uint64_t>() << "\n";
                            return 0;
                        }
                    }
                } catch (const std::exception&) {
                }
            }
        } else {
            std::cerr << "error: pick a node subcommand (init, run, store, query, evict)\n";
            return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

// ----------------------------------------------------------------- main ----

int main(int argc, char** argv) {
    CLI::App app{std::string(kVersion) +
                 " - durable decentralized storage: simulator, analysis, deployment"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(0, 1);

    app.add_subcommand("sim", "discrete-event simulations");
    app.add_subcommand("analyze", "durability calculator");
    app.add_subcommand("node", "local deployment");

    if (argc < 2) {
        std::cout << app.help() << "\n";
        return 0;
    }
    std::string first = argv[1];
    if (first == "sim") return cmd_sim(app, argc, argv);
    if (first == "analyze") return cmd_analyze(app, argc, argv);
    if (first == "node") return cmd_node(app, argc, argv);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    return 0;
}
