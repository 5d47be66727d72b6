#include <colav/engine.hpp>
#include <colav/network.hpp>
#include <colav/oracle.hpp>
#include <colav/rng.hpp>
#include <colav/scenario.hpp>

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

using namespace colav;

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::pair<std::string, std::string> split_kv(const std::string& s, const char* what) {
    std::size_t eq = s.find('=');
    if (eq == std::string::npos)
        throw std::runtime_error(std::string(what) + " expects key=value, got '" + s + "'");
    std::string key = trim(s.substr(0, eq));
    if (key.empty())
        throw std::runtime_error(std::string(what) + ": empty key in '" + s + "'");
    return {key, trim(s.substr(eq + 1))};
}

// Base config plus overrides, applied in order: file, --set pairs, then the
// named convenience flags (which therefore win).
ScenarioConfig make_config(const std::string& config_path, const std::vector<std::string>& sets,
                           const std::vector<std::pair<std::string, std::string>>& named) {
    ScenarioConfig cfg;
    if (config_path.empty())
        finalize_config(cfg);
    else
        cfg = load_config(config_path);
    for (const std::string& s : sets) {
        auto [key, value] = split_kv(s, "--set");
        apply_override(cfg, key, value);
    }
    for (const auto& [key, value] : named) apply_override(cfg, key, value);
    return cfg;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        std::size_t dots = tok.find("..");
        try {
            if (dots != std::string::npos) {
                std::uint64_t lo = std::stoull(tok.substr(0, dots));
                std::uint64_t hi = std::stoull(tok.substr(dots + 2));
                if (hi < lo) throw std::out_of_range("reversed");
                for (std::uint64_t v = lo; v <= hi; ++v) seeds.push_back(v);
            } else {
                seeds.push_back(std::stoull(tok));
            }
        } catch (const std::exception&) {
            throw std::runtime_error("invalid seed token '" + tok + "'");
        }
    }
    if (seeds.empty()) throw std::runtime_error("empty seed list");
    return seeds;
}

void print_bucket(const char* name, const KindStats& k) {
    std::cout << "  " << name << ": ground_truth=" << k.ground_truth << " avoided=" << k.avoided
              << " too_late=" << k.too_late << " undetected=" << k.undetected
              << " false_positive=" << k.false_positive;
    if (auto r = k.detection_rate()) std::cout << " detection_rate=" << format_num(*r);
    std::cout << "\n";
}

int do_run(const ScenarioConfig& cfg, const std::string& trace_path) {
    RunDebug dbg;
    std::ofstream trace;
    if (!trace_path.empty()) {
        trace.open(trace_path);
        if (!trace) throw std::runtime_error("cannot open trace file: " + trace_path);
        dbg.trace = &trace;
    }
    RunResult r = run_scenario(cfg, dbg);
    write_outputs(cfg, r, cfg.out_dir);

    const RunStats& s = r.stats;
    std::cout << "run: seed=" << cfg.master_seed << " duration=" << format_num(cfg.duration_s)
              << " vehicles=" << r.spawned_vehicles << " pedestrians=" << r.spawned_pedestrians
              << " bsm_sent=" << r.bsm_sent << " alerts_issued=" << r.alerts_issued << "\n";
    print_bucket("vehicle-pedestrian", s.vehicle_pedestrian);
    print_bucket("vehicle-vehicle", s.vehicle_vehicle);
    if (s.pedestrian_pedestrian.ground_truth > 0 || s.pedestrian_pedestrian.false_positive > 0)
        print_bucket("pedestrian-pedestrian", s.pedestrian_pedestrian);
    std::cout << "wrote " << cfg.out_dir << "/{report.json,collisions.csv,load.csv,alerts.csv}\n";
    return 0;
}

constexpr const char* kKpiColumns[] = {
    "vp_ground_truth",  "vp_detection_rate", "vp_avoided_rate",
    "vv_ground_truth",  "vv_detection_rate", "vv_avoided_rate",
    "false_positives",  "alerted_pairs",     "bsm_sent",
    "load_mean_msgs_per_s", "vehicles_mean_alive",
};
constexpr std::size_t kNumKpis = std::size(kKpiColumns);

std::vector<std::optional<double>> run_kpis(const RunResult& r) {
    const RunStats& s = r.stats;
    std::optional<double> load_mean;
    if (!r.load.empty()) {
        double sum = 0.0;
        for (const LoadSample& l : r.load) sum += l.msgs_per_s;
        load_mean = sum / double(r.load.size());
    }
    return {
        double(s.vehicle_pedestrian.ground_truth),
        s.vehicle_pedestrian.detection_rate(),
        s.vehicle_pedestrian.avoided_rate(),
        double(s.vehicle_vehicle.ground_truth),
        s.vehicle_vehicle.detection_rate(),
        s.vehicle_vehicle.avoided_rate(),
        double(s.total_false_positives()),
        double(s.alerted_pairs),
        double(r.bsm_sent),
        load_mean,
        r.vehicles_mean_alive,
    };
}

int do_sweep(const ScenarioConfig& base, const std::string& axis_key,
             const std::vector<std::string>& axis_values,
             const std::vector<std::uint64_t>& seeds, const std::string& out_csv, int jobs) {
    // Surface bad axis values before burning any simulation time.
    for (const std::string& v : axis_values) {
        ScenarioConfig probe = base;
        apply_override(probe, axis_key, v);
    }

    struct Job {
        const std::string* value;
        std::uint64_t seed;
    };
    std::vector<Job> grid;
    grid.reserve(axis_values.size() * seeds.size());
    for (const std::string& v : axis_values)
        for (std::uint64_t s : seeds) grid.push_back({&v, s});

    // Workers claim jobs by index, so the row order (and the file) is
    // independent of scheduling.
    std::vector<std::vector<std::optional<double>>> rows(grid.size());
    std::vector<std::string> errors(grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= grid.size()) return;
            try {
                ScenarioConfig cfg = base;
                apply_override(cfg, axis_key, *grid[i].value);
                apply_override(cfg, "master_seed", std::to_string(grid[i].seed));
                rows[i] = run_kpis(run_scenario(cfg));
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    std::size_t n_threads = jobs > 0 ? std::size_t(jobs) : std::thread::hardware_concurrency();
    n_threads = std::max<std::size_t>(1, std::min(n_threads, grid.size()));
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();

    for (std::size_t i = 0; i < grid.size(); ++i)
        if (!errors[i].empty())
            throw std::runtime_error("run (" + axis_key + "=" + *grid[i].value + ", seed " +
                                     std::to_string(grid[i].seed) + ") failed: " + errors[i]);

    std::ofstream out(out_csv);
    if (!out) throw std::runtime_error("cannot open output file: " + out_csv);
    out << "axis,value,seed";
    for (const char* c : kKpiColumns) out << "," << c;
    out << "\n";
    auto write_row = [&](const std::string& value, const std::string& seed_label,
                         const std::vector<std::optional<double>>& kpi) {
        out << axis_key << "," << value << "," << seed_label;
        for (const std::optional<double>& v : kpi) {
            out << ",";
            if (v) out << format_num(*v);
        }
        out << "\n";
    };

    std::cout << "sweep " << axis_key << ": " << grid.size() << " runs on " << n_threads
              << (n_threads == 1 ? " thread" : " threads") << "\n";
    std::size_t idx = 0;
    for (const std::string& v : axis_values) {
        std::size_t first = idx;
        for (std::uint64_t s : seeds) write_row(v, std::to_string(s), rows[idx++]);

        // Mean and half-width of the 95% normal confidence interval per
        // column, over the seeds where the value exists.
        std::vector<std::optional<double>> mean(kNumKpis), ci(kNumKpis);
        for (std::size_t k = 0; k < kNumKpis; ++k) {
            std::vector<double> xs;
            for (std::size_t i = first; i < idx; ++i)
                if (rows[i][k]) xs.push_back(*rows[i][k]);
            if (xs.empty()) continue;
            double m = 0.0;
            for (double x : xs) m += x;
            m /= double(xs.size());
            mean[k] = m;
            if (xs.size() >= 2) {
                double var = 0.0;
                for (double x : xs) var += (x - m) * (x - m);
                var /= double(xs.size() - 1);
                ci[k] = 1.96 * std::sqrt(var / double(xs.size()));
            }
        }
        write_row(v, "mean", mean);
        write_row(v, "ci95", ci);

        std::cout << "  " << axis_key << "=" << v << ":";
        for (std::size_t k = 0; k < kNumKpis; ++k)
            if (mean[k]) std::cout << " " << kKpiColumns[k] << "=" << format_num(*mean[k]);
        std::cout << "\n";
    }
    std::cout << "wrote " << out_csv << "\n";
    return 0;
}

std::string join_nums(const std::vector<double>& xs) {
    std::string out;
    for (double x : xs) {
        if (!out.empty()) out += ", ";
        out += format_num(x);
    }
    return out;
}

int do_oracle(int cases, std::uint64_t seed, int trials) {
    auto t0 = std::chrono::steady_clock::now();
    int checks = 0, failures = 0;
    auto check = [&](bool ok, const std::string& name, const std::string& detail) {
        ++checks;
        if (!ok) ++failures;
        std::cout << (ok ? "PASS" : "FAIL") << "  " << name;
        if (!detail.empty()) std::cout << "  [" << detail << "]";
        std::cout << "\n";
    };
    std::ostringstream d;

    // Randomized closed form against the independent dense-grid search.
    OracleSummary os = run_kinematics_oracle(cases, seed);
    d << os.cases << " cases, " << os.failures << " failed, max d* error "
      << format_num(os.max_d_error) << " m, max relative residual "
      << format_num(os.max_rel_residual);
    check(os.failures == 0, "closest approach matches the grid oracle", d.str());

    // With zero relative acceleration the cubic path must collapse to the
    // linear closed form.
    Rng zrng(derive_seed(seed, 201));
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
        RelativeMotion rm;
        rm.p0 = Vec2(zrng.uniform(-100.0, 100.0), zrng.uniform(-100.0, 100.0));
        rm.dv = Vec2(zrng.uniform(-30.0, 30.0), zrng.uniform(-30.0, 30.0));
        ClosestApproach lin = closest_approach_linear(rm);
        ClosestApproach quad = closest_approach_quadratic(rm);
        worst = std::max(worst, std::abs(lin.d_star - quad.d_star) / std::max(1.0, lin.d_star));
        if (lin.t_star > 0.0)
            worst = std::max(worst,
                             std::abs(lin.t_star - quad.t_star) / std::max(1.0, lin.t_star));
    }
    d.str("");
    d << "2000 cases, worst relative difference " << format_num(worst);
    check(worst <= 1e-9, "zero-acceleration quadratic equals the linear solution", d.str());

    auto roots_match = [](const std::vector<double>& got, std::vector<double> want, double tol) {
        if (got.size() != want.size()) return false;
        for (std::size_t i = 0; i < got.size(); ++i)
            if (std::abs(got[i] - want[i]) > tol) return false;
        return true;
    };
    std::vector<double> r1 = solve_cubic_real(1, -6, 11, -6);
    check(roots_match(r1, {1, 2, 3}, 1e-7), "cubic (1,-6,11,-6) has roots {1, 2, 3}",
          "got {" + join_nums(r1) + "}");
    std::vector<double> r2 = solve_cubic_real(1, -3, -10, 24);
    check(roots_match(r2, {-3, 2, 4}, 1e-7), "cubic (1,-3,-10,24) has roots {-3, 2, 4}",
          "got {" + join_nums(r2) + "}");
    std::vector<double> r3 = solve_cubic_real(0, 1, -3, 2);
    check(roots_match(r3, {1, 2}, 1e-9), "vanishing cubic term falls back to the quadratic",
          "got {" + join_nums(r3) + "}");

    // Monte-Carlo fading: delivery probability must decay with distance,
    // never favor the obstructed path, and pin the worked anchor points.
    const LinkModel link;
    const std::vector<double> dist = {0, 1, 2, 5, 10, 20, 30, 50, 75, 100, 150, 200};
    auto at = [&](double want) {
        for (std::size_t i = 0; i < dist.size(); ++i)
            if (dist[i] == want) return i;
        throw std::logic_error("distance not sampled");
    };
    std::vector<double> plos(dist.size()), pnlos(dist.size());
    Rng frng(derive_seed(seed, 202));
    for (std::size_t i = 0; i < dist.size(); ++i)
        plos[i] = v2v_delivery_probability(link, dist[i], true, frng, trials);
    for (std::size_t i = 0; i < dist.size(); ++i)
        pnlos[i] = v2v_delivery_probability(link, dist[i], false, frng, trials);

    // 0.01 slack covers Monte-Carlo noise (about 3 standard errors at the
    // default trial count).
    bool mono = true, dominated = true;
    for (std::size_t i = 0; i + 1 < dist.size(); ++i)
        if (plos[i + 1] > plos[i] + 0.01 || pnlos[i + 1] > pnlos[i] + 0.01) mono = false;
    for (std::size_t i = 0; i < dist.size(); ++i)
        if (pnlos[i] > plos[i] + 0.01) dominated = false;
    d.str("");
    d << "LOS " << format_num(plos.front()) << " -> " << format_num(plos.back()) << ", NLOS "
      << format_num(pnlos.front()) << " -> " << format_num(pnlos.back()) << " over "
      << format_num(dist.back()) << " m";
    check(mono, "delivery probability never rises with distance", d.str());
    check(dominated, "obstructed delivery never beats line of sight", "");
    check(plos[at(0)] >= 0.999 && pnlos[at(0)] >= 0.999, "point-blank delivery is certain",
          "LOS " + format_num(plos[at(0)]) + ", NLOS " + format_num(pnlos[at(0)]));
    check(plos[at(10)] > 0.99, "line-of-sight delivery at 10 m exceeds 0.99",
          format_num(plos[at(10)]));
    check(pnlos[at(200)] <= 0.05, "obstructed delivery at 200 m is negligible",
          format_num(pnlos[at(200)]));

    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "oracle: " << checks << " checks, " << failures << " failed, "
              << format_num(secs) << " s\n";
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cooperative collision avoidance simulator"};
    app.require_subcommand(1);

    std::string run_config, run_trace, run_seed, run_out, run_mode, run_pen, run_beacon,
        run_duration;
    std::vector<std::string> run_sets;
    CLI::App* run = app.add_subcommand("run", "simulate one scenario and write its reports");
    run->add_option("--config", run_config, "config file (library defaults when omitted)");
    run->add_option("--seed", run_seed, "master seed override");
    run->add_option("--out", run_out, "output directory override");
    run->add_option("--mode", run_mode, "centralized or distributed");
    run->add_option("--penetration", run_pen, "vehicle equipment rate in [0, 1]");
    run->add_option("--beaconing", run_beacon, "dynamic or fixed:<rate_hz>");
    run->add_option("--duration", run_duration, "simulated seconds");
    run->add_option("--trace", run_trace, "write the event trace to this file");
    run->add_option("--set", run_sets, "extra key=value override (repeatable)");

    std::string sw_config, sw_axis, sw_seeds, sw_mode, sw_pen, sw_beacon, sw_duration;
    std::string sw_out = "sweep.csv";
    std::vector<std::string> sw_sets;
    int sw_jobs = 0;
    CLI::App* sweep =
        app.add_subcommand("sweep", "run one scenario across an axis of values and seeds");
    sweep->add_option("--config", sw_config, "config file (library defaults when omitted)");
    sweep->add_option("--axis", sw_axis, "key=v1,v2,... (one run per value per seed)")
        ->required();
    sweep->add_option("--seeds", sw_seeds, "seed list: 1,2,3 or 1..20 or a mix")->required();
    sweep->add_option("--out", sw_out, "aggregated CSV path");
    sweep->add_option("--jobs", sw_jobs, "worker threads (default: hardware concurrency)");
    sweep->add_option("--mode", sw_mode, "centralized or distributed");
    sweep->add_option("--penetration", sw_pen, "vehicle equipment rate in [0, 1]");
    sweep->add_option("--beaconing", sw_beacon, "dynamic or fixed:<rate_hz>");
    sweep->add_option("--duration", sw_duration, "simulated seconds");
    sweep->add_option("--set", sw_sets, "extra key=value override (repeatable)");

    int or_cases = 10000, or_trials = 20000;
    std::uint64_t or_seed = 1;
    CLI::App* oracle =
        app.add_subcommand("oracle", "cross-check the analytic kernels against brute force");
    oracle->add_option("--cases", or_cases, "randomized closest-approach cases");
    oracle->add_option("--seed", or_seed, "randomization seed");
    oracle->add_option("--trials", or_trials, "Monte-Carlo trials per delivery estimate");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(run)) {
            std::vector<std::pair<std::string, std::string>> named;
            if (run->count("--seed")) named.emplace_back("master_seed", run_seed);
            if (run->count("--duration")) named.emplace_back("duration_s", run_duration);
            if (run->count("--mode")) named.emplace_back("mode", run_mode);
            if (run->count("--penetration")) named.emplace_back("penetration", run_pen);
            if (run->count("--beaconing")) named.emplace_back("beaconing", run_beacon);
            if (run->count("--out")) named.emplace_back("out_dir", run_out);
            return do_run(make_config(run_config, run_sets, named), run_trace);
        }
        if (app.got_subcommand(sweep)) {
            std::vector<std::pair<std::string, std::string>> named;
            if (sweep->count("--duration")) named.emplace_back("duration_s", sw_duration);
            if (sweep->count("--mode")) named.emplace_back("mode", sw_mode);
            if (sweep->count("--penetration")) named.emplace_back("penetration", sw_pen);
            if (sweep->count("--beaconing")) named.emplace_back("beaconing", sw_beacon);
            auto [axis_key, axis_list] = split_kv(sw_axis, "--axis");
            std::vector<std::string> values;
            std::stringstream ss(axis_list);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                tok = trim(tok);
                if (!tok.empty()) values.push_back(tok);
            }
            if (values.empty())
                throw std::runtime_error("--axis needs at least one value, got '" + sw_axis + "'");
            return do_sweep(make_config(sw_config, sw_sets, named), axis_key, values,
                            parse_seeds(sw_seeds), sw_out, sw_jobs);
        }
        return do_oracle(or_cases, or_seed, or_trials);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
