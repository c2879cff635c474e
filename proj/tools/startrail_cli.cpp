// Experiment runner: executes scenario files, adoption sweeps and dataset
// dumps, writing CSV outputs that downstream plotting scripts consume.
//
// Exit codes: 0 success, 2 scenario/validation error, 3 runtime error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "startrail/startrail.hpp"

namespace {

using namespace startrail;

Scenario load_scenario(const std::string& path, const std::vector<std::string>& overrides,
                       bool seed_given, std::int64_t seed) {
    Scenario sc = parse_scenario_file(path);
    for (const auto& kv : overrides) apply_override(sc, kv);
    if (seed_given) sc.run_seed = seed;
    auto errors = validate(sc);
    if (!errors.empty()) {
        std::string joined;
        for (const auto& e : errors) {
            if (!joined.empty()) joined += "; ";
            joined += e;
        }
        throw ScenarioError(joined);
    }
    return sc;
}

std::vector<double> parse_fractions(const std::string& arg) {
    std::vector<double> out;
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw ScenarioError("invalid fraction: " + item);
        }
        if (used != item.size()) throw ScenarioError("invalid fraction: " + item);
        out.push_back(v);
    }
    if (out.empty()) throw ScenarioError("fractions list is empty");
    return out;
}

std::string percent_delta(double ours, double base) {
    if (base == 0.0) return "n/a";
    double pct = (ours - base) * 100.0 / base;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%+.1f%%", pct);
    return std::string(buf);
}

void print_summary_line(const Scenario& sc, const RunMetrics& m) {
    std::cout << "scenario " << sc.name << ": p95_request_ms=" << m.p95_request_ms
              << " mean_request_ms=" << format_double(m.mean_request_ms)
              << " p95_used_bytes=" << m.p95_used_bytes
              << " total_bytes_sent_steady=" << m.total_bytes_sent_steady
              << " completed=" << m.completed_count << " failed=" << m.failed_count
              << " censored=" << m.censored_count << "\n";
}

void print_baseline_deltas(const std::string& baseline_path, const RunMetrics& m) {
    auto base = read_summary_csv(baseline_path);
    auto get = [&base](const std::string& key) {
        auto it = base.find(key);
        if (it == base.end()) throw std::runtime_error("baseline missing key: " + key);
        return std::stod(it->second);
    };
    // Read everything up front so a malformed baseline cannot leave a
    // half-printed line behind.
    double base_p95 = get("p95_request_ms");
    double base_mean = get("mean_request_ms");
    double base_traffic = get("total_bytes_sent_steady");
    double base_memory = get("p95_used_bytes");
    std::cout << "vs baseline: p95_request_ms "
              << percent_delta(static_cast<double>(m.p95_request_ms), base_p95)
              << " mean_request_ms " << percent_delta(m.mean_request_ms, base_mean)
              << " total_bytes_sent_steady "
              << percent_delta(static_cast<double>(m.total_bytes_sent_steady), base_traffic)
              << " p95_used_bytes "
              << percent_delta(static_cast<double>(m.p95_used_bytes), base_memory) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"startrail: adaptive p2p network-cache simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir = "out";
    std::string baseline_path;
    std::string fractions_arg;
    std::vector<std::string> overrides;
    std::int64_t seed = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--scenario", scenario_path, "scenario file to load")->required();
        cmd->add_option("--set", overrides, "override a scenario key, key=value (repeatable)");
        cmd->add_option("--seed", seed, "override run_seed");
    };

    CLI::App* cmd_run = app.add_subcommand("run", "execute one scenario, write CSV outputs");
    add_common(cmd_run);
    cmd_run->add_option("--out", out_dir, "output directory (created if absent)");
    cmd_run->add_option("--baseline", baseline_path,
                        "baseline summary.csv; prints percentage deltas against it");

    CLI::App* cmd_sweep = app.add_subcommand("sweep", "run the adoption sweep, write sweep.csv");
    add_common(cmd_sweep);
    cmd_sweep->add_option("--out", out_dir, "output directory (created if absent)");
    cmd_sweep->add_option("--fractions", fractions_arg,
                          "comma-separated startrail fractions (default 0,0.3,0.5,0.8,1)");

    CLI::App* cmd_dataset = app.add_subcommand("dataset", "write the scenario's dataset manifest");
    add_common(cmd_dataset);
    cmd_dataset->add_option("--out", out_dir, "output directory (created if absent)");

    CLI::App* cmd_validate = app.add_subcommand("validate", "parse and check a scenario file");
    add_common(cmd_validate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*cmd_validate) {
            Scenario sc = load_scenario(scenario_path, overrides, cmd_validate->count("--seed") > 0,
                                        seed);
            std::cout << "ok: " << sc.name << "\n";
            return 0;
        }

        if (*cmd_run) {
            Scenario sc =
                load_scenario(scenario_path, overrides, cmd_run->count("--seed") > 0, seed);
            Simulator sim(sc);
            RunMetrics m = sim.run();
            std::filesystem::create_directories(out_dir);
            write_text_file(out_dir + "/requests.csv", requests_csv(m));
            write_text_file(out_dir + "/nodes.csv", nodes_csv(m));
            write_text_file(out_dir + "/summary.csv", summary_csv(sc, m));
            print_summary_line(sc, m);
            if (!baseline_path.empty()) print_baseline_deltas(baseline_path, m);
            return 0;
        }

        if (*cmd_sweep) {
            Scenario sc =
                load_scenario(scenario_path, overrides, cmd_sweep->count("--seed") > 0, seed);
            std::vector<double> fractions{0.0, 0.3, 0.5, 0.8, 1.0};
            if (!fractions_arg.empty()) fractions = parse_fractions(fractions_arg);
            SweepResult sweep = adoption_sweep(sc, fractions);
            std::filesystem::create_directories(out_dir);
            write_text_file(out_dir + "/sweep.csv", sweep_csv(sweep));
            if (sweep.fit.degenerate) {
                std::cout << "sweep: fit degenerate (fewer than two distinct fractions)\n";
            } else {
                std::cout << "sweep: slope=" << format_double(sweep.fit.slope)
                          << " intercept=" << format_double(sweep.fit.intercept) << " over "
                          << sweep.points.size() << " points\n";
            }
            return 0;
        }

        if (*cmd_dataset) {
            Scenario sc =
                load_scenario(scenario_path, overrides, cmd_dataset->count("--seed") > 0, seed);
            Dataset d = dataset_for(sc);
            std::filesystem::create_directories(out_dir);
            write_text_file(out_dir + "/dataset.csv", dataset_csv(d));
            std::cout << "dataset: " << d.blocks.size() << " blocks, " << d.groups.size()
                      << " groups, " << d.total_bytes() << " bytes\n";
            return 0;
        }
    } catch (const ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
