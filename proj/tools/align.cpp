// SPDX-License-Identifier: Apache-2.0
//
// mmalign: sequential mmWave beam alignment simulation
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// align: command-line front end.
//
//   align sweep    --config scenario.json --seed 7 --out metrics.csv
//   align episode  --algorithm alg1 --snr 0 --trial 3
//   align codebook --export cb.txt | --import cb.txt [--check]

#include "mmalign/config.hpp"
#include "mmalign/simulator.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace
{

using namespace mmalign;

struct CommonFlags
{
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::string snr;
    std::string algorithms;
    std::optional<int> tau;
    std::optional<bool> paired;
};

void add_common(CLI::App* app, CommonFlags& f)
{
    app->add_option("--config", f.config_path, "Scenario file (JSON)")->check(CLI::ExistingFile);
    app->add_option("--seed", f.seed, "Master seed");
    app->add_option("--trials", f.trials, "Trials per SNR point")->check(CLI::PositiveNumber);
    app->add_option("--snr-db", f.snr, "SNR points LO:HI:STEP in dB (inclusive)");
    app->add_option("--algorithms", f.algorithms, "Comma-separated: alg1,alg2,known,mismatched,iid,bisection");
    app->add_option("--tau", f.tau, "Alignment slots per episode");
    app->add_option("--paired-randomness", f.paired, "Common random numbers across algorithms (true/false)");
}

ScenarioConfig resolve(const CommonFlags& f)
{
    ConfigOverrides o;
    o.seed = f.seed;
    o.trials = f.trials;
    o.tau = f.tau;
    o.paired_randomness = f.paired;
    if (!f.snr.empty())
        o.snr_db = parse_snr_range(f.snr);
    if (!f.algorithms.empty())
        o.algorithms = parse_algorithm_list(f.algorithms);
    std::optional<std::filesystem::path> path;
    if (!f.config_path.empty())
        path = f.config_path;
    return resolve_config(path, o);
}

std::filesystem::path manifest_path(const std::filesystem::path& out)
{
    auto p = out;
    p += ".manifest.json";
    return p;
}

std::string command_line(int argc, char** argv)
{
    std::string s;
    for (int i = 0; i < argc; ++i)
    {
        if (i)
            s += ' ';
        s += argv[i];
    }
    return s;
}

int run_sweep(const CommonFlags& flags, const std::string& out, const std::string& traces_path, int workers,
              bool timing, const std::string& cmdline)
{
    const ScenarioConfig cfg = resolve(flags);
    const Scenario scenario(cfg);

    SweepOptions options;
    options.workers = workers;
    options.record_wall_time = timing;
    std::ostringstream traces;
    if (!traces_path.empty())
    {
        write_trace_csv_header(traces);
        options.on_block = [&](Algorithm, double, std::span<const EpisodeTrace> block) {
            write_trace_csv(traces, block);
        };
    }

    const auto rows = sweep(scenario, options);
    std::ostringstream metrics;
    write_metrics_csv(metrics, rows);

    RunManifest manifest;
    manifest.config = cfg;
    manifest.command = cmdline;
    manifest.timestamp = utc_timestamp();
    manifest.outputs.push_back(out);
    if (!traces_path.empty())
    {
        write_file_atomic(traces_path, traces.str());
        manifest.outputs.push_back(traces_path);
    }
    write_file_atomic(out, metrics.str());
    write_file_atomic(manifest_path(out), manifest.to_json());
    return 0;
}

int run_episode_cmd(const CommonFlags& flags, const std::string& algorithm, double snr, std::uint64_t trial,
                    const std::string& out, const std::string& cmdline)
{
    ScenarioConfig cfg = resolve(flags);
    const Algorithm alg = parse_algorithm(algorithm);
    cfg.algorithms = {alg};
    cfg.snr_db = {snr};
    cfg.validate();
    const Scenario scenario(cfg);

    std::ostringstream body;
    body << "algorithm,snr_db,trial,t,level,k,re_y,im_y,re_alpha,im_alpha,map_index,map_mass\n";
    std::vector<std::pair<std::size_t, double>> maps;
    const auto trace = run_episode(scenario, alg, snr, trial, [&](int, std::span<const double> m) {
        const auto it = std::max_element(m.begin(), m.end());
        maps.emplace_back(std::size_t(it - m.begin()), *it);
    });
    char buf[512];
    for (std::size_t s = 0; s < trace.steps.size(); ++s)
    {
        const auto& r = trace.steps[s];
        const long long map_index = s < maps.size() ? static_cast<long long>(maps[s].first) : -1;
        const double map_mass = s < maps.size() ? maps[s].second : std::nan("");
        std::snprintf(buf, sizeof buf, "%s,%.9g,%llu,%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%lld,%.9g\n",
                      std::string(algorithm_name(alg)).c_str(), snr, static_cast<unsigned long long>(trial), r.t,
                      r.beam.level, r.beam.index, r.y.real(), r.y.imag(), r.alpha.real(), r.alpha.imag(), map_index,
                      map_mass);
        body << buf;
    }

    const auto& grid = scenario.grid();
    std::fprintf(stderr, "true index %zu (%.4f deg), estimate %zu (%.4f deg), final beam (%d,%d), gain %.6g\n",
                 trace.true_phi_index, rad_to_deg(trace.true_phi), trace.estimate_index,
                 rad_to_deg(grid[trace.estimate_index]), trace.final_beam.level, trace.final_beam.index,
                 trace.terminal_gain);

    if (out.empty())
    {
        std::cout << body.str();
        return 0;
    }
    RunManifest manifest;
    manifest.config = cfg;
    manifest.command = cmdline;
    manifest.timestamp = utc_timestamp();
    manifest.outputs.push_back(out);
    write_file_atomic(out, body.str());
    write_file_atomic(manifest_path(out), manifest.to_json());
    return 0;
}

int run_codebook_cmd(const CommonFlags& flags, const std::string& export_path, const std::string& import_path,
                     bool check)
{
    const ScenarioConfig cfg = resolve(flags);
    const AngleGrid grid(cfg.theta_min, cfg.theta_max, cfg.resolution_inv);

    std::optional<HierCodebook> cb;
    if (!import_path.empty())
    {
        std::ifstream in(import_path);
        if (!in)
            throw std::runtime_error("cannot open codebook file " + import_path);
        cb.emplace(import_codebook(in, cfg.array, grid));
    }
    else
    {
        cb.emplace(build_codebook(cfg.array, grid, cfg.levels(), cfg.codebook_ridge));
    }

    if (!export_path.empty())
    {
        std::ostringstream os;
        export_codebook(os, *cb);
        write_file_atomic(export_path, os.str());
    }

    if (check || export_path.empty())
    {
        // Per level: worst in-coverage gain, best out-of-coverage gain.
        std::printf("level,codewords,min_in_gain,max_out_gain\n");
        for (int l = 1; l <= cb->levels(); ++l)
        {
            double min_in = INFINITY;
            double max_out = 0.0;
            for (int k = 1; k <= (1 << l); ++k)
            {
                const NodeId node{l, k};
                const auto cov = cb->coverage(node);
                const auto g = cb->unit_gains(node);
                for (std::size_t i = 0; i < g.size(); ++i)
                {
                    const double p = std::norm(g[i]);
                    if (cov.contains(i))
                        min_in = std::min(min_in, p);
                    else
                        max_out = std::max(max_out, p);
                }
            }
            std::printf("%d,%d,%.6g,%.6g\n", l, 1 << l, min_in, max_out);
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sequential mmWave beam alignment simulator"};
    app.set_version_flag("--version", std::string(mmalign::tool_version));
    app.require_subcommand(1);
    const std::string cmdline = command_line(argc, argv);

    CommonFlags sweep_flags;
    std::string sweep_out = "metrics.csv";
    std::string sweep_traces;
    int sweep_workers = 0;
    bool sweep_timing = false;
    auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo metrics over the SNR list");
    add_common(sweep_cmd, sweep_flags);
    sweep_cmd->add_option("--out", sweep_out, "Metrics CSV path");
    sweep_cmd->add_option("--export-traces", sweep_traces, "Per-step trace CSV path");
    sweep_cmd->add_option("--workers", sweep_workers, "Worker threads (0: all available)")
        ->check(CLI::NonNegativeNumber);
    sweep_cmd->add_flag("--timing", sweep_timing, "Fill wall_ms (makes output run-dependent)");

    CommonFlags episode_flags;
    std::string episode_alg = "alg1";
    double episode_snr = 0.0;
    std::uint64_t episode_trial = 0;
    std::string episode_out;
    auto* episode_cmd = app.add_subcommand("episode", "Run one episode and print its trace");
    add_common(episode_cmd, episode_flags);
    episode_cmd->add_option("--algorithm", episode_alg, "Algorithm name");
    episode_cmd->add_option("--snr", episode_snr, "Raw SNR in dB");
    episode_cmd->add_option("--trial", episode_trial, "Trial index (selects the random streams)");
    episode_cmd->add_option("--out", episode_out, "Trace CSV path (default: stdout)");

    CommonFlags cb_flags;
    std::string cb_export;
    std::string cb_import;
    bool cb_check = false;
    auto* cb_cmd = app.add_subcommand("codebook", "Build, export, import or inspect the codebook");
    add_common(cb_cmd, cb_flags);
    cb_cmd->add_option("--export", cb_export, "Write the codebook to this file");
    cb_cmd->add_option("--import", cb_import, "Load the codebook from this file instead of building it")
        ->check(CLI::ExistingFile);
    cb_cmd->add_flag("--check", cb_check, "Print per-level gain summary");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*sweep_cmd)
            return run_sweep(sweep_flags, sweep_out, sweep_traces, sweep_workers, sweep_timing, cmdline);
        if (*episode_cmd)
            return run_episode_cmd(episode_flags, episode_alg, episode_snr, episode_trial, episode_out, cmdline);
        if (*cb_cmd)
            return run_codebook_cmd(cb_flags, cb_export, cb_import, cb_check);
    }
    catch (const std::exception& e)
    {
        std::fprintf(stderr, "align: %s\n", e.what());
        return 1;
    }
    return 0;
}
