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

#include "mmalign/simulator.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace mmalign
{

namespace
{

struct AlgorithmName
{
    Algorithm algorithm;
    std::string_view name;
};

constexpr AlgorithmName algorithm_names[] = {
    {Algorithm::Alg1Joint, "alg1"},      {Algorithm::Alg2Kalman, "alg2"},
    {Algorithm::KnownAlpha, "known"},    {Algorithm::MismatchedAlpha, "mismatched"},
    {Algorithm::IIDGaussianUpdate, "iid"}, {Algorithm::Bisection, "bisection"},
};

std::uint64_t stream_salt(const ScenarioConfig& cfg, Algorithm a)
{
    return cfg.paired_randomness ? 0 : std::uint64_t(a) + 1;
}

void scale_gains(std::span<const cplx> unit, double sqrt_power, CVector& out)
{
    out.resize(unit.size());
    for (std::size_t i = 0; i < unit.size(); ++i)
        out[i] = sqrt_power * unit[i];
}

// Sample mean and its standard error, summed in trial order.
Estimate mean_estimate(std::vector<std::pair<std::uint64_t, double>> samples)
{
    if (samples.empty())
        throw std::invalid_argument("metrics need at least one trace");
    std::sort(samples.begin(), samples.end());
    const double n = double(samples.size());
    double sum = 0.0;
    for (const auto& s : samples)
        sum += s.second;
    const double mean = sum / n;
    if (samples.size() < 2)
        return {mean, 0.0};
    double ss = 0.0;
    for (const auto& s : samples)
        ss += (s.second - mean) * (s.second - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

Estimate binomial_estimate(std::size_t hits, std::size_t n)
{
    if (n == 0)
        throw std::invalid_argument("metrics need at least one trace");
    const double p = double(hits) / double(n);
    return {p, std::sqrt(p * (1.0 - p) / double(n))};
}

} // namespace

std::string_view algorithm_name(Algorithm a)
{
    for (const auto& e : algorithm_names)
        if (e.algorithm == a)
            return e.name;
    throw std::invalid_argument("unknown algorithm enumerator");
}

Algorithm parse_algorithm(std::string_view name)
{
    for (const auto& e : algorithm_names)
        if (e.name == name)
            return e.algorithm;
    throw std::invalid_argument("unknown algorithm '" + std::string(name) +
                                "' (expected alg1, alg2, known, mismatched, iid, bisection)");
}

std::vector<Algorithm> all_algorithms()
{
    std::vector<Algorithm> out;
    for (const auto& e : algorithm_names)
        out.push_back(e.algorithm);
    return out;
}

int ScenarioConfig::levels() const
{
    return std::countr_zero(resolution_inv);
}

void ScenarioConfig::validate() const
{
    array.validate();
    if (!std::has_single_bit(resolution_inv) || resolution_inv < 2)
        throw std::invalid_argument("resolution_inv must be a power of two >= 2 (got " +
                                    std::to_string(resolution_inv) + ")");
    if (!(theta_min < theta_max))
        throw std::invalid_argument("theta_min must be below theta_max");
    if (!(noise_variance > 0.0))
        throw std::invalid_argument("noise_variance must be positive");
    if (snr_db.empty())
        throw std::invalid_argument("at least one SNR point is required");
    for (double s : snr_db)
        if (!std::isfinite(s))
            throw std::invalid_argument("SNR points must be finite");
    mmalign::validate(fading);
    if (!(prior_variance > 0.0))
        throw std::invalid_argument("prior_variance must be positive");
    if (!(mismatch_variance >= 0.0))
        throw std::invalid_argument("mismatch_variance must be non-negative");
    alpha_grid.validate();
    if (tau < 1)
        throw std::invalid_argument("tau must be at least 1");
    if (frame_slots <= tau)
        throw std::invalid_argument("frame_slots (T) must exceed tau");
    if (trials < 1)
        throw std::invalid_argument("trials must be at least 1");
    if (algorithms.empty())
        throw std::invalid_argument("at least one algorithm is required");
    for (Algorithm a : algorithms)
        if (a == Algorithm::Bisection && tau < 2 * levels())
            throw std::invalid_argument("bisection needs tau >= 2S (tau=" + std::to_string(tau) +
                                        ", S=" + std::to_string(levels()) + ")");
}

namespace
{
HierCodebook build_for(const ScenarioConfig& cfg)
{
    cfg.validate();
    return build_codebook(cfg.array, AngleGrid(cfg.theta_min, cfg.theta_max, cfg.resolution_inv), cfg.levels(),
                          cfg.codebook_ridge);
}
} // namespace

Scenario::Scenario(ScenarioConfig cfg) : cfg_(std::move(cfg)), codebook_(build_for(cfg_)) {}

EpisodeTrace run_episode(const Scenario& scenario, Algorithm algorithm, double snr_db, std::uint64_t trial,
                         const BeliefObserver& observer)
{
    const ScenarioConfig& cfg = scenario.config();
    const HierCodebook& cb = scenario.codebook();
    const AngleGrid& grid = scenario.grid();
    const std::size_t m = grid.size();
    const NoiseConfig noise = NoiseConfig::from_snr_db(snr_db, cfg.noise_variance);

    const std::uint64_t salt = stream_salt(cfg, algorithm);
    Rng channel_rng = make_stream(cfg.seed, trial, Stream::Channel, salt);
    Rng noise_rng = make_stream(cfg.seed, trial, Stream::Noise, salt);
    Rng policy_rng = make_stream(cfg.seed, trial, Stream::Policy, salt);

    EpisodeTrace trace;
    trace.algorithm = algorithm;
    trace.snr_db = snr_db;
    trace.trial = trial;

    ChannelState state;
    if (cfg.off_grid)
    {
        std::uniform_real_distribution<double> u(cfg.theta_min, cfg.theta_max);
        state.phi = u(channel_rng);
        state.phi_index = grid.nearest_index(state.phi);
    }
    else
    {
        std::uniform_int_distribution<std::size_t> u(0, m - 1);
        state.phi_index = u(channel_rng);
        state.phi = grid[state.phi_index];
    }
    trace.true_phi_index = state.phi_index;
    trace.true_phi = state.phi;

    // Beliefs; only the ones the algorithm needs are touched.
    PosteriorPhi pi = PosteriorPhi::uniform(m);
    std::optional<JointPosteriorGrid> joint;
    std::optional<KalmanBank> bank;
    std::optional<BisectionSchedule> schedule;
    BisectionState bisection;
    cplx alpha_hat = 0.0;

    switch (algorithm)
    {
    case Algorithm::Alg1Joint:
        joint = JointPosteriorGrid::uniform(m, cfg.alpha_grid);
        break;
    case Algorithm::Alg2Kalman:
        bank = KalmanBank::uniform(m, cfg.prior_mean, cfg.prior_variance);
        break;
    case Algorithm::MismatchedAlpha:
        alpha_hat = draw_cn(policy_rng, cfg.mismatch_mean, cfg.mismatch_variance);
        break;
    case Algorithm::Bisection:
        schedule.emplace(cfg.tau, cb.levels());
        break;
    case Algorithm::KnownAlpha:
    case Algorithm::IIDGaussianUpdate:
        break;
    }

    trace.steps.reserve(std::size_t(cfg.tau));
    CVector gains;
    for (int t = 1; t <= cfg.tau; ++t)
    {
        state.alpha = t == 1 ? initial_alpha(cfg.fading, channel_rng) : step_fading(cfg.fading, state.alpha, channel_rng);

        const NodeId beam = algorithm == Algorithm::Bisection ? bisection_select(bisection, *schedule)
                                                              : hiepm_select(pi, cb);
        const cplx y = observe(state, cb.weights(beam), noise, cfg.array, noise_rng);
        scale_gains(cb.unit_gains(beam), noise.power_sqrt, gains);

        bool degenerate = false;
        switch (algorithm)
        {
        case Algorithm::Alg1Joint:
            degenerate = !update_joint_inplace(*joint, y, gains, noise.noise_variance);
            pi = PosteriorPhi(std::vector<double>(joint->cached_marginal().begin(), joint->cached_marginal().end()));
            break;
        case Algorithm::Alg2Kalman:
            *bank = kalman_update(*bank, y, gains, noise.noise_variance);
            pi = update_kalman_bayes(pi, *bank, y, gains, noise.noise_variance);
            degenerate = pi.degenerate();
            break;
        case Algorithm::KnownAlpha:
            pi = update_known_alpha(pi, y, gains, state.alpha, noise.noise_variance);
            degenerate = pi.degenerate();
            break;
        case Algorithm::MismatchedAlpha:
            pi = update_known_alpha(pi, y, gains, alpha_hat, noise.noise_variance);
            degenerate = pi.degenerate();
            break;
        case Algorithm::IIDGaussianUpdate:
            pi = update_iid_gaussian(pi, y, gains, cfg.prior_mean, cfg.prior_variance, noise.noise_variance);
            degenerate = pi.degenerate();
            break;
        case Algorithm::Bisection:
            bisection_record(bisection, *schedule, y);
            break;
        }

        trace.steps.push_back({t, beam, y, state.alpha, degenerate});
        if (observer && algorithm != Algorithm::Bisection)
            observer(t, pi.mass());
    }

    if (algorithm == Algorithm::Bisection)
    {
        trace.final_beam = bisection.current;
        trace.estimate_index = cb.coverage(bisection.current).begin;
    }
    else
    {
        trace.estimate_index = final_estimate(pi);
        trace.final_beam = cb.leaf_containing(trace.estimate_index);
    }
    trace.terminal_gain = std::norm(beam_gain(cb.weights(trace.final_beam), cfg.array, state.phi, 1.0));
    return trace;
}

Estimate error_probability(std::span<const EpisodeTrace> traces, const HierCodebook& cb)
{
    std::size_t wrong = 0;
    for (const auto& tr : traces)
        if (!(tr.final_beam == cb.leaf_containing(tr.true_phi_index)))
            ++wrong;
    return binomial_estimate(wrong, traces.size());
}

Estimate outage_probability(std::span<const EpisodeTrace> traces, const AngleGrid& grid)
{
    const double tol = grid.spacing() * (1.0 + 1e-9);
    std::size_t out = 0;
    for (const auto& tr : traces)
        if (std::abs(grid[tr.estimate_index] - tr.true_phi) > tol)
            ++out;
    return binomial_estimate(out, traces.size());
}

Estimate spectral_efficiency(std::span<const EpisodeTrace> traces, int frame_slots, int tau, const NoiseConfig& noise)
{
    if (frame_slots < tau || frame_slots <= 0)
        throw std::invalid_argument("spectral_efficiency: need T >= tau and T > 0");
    const double payload = double(frame_slots - tau) / double(frame_slots);
    const double p = noise.power_sqrt * noise.power_sqrt;
    std::vector<std::pair<std::uint64_t, double>> samples;
    samples.reserve(traces.size());
    for (const auto& tr : traces)
        samples.emplace_back(tr.trial, payload * std::log2(1.0 + p * tr.terminal_gain / noise.noise_variance));
    return mean_estimate(std::move(samples));
}

std::vector<MetricsRow> sweep(const Scenario& scenario, const SweepOptions& options)
{
    const ScenarioConfig& cfg = scenario.config();
    const int workers = options.workers > 0 ? options.workers : omp_get_max_threads();
    const auto n = std::ptrdiff_t(cfg.trials);

    std::vector<MetricsRow> rows;
    std::vector<EpisodeTrace> traces(cfg.trials);
    for (Algorithm algorithm : cfg.algorithms)
    {
        for (double snr : cfg.snr_db)
        {
            const auto start = std::chrono::steady_clock::now();
            std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic, 4) num_threads(workers)
            for (std::ptrdiff_t trial = 0; trial < n; ++trial)
            {
                try
                {
                    traces[std::size_t(trial)] = run_episode(scenario, algorithm, snr, std::uint64_t(trial));
                }
                catch (...)
                {
#pragma omp critical(mmalign_sweep_failure)
                    if (!failure)
                        failure = std::current_exception();
                }
            }
            if (failure)
                std::rethrow_exception(failure);

            MetricsRow row;
            row.algorithm = algorithm;
            row.snr_db = snr;
            row.trials = cfg.trials;
            row.poe = error_probability(traces, scenario.codebook());
            row.outage = outage_probability(traces, scenario.grid());
            row.se_bits = spectral_efficiency(traces, cfg.frame_slots, cfg.tau,
                                              NoiseConfig::from_snr_db(snr, cfg.noise_variance));
            if (options.record_wall_time)
                row.wall_ms =
                    std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
            rows.push_back(row);

            if (options.on_block)
                options.on_block(algorithm, snr, traces);
        }
    }
    return rows;
}

void write_metrics_csv(std::ostream& os, std::span<const MetricsRow> rows)
{
    os << "algorithm,snr_db,trials,poe,poe_se,outage,outage_se,se_bits,se_se,wall_ms\n";
    char buf[512];
    for (const auto& r : rows)
    {
        std::snprintf(buf, sizeof buf, "%s,%.9g,%zu,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                      std::string(algorithm_name(r.algorithm)).c_str(), r.snr_db, r.trials, r.poe.value,
                      r.poe.std_error, r.outage.value, r.outage.std_error, r.se_bits.value, r.se_bits.std_error,
                      r.wall_ms);
        os << buf;
    }
}

void write_trace_csv_header(std::ostream& os)
{
    os << "algorithm,snr_db,trial,t,level,k,re_y,im_y,re_alpha,im_alpha\n";
}

void write_trace_csv(std::ostream& os, std::span<const EpisodeTrace> traces)
{
    char buf[512];
    for (const auto& tr : traces)
        for (const auto& s : tr.steps)
        {
            std::snprintf(buf, sizeof buf, "%s,%.9g,%llu,%d,%d,%d,%.17g,%.17g,%.17g,%.17g\n",
                          std::string(algorithm_name(tr.algorithm)).c_str(), tr.snr_db,
                          static_cast<unsigned long long>(tr.trial), s.t, s.beam.level, s.beam.index, s.y.real(),
                          s.y.imag(), s.alpha.real(), s.alpha.imag());
            os << buf;
        }
}

} // namespace mmalign
