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

#ifndef MMALIGN_SIMULATOR_HPP
#define MMALIGN_SIMULATOR_HPP

#include "mmalign/channel.hpp"
#include "mmalign/codebook.hpp"
#include "mmalign/inference.hpp"
#include "mmalign/policy.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mmalign
{

enum class Algorithm
{
    Alg1Joint,         // hiePM + joint (AoA, alpha-grid) posterior
    Alg2Kalman,        // hiePM + per-hypothesis Kalman filter on alpha
    KnownAlpha,        // hiePM with the true alpha_t every slot
    MismatchedAlpha,   // hiePM with one guessed alpha held for the whole episode
    IIDGaussianUpdate, // hiePM with the i.i.d. Gaussian fading likelihood
    Bisection,         // fixed-schedule hierarchical bisection, energy detection
};

std::string_view algorithm_name(Algorithm a);
Algorithm parse_algorithm(std::string_view name);
std::vector<Algorithm> all_algorithms();

// 2 ms coherence time spread over 28 slots.
inline constexpr double default_coherence_time_ms = 2.0;
inline constexpr double default_slot_duration_ms = 2.0 / 28.0;

struct ScenarioConfig
{
    ArrayConfig array;
    double theta_min = -std::numbers::pi / 3.0;
    double theta_max = std::numbers::pi / 3.0;
    std::size_t resolution_inv = 128;
    double codebook_ridge = default_codebook_ridge;

    double noise_variance = 1.0;
    std::vector<double> snr_db{-10.0, -5.0, 0.0, 5.0};

    FadingProcess fading = AR1Rician{g_from_coherence(default_coherence_time_ms, default_slot_duration_ms), 10.0, 1.0};
    // Kalman prior, and the moments used by the i.i.d. Gaussian update.
    cplx prior_mean = rician_mean(10.0, 1.0);
    double prior_variance = rician_variance(10.0);
    // alpha_hat ~ CN(mismatch_mean, mismatch_variance), drawn once per trial.
    cplx mismatch_mean = rician_mean(10.0, 1.0);
    double mismatch_variance = rician_variance(10.0);

    AlphaGrid alpha_grid;

    int tau = 28;
    int frame_slots = 280;

    std::vector<Algorithm> algorithms = all_algorithms();
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    // Common random numbers: every algorithm sees the same AoA, fading path and
    // noise sequence for a given trial.
    bool paired_randomness = true;
    // Draw the AoA uniformly on [theta_min, theta_max] instead of on the grid.
    bool off_grid = false;

    int levels() const;
    void validate() const;
};

/// Immutable per-scenario data shared by all trials: the angle grid and the
/// precomputed codebook.
class Scenario
{
public:
    explicit Scenario(ScenarioConfig cfg);

    const ScenarioConfig& config() const { return cfg_; }
    const AngleGrid& grid() const { return codebook_.grid(); }
    const HierCodebook& codebook() const { return codebook_; }

private:
    ScenarioConfig cfg_;
    HierCodebook codebook_;
};

struct StepRecord
{
    int t = 0; // 1-based slot
    NodeId beam;
    cplx y;
    cplx alpha;
    bool degenerate = false;
};

struct EpisodeTrace
{
    Algorithm algorithm = Algorithm::KnownAlpha;
    double snr_db = 0.0;
    std::uint64_t trial = 0;
    std::size_t true_phi_index = 0;
    double true_phi = 0.0;
    std::vector<StepRecord> steps;
    std::size_t estimate_index = 0;
    NodeId final_beam;
    // |w(phi_hat)^H a(phi)|^2 for the unit-norm final beam
    double terminal_gain = 0.0;
};

// Called after every belief update with the 1-based slot and the AoA marginal.
using BeliefObserver = std::function<void(int t, std::span<const double> marginal)>;

EpisodeTrace run_episode(const Scenario& scenario, Algorithm algorithm, double snr_db, std::uint64_t trial,
                         const BeliefObserver& observer = {});

struct Estimate
{
    double value = 0.0;
    double std_error = 0.0;
};

// Fraction of traces whose final leaf differs from the leaf containing the true AoA.
Estimate error_probability(std::span<const EpisodeTrace> traces, const HierCodebook& cb);
// Fraction with |theta_hat - phi| > delta (theta_max - theta_min).
Estimate outage_probability(std::span<const EpisodeTrace> traces, const AngleGrid& grid);
// Mean of (T - tau)/T log2(1 + P |w^H a|^2 / sigma^2).
Estimate spectral_efficiency(std::span<const EpisodeTrace> traces, int frame_slots, int tau, const NoiseConfig& noise);

struct MetricsRow
{
    Algorithm algorithm = Algorithm::KnownAlpha;
    double snr_db = 0.0;
    std::size_t trials = 0;
    Estimate poe;
    Estimate outage;
    Estimate se_bits;
    double wall_ms = 0.0;
};

struct SweepOptions
{
    int workers = 0; // 0: OpenMP default
    // Wall-clock is nondeterministic; off by default so outputs stay byte-stable.
    bool record_wall_time = false;
    std::function<void(Algorithm, double snr_db, std::span<const EpisodeTrace>)> on_block;
};

// Rows ordered by algorithm (config order), then SNR (config order).
std::vector<MetricsRow> sweep(const Scenario& scenario, const SweepOptions& options = {});

void write_metrics_csv(std::ostream& os, std::span<const MetricsRow> rows);
void write_trace_csv_header(std::ostream& os);
void write_trace_csv(std::ostream& os, std::span<const EpisodeTrace> traces);

} // namespace mmalign

#endif // MMALIGN_SIMULATOR_HPP
