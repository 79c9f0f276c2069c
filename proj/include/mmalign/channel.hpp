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

#ifndef MMALIGN_CHANNEL_HPP
#define MMALIGN_CHANNEL_HPP

#include "mmalign/array_model.hpp"
#include "mmalign/rng.hpp"

#include <span>
#include <variant>

namespace mmalign
{

struct StaticKnown
{
    cplx alpha_star = 1.0;
};

// Fresh CN(mean, variance) draw every slot.
struct IIDGaussian
{
    cplx mean = 1.0;
    double variance = 1.0;
};

// Drawn once from CN(prior_mean, prior_variance), then held.
struct StaticUnknown
{
    cplx prior_mean = 1.0;
    double prior_variance = 1.0;
};

// alpha_{t+1} = alpha_t sqrt(1-g) + sqrt(k_r/(1+k_r)) gamma (1 - sqrt(1-g)) + e_t sqrt(g/(1+k_r))
struct AR1Rician
{
    double g = 0.0;
    double k_r = 10.0;
    cplx gamma = 1.0;
};

using FadingProcess = std::variant<StaticKnown, IIDGaussian, StaticUnknown, AR1Rician>;

void validate(const FadingProcess& proc);

// Stationary moments of the AR-1 Rician recursion.
cplx rician_mean(double k_r, cplx gamma);
double rician_variance(double k_r);

// Correlation parameter such that the per-slot amplitude correlation sqrt(1-g)
// decays to 1/2 over one coherence time.
double g_from_coherence(double coherence_time, double slot_duration);

cplx initial_alpha(const FadingProcess& proc, Rng& rng);
cplx step_fading(const FadingProcess& proc, cplx alpha, Rng& rng);

struct ChannelState
{
    std::size_t phi_index = 0; // nearest grid point of phi
    double phi = 0.0;          // true AoA in radians
    cplx alpha = 1.0;
};

struct NoiseConfig
{
    double power_sqrt = 1.0;     // sqrt(P)
    double noise_variance = 1.0; // sigma^2

    double raw_snr() const { return power_sqrt * power_sqrt / noise_variance; }
    static NoiseConfig from_snr_db(double snr_db, double noise_variance = 1.0);
    void validate() const;
};

// y = alpha sqrt(P) w^H a(phi) + eta,  eta ~ CN(0, sigma^2).
cplx observe(const ChannelState& state, std::span<const cplx> w, const NoiseConfig& noise,
             const ArrayConfig& cfg, Rng& rng);

} // namespace mmalign

#endif // MMALIGN_CHANNEL_HPP
