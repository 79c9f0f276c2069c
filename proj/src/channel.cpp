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

#include "mmalign/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace mmalign
{

namespace
{
template <class... Ts>
struct overloaded : Ts...
{
    using Ts::operator()...;
};
} // namespace

void validate(const FadingProcess& proc)
{
    std::visit(overloaded{
                   [](const StaticKnown&) {},
                   [](const IIDGaussian& p) {
                       if (!(p.variance > 0.0))
                           throw std::invalid_argument("iid fading variance must be positive");
                   },
                   [](const StaticUnknown& p) {
                       if (!(p.prior_variance > 0.0))
                           throw std::invalid_argument("static fading prior variance must be positive");
                   },
                   [](const AR1Rician& p) {
                       if (!(p.g >= 0.0 && p.g <= 1.0))
                           throw std::invalid_argument("AR-1 correlation parameter g must lie in [0, 1]");
                       if (!(p.k_r >= 0.0))
                           throw std::invalid_argument("Rician factor k_r must be non-negative");
                   },
               },
               proc);
}

cplx rician_mean(double k_r, cplx gamma)
{
    return std::sqrt(k_r / (1.0 + k_r)) * gamma;
}

double rician_variance(double k_r)
{
    return 1.0 / (1.0 + k_r);
}

double g_from_coherence(double coherence_time, double slot_duration)
{
    if (!(coherence_time > 0.0) || !(slot_duration > 0.0))
        throw std::invalid_argument("coherence time and slot duration must be positive");
    return 1.0 - std::pow(0.5, 2.0 * slot_duration / coherence_time);
}

cplx initial_alpha(const FadingProcess& proc, Rng& rng)
{
    return std::visit(overloaded{
                          [](const StaticKnown& p) { return p.alpha_star; },
                          [&](const IIDGaussian& p) { return draw_cn(rng, p.mean, p.variance); },
                          [&](const StaticUnknown& p) { return draw_cn(rng, p.prior_mean, p.prior_variance); },
                          [&](const AR1Rician& p) {
                              return draw_cn(rng, rician_mean(p.k_r, p.gamma), rician_variance(p.k_r));
                          },
                      },
                      proc);
}

cplx step_fading(const FadingProcess& proc, cplx alpha, Rng& rng)
{
    return std::visit(overloaded{
                          [&](const StaticKnown&) { return alpha; },
                          [&](const StaticUnknown&) { return alpha; },
                          [&](const IIDGaussian& p) { return draw_cn(rng, p.mean, p.variance); },
                          [&](const AR1Rician& p) {
                              const double keep = std::sqrt(1.0 - p.g);
                              const cplx e = draw_cn(rng, 0.0, 1.0);
                              return alpha * keep + std::sqrt(p.k_r / (1.0 + p.k_r)) * p.gamma * (1.0 - keep) +
                                     e * std::sqrt(p.g / (1.0 + p.k_r));
                          },
                      },
                      proc);
}

NoiseConfig NoiseConfig::from_snr_db(double snr_db, double noise_variance)
{
    const double p = std::pow(10.0, snr_db / 10.0) * noise_variance;
    return {std::sqrt(p), noise_variance};
}

void NoiseConfig::validate() const
{
    if (!(noise_variance > 0.0))
        throw std::invalid_argument("noise variance must be positive");
    if (!(power_sqrt >= 0.0))
        throw std::invalid_argument("sqrt(P) must be non-negative");
}

cplx observe(const ChannelState& state, std::span<const cplx> w, const NoiseConfig& noise,
             const ArrayConfig& cfg, Rng& rng)
{
    if (std::abs(squared_norm(w) - 1.0) > 1e-6)
        throw std::invalid_argument("observe: beamforming vector must have unit norm");
    const cplx eta = draw_cn(rng, 0.0, noise.noise_variance);
    return state.alpha * beam_gain(w, cfg, state.phi, noise.power_sqrt) + eta;
}

} // namespace mmalign
