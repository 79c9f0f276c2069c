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

#include "mmalign/reference.hpp"

#include <stdexcept>

namespace mmalign::reference
{

JointPosteriorGrid update_joint_serial(const JointPosteriorGrid& joint, cplx y, std::span<const cplx> gains,
                                       double noise_variance)
{
    if (gains.size() != joint.n_phi())
        throw std::invalid_argument("update_joint_serial: gain vector size mismatch");
    const AlphaGrid& ag = joint.alpha_grid();
    std::vector<double> logw(joint.size());
    for (std::size_t i = 0; i < joint.n_phi(); ++i)
        for (std::size_t j = 0; j < ag.n_r; ++j)
            for (std::size_t k = 0; k < ag.n_z; ++k)
            {
                const std::size_t c = joint.index(i, j, k);
                logw[c] = joint.log_mass()[c] + log_cn_density(y, ag.center(j, k) * gains[i], noise_variance);
            }
    return JointPosteriorGrid::from_log_weights(joint.n_phi(), ag, std::move(logw));
}

std::vector<double> bayes_direct(std::span<const double> prior, std::span<const double> lik)
{
    if (prior.size() != lik.size())
        throw std::invalid_argument("bayes_direct: size mismatch");
    std::vector<double> out(prior.size());
    double s = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i)
    {
        out[i] = prior[i] * lik[i];
        s += out[i];
    }
    for (auto& x : out)
        x /= s;
    return out;
}

std::vector<double> known_alpha_direct(std::span<const double> prior, cplx y, std::span<const cplx> gains,
                                       cplx alpha_star, double noise_variance)
{
    std::vector<double> lik(gains.size());
    for (std::size_t i = 0; i < lik.size(); ++i)
        lik[i] = cn_density(y, alpha_star * gains[i], noise_variance);
    return bayes_direct(prior, lik);
}

} // namespace mmalign::reference
