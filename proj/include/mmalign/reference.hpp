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

#ifndef MMALIGN_REFERENCE_HPP
#define MMALIGN_REFERENCE_HPP

#include "mmalign/inference.hpp"

// Serial, unoptimized versions of the OpenMP kernels. Kept for testing the
// production paths and as the baseline in bench_kernels.

namespace mmalign::reference
{

// One cell at a time with the full CN density (including its constant), then a
// single log-sum-exp normalization over the whole grid. No row skipping.
JointPosteriorGrid update_joint_serial(const JointPosteriorGrid& joint, cplx y, std::span<const cplx> gains,
                                       double noise_variance);

// Direct-domain Bayes rule: pi'_i = lik_i pi_i / sum. Underflows where the log
// domain version does not; only meaningful on well-conditioned inputs.
std::vector<double> bayes_direct(std::span<const double> prior, std::span<const double> lik);

std::vector<double> known_alpha_direct(std::span<const double> prior, cplx y, std::span<const cplx> gains,
                                       cplx alpha_star, double noise_variance);

} // namespace mmalign::reference

#endif // MMALIGN_REFERENCE_HPP
