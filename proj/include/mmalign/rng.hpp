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

#ifndef MMALIGN_RNG_HPP
#define MMALIGN_RNG_HPP

#include "mmalign/array_model.hpp"

#include <cstdint>
#include <random>

namespace mmalign
{

using Rng = std::mt19937_64;

// Independent sub-streams of one trial. Channel drives AoA and the fading
// path, Noise the receiver noise, Policy any per-trial policy draw.
enum class Stream : std::uint64_t
{
    Channel = 1,
    Noise = 2,
    Policy = 3,
};

std::uint64_t splitmix64(std::uint64_t x);

// Counter-based derivation: identical (master, trial, stream, salt) always
// gives the same engine state.
Rng make_stream(std::uint64_t master_seed, std::uint64_t trial, Stream stream, std::uint64_t salt = 0);

// Draw from CN(mean, variance); real and imaginary parts each get variance/2.
cplx draw_cn(Rng& rng, cplx mean, double variance);

} // namespace mmalign

#endif // MMALIGN_RNG_HPP
