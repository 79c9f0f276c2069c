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

#include "mmalign/rng.hpp"

#include <cmath>

namespace mmalign
{

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng make_stream(std::uint64_t master_seed, std::uint64_t trial, Stream stream, std::uint64_t salt)
{
    std::uint64_t h = splitmix64(master_seed);
    h = splitmix64(h ^ trial);
    h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
    h = splitmix64(h ^ salt);
    std::seed_seq seq{std::uint32_t(h), std::uint32_t(h >> 32)};
    return Rng(seq);
}

cplx draw_cn(Rng& rng, cplx mean, double variance)
{
    if (variance <= 0.0)
        return mean;
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5 * variance));
    const double re = nd(rng);
    const double im = nd(rng);
    return mean + cplx(re, im);
}

} // namespace mmalign
