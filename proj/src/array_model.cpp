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

#include "mmalign/array_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mmalign
{

void ArrayConfig::validate() const
{
    if (num_antennas < 1)
        throw std::invalid_argument("num_antennas must be at least 1");
    if (!(spacing_over_wavelength > 0.0))
        throw std::invalid_argument("spacing_over_wavelength must be positive");
}

AngleGrid::AngleGrid(double theta_min, double theta_max, std::size_t resolution_inv)
    : theta_min_(theta_min), theta_max_(theta_max)
{
    if (resolution_inv < 1)
        throw std::invalid_argument("angle grid resolution must be at least 1");
    if (!(theta_min < theta_max))
        throw std::invalid_argument("angle grid requires theta_min < theta_max");

    const double step = (theta_max - theta_min) / double(resolution_inv);
    points_.resize(resolution_inv);
    for (std::size_t i = 0; i < resolution_inv; ++i)
        points_[i] = theta_min + double(i) * step;
}

std::size_t AngleGrid::nearest_index(double phi) const
{
    const double pos = std::round((phi - theta_min_) / spacing());
    if (pos <= 0.0)
        return 0;
    return std::min(points_.size() - 1, std::size_t(pos));
}

CVector steering_vector(const ArrayConfig& cfg, double phi)
{
    const double phase = 2.0 * std::numbers::pi * cfg.spacing_over_wavelength * std::sin(phi);
    CVector a(cfg.num_antennas);
    for (std::size_t n = 0; n < a.size(); ++n)
        a[n] = std::polar(1.0, double(n) * phase);
    return a;
}

cplx beam_gain(std::span<const cplx> w, const ArrayConfig& cfg, double phi, double sqrt_power)
{
    if (w.size() != cfg.num_antennas)
        throw std::invalid_argument("beam_gain: weight length " + std::to_string(w.size()) +
                                    " does not match array size " + std::to_string(cfg.num_antennas));

    const double phase = 2.0 * std::numbers::pi * cfg.spacing_over_wavelength * std::sin(phi);
    cplx acc = 0.0;
    for (std::size_t n = 0; n < w.size(); ++n)
        acc += std::conj(w[n]) * std::polar(1.0, double(n) * phase);
    return sqrt_power * acc;
}

CVector grid_gains(std::span<const cplx> w, const ArrayConfig& cfg, const AngleGrid& grid, double sqrt_power)
{
    CVector g(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        g[i] = beam_gain(w, cfg, grid[i], sqrt_power);
    return g;
}

double log_cn_density(cplx y, cplx mean, double variance)
{
    if (!(variance > 0.0))
        throw std::invalid_argument("cn_density: variance must be positive");
    return -std::norm(y - mean) / variance - std::log(std::numbers::pi * variance);
}

double cn_density(cplx y, cplx mean, double variance)
{
    return std::exp(log_cn_density(y, mean, variance));
}

double squared_norm(std::span<const cplx> v)
{
    double s = 0.0;
    for (const auto& x : v)
        s += std::norm(x);
    return s;
}

} // namespace mmalign
