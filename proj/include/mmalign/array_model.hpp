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

#ifndef MMALIGN_ARRAY_MODEL_HPP
#define MMALIGN_ARRAY_MODEL_HPP

#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace mmalign
{

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

// Uniform linear array: N elements with spacing d/lambda.
struct ArrayConfig
{
    std::size_t num_antennas = 64;
    double spacing_over_wavelength = 0.5;

    void validate() const;
};

// Discretized AoA hypothesis space. Grid indices are zero-based in code;
// point i sits at theta_min + i * (theta_max - theta_min) / resolution_inv.
class AngleGrid
{
public:
    AngleGrid(double theta_min, double theta_max, std::size_t resolution_inv);

    double theta_min() const { return theta_min_; }
    double theta_max() const { return theta_max_; }
    std::size_t size() const { return points_.size(); }
    std::size_t resolution_inv() const { return points_.size(); }
    // delta * (theta_max - theta_min)
    double spacing() const { return (theta_max_ - theta_min_) / double(points_.size()); }
    double operator[](std::size_t i) const { return points_[i]; }
    std::span<const double> points() const { return points_; }

    std::size_t nearest_index(double phi) const;

private:
    double theta_min_;
    double theta_max_;
    std::vector<double> points_;
};

// a(phi)_n = exp(j * n * 2*pi*d/lambda * sin(phi)), n = 0..N-1 (column vector).
CVector steering_vector(const ArrayConfig& cfg, double phi);

// sqrt(P) * w^H a(phi)
cplx beam_gain(std::span<const cplx> w, const ArrayConfig& cfg, double phi, double sqrt_power);

// sqrt(P) * w^H a(theta_i) for every grid point.
CVector grid_gains(std::span<const cplx> w, const ArrayConfig& cfg, const AngleGrid& grid, double sqrt_power);

// Circularly-symmetric complex Gaussian density CN(mean, variance) at y.
double cn_density(cplx y, cplx mean, double variance);
double log_cn_density(cplx y, cplx mean, double variance);

double squared_norm(std::span<const cplx> v);

} // namespace mmalign

#endif // MMALIGN_ARRAY_MODEL_HPP
