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

#ifndef MMALIGN_INFERENCE_HPP
#define MMALIGN_INFERENCE_HPP

#include "mmalign/array_model.hpp"
#include "mmalign/codebook.hpp"

#include <span>
#include <vector>

// Posterior updates over the AoA grid.
//
// Every update takes the per-hypothesis beam gains G_i = sqrt(P) w^H a(theta_i)
// of the beam that produced y (see grid_gains / HierCodebook::unit_gains) and
// the noise variance sigma^2. All products of likelihoods are formed in the
// log domain and exponentiated only after subtracting the running maximum.

namespace mmalign
{

/// Probability mass over the AoA grid. Entries are non-negative and sum to 1.
class PosteriorPhi
{
public:
    explicit PosteriorPhi(std::vector<double> mass);
    static PosteriorPhi uniform(std::size_t n);

    std::size_t size() const { return mass_.size(); }
    double operator[](std::size_t i) const { return mass_[i]; }
    std::span<const double> mass() const { return mass_; }

    // Set when the producing update could not renormalize and returned the prior.
    bool degenerate() const { return degenerate_; }

private:
    friend PosteriorPhi bayes_update(const PosteriorPhi&, std::span<const double>);
    PosteriorPhi() = default;

    std::vector<double> mass_;
    bool degenerate_ = false;
};

// Neumaier-compensated sum in index order.
double compensated_sum(std::span<const double> v);

// out_i = exp(log_w_i - max) / sum. Returns false (out untouched) when no
// entry is finite.
bool normalize_log_weights(std::span<const double> log_w, std::span<double> out);

// pi'_i proportional to exp(log_lik_i) * pi_i. Falls back to the prior with the
// degenerate flag set.
PosteriorPhi bayes_update(const PosteriorPhi& prior, std::span<const double> log_lik);

double codeword_mass(const PosteriorPhi& pi, const CoverageSet& cov);

// Likelihood CN(y; alpha* G_i, sigma^2).
PosteriorPhi update_known_alpha(const PosteriorPhi& pi, cplx y, std::span<const cplx> gains, cplx alpha_star,
                                double noise_variance);

// Likelihood CN(y; mu G_i, var |G_i|^2 + sigma^2), alpha ~ CN(mu, var) i.i.d.
PosteriorPhi update_iid_gaussian(const PosteriorPhi& pi, cplx y, std::span<const cplx> gains, cplx mean,
                                 double variance, double noise_variance);

/// Discretized fading support. Cell centers follow
///   r_j = r_min + j (r_max - r_min) / n_r,   z_k = z_min + k (z_max - z_min) / n_z,
/// with zero-based j, k, so the first center sits on r_min (z_min).
struct AlphaGrid
{
    double r_min = 0.0;
    double r_max = 2.0;
    double z_min = -0.7;
    double z_max = 0.7;
    std::size_t n_r = 50;
    std::size_t n_z = 50;

    void validate() const;
    double r(std::size_t j) const { return r_min + double(j) * (r_max - r_min) / double(n_r); }
    double z(std::size_t k) const { return z_min + double(k) * (z_max - z_min) / double(n_z); }
    cplx center(std::size_t j, std::size_t k) const { return {r(j), z(k)}; }
    std::size_t cells() const { return n_r * n_z; }
};

/// Joint mass over (AoA index i, alpha cell j, alpha cell k), stored as
/// log-mass normalized to log-sum-exp 0, i-major. The AoA marginal is kept
/// alongside and refreshed by every update.
class JointPosteriorGrid
{
public:
    static JointPosteriorGrid uniform(std::size_t n_phi, const AlphaGrid& grid);
    // mass is i-major, then j, then k; must sum to 1.
    static JointPosteriorGrid from_mass(std::size_t n_phi, const AlphaGrid& grid, std::span<const double> mass);
    // Unnormalized log weights; normalized on construction. Throws if none is finite.
    static JointPosteriorGrid from_log_weights(std::size_t n_phi, const AlphaGrid& grid, std::vector<double> log_w);

    const AlphaGrid& alpha_grid() const { return grid_; }
    std::size_t n_phi() const { return n_phi_; }
    std::size_t size() const { return log_mass_.size(); }
    std::size_t index(std::size_t i, std::size_t j, std::size_t k) const { return (i * grid_.n_r + j) * grid_.n_z + k; }

    double log_mass(std::size_t i, std::size_t j, std::size_t k) const { return log_mass_[index(i, j, k)]; }
    double mass(std::size_t i, std::size_t j, std::size_t k) const;
    std::span<const double> log_mass() const { return log_mass_; }
    // AoA marginal maintained by update_joint_inplace.
    std::span<const double> cached_marginal() const { return marginal_; }

private:
    friend bool update_joint_inplace(JointPosteriorGrid&, cplx, std::span<const cplx>, double);
    JointPosteriorGrid(std::size_t n_phi, const AlphaGrid& grid);
    void refresh_marginal();

    AlphaGrid grid_;
    std::size_t n_phi_ = 0;
    std::vector<double> log_mass_;
    std::vector<double> marginal_;
};

// pi'_{ijk} proportional to CN(y; (r_j + i z_k) G_i, sigma^2) pi_{ijk}, normalized over
// all cells. OpenMP over i. Returns false and leaves the grid unchanged when the
// update is degenerate.
bool update_joint_inplace(JointPosteriorGrid& joint, cplx y, std::span<const cplx> gains, double noise_variance);
JointPosteriorGrid update_joint(const JointPosteriorGrid& joint, cplx y, std::span<const cplx> gains,
                                double noise_variance);

// pi_i = sum_j sum_k pi_{ijk}, evaluated from the stored log-mass.
PosteriorPhi marginalize_phi(const JointPosteriorGrid& joint);

/// Per-hypothesis complex Gaussian belief CN(mean_i, variance_i) on alpha.
struct KalmanBank
{
    std::vector<cplx> means;
    std::vector<double> variances;

    static KalmanBank uniform(std::size_t n, cplx mean, double variance);
    std::size_t size() const { return means.size(); }
    void validate() const;
};

// mean_i += var_i conj(G_i) / (var_i |G_i|^2 + sigma^2) (y - mean_i G_i)
// var_i  *= sigma^2 / (var_i |G_i|^2 + sigma^2)
KalmanBank kalman_update(const KalmanBank& bank, cplx y, std::span<const cplx> gains, double noise_variance);

// Likelihood CN(y; mean_i G_i, var_i |G_i|^2 + sigma^2) using the bank as passed.
// In the Kalman episode the bank has already absorbed y.
PosteriorPhi update_kalman_bayes(const PosteriorPhi& pi, const KalmanBank& bank, cplx y, std::span<const cplx> gains,
                                 double noise_variance);

} // namespace mmalign

#endif // MMALIGN_INFERENCE_HPP
