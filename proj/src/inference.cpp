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

#include "mmalign/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mmalign
{

namespace
{

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// exp(x) rounds to exactly 0 below this.
constexpr double exp_underflow = -746.0;

struct Neumaier
{
    double sum = 0.0;
    double c = 0.0;

    void add(double x)
    {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            c += (sum - t) + x;
        else
            c += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + c; }
};

void check_sizes(std::size_t expected, std::size_t got, const char* what)
{
    if (expected != got)
        throw std::invalid_argument(std::string(what) + ": size mismatch (" + std::to_string(expected) + " vs " +
                                    std::to_string(got) + ")");
}

void check_noise(double noise_variance)
{
    if (!(noise_variance > 0.0))
        throw std::invalid_argument("noise variance must be positive");
}

double log_gauss(double dist2, double variance)
{
    return -dist2 / variance - std::log(std::numbers::pi * variance);
}

} // namespace

PosteriorPhi::PosteriorPhi(std::vector<double> mass) : mass_(std::move(mass))
{
    if (mass_.empty())
        throw std::invalid_argument("posterior must have at least one entry");
    for (double m : mass_)
        if (!(m >= 0.0) || !std::isfinite(m))
            throw std::invalid_argument("posterior entries must be finite and non-negative");
    const double s = compensated_sum(mass_);
    if (std::abs(s - 1.0) > 1e-9)
        throw std::invalid_argument("posterior must sum to 1 (got " + std::to_string(s) + ")");
}

PosteriorPhi PosteriorPhi::uniform(std::size_t n)
{
    return PosteriorPhi(std::vector<double>(n, 1.0 / double(n)));
}

double compensated_sum(std::span<const double> v)
{
    Neumaier acc;
    for (double x : v)
        acc.add(x);
    return acc.value();
}

bool normalize_log_weights(std::span<const double> log_w, std::span<double> out)
{
    check_sizes(log_w.size(), out.size(), "normalize_log_weights");
    double mx = neg_inf;
    for (double x : log_w)
        if (x > mx)
            mx = x;
    if (!std::isfinite(mx))
        return false;

    Neumaier acc;
    for (std::size_t i = 0; i < log_w.size(); ++i)
    {
        const double d = log_w[i] - mx;
        out[i] = d < exp_underflow ? 0.0 : std::exp(d);
        acc.add(out[i]);
    }
    const double z = acc.value();
    for (auto& x : out)
        x /= z;
    return true;
}

PosteriorPhi bayes_update(const PosteriorPhi& prior, std::span<const double> log_lik)
{
    check_sizes(prior.size(), log_lik.size(), "bayes_update");
    std::vector<double> logw(prior.size());
    for (std::size_t i = 0; i < logw.size(); ++i)
        logw[i] = prior[i] > 0.0 && !std::isnan(log_lik[i]) ? std::log(prior[i]) + log_lik[i] : neg_inf;

    PosteriorPhi out;
    out.mass_.resize(prior.size());
    if (!normalize_log_weights(logw, out.mass_))
    {
        out.mass_.assign(prior.mass().begin(), prior.mass().end());
        out.degenerate_ = true;
    }
    return out;
}

double codeword_mass(const PosteriorPhi& pi, const CoverageSet& cov)
{
    if (cov.end > pi.size() || cov.begin > cov.end)
        throw std::out_of_range("codeword_mass: coverage outside the posterior");
    return compensated_sum(pi.mass().subspan(cov.begin, cov.size()));
}

PosteriorPhi update_known_alpha(const PosteriorPhi& pi, cplx y, std::span<const cplx> gains, cplx alpha_star,
                                double noise_variance)
{
    check_sizes(pi.size(), gains.size(), "update_known_alpha");
    check_noise(noise_variance);
    std::vector<double> ll(pi.size());
    for (std::size_t i = 0; i < ll.size(); ++i)
        ll[i] = log_gauss(std::norm(y - alpha_star * gains[i]), noise_variance);
    return bayes_update(pi, ll);
}

PosteriorPhi update_iid_gaussian(const PosteriorPhi& pi, cplx y, std::span<const cplx> gains, cplx mean,
                                 double variance, double noise_variance)
{
    check_sizes(pi.size(), gains.size(), "update_iid_gaussian");
    check_noise(noise_variance);
    if (!(variance >= 0.0))
        throw std::invalid_argument("update_iid_gaussian: fading variance must be non-negative");
    std::vector<double> ll(pi.size());
    for (std::size_t i = 0; i < ll.size(); ++i)
        ll[i] = log_gauss(std::norm(y - mean * gains[i]), variance * std::norm(gains[i]) + noise_variance);
    return bayes_update(pi, ll);
}

// ---- joint grid ----------------------------------------------------------

void AlphaGrid::validate() const
{
    if (!(r_min < r_max) || !(z_min < z_max))
        throw std::invalid_argument("alpha grid requires r_min < r_max and z_min < z_max");
    if (n_r < 1 || n_z < 1)
        throw std::invalid_argument("alpha grid needs at least one cell per axis");
}

JointPosteriorGrid::JointPosteriorGrid(std::size_t n_phi, const AlphaGrid& grid)
    : grid_(grid), n_phi_(n_phi), log_mass_(n_phi * grid.cells()), marginal_(n_phi)
{
    grid_.validate();
    if (n_phi < 1)
        throw std::invalid_argument("joint posterior needs at least one AoA hypothesis");
}

JointPosteriorGrid JointPosteriorGrid::uniform(std::size_t n_phi, const AlphaGrid& grid)
{
    JointPosteriorGrid out(n_phi, grid);
    std::fill(out.log_mass_.begin(), out.log_mass_.end(), -std::log(double(out.log_mass_.size())));
    std::fill(out.marginal_.begin(), out.marginal_.end(), 1.0 / double(n_phi));
    return out;
}

JointPosteriorGrid JointPosteriorGrid::from_mass(std::size_t n_phi, const AlphaGrid& grid,
                                                 std::span<const double> mass)
{
    JointPosteriorGrid out(n_phi, grid);
    check_sizes(out.log_mass_.size(), mass.size(), "JointPosteriorGrid::from_mass");
    for (double m : mass)
        if (!(m >= 0.0) || !std::isfinite(m))
            throw std::invalid_argument("joint posterior entries must be finite and non-negative");
    const double s = compensated_sum(mass);
    if (std::abs(s - 1.0) > 1e-9)
        throw std::invalid_argument("joint posterior must sum to 1 (got " + std::to_string(s) + ")");
    for (std::size_t c = 0; c < mass.size(); ++c)
        out.log_mass_[c] = mass[c] > 0.0 ? std::log(mass[c] / s) : neg_inf;
    out.refresh_marginal();
    return out;
}

JointPosteriorGrid JointPosteriorGrid::from_log_weights(std::size_t n_phi, const AlphaGrid& grid,
                                                        std::vector<double> log_w)
{
    JointPosteriorGrid out(n_phi, grid);
    check_sizes(out.log_mass_.size(), log_w.size(), "JointPosteriorGrid::from_log_weights");
    double mx = neg_inf;
    for (double x : log_w)
        mx = std::max(mx, x);
    if (!std::isfinite(mx))
        throw std::invalid_argument("joint posterior log weights contain no finite entry");
    Neumaier acc;
    for (double x : log_w)
        acc.add(x - mx < exp_underflow ? 0.0 : std::exp(x - mx));
    const double lz = mx + std::log(acc.value());
    for (auto& x : log_w)
        x -= lz;
    out.log_mass_ = std::move(log_w);
    out.refresh_marginal();
    return out;
}

double JointPosteriorGrid::mass(std::size_t i, std::size_t j, std::size_t k) const
{
    return std::exp(log_mass(i, j, k));
}

void JointPosteriorGrid::refresh_marginal()
{
    const std::size_t cells = grid_.cells();
    for (std::size_t i = 0; i < n_phi_; ++i)
    {
        Neumaier acc;
        for (std::size_t c = 0; c < cells; ++c)
            acc.add(std::exp(log_mass_[i * cells + c]));
        marginal_[i] = acc.value();
    }
}

bool update_joint_inplace(JointPosteriorGrid& joint, cplx y, std::span<const cplx> gains, double noise_variance)
{
    check_sizes(joint.n_phi(), gains.size(), "update_joint");
    check_noise(noise_variance);

    const AlphaGrid& ag = joint.grid_;
    const std::size_t n_phi = joint.n_phi_;
    const std::size_t n_r = ag.n_r;
    const std::size_t n_z = ag.n_z;
    const std::size_t cells = ag.cells();
    const double inv_var = 1.0 / noise_variance;
    double* lm = joint.log_mass_.data();

    // Every residual must stay finite so that pass 1 keeps at least one finite cell.
    double alpha_bound = std::max({std::abs(ag.r_min), std::abs(ag.r_max)}) +
                         std::max({std::abs(ag.z_min), std::abs(ag.z_max)});
    double gain_bound = 0.0;
    for (const auto& g : gains)
    {
        if (!std::isfinite(g.real()) || !std::isfinite(g.imag()))
            return false;
        gain_bound = std::max(gain_bound, std::abs(g));
    }
    const double resid_bound = std::abs(y) + alpha_bound * gain_bound;
    if (!std::isfinite(resid_bound) || !std::isfinite(resid_bound * resid_bound * inv_var))
        return false;

    // The constant -log(pi sigma^2) cancels in the normalization and is omitted.
    std::vector<double> rs(n_r), zs(n_z);
    for (std::size_t j = 0; j < n_r; ++j)
        rs[j] = ag.r(j);
    for (std::size_t k = 0; k < n_z; ++k)
        zs[k] = ag.z(k);

    std::vector<double> row_max(n_phi, neg_inf);
    std::vector<double> row_sum(n_phi, 0.0);

    // Pass 1: accumulate the log-likelihood and track each row's maximum.
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < std::ptrdiff_t(n_phi); ++ii)
    {
        const std::size_t i = std::size_t(ii);
        const double gr = gains[i].real();
        const double gi = gains[i].imag();
        double mx = neg_inf;
        double* row = lm + i * cells;
        for (std::size_t j = 0; j < n_r; ++j)
        {
            // y - (r + iz) g, split into real arithmetic.
            const double ar = y.real() - rs[j] * gr;
            const double ai = y.imag() - rs[j] * gi;
            double* cell = row + j * n_z;
            for (std::size_t k = 0; k < n_z; ++k)
            {
                const double er = ar + zs[k] * gi;
                const double ei = ai - zs[k] * gr;
                cell[k] -= (er * er + ei * ei) * inv_var;
                mx = std::max(mx, cell[k]);
            }
        }
        row_max[i] = mx;
    }

    double global_max = neg_inf;
    for (double m : row_max)
        global_max = std::max(global_max, m);

    // Pass 2: per-row sums of exp(L - max). Rows entirely below the exp underflow
    // threshold contribute exactly zero and are skipped.
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < std::ptrdiff_t(n_phi); ++ii)
    {
        const std::size_t i = std::size_t(ii);
        if (row_max[i] - global_max < exp_underflow)
        {
            row_sum[i] = 0.0;
            continue;
        }
        const double* row = lm + i * cells;
        Neumaier acc;
        for (std::size_t c = 0; c < cells; ++c)
        {
            const double d = row[c] - global_max;
            if (d >= exp_underflow)
                acc.add(std::exp(d));
        }
        row_sum[i] = acc.value();
    }

    const double z = compensated_sum(row_sum);
    const double log_z = global_max + std::log(z);

    // Pass 3: renormalize and publish the marginal.
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < std::ptrdiff_t(n_phi); ++ii)
    {
        const std::size_t i = std::size_t(ii);
        double* row = lm + i * cells;
        for (std::size_t c = 0; c < cells; ++c)
            row[c] -= log_z;
        joint.marginal_[i] = row_sum[i] / z;
    }
    return true;
}

JointPosteriorGrid update_joint(const JointPosteriorGrid& joint, cplx y, std::span<const cplx> gains,
                                double noise_variance)
{
    JointPosteriorGrid out = joint;
    update_joint_inplace(out, y, gains, noise_variance);
    return out;
}

PosteriorPhi marginalize_phi(const JointPosteriorGrid& joint)
{
    const std::size_t cells = joint.alpha_grid().cells();
    const auto lm = joint.log_mass();
    std::vector<double> m(joint.n_phi());
    for (std::size_t i = 0; i < m.size(); ++i)
    {
        Neumaier acc;
        for (std::size_t c = 0; c < cells; ++c)
            acc.add(std::exp(lm[i * cells + c]));
        m[i] = acc.value();
    }
    // Guard against drift accumulated by repeated in-place renormalization.
    const double s = compensated_sum(m);
    for (auto& x : m)
        x /= s;
    return PosteriorPhi(std::move(m));
}

// ---- Kalman --------------------------------------------------------------

KalmanBank KalmanBank::uniform(std::size_t n, cplx mean, double variance)
{
    KalmanBank b{std::vector<cplx>(n, mean), std::vector<double>(n, variance)};
    b.validate();
    return b;
}

void KalmanBank::validate() const
{
    check_sizes(means.size(), variances.size(), "KalmanBank");
    for (double v : variances)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument("Kalman variances must be finite and non-negative");
}

KalmanBank kalman_update(const KalmanBank& bank, cplx y, std::span<const cplx> gains, double noise_variance)
{
    check_sizes(bank.size(), gains.size(), "kalman_update");
    check_noise(noise_variance);
    KalmanBank out = bank;
    for (std::size_t i = 0; i < bank.size(); ++i)
    {
        const cplx g = gains[i];
        const double v = bank.variances[i];
        const double denom = v * std::norm(g) + noise_variance;
        out.means[i] = bank.means[i] + (v * std::conj(g) / denom) * (y - bank.means[i] * g);
        out.variances[i] = v * (noise_variance / denom);
    }
    return out;
}

PosteriorPhi update_kalman_bayes(const PosteriorPhi& pi, const KalmanBank& bank, cplx y, std::span<const cplx> gains,
                                 double noise_variance)
{
    check_sizes(pi.size(), gains.size(), "update_kalman_bayes");
    check_sizes(pi.size(), bank.size(), "update_kalman_bayes");
    check_noise(noise_variance);
    std::vector<double> ll(pi.size());
    for (std::size_t i = 0; i < ll.size(); ++i)
        ll[i] = log_gauss(std::norm(y - bank.means[i] * gains[i]),
                          bank.variances[i] * std::norm(gains[i]) + noise_variance);
    return bayes_update(pi, ll);
}

} // namespace mmalign
