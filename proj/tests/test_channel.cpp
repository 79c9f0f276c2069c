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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mmalign/channel.hpp"
#include "oracles.hpp"

#include <stdexcept>

using namespace mmalign;

namespace
{

struct Moments
{
    cplx mean;
    double variance;
};

Moments sample_moments(const std::vector<cplx>& xs)
{
    cplx m = 0.0;
    for (const auto& x : xs)
        m += x;
    m /= double(xs.size());
    double v = 0.0;
    for (const auto& x : xs)
        v += std::norm(x - m);
    return {m, v / double(xs.size() - 1)};
}

} // namespace

TEST_CASE("coherence mapping halves the amplitude correlation over one coherence time")
{
    const double g = g_from_coherence(2.0, 2.0 / 28.0);
    CHECK(g == doctest::Approx(1.0 - std::pow(0.5, 1.0 / 14.0)).epsilon(1e-14));
    CHECK(std::pow(std::sqrt(1.0 - g), 28.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(g_from_coherence(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("Rician stationary moments")
{
    CHECK(std::abs(rician_mean(10.0, 1.0) - cplx(std::sqrt(10.0 / 11.0), 0.0)) < 1e-15);
    CHECK(rician_variance(10.0) == doctest::Approx(1.0 / 11.0));
}

TEST_CASE("AR-1 with g = 0 freezes the fading")
{
    Rng rng = make_stream(1, 0, Stream::Channel);
    const FadingProcess f = AR1Rician{0.0, 10.0, 1.0};
    const cplx a0 = initial_alpha(f, rng);
    cplx a = a0;
    for (int t = 0; t < 50; ++t)
        a = step_fading(f, a, rng);
    CHECK(std::abs(a - a0) < 1e-15);
}

TEST_CASE("AR-1 preserves its stationary distribution")
{
    const double g = g_from_coherence(2.0, 2.0 / 28.0);
    const FadingProcess f = AR1Rician{g, 10.0, cplx(0.6, 0.8)};
    const int n = 40000;
    std::vector<cplx> start, later;
    std::vector<cplx> lag1;
    for (int trial = 0; trial < n; ++trial)
    {
        Rng rng = make_stream(3, std::uint64_t(trial), Stream::Channel);
        cplx a = initial_alpha(f, rng);
        start.push_back(a);
        for (int t = 0; t < 27; ++t)
            a = step_fading(f, a, rng);
        later.push_back(a);
    }
    const cplx mu = rician_mean(10.0, cplx(0.6, 0.8));
    const double var = rician_variance(10.0);
    for (const auto& xs : {start, later})
    {
        const auto m = sample_moments(xs);
        // 5 standard errors on the mean, 5 on the variance (CN fourth moment 2 var^2).
        CHECK(std::abs(m.mean - mu) < 5.0 * std::sqrt(var / n));
        CHECK(std::abs(m.variance - var) < 5.0 * var * std::sqrt(1.0 / n) * 1.5);
    }
}

TEST_CASE("AR-1 lag-one correlation is sqrt(1-g)")
{
    const double g = 0.2;
    const FadingProcess f = AR1Rician{g, 4.0, 1.0};
    const cplx mu = rician_mean(4.0, 1.0);
    const double var = rician_variance(4.0);
    const int n = 40000;
    cplx acc = 0.0;
    for (int trial = 0; trial < n; ++trial)
    {
        Rng rng = make_stream(9, std::uint64_t(trial), Stream::Channel);
        const cplx a = initial_alpha(f, rng);
        const cplx b = step_fading(f, a, rng);
        acc += (b - mu) * std::conj(a - mu);
    }
    const cplx rho = acc / double(n) / var;
    CHECK(std::abs(rho - cplx(std::sqrt(1.0 - g), 0.0)) < 5.0 / std::sqrt(double(n)));
}

TEST_CASE("static and i.i.d. processes")
{
    Rng rng = make_stream(2, 0, Stream::Channel);
    const FadingProcess known = StaticKnown{cplx(0.3, -0.4)};
    CHECK(initial_alpha(known, rng) == cplx(0.3, -0.4));
    CHECK(step_fading(known, cplx(0.3, -0.4), rng) == cplx(0.3, -0.4));

    const FadingProcess unknown = StaticUnknown{cplx(1.0, 0.0), 0.5};
    const cplx a = initial_alpha(unknown, rng);
    CHECK(step_fading(unknown, a, rng) == a);

    const FadingProcess iid = IIDGaussian{cplx(0.5, 0.5), 2.0};
    std::vector<cplx> xs;
    cplx prev = initial_alpha(iid, rng);
    for (int t = 0; t < 40000; ++t)
        xs.push_back(prev = step_fading(iid, prev, rng));
    const auto m = sample_moments(xs);
    CHECK(std::abs(m.mean - cplx(0.5, 0.5)) < 5.0 * std::sqrt(2.0 / 40000));
    CHECK(m.variance == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("fading validation")
{
    CHECK_THROWS_AS(validate(AR1Rician{1.5, 10.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(AR1Rician{0.1, -1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(IIDGaussian{1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(StaticUnknown{1.0, -1.0}), std::invalid_argument);
    CHECK_NOTHROW(validate(StaticKnown{}));
}

TEST_CASE("noise configuration from dB")
{
    const auto n = NoiseConfig::from_snr_db(10.0, 2.0);
    CHECK(n.power_sqrt * n.power_sqrt == doctest::Approx(20.0));
    CHECK(n.raw_snr() == doctest::Approx(10.0));
    CHECK_THROWS_AS((NoiseConfig{1.0, 0.0}.validate()), std::invalid_argument);
}

TEST_CASE("observation mean and noise statistics")
{
    const ArrayConfig cfg{16, 0.5};
    CVector w(16, cplx(0.25, 0.0));
    const ChannelState state{0, 0.2, cplx(0.7, -0.1)};
    const NoiseConfig noise{3.0, 0.5};
    const cplx mean = state.alpha * 3.0 * oracle::inner(w, oracle::steering(16, 0.5, 0.2));

    Rng rng = make_stream(4, 0, Stream::Noise);
    std::vector<cplx> ys;
    for (int t = 0; t < 40000; ++t)
        ys.push_back(observe(state, w, noise, cfg, rng));
    const auto m = sample_moments(ys);
    CHECK(std::abs(m.mean - mean) < 5.0 * std::sqrt(0.5 / 40000));
    CHECK(m.variance == doctest::Approx(0.5).epsilon(0.05));

    const NoiseConfig silent{3.0, 1e-30};
    CHECK(std::abs(observe(state, w, silent, cfg, rng) - mean) < 1e-12);
}

TEST_CASE("observe rejects a non-unit beamformer")
{
    const ArrayConfig cfg{4, 0.5};
    CVector w(4, cplx(1.0, 0.0));
    Rng rng(1);
    CHECK_THROWS_AS(observe(ChannelState{}, w, NoiseConfig{}, cfg, rng), std::invalid_argument);
}

TEST_CASE("random streams are reproducible and distinct")
{
    Rng a = make_stream(7, 3, Stream::Noise);
    Rng b = make_stream(7, 3, Stream::Noise);
    Rng c = make_stream(7, 3, Stream::Channel);
    Rng d = make_stream(7, 4, Stream::Noise);
    Rng e = make_stream(7, 3, Stream::Noise, 2);
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
    CHECK(x != d());
    CHECK(x != e());
}

TEST_CASE("complex normal draws have the requested moments")
{
    Rng rng = make_stream(8, 0, Stream::Policy);
    std::vector<cplx> xs;
    for (int t = 0; t < 40000; ++t)
        xs.push_back(draw_cn(rng, cplx(-1.0, 2.0), 0.3));
    const auto m = sample_moments(xs);
    CHECK(std::abs(m.mean - cplx(-1.0, 2.0)) < 5.0 * std::sqrt(0.3 / 40000));
    CHECK(m.variance == doctest::Approx(0.3).epsilon(0.05));
    CHECK(draw_cn(rng, cplx(1.0, 1.0), 0.0) == cplx(1.0, 1.0));
}
