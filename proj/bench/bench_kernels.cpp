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

// Joint-grid update: OpenMP kernel vs. the serial reference, plus a full
// episode per algorithm.
//
//   bench_kernels [repeats]

#include "mmalign/reference.hpp"
#include "mmalign/simulator.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>

using namespace mmalign;

namespace
{

template <class F>
double time_ms(int repeats, F&& f)
{
    const auto start = std::chrono::steady_clock::now();
    for (int r = 0; r < repeats; ++r)
        f();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count() / repeats;
}

} // namespace

int main(int argc, char** argv)
{
    const int repeats = argc > 1 ? std::atoi(argv[1]) : 20;
    const ScenarioConfig cfg;
    const Scenario scenario(cfg);
    const auto& cb = scenario.codebook();
    const double sqrt_p = 1.0;

    CVector gains;
    for (const auto& g : cb.unit_gains({3, 2}))
        gains.push_back(sqrt_p * g);
    const cplx y{0.8, -0.3};

    std::printf("threads available: %d\n", omp_get_max_threads());
    std::printf("joint grid %zu x %zu x %zu\n", scenario.grid().size(), cfg.alpha_grid.n_r, cfg.alpha_grid.n_z);

    auto fresh = JointPosteriorGrid::uniform(scenario.grid().size(), cfg.alpha_grid);
    auto grid = fresh;
    const double t_omp = time_ms(repeats, [&] {
        grid = fresh;
        update_joint_inplace(grid, y, gains, cfg.noise_variance);
    });
    const double t_ser = time_ms(repeats, [&] { (void)reference::update_joint_serial(fresh, y, gains, cfg.noise_variance); });

    double max_diff = 0.0;
    const auto ref = reference::update_joint_serial(fresh, y, gains, cfg.noise_variance);
    for (std::size_t c = 0; c < ref.size(); ++c)
        max_diff = std::max(max_diff, std::abs(std::exp(ref.log_mass()[c]) - std::exp(grid.log_mass()[c])));

    std::printf("update_joint  openmp %9.3f ms   serial reference %9.3f ms   speedup %.2fx   max |diff| %.3g\n",
                t_omp, t_ser, t_ser / t_omp, max_diff);

    for (Algorithm a : all_algorithms())
    {
        std::uint64_t trial = 0;
        const int n = a == Algorithm::Alg1Joint ? std::max(1, repeats / 4) : repeats * 10;
        const double t = time_ms(n, [&] { (void)run_episode(scenario, a, 0.0, trial++); });
        std::printf("episode %-10s %9.3f ms\n", std::string(algorithm_name(a)).c_str(), t);
    }
    return 0;
}
