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

#include "mmalign/policy.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mmalign
{

namespace
{

struct Scored
{
    NodeId node;
    double mass;
};

// Larger-mass child of node, left on ties. Works for the root (level 0) too.
Scored heavier_child(const PosteriorPhi& pi, const HierCodebook& cb, NodeId node)
{
    const NodeId left{node.level + 1, 2 * node.index - 1};
    const NodeId right{node.level + 1, 2 * node.index};
    const double ml = codeword_mass(pi, cb.coverage(left));
    const double mr = codeword_mass(pi, cb.coverage(right));
    return mr > ml ? Scored{right, mr} : Scored{left, ml};
}

} // namespace

NodeId hiepm_select(const PosteriorPhi& pi, const HierCodebook& cb)
{
    if (pi.size() != cb.grid().size())
        throw std::invalid_argument("hiepm_select: posterior size does not match the codebook grid");

    Scored best = heavier_child(pi, cb, {0, 1});
    if (best.mass < 0.5)
        return best.node;

    while (best.node.level < cb.levels())
    {
        const Scored child = heavier_child(pi, cb, best.node);
        if (child.mass >= 0.5)
        {
            best = child;
            continue;
        }
        return std::abs(child.mass - 0.5) < std::abs(best.mass - 0.5) ? child.node : best.node;
    }
    return best.node;
}

std::size_t final_estimate(const PosteriorPhi& pi)
{
    std::size_t arg = 0;
    for (std::size_t i = 1; i < pi.size(); ++i)
        if (pi[i] > pi[arg])
            arg = i;
    return arg;
}

BisectionSchedule::BisectionSchedule(int tau, int levels) : tau_(tau), levels_(levels)
{
    if (levels < 1)
        throw std::invalid_argument("bisection: codebook needs at least one level");
    if (tau < 2 * levels)
        throw std::invalid_argument("bisection: tau=" + std::to_string(tau) + " is below 2S=" +
                                    std::to_string(2 * levels) + ", cannot probe both children at every level");
}

int BisectionSchedule::stage_length(int stage) const
{
    if (stage < 1 || stage > levels_)
        throw std::out_of_range("bisection: stage out of range");
    const int base = tau_ / levels_;
    const int extra = tau_ % levels_;
    return base + (stage > levels_ - extra ? 1 : 0);
}

NodeId bisection_select(const BisectionState& state, const BisectionSchedule& schedule)
{
    if (state.finished(schedule))
        throw std::logic_error("bisection: search already finished");
    const int side = state.slots_used_in_stage % 2;
    return {state.current.level + 1, 2 * state.current.index - 1 + side};
}

void bisection_record(BisectionState& state, const BisectionSchedule& schedule, cplx y)
{
    if (state.finished(schedule))
        throw std::logic_error("bisection: search already finished");
    const int side = state.slots_used_in_stage % 2;
    state.energy[side] += std::norm(y);
    state.probes[side] += 1;
    state.slots_used_in_stage += 1;

    if (state.slots_used_in_stage < schedule.stage_length(state.stage))
        return;

    const double left = state.energy[0] / double(state.probes[0]);
    const double right = state.energy[1] / double(state.probes[1]);
    state.current = {state.current.level + 1, 2 * state.current.index - (right > left ? 0 : 1)};
    state.stage += 1;
    state.slots_used_in_stage = 0;
    state.energy = {0.0, 0.0};
    state.probes = {0, 0};
}

} // namespace mmalign
