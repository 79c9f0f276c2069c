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

#ifndef MMALIGN_POLICY_HPP
#define MMALIGN_POLICY_HPP

#include "mmalign/codebook.hpp"
#include "mmalign/inference.hpp"

#include <array>
#include <vector>

namespace mmalign
{

/// Hierarchical posterior matching.
///
/// Walks down from level 1 along the larger-mass child while the mass stays
/// at or above 1/2. With (l*, k*) the deepest such node and c its larger-mass
/// child, returns whichever of the two has mass closer to 1/2; ties go to the
/// wider beam. At l* = S the leaf itself is returned. Equal-mass siblings
/// resolve to the lower index.
NodeId hiepm_select(const PosteriorPhi& pi, const HierCodebook& cb);

/// Argmax of the posterior, smallest index on ties.
std::size_t final_estimate(const PosteriorPhi& pi);

// Stage lengths for the bisection baseline: S stages of floor(tau/S) slots,
// the remainder handed out one slot each from stage S upward.
class BisectionSchedule
{
public:
    BisectionSchedule(int tau, int levels);

    int tau() const { return tau_; }
    int levels() const { return levels_; }
    int stage_length(int stage) const; // stage in [1, S]

private:
    int tau_;
    int levels_;
};

/// Trial-local state of the bisection search. current is the node whose two
/// children are being compared; level 0 denotes the (unstored) root.
struct BisectionState
{
    NodeId current{0, 1};
    int stage = 1;
    int slots_used_in_stage = 0;
    std::array<double, 2> energy{0.0, 0.0};
    std::array<int, 2> probes{0, 0};

    bool finished(const BisectionSchedule& schedule) const { return stage > schedule.levels(); }
};

// Beam for the next slot: the children of current are probed alternately,
// left first.
NodeId bisection_select(const BisectionState& state, const BisectionSchedule& schedule);

// Accumulate |y|^2 for the probed child. At the end of a stage, descend to the
// child with the larger mean energy per probe (left on ties).
void bisection_record(BisectionState& state, const BisectionSchedule& schedule, cplx y);

} // namespace mmalign

#endif // MMALIGN_POLICY_HPP
