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

#ifndef MMALIGN_CODEBOOK_HPP
#define MMALIGN_CODEBOOK_HPP

#include "mmalign/array_model.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace mmalign
{

// Codeword address in the tree. level in [1, S], index in [1, 2^level].
struct NodeId
{
    int level = 1;
    int index = 1;

    friend bool operator==(const NodeId&, const NodeId&) = default;
};

// Grid indices [begin, end) covered by one codeword.
struct CoverageSet
{
    NodeId node;
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
    bool contains(std::size_t i) const { return i >= begin && i < end; }
};

// Default ridge weight relative to the mean eigenvalue trace(A A^H) / N.
inline constexpr double default_codebook_ridge = 1.0;

/// S-level hierarchical beamforming codebook.
///
/// Level l holds 2^l unit-norm codewords whose coverage sets split the angle
/// grid into equal contiguous blocks. The root (whole sector) is not stored.
/// Per-codeword gains w^H a(theta_i) on the grid are cached at construction so
/// the inference updates only need a multiply by sqrt(P).
class HierCodebook
{
public:
    // weights are ordered level by level, index ascending within a level.
    HierCodebook(ArrayConfig cfg, AngleGrid grid, std::vector<CVector> weights);

    int levels() const { return levels_; }
    std::size_t size() const { return weights_.size(); }
    const ArrayConfig& array() const { return cfg_; }
    const AngleGrid& grid() const { return grid_; }

    bool valid(NodeId node) const;
    const CVector& weights(NodeId node) const { return weights_[flat(node)]; }
    // w^H a(theta_i), i over the grid, without the sqrt(P) factor
    std::span<const cplx> unit_gains(NodeId node) const;
    CoverageSet coverage(NodeId node) const;
    NodeId leaf_containing(std::size_t grid_index) const;

    std::size_t flat(NodeId node) const;
    NodeId node_at(std::size_t flat_index) const;

private:
    ArrayConfig cfg_;
    AngleGrid grid_;
    int levels_ = 0;
    std::vector<CVector> weights_;
    std::vector<cplx> gains_;
};

// Regularized least-squares (pseudo-inverse) design:
//   w = (A A^H + eps I)^{-1} A g,  eps = ridge_factor * trace(A A^H) / N,
// with A = [a(theta_1) ... a(theta_M)] and g the 0/1 coverage indicator.
HierCodebook build_codebook(const ArrayConfig& cfg, const AngleGrid& grid, int levels,
                            double ridge_factor = default_codebook_ridge);

struct NodePair
{
    NodeId left;
    NodeId right;
};

NodePair children(const HierCodebook& cb, NodeId node);
NodeId parent(const HierCodebook& cb, NodeId node);

// Text format, one record per codeword:  l k re_0 im_0 re_1 im_1 ...
// Lines starting with '#' are comments.
void export_codebook(std::ostream& os, const HierCodebook& cb);
HierCodebook import_codebook(std::istream& is, const ArrayConfig& cfg, const AngleGrid& grid);

} // namespace mmalign

#endif // MMALIGN_CODEBOOK_HPP
