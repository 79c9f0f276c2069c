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

#include "mmalign/codebook.hpp"

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace mmalign
{

namespace
{

int levels_for(std::size_t resolution_inv)
{
    if (!std::has_single_bit(resolution_inv) || resolution_inv < 2)
        throw std::invalid_argument("codebook: grid resolution " + std::to_string(resolution_inv) +
                                    " is not a power of two >= 2");
    return std::countr_zero(resolution_inv);
}

std::size_t codeword_count(int levels) { return (std::size_t(1) << (levels + 1)) - 2; }

} // namespace

HierCodebook::HierCodebook(ArrayConfig cfg, AngleGrid grid, std::vector<CVector> weights)
    : cfg_(cfg), grid_(std::move(grid)), levels_(levels_for(grid_.resolution_inv())), weights_(std::move(weights))
{
    cfg_.validate();
    if (weights_.size() != codeword_count(levels_))
        throw std::invalid_argument("codebook: expected " + std::to_string(codeword_count(levels_)) +
                                    " codewords, got " + std::to_string(weights_.size()));

    const std::size_t m = grid_.size();
    gains_.resize(weights_.size() * m);
    for (std::size_t c = 0; c < weights_.size(); ++c)
    {
        const auto& w = weights_[c];
        if (w.size() != cfg_.num_antennas)
            throw std::invalid_argument("codebook: codeword length does not match the array size");
        if (std::abs(squared_norm(w) - 1.0) > 1e-10)
            throw std::invalid_argument("codebook: codeword " + std::to_string(c) + " is not unit norm");
        for (std::size_t i = 0; i < m; ++i)
            gains_[c * m + i] = beam_gain(w, cfg_, grid_[i], 1.0);
    }
}

bool HierCodebook::valid(NodeId node) const
{
    return node.level >= 1 && node.level <= levels_ && node.index >= 1 && node.index <= (1 << node.level);
}

std::size_t HierCodebook::flat(NodeId node) const
{
    if (!valid(node))
        throw std::out_of_range("codebook: node (" + std::to_string(node.level) + "," +
                                std::to_string(node.index) + ") out of range");
    return (std::size_t(1) << node.level) - 2 + std::size_t(node.index - 1);
}

NodeId HierCodebook::node_at(std::size_t flat_index) const
{
    if (flat_index >= weights_.size())
        throw std::out_of_range("codebook: flat index out of range");
    int level = 1;
    while (flat_index >= (std::size_t(1) << (level + 1)) - 2)
        ++level;
    return {level, int(flat_index - ((std::size_t(1) << level) - 2)) + 1};
}

std::span<const cplx> HierCodebook::unit_gains(NodeId node) const
{
    const std::size_t m = grid_.size();
    return std::span<const cplx>(gains_).subspan(flat(node) * m, m);
}

CoverageSet HierCodebook::coverage(NodeId node) const
{
    if (!valid(node))
        throw std::out_of_range("codebook: coverage of an invalid node");
    const std::size_t block = grid_.size() >> node.level;
    const std::size_t begin = std::size_t(node.index - 1) * block;
    return {node, begin, begin + block};
}

NodeId HierCodebook::leaf_containing(std::size_t grid_index) const
{
    if (grid_index >= grid_.size())
        throw std::out_of_range("codebook: grid index out of range");
    const std::size_t block = grid_.size() >> levels_;
    return {levels_, int(grid_index / block) + 1};
}

HierCodebook build_codebook(const ArrayConfig& cfg, const AngleGrid& grid, int levels, double ridge_factor)
{
    cfg.validate();
    const int expected = levels_for(grid.resolution_inv());
    if (levels != expected)
        throw std::invalid_argument("codebook: S=" + std::to_string(levels) + " but grid resolution " +
                                    std::to_string(grid.resolution_inv()) + " requires S=" +
                                    std::to_string(expected));
    if (!(ridge_factor > 0.0))
        throw std::invalid_argument("codebook: ridge factor must be positive");

    const Eigen::Index n = Eigen::Index(cfg.num_antennas);
    const Eigen::Index m = Eigen::Index(grid.size());

    Eigen::MatrixXcd a(n, m);
    for (Eigen::Index i = 0; i < m; ++i)
    {
        const CVector col = steering_vector(cfg, grid[std::size_t(i)]);
        for (Eigen::Index r = 0; r < n; ++r)
            a(r, i) = col[std::size_t(r)];
    }

    Eigen::MatrixXcd gram = a * a.adjoint();
    const double eps = ridge_factor * gram.trace().real() / double(n);
    gram.diagonal().array() += eps;
    const Eigen::LLT<Eigen::MatrixXcd> llt(gram);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("codebook: regularized Gram matrix is not positive definite");

    // One target column per codeword, 1 on its coverage and 0 elsewhere.
    const std::size_t count = codeword_count(levels);
    Eigen::MatrixXcd targets = Eigen::MatrixXcd::Zero(m, Eigen::Index(count));
    std::size_t c = 0;
    for (int l = 1; l <= levels; ++l)
    {
        const Eigen::Index block = m >> l;
        for (int k = 0; k < (1 << l); ++k, ++c)
            targets.col(Eigen::Index(c)).segment(Eigen::Index(k) * block, block).setOnes();
    }

    const Eigen::MatrixXcd solved = llt.solve(a * targets);

    std::vector<CVector> weights(count, CVector(cfg.num_antennas));
    for (std::size_t col = 0; col < count; ++col)
    {
        const double norm = solved.col(Eigen::Index(col)).norm();
        for (Eigen::Index r = 0; r < n; ++r)
            weights[col][std::size_t(r)] = solved(r, Eigen::Index(col)) / norm;
    }
    return HierCodebook(cfg, grid, std::move(weights));
}

NodePair children(const HierCodebook& cb, NodeId node)
{
    if (!cb.valid(node) || node.level >= cb.levels())
        throw std::out_of_range("codebook: node (" + std::to_string(node.level) + "," +
                                std::to_string(node.index) + ") has no children");
    return {{node.level + 1, 2 * node.index - 1}, {node.level + 1, 2 * node.index}};
}

NodeId parent(const HierCodebook& cb, NodeId node)
{
    if (!cb.valid(node) || node.level <= 1)
        throw std::out_of_range("codebook: node (" + std::to_string(node.level) + "," +
                                std::to_string(node.index) + ") has no stored parent");
    return {node.level - 1, (node.index + 1) / 2};
}

void export_codebook(std::ostream& os, const HierCodebook& cb)
{
    os << "# mmalign codebook N=" << cb.array().num_antennas << " levels=" << cb.levels()
       << " codewords=" << cb.size() << '\n';
    char buf[40];
    for (std::size_t c = 0; c < cb.size(); ++c)
    {
        const NodeId node = cb.node_at(c);
        os << node.level << ' ' << node.index;
        for (const auto& x : cb.weights(node))
        {
            std::snprintf(buf, sizeof buf, " %.17g", x.real());
            os << buf;
            std::snprintf(buf, sizeof buf, " %.17g", x.imag());
            os << buf;
        }
        os << '\n';
    }
}

HierCodebook import_codebook(std::istream& is, const ArrayConfig& cfg, const AngleGrid& grid)
{
    const int levels = levels_for(grid.resolution_inv());
    std::vector<CVector> weights(codeword_count(levels));
    std::vector<bool> seen(weights.size(), false);

    // Only used for index arithmetic, so the weights can stay empty here.
    auto flat_of = [&](NodeId node) {
        if (node.level < 1 || node.level > levels || node.index < 1 || node.index > (1 << node.level))
            throw std::runtime_error("codebook import: node (" + std::to_string(node.level) + "," +
                                     std::to_string(node.index) + ") out of range");
        return (std::size_t(1) << node.level) - 2 + std::size_t(node.index - 1);
    };

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line))
    {
        ++lineno;
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream row(line);
        NodeId node;
        if (!(row >> node.level >> node.index))
            throw std::runtime_error("codebook import: malformed record on line " + std::to_string(lineno));
        const std::size_t f = flat_of(node);
        CVector w;
        double re = 0.0, im = 0.0;
        while (row >> re >> im)
            w.emplace_back(re, im);
        if (w.size() != cfg.num_antennas)
            throw std::runtime_error("codebook import: line " + std::to_string(lineno) + " has " +
                                     std::to_string(w.size()) + " weights, expected " +
                                     std::to_string(cfg.num_antennas));
        if (seen[f])
            throw std::runtime_error("codebook import: duplicate record on line " + std::to_string(lineno));
        seen[f] = true;
        weights[f] = std::move(w);
    }
    for (std::size_t f = 0; f < seen.size(); ++f)
        if (!seen[f])
            throw std::runtime_error("codebook import: missing codeword record");
    return HierCodebook(cfg, grid, std::move(weights));
}

} // namespace mmalign
