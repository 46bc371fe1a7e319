// Copyright 2026 VACS Contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <utility>

#include "vacs/graph.hpp"
#include "vacs/rng.hpp"
#include "vacs/tensor.hpp"

namespace vacs {

// Standard (non-peephole) LSTM cell. Gate blocks are stacked in the order
// input, forget, output, candidate, so wx is [4H x D], wh is [4H x H] and
// b is [4H].
struct LstmCellParams {
    Tensor wx;
    Tensor wh;
    Tensor b;

    std::size_t hidden() const { return b.size() / 4; }
    std::size_t input_dim() const { return wx.rank() == 2 ? wx.extent(1) : 0; }

    void check() const;
};

// Affine map y = w.x + b; w is [out x in], b is [out].
struct AffineParams {
    Tensor w;
    Tensor b;

    std::size_t out_dim() const { return b.size(); }
    std::size_t in_dim() const { return w.rank() == 2 ? w.extent(1) : 0; }
};

// Weights uniform in [-init_range, init_range]; forget-gate bias 1.0.
LstmCellParams init_lstm(std::size_t input_dim, std::size_t hidden, Rng& rng,
                         double init_range = 0.08);
AffineParams init_affine(std::size_t in_dim, std::size_t out_dim, Rng& rng,
                         double init_range = 0.08);
Tensor init_uniform(std::vector<std::size_t> shape, Rng& rng, double init_range = 0.08);

// Bound-to-graph handles for a cell / affine layer.
struct LstmCellNodes {
    ad::ValId wx, wh, b;
    std::size_t hidden;
};

struct AffineNodes {
    ad::ValId w, b;
};

LstmCellNodes bind_lstm(ad::Graph& g, const std::string& prefix, const LstmCellParams& p);
AffineNodes bind_affine(ad::Graph& g, const std::string& prefix, const AffineParams& p);

struct LstmState {
    ad::ValId h;
    ad::ValId c;
};

// One cell step inside a graph: gates i,f,o = sigmoid, candidate = tanh,
// c = f.c_prev + i.cand, h = o.tanh(c).
LstmState lstm_step(ad::Graph& g, const LstmCellNodes& cell, ad::ValId x, LstmState prev);

ad::ValId affine_apply(ad::Graph& g, const AffineNodes& a, ad::ValId x);

// Plain-value cell step for callers that do not need gradients.
std::pair<Tensor, Tensor> lstm_cell_step(const Tensor& x, const Tensor& h_prev,
                                         const Tensor& c_prev, const LstmCellParams& p);

}  // namespace vacs
