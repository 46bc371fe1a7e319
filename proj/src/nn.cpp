// Copyright 2026 VACS Contributors
// SPDX-License-Identifier: Apache-2.0

#include "vacs/nn.hpp"

#include <stdexcept>

namespace vacs {

void LstmCellParams::check() const {
    if (wx.rank() != 2 || wh.rank() != 2 || b.rank() != 1) {
        throw std::invalid_argument("LstmCellParams: bad tensor ranks");
    }
    const std::size_t h4 = b.size();
    if (h4 % 4 != 0 || wx.extent(0) != h4 || wh.extent(0) != h4 ||
        wh.extent(1) != h4 / 4) {
        throw std::invalid_argument("LstmCellParams: inconsistent gate shapes");
    }
}

Tensor init_uniform(std::vector<std::size_t> shape, Rng& rng, double init_range) {
    Tensor t(std::move(shape));
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-init_range, init_range);
    return t;
}

LstmCellParams init_lstm(std::size_t input_dim, std::size_t hidden, Rng& rng,
                         double init_range) {
    LstmCellParams p;
    p.wx = init_uniform({4 * hidden, input_dim}, rng, init_range);
    p.wh = init_uniform({4 * hidden, hidden}, rng, init_range);
    p.b = init_uniform({4 * hidden}, rng, init_range);
    // Forget gate starts open.
    for (std::size_t j = 0; j < hidden; ++j) p.b[hidden + j] = 1.0;
    return p;
}

AffineParams init_affine(std::size_t in_dim, std::size_t out_dim, Rng& rng,
                         double init_range) {
    AffineParams a;
    a.w = init_uniform({out_dim, in_dim}, rng, init_range);
    a.b = init_uniform({out_dim}, rng, init_range);
    return a;
}

LstmCellNodes bind_lstm(ad::Graph& g, const std::string& prefix, const LstmCellParams& p) {
    p.check();
    LstmCellNodes c;
    c.wx = g.param(prefix + ".wx", p.wx);
    c.wh = g.param(prefix + ".wh", p.wh);
    c.b = g.param(prefix + ".b", p.b);
    c.hidden = p.hidden();
    return c;
}

AffineNodes bind_affine(ad::Graph& g, const std::string& prefix, const AffineParams& p) {
    AffineNodes a;
    a.w = g.param(prefix + ".w", p.w);
    a.b = g.param(prefix + ".b", p.b);
    return a;
}

LstmState lstm_step(ad::Graph& g, const LstmCellNodes& cell, ad::ValId x, LstmState prev) {
    const std::size_t H = cell.hidden;
    ad::ValId z = g.add(g.add(g.matvec(cell.wx, x), g.matvec(cell.wh, prev.h)), cell.b);
    ad::ValId gi = g.sigmoid(g.slice(z, 0, H));
    ad::ValId gf = g.sigmoid(g.slice(z, H, H));
    ad::ValId go = g.sigmoid(g.slice(z, 2 * H, H));
    ad::ValId cand = g.tanh_op(g.slice(z, 3 * H, H));
    ad::ValId c = g.add(g.mul(gf, prev.c), g.mul(gi, cand));
    ad::ValId h = g.mul(go, g.tanh_op(c));
    return {h, c};
}

ad::ValId affine_apply(ad::Graph& g, const AffineNodes& a, ad::ValId x) {
    return g.add(g.matvec(a.w, x), a.b);
}

std::pair<Tensor, Tensor> lstm_cell_step(const Tensor& x, const Tensor& h_prev,
                                         const Tensor& c_prev, const LstmCellParams& p) {
    p.check();
    if (x.size() != p.input_dim() || h_prev.size() != p.hidden() ||
        c_prev.size() != p.hidden()) {
        throw std::invalid_argument("lstm_cell_step: dimension mismatch");
    }
    ad::Graph g;
    LstmCellNodes cell = bind_lstm(g, "cell", p);
    ad::ValId xv = g.input(x);
    LstmState s0{g.input(h_prev), g.input(c_prev)};
    LstmState s1 = lstm_step(g, cell, xv, s0);
    return {g.value(s1.h), g.value(s1.c)};
}

}  // namespace vacs
