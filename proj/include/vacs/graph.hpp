// Copyright 2026 VACS Contributors
// SPDX-License-Identifier: Apache-2.0
//
// Reverse-mode automatic differentiation on a flat tape. Nodes are appended
// in topological order and evaluated eagerly; backward() sweeps the tape in
// reverse. Leaves may be rebound and the whole tape re-evaluated, which is
// what the finite-difference checker uses.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vacs/tensor.hpp"

namespace vacs::ad {

using ValId = std::uint32_t;

enum class OpKind : std::uint8_t {
    Input,       // leaf: bound data
    Param,       // leaf: trainable, receives gradient
    MatVec,      // [m x n] . [n] -> [m]
    Add,         // elementwise
    Sub,
    Mul,
    AddN,        // sum of k same-shape tensors
    Scale,       // alpha * x
    AddConst,    // x + alpha
    Tanh,
    Sigmoid,
    Exp,
    Log,
    Relu,
    Concat,      // [a] ++ [b]
    Slice,       // contiguous range of a vector
    Row,         // row i of a matrix
    MaxN,        // elementwise max of k same-shape vectors
    Softmax,     // vector, max-subtracted
    LogSoftmax,  // vector, max-subtracted
    Sum,         // vector -> scalar
    Pick         // element i of a vector -> scalar
};

const char* op_name(OpKind k);

struct Node {
    OpKind kind;
    std::vector<ValId> args;
    std::size_t a = 0;      // Slice start; Row/Pick index
    std::size_t b = 0;      // Slice length
    double c = 0.0;         // Scale/AddConst constant
    Tensor value;
    Tensor grad;
    std::string name;       // leaves only
    bool bound = true;      // placeholders start unbound
};

class Graph {
public:
    // ---- leaves ----
    ValId input(std::string name, Tensor v);
    ValId input(Tensor v) { return input(std::string(), std::move(v)); }
    // Declared but not yet bound; evaluate() refuses to run until bound.
    ValId placeholder(std::string name, std::vector<std::size_t> shape);
    ValId param(std::string name, Tensor v);

    // ---- primitive ops ----
    ValId matvec(ValId w, ValId x);
    ValId add(ValId a, ValId b);
    ValId sub(ValId a, ValId b);
    ValId mul(ValId a, ValId b);
    ValId add_n(std::span<const ValId> xs);
    ValId scale(ValId x, double alpha);
    ValId add_const(ValId x, double alpha);
    ValId tanh_op(ValId x);
    ValId sigmoid(ValId x);
    ValId exp_op(ValId x);
    ValId log_op(ValId x);
    ValId relu(ValId x);
    ValId concat(ValId a, ValId b);
    ValId slice(ValId x, std::size_t start, std::size_t len);
    ValId row(ValId matrix, std::size_t i);
    ValId max_n(std::span<const ValId> xs);
    ValId softmax(ValId x);
    ValId log_softmax(ValId x);
    ValId sum(ValId x);
    ValId pick(ValId x, std::size_t i);

    // ---- composites used throughout the models ----
    // w*x + b for an affine layer stored as (matrix, bias).
    ValId affine(ValId w, ValId x, ValId b) { return add(matvec(w, x), b); }

    // ---- evaluation ----
    const Tensor& value(ValId id) const { return nodes_[id].value; }
    double scalar_value(ValId id) const;
    void rebind(ValId leaf, Tensor v);
    void recompute();

    // Names an output so evaluate() can return it.
    void mark_output(const std::string& name, ValId id);

    // Binds named inputs, re-evaluates, returns the requested outputs.
    std::map<std::string, Tensor> evaluate(const std::map<std::string, Tensor>& inputs);

    // ---- gradients ----
    // Seeds d(output)/d(output) = 1 and accumulates into every node's grad.
    void backward(ValId output);
    const Tensor& grad(ValId id) const { return nodes_[id].grad; }

    // Max over all parameter coordinates of
    //   |analytic - central difference| / max(1, |analytic|).
    double grad_check(ValId output, double step);

    const std::vector<ValId>& params() const { return params_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t leaf_by_name(const std::string& name) const;

private:
    ValId push(Node n);
    void eval_node(std::size_t i);
    void backprop_node(std::size_t i);
    const Tensor& arg_val(const Node& n, std::size_t k) const { return nodes_[n.args[k]].value; }
    Tensor& arg_grad(const Node& n, std::size_t k) { return nodes_[n.args[k]].grad; }
    [[noreturn]] void fail(std::size_t i, const std::string& what) const;
    void check_vector(std::size_t i, const Tensor& t, const char* role) const;

    std::vector<Node> nodes_;
    std::vector<ValId> params_;
    std::map<std::string, ValId> named_leaves_;
    std::map<std::string, ValId> outputs_;
};

// Closed-form KL between diagonal Gaussians given as (mean, log-variance)
// pairs. Non-graph twin of the in-graph construction in objective code.
double kl_diag_gaussian(std::span<const double> mu_q, std::span<const double> logvar_q,
                        std::span<const double> mu_p, std::span<const double> logvar_p);

// Max-subtracted softmax / log-softmax over a plain vector.
std::vector<double> softmax(std::span<const double> logits);
std::vector<double> log_softmax(std::span<const double> logits);

}  // namespace vacs::ad
