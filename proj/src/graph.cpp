// Copyright 2026 VACS Contributors
// SPDX-License-Identifier: Apache-2.0

#include "vacs/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vacs::ad {

const char* op_name(OpKind k) {
    switch (k) {
        case OpKind::Input: return "input";
        case OpKind::Param: return "param";
        case OpKind::MatVec: return "matvec";
        case OpKind::Add: return "add";
        case OpKind::Sub: return "sub";
        case OpKind::Mul: return "mul";
        case OpKind::AddN: return "add_n";
        case OpKind::Scale: return "scale";
        case OpKind::AddConst: return "add_const";
        case OpKind::Tanh: return "tanh";
        case OpKind::Sigmoid: return "sigmoid";
        case OpKind::Exp: return "exp";
        case OpKind::Log: return "log";
        case OpKind::Relu: return "relu";
        case OpKind::Concat: return "concat";
        case OpKind::Slice: return "slice";
        case OpKind::Row: return "row";
        case OpKind::MaxN: return "max_n";
        case OpKind::Softmax: return "softmax";
        case OpKind::LogSoftmax: return "log_softmax";
        case OpKind::Sum: return "sum";
        case OpKind::Pick: return "pick";
    }
    return "?";
}

void Graph::fail(std::size_t i, const std::string& what) const {
    throw std::runtime_error("graph node #" + std::to_string(i) + " (" +
                             op_name(nodes_[i].kind) +
                             (nodes_[i].name.empty() ? "" : " '" + nodes_[i].name + "'") +
                             "): " + what);
}

void Graph::check_vector(std::size_t i, const Tensor& t, const char* role) const {
    if (t.rank() != 1) {
        fail(i, std::string(role) + " must be a vector, got " + t.shape_str());
    }
}

ValId Graph::push(Node n) {
    nodes_.push_back(std::move(n));
    const std::size_t i = nodes_.size() - 1;
    eval_node(i);
    return static_cast<ValId>(i);
}

ValId Graph::input(std::string name, Tensor v) {
    Node n;
    n.kind = OpKind::Input;
    n.value = std::move(v);
    n.name = std::move(name);
    nodes_.push_back(std::move(n));
    const ValId id = static_cast<ValId>(nodes_.size() - 1);
    if (!nodes_[id].name.empty()) named_leaves_[nodes_[id].name] = id;
    return id;
}

ValId Graph::placeholder(std::string name, std::vector<std::size_t> shape) {
    const ValId id = input(std::move(name), Tensor(std::move(shape)));
    nodes_[id].bound = false;
    return id;
}

ValId Graph::param(std::string name, Tensor v) {
    Node n;
    n.kind = OpKind::Param;
    n.value = std::move(v);
    n.name = std::move(name);
    nodes_.push_back(std::move(n));
    const ValId id = static_cast<ValId>(nodes_.size() - 1);
    params_.push_back(id);
    if (!nodes_[id].name.empty()) named_leaves_[nodes_[id].name] = id;
    return id;
}

ValId Graph::matvec(ValId w, ValId x) {
    Node n;
    n.kind = OpKind::MatVec;
    n.args = {w, x};
    return push(std::move(n));
}

ValId Graph::add(ValId a, ValId b) {
    Node n;
    n.kind = OpKind::Add;
    n.args = {a, b};
    return push(std::move(n));
}

ValId Graph::sub(ValId a, ValId b) {
    Node n;
    n.kind = OpKind::Sub;
    n.args = {a, b};
    return push(std::move(n));
}

ValId Graph::mul(ValId a, ValId b) {
    Node n;
    n.kind = OpKind::Mul;
    n.args = {a, b};
    return push(std::move(n));
}

ValId Graph::add_n(std::span<const ValId> xs) {
    if (xs.empty()) throw std::invalid_argument("add_n: empty argument list");
    Node n;
    n.kind = OpKind::AddN;
    n.args.assign(xs.begin(), xs.end());
    return push(std::move(n));
}

ValId Graph::scale(ValId x, double alpha) {
    Node n;
    n.kind = OpKind::Scale;
    n.args = {x};
    n.c = alpha;
    return push(std::move(n));
}

ValId Graph::add_const(ValId x, double alpha) {
    Node n;
    n.kind = OpKind::AddConst;
    n.args = {x};
    n.c = alpha;
    return push(std::move(n));
}

ValId Graph::tanh_op(ValId x) {
    Node n;
    n.kind = OpKind::Tanh;
    n.args = {x};
    return push(std::move(n));
}

ValId Graph::sigmoid(ValId x) {
    Node n;
    n.kind = OpKind::Sigmoid;
    n.args = {x};
    return push(std::move(n));
}

ValId Graph::exp_op(ValId x) {
    Node n;
    n.kind = OpKind::Exp;
    n.args = {x};
    return push(std::move(n));
}

ValId Graph::log_op(ValId x) {
    Node n;
    n.kind = OpKind::Log;
    n.args = {x};
    return push(std::move(n));
}

ValId Graph::relu(ValId x) {
    Node n;
    n.kind = OpKind::Relu;
    n.args = {x};
    return push(std::move(n));
}

ValId Graph::concat(ValId a, ValId b) {
    Node n;
    n.kind = OpKind::Concat;
    n.args = {a, b};
    return push(std::move(n));
}

ValId Graph::slice(ValId x, std::size_t start, std::size_t len) {
    Node n;
    n.kind = OpKind::Slice;
    n.args = {x};
    n.a = start;
    n.b = len;
    return push(std::move(n));
}

ValId Graph::row(ValId matrix, std::size_t i) {
    Node n;
    n.kind = OpKind::Row;
    n.args = {matrix};
    n.a = i;
    return push(std::move(n));
}

ValId Graph::max_n(std::span<const ValId> xs) {
    if (xs.empty()) throw std::invalid_argument("max_n: empty argument list");
    Node n;
    n.kind = OpKind::MaxN;
    n.args.assign(xs.begin(), xs.end());
    return push(std::move(n));
}

ValId Graph::softmax(ValId x) {
    Node n;
    n.kind = OpKind::Softmax;
    n.args = {x};
    return push(std::move(n));
}

ValId Graph::log_softmax(ValId x) {
    Node n;
    n.kind = OpKind::LogSoftmax;
    n.args = {x};
    return push(std::move(n));
}

ValId Graph::sum(ValId x) {
    Node n;
    n.kind = OpKind::Sum;
    n.args = {x};
    return push(std::move(n));
}

ValId Graph::pick(ValId x, std::size_t i) {
    Node n;
    n.kind = OpKind::Pick;
    n.args = {x};
    n.a = i;
    return push(std::move(n));
}

void Graph::eval_node(std::size_t i) {
    Node& n = nodes_[i];
    switch (n.kind) {
        case OpKind::Input:
        case OpKind::Param:
            return;
        case OpKind::MatVec: {
            const Tensor& w = arg_val(n, 0);
            const Tensor& x = arg_val(n, 1);
            if (w.rank() != 2) fail(i, "weight must be a matrix, got " + w.shape_str());
            check_vector(i, x, "operand");
            const std::size_t m = w.extent(0), k = w.extent(1);
            if (x.size() != k) {
                fail(i, "shape mismatch: " + w.shape_str() + " . " + x.shape_str());
            }
            n.value = Tensor({m});
            const double* wp = w.data();
            const double* xp = x.data();
            double* out = n.value.data();
            for (std::size_t r = 0; r < m; ++r) {
                double acc = 0.0;
                const double* wrow = wp + r * k;
                for (std::size_t c = 0; c < k; ++c) acc += wrow[c] * xp[c];
                out[r] = acc;
            }
            return;
        }
        case OpKind::Add:
        case OpKind::Sub:
        case OpKind::Mul: {
            const Tensor& a = arg_val(n, 0);
            const Tensor& b = arg_val(n, 1);
            if (!a.same_shape(b)) {
                fail(i, "shape mismatch: " + a.shape_str() + " vs " + b.shape_str());
            }
            n.value = Tensor(a.shape());
            const double* ap = a.data();
            const double* bp = b.data();
            double* out = n.value.data();
            const std::size_t sz = a.size();
            if (n.kind == OpKind::Add) {
                for (std::size_t j = 0; j < sz; ++j) out[j] = ap[j] + bp[j];
            } else if (n.kind == OpKind::Sub) {
                for (std::size_t j = 0; j < sz; ++j) out[j] = ap[j] - bp[j];
            } else {
                for (std::size_t j = 0; j < sz; ++j) out[j] = ap[j] * bp[j];
            }
            return;
        }
        case OpKind::AddN: {
            const Tensor& first = arg_val(n, 0);
            n.value = Tensor(first.shape());
            double* out = n.value.data();
            for (std::size_t k = 0; k < n.args.size(); ++k) {
                const Tensor& x = arg_val(n, k);
                if (!x.same_shape(first)) {
                    fail(i, "shape mismatch in operand " + std::to_string(k));
                }
                const double* xp = x.data();
                for (std::size_t j = 0; j < x.size(); ++j) out[j] += xp[j];
            }
            return;
        }
        case OpKind::Scale: {
            const Tensor& x = arg_val(n, 0);
            n.value = Tensor(x.shape());
            for (std::size_t j = 0; j < x.size(); ++j) n.value[j] = n.c * x[j];
            return;
        }
        case OpKind::AddConst: {
            const Tensor& x = arg_val(n, 0);
            n.value = Tensor(x.shape());
            for (std::size_t j = 0; j < x.size(); ++j) n.value[j] = x[j] + n.c;
            return;
        }
        case OpKind::Tanh: {
            const Tensor& x = arg_val(n, 0);
            n.value = Tensor(x.shape());
            for (std::size_t j = 0; j < x.size(); ++j) n.value[j] = std::tanh(x[j]);
            return;
        }
        case OpKind::Sigmoid: {
            const Tensor& x = arg_val(n, 0);
            n.value = Tensor(x.shape());
            for (std::size_t j = 0; j < x.size(); ++j) n.value[j] = 1.0 / (1.0 + std::exp(-x[j]));
            return;
        }
        case OpKind::Exp: {
            const Tensor& x = arg_val(n, 0);
            n.value = Tensor(x.shape());
            for (std::size_t j = 0; j < x.size(); ++j) n.value[j] = std::exp(x[j]);
            return;
        }
        case OpKind::Log: {
            const Tensor& x = arg_val(n, 0);
            n.value = Tensor(x.shape());
            for (std::size_t j = 0; j < x.size(); ++j) n.value[j] = std::log(x[j]);
            return;
        }
        case OpKind::Relu: {
            const Tensor& x = arg_val(n, 0);
            n.value = Tensor(x.shape());
            for (std::size_t j = 0; j < x.size(); ++j) n.value[j] = x[j] > 0.0 ? x[j] : 0.0;
            return;
        }
        case OpKind::Concat: {
            const Tensor& a = arg_val(n, 0);
            const Tensor& b = arg_val(n, 1);
            check_vector(i, a, "operand");
            check_vector(i, b, "operand");
            n.value = Tensor({a.size() + b.size()});
            std::copy(a.data(), a.data() + a.size(), n.value.data());
            std::copy(b.data(), b.data() + b.size(), n.value.data() + a.size());
            return;
        }
        case OpKind::Slice: {
            const Tensor& x = arg_val(n, 0);
            check_vector(i, x, "operand");
            if (n.a + n.b > x.size()) fail(i, "slice range out of bounds");
            n.value = Tensor({n.b});
            std::copy(x.data() + n.a, x.data() + n.a + n.b, n.value.data());
            return;
        }
        case OpKind::Row: {
            const Tensor& m = arg_val(n, 0);
            if (m.rank() != 2) fail(i, "row gather needs a matrix, got " + m.shape_str());
            if (n.a >= m.extent(0)) fail(i, "row index out of bounds");
            const std::size_t cols = m.extent(1);
            n.value = Tensor({cols});
            std::copy(m.data() + n.a * cols, m.data() + (n.a + 1) * cols, n.value.data());
            return;
        }
        case OpKind::MaxN: {
            const Tensor& first = arg_val(n, 0);
            n.value = first;
            for (std::size_t k = 1; k < n.args.size(); ++k) {
                const Tensor& x = arg_val(n, k);
                if (!x.same_shape(first)) {
                    fail(i, "shape mismatch in operand " + std::to_string(k));
                }
                for (std::size_t j = 0; j < x.size(); ++j) {
                    if (x[j] > n.value[j]) n.value[j] = x[j];
                }
            }
            return;
        }
        case OpKind::Softmax:
        case OpKind::LogSoftmax: {
            const Tensor& x = arg_val(n, 0);
            check_vector(i, x, "operand");
            if (x.size() == 0) fail(i, "softmax of empty vector");
            double mx = x[0];
            for (std::size_t j = 1; j < x.size(); ++j) mx = std::max(mx, x[j]);
            n.value = Tensor(x.shape());
            double total = 0.0;
            for (std::size_t j = 0; j < x.size(); ++j) {
                n.value[j] = std::exp(x[j] - mx);
                total += n.value[j];
            }
            if (n.kind == OpKind::Softmax) {
                for (std::size_t j = 0; j < x.size(); ++j) n.value[j] /= total;
            } else {
                const double lz = std::log(total);
                for (std::size_t j = 0; j < x.size(); ++j) n.value[j] = x[j] - mx - lz;
            }
            return;
        }
        case OpKind::Sum: {
            const Tensor& x = arg_val(n, 0);
            double acc = 0.0;
            for (std::size_t j = 0; j < x.size(); ++j) acc += x[j];
            n.value = Tensor::scalar(acc);
            return;
        }
        case OpKind::Pick: {
            const Tensor& x = arg_val(n, 0);
            check_vector(i, x, "operand");
            if (n.a >= x.size()) fail(i, "pick index out of bounds");
            n.value = Tensor::scalar(x[n.a]);
            return;
        }
    }
}

double Graph::scalar_value(ValId id) const {
    const Tensor& t = nodes_[id].value;
    if (t.size() != 1) {
        throw std::runtime_error("scalar_value: node holds " + t.shape_str());
    }
    return t[0];
}

void Graph::rebind(ValId leaf, Tensor v) {
    Node& n = nodes_[leaf];
    if (n.kind != OpKind::Input && n.kind != OpKind::Param) {
        throw std::invalid_argument("rebind: node is not a leaf");
    }
    if (!n.value.shape().empty() && n.value.shape() != v.shape()) {
        throw std::invalid_argument("rebind: shape mismatch for leaf '" + n.name + "': " +
                                    n.value.shape_str() + " vs " + v.shape_str());
    }
    n.value = std::move(v);
    n.bound = true;
}

void Graph::recompute() {
    for (std::size_t i = 0; i < nodes_.size(); ++i) eval_node(i);
}

void Graph::mark_output(const std::string& name, ValId id) { outputs_[name] = id; }

std::size_t Graph::leaf_by_name(const std::string& name) const {
    auto it = named_leaves_.find(name);
    if (it == named_leaves_.end()) {
        throw std::invalid_argument("no leaf named '" + name + "'");
    }
    return it->second;
}

std::map<std::string, Tensor> Graph::evaluate(const std::map<std::string, Tensor>& inputs) {
    for (const auto& [name, v] : inputs) {
        rebind(static_cast<ValId>(leaf_by_name(name)), v);
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const Node& n = nodes_[i];
        if ((n.kind == OpKind::Input || n.kind == OpKind::Param) && !n.bound) {
            fail(i, "leaf is unbound");
        }
    }
    recompute();
    std::map<std::string, Tensor> out;
    for (const auto& [name, id] : outputs_) out[name] = nodes_[id].value;
    return out;
}

void Graph::backward(ValId output) {
    if (nodes_[output].value.size() != 1) {
        throw std::invalid_argument("backward: output must be scalar, got " +
                                    nodes_[output].value.shape_str());
    }
    for (Node& n : nodes_) {
        n.grad = Tensor(n.value.shape());
    }
    nodes_[output].grad[0] = 1.0;
    for (std::size_t i = nodes_.size(); i-- > 0;) {
        backprop_node(i);
    }
}

void Graph::backprop_node(std::size_t i) {
    Node& n = nodes_[i];
    const Tensor& g = n.grad;
    switch (n.kind) {
        case OpKind::Input:
        case OpKind::Param:
            return;
        case OpKind::MatVec: {
            const Tensor& w = arg_val(n, 0);
            const Tensor& x = arg_val(n, 1);
            Tensor& gw = arg_grad(n, 0);
            Tensor& gx = arg_grad(n, 1);
            const std::size_t m = w.extent(0), k = w.extent(1);
            for (std::size_t r = 0; r < m; ++r) {
                const double gr = g[r];
                if (gr == 0.0) continue;
                double* gwrow = gw.data() + r * k;
                const double* wrow = w.data() + r * k;
                double* gxp = gx.data();
                const double* xp = x.data();
                for (std::size_t c = 0; c < k; ++c) {
                    gwrow[c] += gr * xp[c];
                    gxp[c] += gr * wrow[c];
                }
            }
            return;
        }
        case OpKind::Add: {
            Tensor& ga = arg_grad(n, 0);
            Tensor& gb = arg_grad(n, 1);
            for (std::size_t j = 0; j < g.size(); ++j) {
                ga[j] += g[j];
                gb[j] += g[j];
            }
            return;
        }
        case OpKind::Sub: {
            Tensor& ga = arg_grad(n, 0);
            Tensor& gb = arg_grad(n, 1);
            for (std::size_t j = 0; j < g.size(); ++j) {
                ga[j] += g[j];
                gb[j] -= g[j];
            }
            return;
        }
        case OpKind::Mul: {
            const Tensor& a = arg_val(n, 0);
            const Tensor& b = arg_val(n, 1);
            Tensor& ga = arg_grad(n, 0);
            Tensor& gb = arg_grad(n, 1);
            for (std::size_t j = 0; j < g.size(); ++j) {
                ga[j] += g[j] * b[j];
                gb[j] += g[j] * a[j];
            }
            return;
        }
        case OpKind::AddN: {
            for (std::size_t k = 0; k < n.args.size(); ++k) {
                Tensor& gx = arg_grad(n, k);
                for (std::size_t j = 0; j < g.size(); ++j) gx[j] += g[j];
            }
            return;
        }
        case OpKind::Scale: {
            Tensor& gx = arg_grad(n, 0);
            for (std::size_t j = 0; j < g.size(); ++j) gx[j] += n.c * g[j];
            return;
        }
        case OpKind::AddConst: {
            Tensor& gx = arg_grad(n, 0);
            for (std::size_t j = 0; j < g.size(); ++j) gx[j] += g[j];
            return;
        }
        case OpKind::Tanh: {
            Tensor& gx = arg_grad(n, 0);
            for (std::size_t j = 0; j < g.size(); ++j) {
                gx[j] += g[j] * (1.0 - n.value[j] * n.value[j]);
            }
            return;
        }
        case OpKind::Sigmoid: {
            Tensor& gx = arg_grad(n, 0);
            for (std::size_t j = 0; j < g.size(); ++j) {
                gx[j] += g[j] * n.value[j] * (1.0 - n.value[j]);
            }
            return;
        }
        case OpKind::Exp: {
            Tensor& gx = arg_grad(n, 0);
            for (std::size_t j = 0; j < g.size(); ++j) gx[j] += g[j] * n.value[j];
            return;
        }
        case OpKind::Log: {
            const Tensor& x = arg_val(n, 0);
            Tensor& gx = arg_grad(n, 0);
            for (std::size_t j = 0; j < g.size(); ++j) gx[j] += g[j] / x[j];
            return;
        }
        case OpKind::Relu: {
            const Tensor& x = arg_val(n, 0);
            Tensor& gx = arg_grad(n, 0);
            for (std::size_t j = 0; j < g.size(); ++j) {
                if (x[j] > 0.0) gx[j] += g[j];
            }
            return;
        }
        case OpKind::Concat: {
            Tensor& ga = arg_grad(n, 0);
            Tensor& gb = arg_grad(n, 1);
            const std::size_t na = ga.size();
            for (std::size_t j = 0; j < na; ++j) ga[j] += g[j];
            for (std::size_t j = 0; j < gb.size(); ++j) gb[j] += g[na + j];
            return;
        }
        case OpKind::Slice: {
            Tensor& gx = arg_grad(n, 0);
            for (std::size_t j = 0; j < n.b; ++j) gx[n.a + j] += g[j];
            return;
        }
        case OpKind::Row: {
            Tensor& gm = arg_grad(n, 0);
            const std::size_t cols = arg_val(n, 0).extent(1);
            double* grow = gm.data() + n.a * cols;
            for (std::size_t j = 0; j < cols; ++j) grow[j] += g[j];
            return;
        }
        case OpKind::MaxN: {
            // Gradient flows to the first argument attaining the max.
            for (std::size_t j = 0; j < g.size(); ++j) {
                if (g[j] == 0.0) continue;
                for (std::size_t k = 0; k < n.args.size(); ++k) {
                    if (arg_val(n, k)[j] == n.value[j]) {
                        arg_grad(n, k)[j] += g[j];
                        break;
                    }
                }
            }
            return;
        }
        case OpKind::Softmax: {
            Tensor& gx = arg_grad(n, 0);
            double dot = 0.0;
            for (std::size_t j = 0; j < g.size(); ++j) dot += g[j] * n.value[j];
            for (std::size_t j = 0; j < g.size(); ++j) {
                gx[j] += n.value[j] * (g[j] - dot);
            }
            return;
        }
        case OpKind::LogSoftmax: {
            Tensor& gx = arg_grad(n, 0);
            double gsum = 0.0;
            for (std::size_t j = 0; j < g.size(); ++j) gsum += g[j];
            for (std::size_t j = 0; j < g.size(); ++j) {
                gx[j] += g[j] - std::exp(n.value[j]) * gsum;
            }
            return;
        }
        case OpKind::Sum: {
            Tensor& gx = arg_grad(n, 0);
            for (std::size_t j = 0; j < gx.size(); ++j) gx[j] += g[0];
            return;
        }
        case OpKind::Pick: {
            arg_grad(n, 0)[n.a] += g[0];
            return;
        }
    }
}

double Graph::grad_check(ValId output, double step) {
    if (step <= 0.0) throw std::invalid_argument("grad_check: step must be > 0");
    if (!nodes_[output].value.all_finite()) {
        throw std::runtime_error("grad_check: non-finite function value");
    }
    backward(output);
    // Gradients must be captured before perturbation sweeps overwrite values.
    std::vector<Tensor> analytic;
    analytic.reserve(params_.size());
    for (ValId p : params_) analytic.push_back(nodes_[p].grad);

    double worst = 0.0;
    for (std::size_t pi = 0; pi < params_.size(); ++pi) {
        Node& leaf = nodes_[params_[pi]];
        for (std::size_t j = 0; j < leaf.value.size(); ++j) {
            const double orig = leaf.value[j];
            leaf.value[j] = orig + step;
            recompute();
            const double fp = scalar_value(output);
            leaf.value[j] = orig - step;
            recompute();
            const double fm = scalar_value(output);
            leaf.value[j] = orig;
            if (!std::isfinite(fp) || !std::isfinite(fm)) {
                recompute();
                throw std::runtime_error("grad_check: non-finite function value");
            }
            const double fd = (fp - fm) / (2.0 * step);
            const double a = analytic[pi][j];
            const double rel = std::abs(a - fd) / std::max(1.0, std::abs(a));
            worst = std::max(worst, rel);
        }
    }
    recompute();
    return worst;
}

double kl_diag_gaussian(std::span<const double> mu_q, std::span<const double> logvar_q,
                        std::span<const double> mu_p, std::span<const double> logvar_p) {
    const std::size_t d = mu_q.size();
    if (logvar_q.size() != d || mu_p.size() != d || logvar_p.size() != d) {
        throw std::invalid_argument("kl_diag_gaussian: length mismatch");
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        const double dm = mu_p[j] - mu_q[j];
        acc += 0.5 * (std::exp(logvar_q[j] - logvar_p[j]) + dm * dm * std::exp(-logvar_p[j]) -
                      1.0 + logvar_p[j] - logvar_q[j]);
    }
    return acc;
}

std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> out(logits.begin(), logits.end());
    double mx = out[0];
    for (double v : out) mx = std::max(mx, v);
    double total = 0.0;
    for (double& v : out) {
        v = std::exp(v - mx);
        total += v;
    }
    for (double& v : out) v /= total;
    return out;
}

std::vector<double> log_softmax(std::span<const double> logits) {
    std::vector<double> out(logits.begin(), logits.end());
    double mx = out[0];
    for (double v : out) mx = std::max(mx, v);
    double total = 0.0;
    for (double v : out) total += std::exp(v - mx);
    const double lz = mx + std::log(total);
    for (double& v : out) v -= lz;
    return out;
}

}  // namespace vacs::ad
