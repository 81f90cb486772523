#pragma once

#include "hinforge/tensor.hpp"

#include <functional>
#include <string>
#include <vector>

namespace hinforge {

// Handle into a Tape. Only valid for the tape that produced it.
struct Var {
    int id = -1;
};

// Reverse-mode tape over 2-D tensors. Nodes are appended in topological
// order, so the backward sweep is a single reverse pass over node ids.
class Tape {
public:
    // Constant leaf: no gradient is ever computed for it or through it
    // exclusively. Use param() for anything you intend to differentiate.
    Var input(Tensor v);
    Var param(Tensor v);
    const Tensor& value(Var v) const;
    int size() const { return static_cast<int>(values_.size()); }

    Var matmul(Var a, Var b);
    Var transpose(Var a);
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);
    Var scale(Var a, double s);
    // Elementwise k*x + b.
    Var affine(Var a, double k, double b);
    Var sigmoid(Var a);
    Var relu(Var a);
    Var log(Var a);
    Var exp(Var a);
    Var clamp(Var a, double lo, double hi);
    Var softmax_rows(Var a);
    Var sum(Var a);
    Var mean(Var a);
    Var row_sum(Var a);
    Var concat_rows(const std::vector<Var>& parts);
    Var concat_cols(const std::vector<Var>& parts);
    Var gather_rows(Var a, std::vector<int> idx);
    // Same element count, row-major data reinterpreted.
    Var reshape(Var a, int rows, int cols);
    // Row-wise argmax one-hot. Backward throws ContractError unless
    // straight_through, in which case the gradient passes unchanged.
    Var hard_onehot_rows(Var a, bool straight_through);
    // Dispatch by name; unknown names are a contract violation.
    Var activation(const std::string& name, Var a);

    // Gradients of a 1x1 loss with respect to each wrt var, in order.
    // Vars never reached by the sweep get zero tensors of their shape.
    std::vector<Tensor> grad(Var loss, const std::vector<Var>& wrt);

private:
    using BackFn = std::function<void(Tape&, const Tensor&)>;

    Var push(Tensor v, BackFn fn);
    Var push1(Tensor v, int parent, BackFn fn);
    void acc(int id, const Tensor& g);
    const Tensor& val(int id) const { return values_[id]; }
    bool wants(int id) const { return wants_[id] != 0; }
    void check(Var v, const char* op) const;

    std::vector<Tensor> values_;
    std::vector<BackFn> backs_;
    std::vector<char> wants_;
    std::vector<Tensor> grads_;
};

// Central-difference check: worst relative error between analytic grads and
// numeric grads of f over every element of every input.
double max_fd_error(const std::function<double(const std::vector<Tensor>&)>& f,
                    const std::vector<Tensor>& at, const std::vector<Tensor>& analytic,
                    double eps = 1e-5);

}  // namespace hinforge
