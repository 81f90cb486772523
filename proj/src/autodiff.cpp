#include "hinforge/autodiff.hpp"

#include "hinforge/errors.hpp"

#include <algorithm>
#include <cmath>

namespace hinforge {

Var Tape::push(Tensor v, BackFn fn) {
    values_.push_back(std::move(v));
    backs_.push_back(std::move(fn));
    return Var{static_cast<int>(values_.size()) - 1};
}

void Tape::check(Var v, const char* op) const {
    if (v.id < 0 || v.id >= static_cast<int>(values_.size()))
        throw ArgumentError(std::string(op) + ": var does not belong to this tape");
}

void Tape::acc(int id, const Tensor& g) {
    Tensor& slot = grads_[id];
    if (slot.size() == 0) {
        slot = g;
        return;
    }
    for (long i = 0; i < g.size(); ++i) slot.data[i] += g.data[i];
}

Var Tape::input(Tensor v) {
    Var out = push(std::move(v), nullptr);
    wants_.push_back(0);
    return out;
}

Var Tape::param(Tensor v) {
    Var out = push(std::move(v), nullptr);
    wants_.push_back(1);
    return out;
}

// Unary op helper: inherits the parent's gradient demand.
Var Tape::push1(Tensor v, int parent, BackFn fn) {
    Var out = push(std::move(v), wants(parent) ? std::move(fn) : BackFn());
    wants_.push_back(wants_[parent]);
    return out;
}

const Tensor& Tape::value(Var v) const {
    check(v, "value");
    return values_[v.id];
}

Var Tape::matmul(Var a, Var b) {
    check(a, "matmul");
    check(b, "matmul");
    Tensor out = hinforge::matmul(values_[a.id], values_[b.id]);
    int ai = a.id, bi = b.id;
    bool w = wants(ai) || wants(bi);
    Var o = push(std::move(out), !w ? BackFn() : [ai, bi](Tape& t, const Tensor& g) {
        if (t.wants(ai)) t.acc(ai, hinforge::matmul(g, hinforge::transpose(t.val(bi))));
        if (t.wants(bi)) t.acc(bi, hinforge::matmul(hinforge::transpose(t.val(ai)), g));
    });
    wants_.push_back(w ? 1 : 0);
    return o;
}

Var Tape::transpose(Var a) {
    check(a, "transpose");
    int ai = a.id;
    return push1(hinforge::transpose(values_[ai]), ai, [ai](Tape& t, const Tensor& g) {
        t.acc(ai, hinforge::transpose(g));
    });
}

Var Tape::add(Var a, Var b) {
    check(a, "add");
    check(b, "add");
    int ai = a.id, bi = b.id;
    bool w = wants(ai) || wants(bi);
    Var o = push(hinforge::add(values_[ai], values_[bi]),
                 !w ? BackFn() : [ai, bi](Tape& t, const Tensor& g) {
                     if (t.wants(ai)) t.acc(ai, g);
                     if (t.wants(bi)) t.acc(bi, g);
                 });
    wants_.push_back(w ? 1 : 0);
    return o;
}

Var Tape::sub(Var a, Var b) {
    check(a, "sub");
    check(b, "sub");
    int ai = a.id, bi = b.id;
    bool w = wants(ai) || wants(bi);
    Var o = push(hinforge::sub(values_[ai], values_[bi]),
                 !w ? BackFn() : [ai, bi](Tape& t, const Tensor& g) {
                     if (t.wants(ai)) t.acc(ai, g);
                     if (t.wants(bi)) t.acc(bi, hinforge::scale(g, -1.0));
                 });
    wants_.push_back(w ? 1 : 0);
    return o;
}

Var Tape::mul(Var a, Var b) {
    check(a, "mul");
    check(b, "mul");
    int ai = a.id, bi = b.id;
    bool w = wants(ai) || wants(bi);
    Var o = push(hinforge::mul(values_[ai], values_[bi]),
                 !w ? BackFn() : [ai, bi](Tape& t, const Tensor& g) {
                     if (t.wants(ai)) t.acc(ai, hinforge::mul(g, t.val(bi)));
                     if (t.wants(bi)) t.acc(bi, hinforge::mul(g, t.val(ai)));
                 });
    wants_.push_back(w ? 1 : 0);
    return o;
}

Var Tape::scale(Var a, double s) {
    check(a, "scale");
    int ai = a.id;
    return push1(hinforge::scale(values_[ai], s), ai, [ai, s](Tape& t, const Tensor& g) {
        t.acc(ai, hinforge::scale(g, s));
    });
}

Var Tape::affine(Var a, double k, double b) {
    check(a, "affine");
    const Tensor& x = values_[a.id];
    Tensor out(x.rows, x.cols);
    for (long i = 0; i < x.size(); ++i) out.data[i] = k * x.data[i] + b;
    ensure_finite(out, "affine");
    int ai = a.id;
    return push1(std::move(out), ai, [ai, k](Tape& t, const Tensor& g) {
        t.acc(ai, hinforge::scale(g, k));
    });
}

Var Tape::sigmoid(Var a) {
    check(a, "sigmoid");
    Tensor out = hinforge::sigmoid(values_[a.id]);
    int ai = a.id;
    int oi = size();
    return push1(std::move(out), ai, [ai, oi](Tape& t, const Tensor& g) {
        const Tensor& y = t.val(oi);
        Tensor gi(y.rows, y.cols);
        for (long i = 0; i < y.size(); ++i) gi.data[i] = g.data[i] * y.data[i] * (1.0 - y.data[i]);
        t.acc(ai, gi);
    });
}

Var Tape::relu(Var a) {
    check(a, "relu");
    int ai = a.id;
    return push1(hinforge::relu(values_[ai]), ai, [ai](Tape& t, const Tensor& g) {
        const Tensor& x = t.val(ai);
        Tensor gi(x.rows, x.cols);
        for (long i = 0; i < x.size(); ++i) gi.data[i] = x.data[i] > 0.0 ? g.data[i] : 0.0;
        t.acc(ai, gi);
    });
}

Var Tape::log(Var a) {
    check(a, "log");
    int ai = a.id;
    return push1(hinforge::log(values_[ai]), ai, [ai](Tape& t, const Tensor& g) {
        const Tensor& x = t.val(ai);
        Tensor gi(x.rows, x.cols);
        for (long i = 0; i < x.size(); ++i) gi.data[i] = g.data[i] / x.data[i];
        t.acc(ai, gi);
    });
}

Var Tape::exp(Var a) {
    check(a, "exp");
    Tensor out = hinforge::exp(values_[a.id]);
    int ai = a.id;
    int oi = size();
    return push1(std::move(out), ai, [ai, oi](Tape& t, const Tensor& g) {
        t.acc(ai, hinforge::mul(g, t.val(oi)));
    });
}

Var Tape::clamp(Var a, double lo, double hi) {
    check(a, "clamp");
    int ai = a.id;
    return push1(hinforge::clamp(values_[ai], lo, hi), ai, [ai, lo, hi](Tape& t, const Tensor& g) {
        const Tensor& x = t.val(ai);
        Tensor gi(x.rows, x.cols);
        for (long i = 0; i < x.size(); ++i)
            gi.data[i] = (x.data[i] >= lo && x.data[i] <= hi) ? g.data[i] : 0.0;
        t.acc(ai, gi);
    });
}

Var Tape::softmax_rows(Var a) {
    check(a, "softmax_rows");
    Tensor out = hinforge::softmax_rows(values_[a.id]);
    int ai = a.id;
    int oi = size();
    return push1(std::move(out), ai, [ai, oi](Tape& t, const Tensor& g) {
        const Tensor& y = t.val(oi);
        Tensor gi(y.rows, y.cols);
        for (int i = 0; i < y.rows; ++i) {
            double dot = 0.0;
            for (int j = 0; j < y.cols; ++j) dot += g.at(i, j) * y.at(i, j);
            for (int j = 0; j < y.cols; ++j) gi.at(i, j) = y.at(i, j) * (g.at(i, j) - dot);
        }
        t.acc(ai, gi);
    });
}

Var Tape::sum(Var a) {
    check(a, "sum");
    const Tensor& x = values_[a.id];
    Tensor out(1, 1);
    out.at(0, 0) = hinforge::sum(x);
    int ai = a.id;
    int r = x.rows, c = x.cols;
    return push1(std::move(out), ai, [ai, r, c](Tape& t, const Tensor& g) {
        t.acc(ai, Tensor::full(r, c, g.at(0, 0)));
    });
}

Var Tape::mean(Var a) {
    check(a, "mean");
    const Tensor& x = values_[a.id];
    Tensor out(1, 1);
    out.at(0, 0) = hinforge::mean(x);
    int ai = a.id;
    int r = x.rows, c = x.cols;
    return push1(std::move(out), ai, [ai, r, c](Tape& t, const Tensor& g) {
        t.acc(ai, Tensor::full(r, c, g.at(0, 0) / (static_cast<double>(r) * c)));
    });
}

Var Tape::row_sum(Var a) {
    check(a, "row_sum");
    const Tensor& x = values_[a.id];
    int ai = a.id, c = x.cols;
    return push1(hinforge::row_sum(x), ai, [ai, c](Tape& t, const Tensor& g) {
        Tensor gi(g.rows, c);
        for (int i = 0; i < g.rows; ++i)
            for (int j = 0; j < c; ++j) gi.at(i, j) = g.at(i, 0);
        t.acc(ai, gi);
    });
}

Var Tape::concat_rows(const std::vector<Var>& parts) {
    std::vector<Tensor> vals;
    std::vector<int> ids;
    std::vector<int> heights;
    bool w = false;
    for (Var p : parts) {
        check(p, "concat_rows");
        vals.push_back(values_[p.id]);
        ids.push_back(p.id);
        heights.push_back(values_[p.id].rows);
        w = w || wants(p.id);
    }
    Tensor out = hinforge::concat_rows(vals);
    Var o = push(std::move(out), !w ? BackFn() : [ids, heights](Tape& t, const Tensor& g) {
        int off = 0;
        for (size_t p = 0; p < ids.size(); ++p) {
            if (t.wants(ids[p])) {
                Tensor gi(heights[p], g.cols);
                for (int i = 0; i < heights[p]; ++i)
                    std::copy(g.row(off + i), g.row(off + i) + g.cols, gi.row(i));
                t.acc(ids[p], gi);
            }
            off += heights[p];
        }
    });
    wants_.push_back(w ? 1 : 0);
    return o;
}

Var Tape::concat_cols(const std::vector<Var>& parts) {
    std::vector<Tensor> vals;
    std::vector<int> ids;
    std::vector<int> widths;
    bool w = false;
    for (Var p : parts) {
        check(p, "concat_cols");
        vals.push_back(values_[p.id]);
        ids.push_back(p.id);
        widths.push_back(values_[p.id].cols);
        w = w || wants(p.id);
    }
    Tensor out = hinforge::concat_cols(vals);
    Var o = push(std::move(out), !w ? BackFn() : [ids, widths](Tape& t, const Tensor& g) {
        int off = 0;
        for (size_t p = 0; p < ids.size(); ++p) {
            if (t.wants(ids[p])) {
                Tensor gi(g.rows, widths[p]);
                for (int i = 0; i < g.rows; ++i)
                    std::copy(g.row(i) + off, g.row(i) + off + widths[p], gi.row(i));
                t.acc(ids[p], gi);
            }
            off += widths[p];
        }
    });
    wants_.push_back(w ? 1 : 0);
    return o;
}

Var Tape::gather_rows(Var a, std::vector<int> idx) {
    check(a, "gather_rows");
    const Tensor& x = values_[a.id];
    Tensor out = hinforge::gather_rows(x, idx);
    int ai = a.id, r = x.rows, c = x.cols;
    return push1(std::move(out), ai, [ai, r, c, idx = std::move(idx)](Tape& t, const Tensor& g) {
        Tensor gi = Tensor::zeros(r, c);
        for (size_t i = 0; i < idx.size(); ++i)
            for (int j = 0; j < c; ++j) gi.at(idx[i], j) += g.at(static_cast<int>(i), j);
        t.acc(ai, gi);
    });
}

Var Tape::reshape(Var a, int rows, int cols) {
    check(a, "reshape");
    const Tensor& x = values_[a.id];
    if (static_cast<long>(rows) * cols != x.size())
        throw ShapeError("reshape: element count must be preserved");
    Tensor out(rows, cols, x.data);
    int ai = a.id, r = x.rows, c = x.cols;
    return push1(std::move(out), ai, [ai, r, c](Tape& t, const Tensor& g) {
        t.acc(ai, Tensor(r, c, g.data));
    });
}

Var Tape::hard_onehot_rows(Var a, bool straight_through) {
    check(a, "hard_onehot_rows");
    const Tensor& x = values_[a.id];
    Tensor out = Tensor::zeros(x.rows, x.cols);
    for (int i = 0; i < x.rows; ++i) {
        int best = 0;
        for (int j = 1; j < x.cols; ++j)
            if (x.at(i, j) > x.at(i, best)) best = j;
        out.at(i, best) = 1.0;
    }
    int ai = a.id;
    return push1(std::move(out), ai, [ai, straight_through](Tape& t, const Tensor& g) {
        if (!straight_through)
            throw ContractError(
                "hard_onehot_rows: argmax has no gradient; enable straight-through or use the "
                "relaxed assignment");
        t.acc(ai, g);
    });
}

Var Tape::activation(const std::string& name, Var a) {
    if (name == "sigmoid") return sigmoid(a);
    if (name == "relu") return relu(a);
    if (name == "identity" || name == "linear") return affine(a, 1.0, 0.0);
    if (name == "tanh") return affine(sigmoid(affine(a, 2.0, 0.0)), 2.0, -1.0);
    throw ContractError("activation: unsupported primitive '" + name + "'");
}

std::vector<Tensor> Tape::grad(Var loss, const std::vector<Var>& wrt) {
    check(loss, "grad");
    const Tensor& lv = values_[loss.id];
    if (lv.rows != 1 || lv.cols != 1) throw ArgumentError("grad: loss must be 1x1");
    grads_.assign(values_.size(), Tensor());
    grads_[loss.id] = Tensor::ones(1, 1);
    for (int id = loss.id; id >= 0; --id) {
        if (grads_[id].size() == 0 || !backs_[id]) continue;
        backs_[id](*this, grads_[id]);
    }
    std::vector<Tensor> out;
    out.reserve(wrt.size());
    for (Var w : wrt) {
        check(w, "grad");
        if (grads_[w.id].size() == 0)
            out.push_back(Tensor::zeros(values_[w.id].rows, values_[w.id].cols));
        else
            out.push_back(grads_[w.id]);
    }
    grads_.clear();
    return out;
}

double max_fd_error(const std::function<double(const std::vector<Tensor>&)>& f,
                    const std::vector<Tensor>& at, const std::vector<Tensor>& analytic,
                    double eps) {
    if (at.size() != analytic.size()) throw ArgumentError("max_fd_error: size mismatch");
    std::vector<Tensor> xs = at;
    double worst = 0.0;
    for (size_t p = 0; p < xs.size(); ++p) {
        if (!xs[p].same_shape(analytic[p])) throw ShapeError("max_fd_error: shape mismatch");
        for (long i = 0; i < xs[p].size(); ++i) {
            const double keep = xs[p].data[i];
            xs[p].data[i] = keep + eps;
            const double fp = f(xs);
            xs[p].data[i] = keep - eps;
            const double fm = f(xs);
            xs[p].data[i] = keep;
            const double num = (fp - fm) / (2.0 * eps);
            const double an = analytic[p].data[i];
            const double den = std::max(1.0, std::max(std::abs(num), std::abs(an)));
            worst = std::max(worst, std::abs(num - an) / den);
        }
    }
    return worst;
}

}  // namespace hinforge
