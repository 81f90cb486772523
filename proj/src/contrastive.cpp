#include "hinforge/contrastive.hpp"

#include "hinforge/errors.hpp"
#include "hinforge/variational.hpp"

#include <cmath>

namespace hinforge {

Tensor corrupt_features(const Tensor& x, Rng& rng) {
    if (x.rows < 2) throw ArgumentError("corrupt_features: need at least 2 rows");
    std::vector<int> perm = rng.permutation(x.rows);
    return gather_rows(x, perm);
}

Tensor encode_sample(const std::vector<int>& walk, const Tensor& z_source) {
    return gather_rows(z_source, walk);
}

Tensor summary(const Tensor& zp) {
    if (zp.rows < 1) throw ArgumentError("summary: empty sample");
    Tensor s(1, zp.cols);
    for (int j = 0; j < zp.cols; ++j) {
        double acc = 0.0;
        for (int i = 0; i < zp.rows; ++i) acc += zp.at(i, j);
        s.at(0, j) = acc / static_cast<double>(zp.rows);
    }
    return s;
}

double discriminate(const Tensor& zp, const Tensor& s, const Tensor& w) {
    if (s.rows != 1 || s.cols != zp.cols) throw ShapeError("discriminate: bad summary shape");
    if (w.rows != zp.rows * zp.cols || w.cols != zp.cols)
        throw ShapeError("discriminate: weight shape must be (len*d) x d");
    // v = row-major flattening of zp; score = v' W s.
    Tensor v(1, w.rows, zp.data);
    Tensor u = matmul(v, w);
    double score = 0.0;
    for (int j = 0; j < u.cols; ++j) score += u.at(0, j) * s.at(0, j);
    return 1.0 / (1.0 + std::exp(-score));
}

Tensor init_discriminator(int walk_len, int d, Rng& rng) {
    if (walk_len < 1 || d < 1) throw ArgumentError("init_discriminator: bad dims");
    return Tensor::gaussian(walk_len * d, d, rng, 1.0 / std::sqrt(static_cast<double>(walk_len * d)));
}

Var l_p_tape(Tape& tape, const std::vector<std::vector<int>>& walks, Var z, Var zbar, Var w,
             int j_negatives) {
    if (walks.empty()) throw ArgumentError("l_p: empty batch");
    if (j_negatives < 1) throw ArgumentError("l_p: need at least one negative");
    const int b = static_cast<int>(walks.size());
    const int len = static_cast<int>(walks[0].size());
    const int d = tape.value(z).cols;
    std::vector<int> flat;
    flat.reserve(static_cast<size_t>(b) * len);
    for (const auto& walk : walks) {
        if (static_cast<int>(walk.size()) != len)
            throw ArgumentError("l_p: walks in one batch must share a length");
        flat.insert(flat.end(), walk.begin(), walk.end());
    }
    // (b*len) x d gathers reinterpreted as b x (len*d) flattened samples.
    Var v = tape.reshape(tape.gather_rows(z, flat), b, len * d);
    Var vbar = tape.reshape(tape.gather_rows(zbar, flat), b, len * d);
    // Summaries via a constant (len*d) x d block-averaging matrix.
    Tensor avg = Tensor::zeros(len * d, d);
    for (int l = 0; l < len; ++l)
        for (int a = 0; a < d; ++a) avg.at(l * d + a, a) = 1.0 / static_cast<double>(len);
    Var s = tape.matmul(v, tape.input(avg));
    Var pos = tape.clamp(tape.sigmoid(tape.row_sum(tape.mul(tape.matmul(v, w), s))), kProbClamp,
                         1.0 - kProbClamp);
    Var neg = tape.clamp(tape.sigmoid(tape.row_sum(tape.mul(tape.matmul(vbar, w), s))), kProbClamp,
                         1.0 - kProbClamp);
    Var term = tape.add(tape.log(pos), tape.scale(tape.log(tape.affine(neg, -1.0, 1.0)),
                                                  static_cast<double>(j_negatives)));
    return tape.scale(tape.mean(term), -1.0 / (j_negatives + 1.0));
}

double l_p(const std::vector<std::vector<int>>& walks, const Tensor& z, const Tensor& zbar,
           const Tensor& w, int j_negatives) {
    Tape tape;
    Var loss =
        l_p_tape(tape, walks, tape.input(z), tape.input(zbar), tape.input(w), j_negatives);
    return tape.value(loss).at(0, 0);
}

double l_cont(const std::vector<double>& per_schema_losses) {
    double acc = 0.0;
    for (double v : per_schema_losses) acc += v;
    return acc;
}

}  // namespace hinforge
