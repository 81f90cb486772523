#include "hinforge/variational.hpp"

#include "hinforge/errors.hpp"

#include <cmath>

namespace hinforge {

double l_enc(const Tensor& mu, const Tensor& logsigma) {
    if (!mu.same_shape(logsigma)) throw ShapeError("l_enc: shape mismatch");
    double acc = 0.0;
    for (long i = 0; i < mu.size(); ++i) {
        const double m = mu.data[i];
        const double ls = logsigma.data[i];
        acc += 0.5 * (m * m + std::exp(2.0 * ls) - 1.0 - 2.0 * ls);
    }
    if (!std::isfinite(acc)) throw NumericError("l_enc: non-finite");
    return acc;
}

Var l_enc_tape(Tape& tape, Var mu, Var logsigma) {
    Var mu2 = tape.mul(mu, mu);
    Var sigma2 = tape.exp(tape.scale(logsigma, 2.0));
    Var inner = tape.affine(tape.sub(tape.add(mu2, sigma2), tape.scale(logsigma, 2.0)), 1.0, -1.0);
    return tape.scale(tape.sum(inner), 0.5);
}

Tensor representative_matrix(const std::vector<std::vector<int>>& zeta,
                             const std::vector<std::vector<int>>& samples, const Hin& hin,
                             std::vector<RepSource>* tags) {
    if (static_cast<int>(zeta.size()) != hin.n)
        throw ShapeError("representative_matrix: zeta size != node count");
    Tensor m = Tensor::zeros(hin.n, hin.n);
    if (tags) tags->assign(hin.n, RepSource::metapath);
    for (int i = 0; i < hin.n; ++i) {
        if (!zeta[i].empty()) {
            const double wsample = 1.0 / static_cast<double>(zeta[i].size());
            for (int s : zeta[i]) {
                const auto& walk = samples.at(s);
                const double wnode = wsample / static_cast<double>(walk.size());
                for (int node : walk) m.at(i, node) += wnode;
            }
        } else if (!hin.adj[i].empty()) {
            const double w = 1.0 / static_cast<double>(hin.adj[i].size());
            for (int j : hin.adj[i]) m.at(i, j) = w;
            if (tags) (*tags)[i] = RepSource::neighbor_fallback;
        } else {
            m.at(i, i) = 1.0;
            if (tags) (*tags)[i] = RepSource::self_fallback;
        }
    }
    return m;
}

RepresentativeEmbedding representative_embedding(const Tensor& z,
                                                 const std::vector<std::vector<int>>& zeta,
                                                 const std::vector<std::vector<int>>& samples,
                                                 const Hin& hin) {
    if (z.rows != hin.n) throw ShapeError("representative_embedding: Z row count != node count");
    RepresentativeEmbedding out;
    Tensor m = representative_matrix(zeta, samples, hin, &out.tags);
    out.zhat = matmul(m, z);
    return out;
}

Tensor cluster_prior(const Tensor& z, const Tensor& g) {
    return softmax_rows(matmul(z, transpose(g)));
}

Tensor cluster_posterior(const Tensor& zhat, const Tensor& g) { return cluster_prior(zhat, g); }

Var cluster_distribution_tape(Tape& tape, Var z, Var g) {
    return tape.softmax_rows(tape.matmul(z, tape.transpose(g)));
}

double l_c(const Tensor& q, const Tensor& p) {
    Tape tape;
    return tape.value(l_c_tape(tape, tape.input(q), tape.input(p))).at(0, 0);
}

Var l_c_tape(Tape& tape, Var q, Var p) {
    Var qs = tape.clamp(q, kLogFloor, 1.0);
    Var ps = tape.clamp(p, kLogFloor, 1.0);
    return tape.sum(tape.mul(qs, tape.sub(tape.log(qs), tape.log(ps))));
}

Tensor sample_gumbel(int rows, int cols, Rng& rng) {
    Tensor g(rows, cols);
    for (auto& v : g.data) v = rng.gumbel();
    return g;
}

Tensor gumbel_softmax(const Tensor& logits, const Tensor& gumbel, double tau) {
    Tape tape;
    return tape.value(gumbel_softmax_tape(tape, tape.input(logits), gumbel, tau));
}

Tensor gumbel_softmax_sample(const Tensor& logits, double tau, Rng& rng) {
    return gumbel_softmax(logits, sample_gumbel(logits.rows, logits.cols, rng), tau);
}

Var gumbel_softmax_tape(Tape& tape, Var logits, const Tensor& gumbel, double tau) {
    if (tau <= 0.0) throw ArgumentError("gumbel_softmax: tau must be positive");
    Var noisy = tape.add(logits, tape.input(gumbel));
    return tape.softmax_rows(tape.affine(noisy, 1.0 / tau, 0.0));
}

double decode_edge(const Tensor& zi, const Tensor& zj, const Tensor& ci, const Tensor& cj,
                   const Tensor& g) {
    if (zi.rows != 1 || zj.rows != 1 || ci.rows != 1 || cj.rows != 1)
        throw ShapeError("decode_edge: expects row vectors");
    Tensor gi = matmul(ci, g);  // assignment-weighted embedding of node i's cluster
    Tensor gj = matmul(cj, g);
    double a = 0.0, b = 0.0;
    for (int t = 0; t < zi.cols; ++t) {
        a += zi.at(0, t) * gj.at(0, t);
        b += zj.at(0, t) * gi.at(0, t);
    }
    return 0.5 * (1.0 / (1.0 + std::exp(-a)) + 1.0 / (1.0 + std::exp(-b)));
}

Var l_recon_tape(Tape& tape, const std::vector<std::pair<int, int>>& positives,
                 const std::vector<std::pair<int, int>>& negatives, Var z, Var assignments,
                 Var g) {
    if (positives.empty() || negatives.empty())
        throw ArgumentError("l_recon: empty edge set");
    if (positives.size() != negatives.size())
        throw ArgumentError("l_recon: positive and negative counts must match");
    const int b = static_cast<int>(positives.size() + negatives.size());
    std::vector<int> is, js;
    is.reserve(b);
    js.reserve(b);
    Tensor y(b, 1);
    int row = 0;
    for (const auto& [i, j] : positives) {
        is.push_back(i);
        js.push_back(j);
        y.at(row++, 0) = 1.0;
    }
    for (const auto& [i, j] : negatives) {
        is.push_back(i);
        js.push_back(j);
        y.at(row++, 0) = 0.0;
    }
    Var zi = tape.gather_rows(z, is);
    Var zj = tape.gather_rows(z, js);
    Var gi = tape.matmul(tape.gather_rows(assignments, is), g);
    Var gj = tape.matmul(tape.gather_rows(assignments, js), g);
    Var pa = tape.sigmoid(tape.row_sum(tape.mul(zi, gj)));
    Var pb = tape.sigmoid(tape.row_sum(tape.mul(zj, gi)));
    Var p = tape.clamp(tape.scale(tape.add(pa, pb), 0.5), kProbClamp, 1.0 - kProbClamp);
    Var yv = tape.input(y);
    Var pos_term = tape.mul(yv, tape.log(p));
    Var neg_term = tape.mul(tape.affine(yv, -1.0, 1.0), tape.log(tape.affine(p, -1.0, 1.0)));
    return tape.scale(tape.mean(tape.add(pos_term, neg_term)), -1.0);
}

double l_recon(const std::vector<std::pair<int, int>>& positives,
               const std::vector<std::pair<int, int>>& negatives, const Tensor& z,
               const Tensor& assignments, const Tensor& g) {
    Tape tape;
    Var loss = l_recon_tape(tape, positives, negatives, tape.input(z), tape.input(assignments),
                            tape.input(g));
    return tape.value(loss).at(0, 0);
}

}  // namespace hinforge
