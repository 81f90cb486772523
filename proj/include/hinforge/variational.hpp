#pragma once

#include "hinforge/autodiff.hpp"
#include "hinforge/hin.hpp"
#include "hinforge/metapath.hpp"
#include "hinforge/rng.hpp"
#include "hinforge/tensor.hpp"

#include <utility>
#include <vector>

namespace hinforge {

constexpr double kProbClamp = 1e-12;
// Guards log() on softmax outputs; gradients pass at the boundary.
constexpr double kLogFloor = 1e-300;

// Gaussian KL against the standard normal prior, summed over nodes and dims:
// 0.5 * sum(mu^2 + sigma^2 - 1 - log sigma^2).
double l_enc(const Tensor& mu, const Tensor& logsigma);
Var l_enc_tape(Tape& tape, Var mu, Var logsigma);

enum class RepSource { metapath, neighbor_fallback, self_fallback };

// Row i averages, uniformly over the walks containing node i, the mean
// embedding of each walk's nodes; nodes in no walk average their immediate
// neighbors, and isolated nodes keep their own embedding. Multiplying this
// matrix into Z realizes all three cases at once.
Tensor representative_matrix(const std::vector<std::vector<int>>& zeta,
                             const std::vector<std::vector<int>>& samples, const Hin& hin,
                             std::vector<RepSource>* tags = nullptr);

struct RepresentativeEmbedding {
    Tensor zhat;
    std::vector<RepSource> tags;
};

RepresentativeEmbedding representative_embedding(const Tensor& z,
                                                 const std::vector<std::vector<int>>& zeta,
                                                 const std::vector<std::vector<int>>& samples,
                                                 const Hin& hin);

// Row-softmax of the node-by-cluster dot products.
Tensor cluster_prior(const Tensor& z, const Tensor& g);
Tensor cluster_posterior(const Tensor& zhat, const Tensor& g);
Var cluster_distribution_tape(Tape& tape, Var z, Var g);

// Categorical KL(q || p) summed over rows.
double l_c(const Tensor& q, const Tensor& p);
Var l_c_tape(Tape& tape, Var q, Var p);

Tensor sample_gumbel(int rows, int cols, Rng& rng);
Tensor gumbel_softmax(const Tensor& logits, const Tensor& gumbel, double tau);
Tensor gumbel_softmax_sample(const Tensor& logits, double tau, Rng& rng);
Var gumbel_softmax_tape(Tape& tape, Var logits, const Tensor& gumbel, double tau);

// Edge probability from Eq-style cross scoring: each endpoint against the
// other endpoint's (assignment-weighted) cluster embedding.
double decode_edge(const Tensor& zi, const Tensor& zj, const Tensor& ci, const Tensor& cj,
                   const Tensor& g);

double l_recon(const std::vector<std::pair<int, int>>& positives,
               const std::vector<std::pair<int, int>>& negatives, const Tensor& z,
               const Tensor& assignments, const Tensor& g);
Var l_recon_tape(Tape& tape, const std::vector<std::pair<int, int>>& positives,
                 const std::vector<std::pair<int, int>>& negatives, Var z, Var assignments, Var g);

inline double l_var(double enc, double c, double recon) { return enc + c + recon; }

}  // namespace hinforge
