#pragma once

#include "hinforge/autodiff.hpp"
#include "hinforge/rng.hpp"
#include "hinforge/tensor.hpp"

#include <vector>

namespace hinforge {

// Row permutation of the feature matrix; graph structure is untouched.
Tensor corrupt_features(const Tensor& x, Rng& rng);

// Row-stack of the walk's node embeddings, order preserving.
Tensor encode_sample(const std::vector<int>& walk, const Tensor& z_source);

// Columnwise mean, 1 x d.
Tensor summary(const Tensor& zp);

// sigma(v' W s) where v is the row-major flattening of zp.
double discriminate(const Tensor& zp, const Tensor& s, const Tensor& w);

Tensor init_discriminator(int walk_len, int d, Rng& rng);

// BCE over a batch of walks: positives read from z, negatives read the same
// walks from zbar (corrupted-feature embeddings), each scored against the
// positive's summary. j_negatives > 1 reuses the single corrupted pass, so
// the negative term is weighted j-fold. Normalization 1 / ((J+1) * batch).
Var l_p_tape(Tape& tape, const std::vector<std::vector<int>>& walks, Var z, Var zbar, Var w,
             int j_negatives);
double l_p(const std::vector<std::vector<int>>& walks, const Tensor& z, const Tensor& zbar,
           const Tensor& w, int j_negatives);

double l_cont(const std::vector<double>& per_schema_losses);

}  // namespace hinforge
