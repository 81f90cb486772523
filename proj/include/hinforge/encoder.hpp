#pragma once

#include "hinforge/autodiff.hpp"
#include "hinforge/hin.hpp"
#include "hinforge/rng.hpp"
#include "hinforge/tensor.hpp"

#include <string>
#include <utility>

namespace hinforge {

enum class EncoderVariant { linear, gcn, gcn_plain };

EncoderVariant parse_encoder_variant(const std::string& name);
const char* encoder_variant_name(EncoderVariant v);

// Two heads over one shared rectified hidden layer. gcn variants propagate
// through the normalized adjacency; gcn_plain is deterministic (Z = Mu, the
// returned LogSigma is the constant -50 so reparameterization degenerates to
// the mean and the interface stays uniform across variants).
struct EncoderParams {
    EncoderVariant variant = EncoderVariant::gcn;
    int f = 0, h = 0, d = 0;
    Tensor w0, wmu, wsigma;

    bool variational() const { return variant != EncoderVariant::gcn_plain; }
};

EncoderParams init_encoder(EncoderVariant variant, int f, int h, int d, Rng& rng);

// Constants one encoding pass needs: x is the feature matrix, ahat the
// normalized adjacency (unused by the linear variant), ax the precomputed
// ahat*x product (equals x for the linear variant).
struct EncoderInputs {
    Tensor x;
    Tensor ahat;
    Tensor ax;
};

Tensor normalize_adjacency(const Hin& hin);
EncoderInputs prepare_encoder_inputs(const Tensor& x, const Tensor& ahat, EncoderVariant variant);
EncoderInputs prepare_encoder_inputs(const Hin& hin, EncoderVariant variant);

struct EncoderVars {
    Var w0, wmu, wsigma;
};

EncoderVars place_encoder_params(Tape& tape, const EncoderParams& params);

// Returns (Mu, LogSigma) vars; LogSigma is clamped to [-10, 10] for trained
// heads. encode() is the tape path evaluated without gradients.
std::pair<Var, Var> encode_tape(Tape& tape, const EncoderInputs& in, const EncoderParams& params,
                                const EncoderVars& vars);
std::pair<Tensor, Tensor> encode(const EncoderInputs& in, const EncoderParams& params);

struct LatentSample {
    Tensor z, mu, logsigma, eps;
};

LatentSample reparameterize(const Tensor& mu, const Tensor& logsigma, Rng& rng);
Var reparameterize_tape(Tape& tape, Var mu, Var logsigma, const Tensor& eps);

}  // namespace hinforge
