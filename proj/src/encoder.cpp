#include "hinforge/encoder.hpp"

#include "hinforge/errors.hpp"

#include <cmath>

namespace hinforge {

EncoderVariant parse_encoder_variant(const std::string& name) {
    if (name == "linear") return EncoderVariant::linear;
    if (name == "gcn") return EncoderVariant::gcn;
    if (name == "gcn-plain") return EncoderVariant::gcn_plain;
    throw ArgumentError("unknown encoder variant '" + name + "'");
}

const char* encoder_variant_name(EncoderVariant v) {
    switch (v) {
        case EncoderVariant::linear: return "linear";
        case EncoderVariant::gcn: return "gcn";
        case EncoderVariant::gcn_plain: return "gcn-plain";
    }
    return "?";
}

EncoderParams init_encoder(EncoderVariant variant, int f, int h, int d, Rng& rng) {
    if (f < 1 || h < 1 || d < 1) throw ArgumentError("init_encoder: dims must be >= 1");
    EncoderParams p;
    p.variant = variant;
    p.f = f;
    p.h = h;
    p.d = d;
    // Fixed draw order keeps initialization identical across variants.
    p.w0 = Tensor::gaussian(f, h, rng, 1.0 / std::sqrt(static_cast<double>(f)));
    p.wmu = Tensor::gaussian(h, d, rng, 1.0 / std::sqrt(static_cast<double>(h)));
    p.wsigma = Tensor::gaussian(h, d, rng, 1.0 / std::sqrt(static_cast<double>(h)));
    return p;
}

Tensor normalize_adjacency(const Hin& hin) {
    Tensor a = adjacency_dense(hin);
    for (int i = 0; i < hin.n; ++i) a.at(i, i) += 1.0;
    std::vector<double> dinv(hin.n);
    for (int i = 0; i < hin.n; ++i) {
        double deg = 0.0;
        for (int j = 0; j < hin.n; ++j) deg += a.at(i, j);
        dinv[i] = 1.0 / std::sqrt(deg);
    }
    for (int i = 0; i < hin.n; ++i)
        for (int j = 0; j < hin.n; ++j) a.at(i, j) *= dinv[i] * dinv[j];
    return a;
}

EncoderInputs prepare_encoder_inputs(const Tensor& x, const Tensor& ahat, EncoderVariant variant) {
    EncoderInputs in;
    in.x = x;
    if (variant == EncoderVariant::linear) {
        in.ax = x;
    } else {
        if (ahat.rows != x.rows || ahat.cols != x.rows)
            throw ShapeError("prepare_encoder_inputs: adjacency/feature row mismatch");
        in.ahat = ahat;
        in.ax = matmul(ahat, x);
    }
    return in;
}

EncoderInputs prepare_encoder_inputs(const Hin& hin, EncoderVariant variant) {
    if (variant == EncoderVariant::linear)
        return prepare_encoder_inputs(hin.features, Tensor(), variant);
    return prepare_encoder_inputs(hin.features, normalize_adjacency(hin), variant);
}

EncoderVars place_encoder_params(Tape& tape, const EncoderParams& params) {
    EncoderVars v;
    v.w0 = tape.param(params.w0);
    v.wmu = tape.param(params.wmu);
    v.wsigma = tape.param(params.wsigma);
    return v;
}

std::pair<Var, Var> encode_tape(Tape& tape, const EncoderInputs& in, const EncoderParams& params,
                                const EncoderVars& vars) {
    if (in.x.cols != params.f) throw ShapeError("encode: feature width does not match encoder");
    Var ax = tape.input(in.ax);
    Var hidden = tape.relu(tape.matmul(ax, vars.w0));
    if (params.variant == EncoderVariant::linear) {
        Var mu = tape.matmul(hidden, vars.wmu);
        Var ls = tape.clamp(tape.matmul(hidden, vars.wsigma), -10.0, 10.0);
        return {mu, ls};
    }
    Var ahat = tape.input(in.ahat);
    // ahat*(hidden*w) needs N*h*d + N*N*d multiplies versus N*N*h + N*h*d
    // for (ahat*hidden)*w; cheaper whenever d < h.
    Var mu = tape.matmul(ahat, tape.matmul(hidden, vars.wmu));
    if (params.variant == EncoderVariant::gcn_plain) {
        Var ls = tape.input(Tensor::full(in.x.rows, params.d, -50.0));
        return {mu, ls};
    }
    Var ls = tape.clamp(tape.matmul(ahat, tape.matmul(hidden, vars.wsigma)), -10.0, 10.0);
    return {mu, ls};
}

std::pair<Tensor, Tensor> encode(const EncoderInputs& in, const EncoderParams& params) {
    Tape tape;
    EncoderVars vars;
    vars.w0 = tape.input(params.w0);
    vars.wmu = tape.input(params.wmu);
    vars.wsigma = tape.input(params.wsigma);
    auto [mu, ls] = encode_tape(tape, in, params, vars);
    return {tape.value(mu), tape.value(ls)};
}

LatentSample reparameterize(const Tensor& mu, const Tensor& logsigma, Rng& rng) {
    if (!mu.same_shape(logsigma)) throw ShapeError("reparameterize: shape mismatch");
    LatentSample s;
    s.mu = mu;
    s.logsigma = logsigma;
    s.eps = Tensor::gaussian(mu.rows, mu.cols, rng);
    s.z = Tensor(mu.rows, mu.cols);
    for (long i = 0; i < mu.size(); ++i)
        s.z.data[i] = mu.data[i] + std::exp(logsigma.data[i]) * s.eps.data[i];
    ensure_finite(s.z, "reparameterize");
    return s;
}

Var reparameterize_tape(Tape& tape, Var mu, Var logsigma, const Tensor& eps) {
    Var e = tape.input(eps);
    return tape.add(mu, tape.mul(tape.exp(logsigma), e));
}

}  // namespace hinforge
