#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hinforge/encoder.hpp"
#include "hinforge/errors.hpp"
#include "test_util.hpp"

#include <cmath>

using namespace hinforge;
using namespace testutil;

TEST_CASE("variant names round trip; unknown names rejected") {
    CHECK(parse_encoder_variant("linear") == EncoderVariant::linear);
    CHECK(parse_encoder_variant("gcn") == EncoderVariant::gcn);
    CHECK(parse_encoder_variant("gcn-plain") == EncoderVariant::gcn_plain);
    CHECK(std::string(encoder_variant_name(EncoderVariant::gcn_plain)) == "gcn-plain");
    CHECK_THROWS_AS(parse_encoder_variant("gat"), ArgumentError);
}

TEST_CASE("initialization shapes, determinism, and shared draw order") {
    Rng a(5);
    EncoderParams p = init_encoder(EncoderVariant::gcn, 7, 6, 3, a);
    CHECK(p.w0.rows == 7);
    CHECK(p.w0.cols == 6);
    CHECK(p.wmu.rows == 6);
    CHECK(p.wmu.cols == 3);
    CHECK(p.wsigma.rows == 6);
    CHECK(p.wsigma.cols == 3);
    CHECK(p.variational());

    Rng b(5);
    EncoderParams q = init_encoder(EncoderVariant::linear, 7, 6, 3, b);
    CHECK(p.w0 == q.w0);  // variants consume the stream identically
    CHECK(p.wmu == q.wmu);
    CHECK(p.wsigma == q.wsigma);
    CHECK_FALSE(init_encoder(EncoderVariant::gcn_plain, 2, 2, 2, b).variational());

    Rng c(6);
    CHECK_THROWS_AS(init_encoder(EncoderVariant::gcn, 0, 2, 2, c), ArgumentError);
}

TEST_CASE("normalized adjacency matches the symmetric degree formula") {
    Hin hin = bib_hin("enc-ahat");
    Tensor ahat = normalize_adjacency(hin);
    Tensor a = adjacency_dense(hin);
    for (int i = 0; i < hin.n; ++i) a.at(i, i) += 1.0;
    std::vector<double> deg(hin.n, 0.0);
    for (int i = 0; i < hin.n; ++i)
        for (int j = 0; j < hin.n; ++j) deg[i] += a.at(i, j);
    for (int i = 0; i < hin.n; ++i)
        for (int j = 0; j < hin.n; ++j) {
            double want = a.at(i, j) / std::sqrt(deg[i] * deg[j]);
            CHECK(ahat.at(i, j) == doctest::Approx(want).epsilon(1e-14));
            CHECK(ahat.at(i, j) == ahat.at(j, i));
        }
    // A1 has degree 2 (+1 self), P1 degree 3 (+1 self): entry = 1/sqrt(12).
    CHECK(ahat.at(0, 4) == doctest::Approx(1.0 / std::sqrt(12.0)).epsilon(1e-14));
}

TEST_CASE("prepared inputs precompute the propagation product") {
    Hin hin = bib_hin("enc-prep");
    EncoderInputs g = prepare_encoder_inputs(hin, EncoderVariant::gcn);
    CHECK(g.ax == matmul(g.ahat, hin.features));
    EncoderInputs l = prepare_encoder_inputs(hin, EncoderVariant::linear);
    CHECK(l.ax == hin.features);
    CHECK_THROWS_AS(prepare_encoder_inputs(hin.features, Tensor(3, 3), EncoderVariant::gcn),
                    ShapeError);
}

TEST_CASE("linear encoding is relu(x w0) against both heads") {
    Hin hin = bib_hin("enc-linear");
    Rng rng(11);
    EncoderParams p = init_encoder(EncoderVariant::linear, 3, 5, 2, rng);
    EncoderInputs in = prepare_encoder_inputs(hin, EncoderVariant::linear);
    auto [mu, ls] = encode(in, p);
    Tensor hidden = relu(matmul(hin.features, p.w0));
    CHECK(mu == matmul(hidden, p.wmu));
    CHECK(ls == clamp(matmul(hidden, p.wsigma), -10.0, 10.0));
}

TEST_CASE("gcn encoding propagates both heads through the adjacency") {
    Hin hin = bib_hin("enc-gcn");
    Rng rng(13);
    EncoderParams p = init_encoder(EncoderVariant::gcn, 3, 5, 2, rng);
    EncoderInputs in = prepare_encoder_inputs(hin, EncoderVariant::gcn);
    auto [mu, ls] = encode(in, p);
    Tensor hidden = relu(matmul(in.ax, p.w0));
    // Reference computes (ahat*hidden)*w; the implementation reassociates.
    Tensor want_mu = matmul(matmul(in.ahat, hidden), p.wmu);
    Tensor want_ls = clamp(matmul(matmul(in.ahat, hidden), p.wsigma), -10.0, 10.0);
    REQUIRE(mu.same_shape(want_mu));
    for (long i = 0; i < mu.size(); ++i) {
        CHECK(mu.data[i] == doctest::Approx(want_mu.data[i]).epsilon(1e-12));
        CHECK(ls.data[i] == doctest::Approx(want_ls.data[i]).epsilon(1e-12));
    }
}

TEST_CASE("log-sigma head saturates at the clamp bounds") {
    Hin hin = bib_hin("enc-clamp");
    Rng rng(17);
    EncoderParams p = init_encoder(EncoderVariant::linear, 3, 4, 2, rng);
    p.wsigma = Tensor::full(4, 2, 1000.0);
    auto [mu, ls] = encode(prepare_encoder_inputs(hin, EncoderVariant::linear), p);
    for (double v : ls.data) {
        CHECK(v >= -10.0);
        CHECK(v <= 10.0);
    }
    bool hit = false;
    for (double v : ls.data) hit |= v == 10.0;
    CHECK(hit);
}

TEST_CASE("gcn-plain is deterministic: z equals mu") {
    Hin hin = bib_hin("enc-plain");
    Rng rng(19);
    EncoderParams p = init_encoder(EncoderVariant::gcn_plain, 3, 5, 2, rng);
    auto [mu, ls] = encode(prepare_encoder_inputs(hin, EncoderVariant::gcn_plain), p);
    for (double v : ls.data) CHECK(v == -50.0);
    Rng noise(7);
    LatentSample s = reparameterize(mu, ls, noise);
    for (long i = 0; i < mu.size(); ++i)
        CHECK(std::abs(s.z.data[i] - mu.data[i]) < 1e-15);
}

TEST_CASE("reparameterization has the right moments") {
    const int n = 20000;
    Tensor mu = Tensor::full(n, 1, 2.0);
    Tensor ls = Tensor::full(n, 1, std::log(0.5));
    Rng rng(23);
    LatentSample s = reparameterize(mu, ls, rng);
    double m = 0.0;
    for (double v : s.z.data) m += v;
    m /= n;
    double var = 0.0;
    for (double v : s.z.data) var += (v - m) * (v - m);
    var /= n - 1;
    CHECK(std::abs(m - 2.0) < 0.02);
    CHECK(std::abs(std::sqrt(var) - 0.5) < 0.02);
    // z = mu + sigma * eps, recorded noise included
    for (long i = 0; i < s.z.size(); ++i)
        CHECK(s.z.data[i] == doctest::Approx(2.0 + 0.5 * s.eps.data[i]).epsilon(1e-12));
    CHECK_THROWS_AS(reparameterize(mu, Tensor::zeros(2, 2), rng), ShapeError);
}

TEST_CASE("tape encoding equals the plain encoding") {
    Hin hin = bib_hin("enc-tape");
    Rng rng(29);
    EncoderParams p = init_encoder(EncoderVariant::gcn, 3, 4, 2, rng);
    EncoderInputs in = prepare_encoder_inputs(hin, EncoderVariant::gcn);
    auto [pmu, pls] = encode(in, p);
    Tape tape;
    EncoderVars vars = place_encoder_params(tape, p);
    auto [tmu, tls] = encode_tape(tape, in, p, vars);
    CHECK(tape.value(tmu) == pmu);
    CHECK(tape.value(tls) == pls);
}

TEST_CASE("feature width mismatches are rejected") {
    Hin hin = bib_hin("enc-width");
    Rng rng(31);
    EncoderParams p = init_encoder(EncoderVariant::gcn, 9, 4, 2, rng);
    CHECK_THROWS_AS(encode(prepare_encoder_inputs(hin, EncoderVariant::gcn), p), ShapeError);
}
