#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hinforge/contrastive.hpp"
#include "hinforge/errors.hpp"
#include "hinforge/rng.hpp"

#include <algorithm>
#include <cmath>

using namespace hinforge;

namespace {

double fd_check(const std::function<Var(Tape&, const std::vector<Var>&)>& build,
                const std::vector<Tensor>& at) {
    Tape tape;
    std::vector<Var> leaves;
    for (const Tensor& t : at) leaves.push_back(tape.param(t));
    std::vector<Tensor> analytic = tape.grad(build(tape, leaves), leaves);
    auto f = [&](const std::vector<Tensor>& xs) {
        Tape t2;
        std::vector<Var> l2;
        for (const Tensor& t : xs) l2.push_back(t2.param(t));
        return t2.value(build(t2, l2)).at(0, 0);
    };
    return max_fd_error(f, at, analytic);
}

// Direct, index-at-a-time reference for one schema's contrastive loss.
double lp_oracle(const std::vector<std::vector<int>>& walks, const Tensor& z, const Tensor& zbar,
                 const Tensor& w, int j) {
    const int d = z.cols;
    double acc = 0.0;
    for (const auto& walk : walks) {
        const int len = static_cast<int>(walk.size());
        std::vector<double> v, vbar, s(d, 0.0);
        for (int node : walk)
            for (int a = 0; a < d; ++a) {
                v.push_back(z.at(node, a));
                vbar.push_back(zbar.at(node, a));
            }
        for (int l = 0; l < len; ++l)
            for (int a = 0; a < d; ++a) s[a] += z.at(walk[l], a) / len;
        auto score = [&](const std::vector<double>& vec) {
            double out = 0.0;
            for (int col = 0; col < d; ++col) {
                double u = 0.0;
                for (int row = 0; row < len * d; ++row) u += vec[row] * w.at(row, col);
                out += u * s[col];
            }
            double p = 1.0 / (1.0 + std::exp(-out));
            return std::min(std::max(p, 1e-12), 1.0 - 1e-12);
        };
        acc += std::log(score(v)) + j * std::log(1.0 - score(vbar));
    }
    return -acc / ((j + 1.0) * walks.size());
}

}  // namespace

TEST_CASE("corruption permutes feature rows without inventing values") {
    Rng rng(3);
    Tensor x = Tensor::gaussian(7, 4, rng);
    Rng perm_rng(11);
    Tensor xb = corrupt_features(x, perm_rng);
    REQUIRE(xb.same_shape(x));
    CHECK(xb.data != x.data);  // permutation of 7 gaussian rows is near-surely nontrivial
    auto sorted_rows = [](const Tensor& t) {
        std::vector<std::vector<double>> rows;
        for (int i = 0; i < t.rows; ++i)
            rows.emplace_back(t.row(i), t.row(i) + t.cols);
        std::sort(rows.begin(), rows.end());
        return rows;
    };
    CHECK(sorted_rows(x) == sorted_rows(xb));
    Rng again(11);
    CHECK(corrupt_features(x, again) == xb);
    Tensor tiny(1, 3);
    CHECK_THROWS_AS(corrupt_features(tiny, rng), ArgumentError);
}

TEST_CASE("sample encoding stacks walk rows in order; summary is their mean") {
    Rng rng(5);
    Tensor z = Tensor::gaussian(6, 3, rng);
    Tensor zp = encode_sample({4, 0, 4}, z);
    REQUIRE(zp.rows == 3);
    for (int a = 0; a < 3; ++a) {
        CHECK(zp.at(0, a) == z.at(4, a));
        CHECK(zp.at(1, a) == z.at(0, a));
        CHECK(zp.at(2, a) == z.at(4, a));
    }
    Tensor s = summary(zp);
    REQUIRE(s.rows == 1);
    for (int a = 0; a < 3; ++a)
        CHECK(s.at(0, a) ==
              doctest::Approx((2.0 * z.at(4, a) + z.at(0, a)) / 3.0).epsilon(1e-14));
    CHECK_THROWS_AS(summary(Tensor(0, 3)), ArgumentError);
}

TEST_CASE("discriminator computes sigmoid of the bilinear form") {
    Rng rng(7);
    Tensor zp = Tensor::gaussian(2, 3, rng);  // walk length 2, d = 3
    Tensor w = Tensor::gaussian(6, 3, rng);
    Tensor s = summary(zp);
    double want = 0.0;
    for (int col = 0; col < 3; ++col) {
        double u = 0.0;
        for (int row = 0; row < 6; ++row) u += zp.data[row] * w.at(row, col);
        want += u * s.at(0, col);
    }
    want = 1.0 / (1.0 + std::exp(-want));
    CHECK(discriminate(zp, s, w) == doctest::Approx(want).epsilon(1e-14));
    CHECK_THROWS_AS(discriminate(zp, s, Tensor(5, 3)), ShapeError);
    CHECK_THROWS_AS(discriminate(zp, Tensor(1, 2), w), ShapeError);
}

TEST_CASE("discriminator weights are (len*d) x d") {
    Rng rng(9);
    Tensor w = init_discriminator(3, 4, rng);
    CHECK(w.rows == 12);
    CHECK(w.cols == 4);
    CHECK_THROWS_AS(init_discriminator(0, 4, rng), ArgumentError);
}

TEST_CASE("contrastive loss matches the per-walk oracle") {
    Rng rng(13);
    const int n = 9, d = 3;
    Tensor z = Tensor::gaussian(n, d, rng);
    Tensor zbar = Tensor::gaussian(n, d, rng);
    Tensor w = Tensor::gaussian(3 * d, d, rng);
    std::vector<std::vector<int>> walks{{0, 3, 6}, {1, 4, 7}, {2, 5, 8}, {0, 5, 7}};
    for (int j : {1, 3})
        CHECK(l_p(walks, z, zbar, w, j) ==
              doctest::Approx(lp_oracle(walks, z, zbar, w, j)).epsilon(1e-10));
}

TEST_CASE("indifferent discriminator scores log 2 for any negative count") {
    Rng rng(17);
    Tensor z = Tensor::gaussian(5, 2, rng);
    Tensor zbar = Tensor::gaussian(5, 2, rng);
    Tensor w = Tensor::zeros(4, 2);  // every score sigmoid(0) = 1/2
    std::vector<std::vector<int>> walks{{0, 1}, {2, 3}, {1, 4}};
    for (int j : {1, 2, 5})
        CHECK(l_p(walks, z, zbar, w, j) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("contrastive gradients through embeddings and weights") {
    Rng rng(19);
    std::vector<std::vector<int>> walks{{0, 2}, {1, 3}, {3, 0}};
    auto build = [&](Tape& t, const std::vector<Var>& v) {
        return l_p_tape(t, walks, v[0], v[1], v[2], 2);
    };
    CHECK(fd_check(build, {Tensor::gaussian(4, 3, rng), Tensor::gaussian(4, 3, rng),
                           Tensor::gaussian(6, 3, rng)}) < 1e-6);
}

TEST_CASE("contrastive batch contracts") {
    Rng rng(23);
    Tensor z = Tensor::gaussian(4, 2, rng);
    Tensor w = Tensor::gaussian(4, 2, rng);
    CHECK_THROWS_AS(l_p({}, z, z, w, 1), ArgumentError);
    CHECK_THROWS_AS(l_p({{0, 1}, {0, 1, 2}}, z, z, w, 1), ArgumentError);
    CHECK_THROWS_AS(l_p({{0, 1}}, z, z, w, 0), ArgumentError);
}

TEST_CASE("the contrastive total is the sum over schemas") {
    CHECK(l_cont({}) == 0.0);
    CHECK(l_cont({0.5, 1.25, -0.25}) == 1.5);
}
