#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hinforge/autodiff.hpp"
#include "hinforge/errors.hpp"
#include "hinforge/rng.hpp"

#include <cmath>

using namespace hinforge;

namespace {

// Finite-difference harness: builds the graph twice, once for analytic
// gradients and once per probe inside max_fd_error.
double fd_error(const std::function<Var(Tape&, const std::vector<Var>&)>& build,
                const std::vector<Tensor>& at) {
    Tape tape;
    std::vector<Var> leaves;
    for (const Tensor& t : at) leaves.push_back(tape.param(t));
    Var loss = build(tape, leaves);
    std::vector<Tensor> analytic = tape.grad(loss, leaves);
    auto f = [&](const std::vector<Tensor>& xs) {
        Tape t2;
        std::vector<Var> l2;
        for (const Tensor& t : xs) l2.push_back(t2.param(t));
        return t2.value(build(t2, l2)).at(0, 0);
    };
    return max_fd_error(f, at, analytic);
}

Tensor away_from_kinks(int r, int c, uint64_t seed) {
    Rng rng(seed);
    Tensor t = Tensor::gaussian(r, c, rng);
    // Keep relu/clamp inputs off their corners so central differences stay valid.
    for (double& v : t.data)
        if (std::abs(v) < 0.05) v += v < 0 ? -0.1 : 0.1;
    return t;
}

}  // namespace

TEST_CASE("values match the plain kernels") {
    Rng rng(1);
    Tensor a = Tensor::gaussian(3, 4, rng);
    Tensor b = Tensor::gaussian(4, 2, rng);
    Tape tape;
    Var va = tape.input(a), vb = tape.input(b);
    CHECK(tape.value(tape.matmul(va, vb)) == matmul(a, b));
    CHECK(tape.value(tape.transpose(va)) == transpose(a));
    CHECK(tape.value(tape.sigmoid(va)) == sigmoid(a));
    CHECK(tape.value(tape.softmax_rows(va)) == softmax_rows(a));
    CHECK(tape.value(tape.row_sum(va)) == row_sum(a));
    CHECK(tape.value(tape.sum(va)).at(0, 0) == sum(a));
    CHECK(tape.value(tape.mean(va)).at(0, 0) == mean(a));
}

TEST_CASE("matmul gradients") {
    CHECK(fd_error([](Tape& t, const std::vector<Var>& v) {
              return t.sum(t.matmul(v[0], v[1]));
          },
          {away_from_kinks(3, 4, 2), away_from_kinks(4, 2, 3)}) < 1e-6);
}

TEST_CASE("elementwise and scalar-op gradients") {
    auto build = [](Tape& t, const std::vector<Var>& v) {
        Var x = t.mul(v[0], v[1]);
        x = t.add(x, t.scale(v[0], 0.3));
        x = t.sub(x, t.affine(v[1], 2.0, -1.0));
        return t.sum(t.mul(x, x));
    };
    CHECK(fd_error(build, {away_from_kinks(3, 3, 4), away_from_kinks(3, 3, 5)}) < 1e-6);
}

TEST_CASE("activation gradients (sigmoid, relu, exp, log, tanh)") {
    auto build = [](Tape& t, const std::vector<Var>& v) {
        Var s = t.sigmoid(v[0]);
        Var r = t.relu(v[0]);
        Var e = t.exp(t.scale(v[0], 0.1));
        Var l = t.log(t.affine(t.sigmoid(v[0]), 1.0, 0.5));  // strictly positive input
        Var th = t.activation("tanh", v[0]);
        return t.sum(t.add(t.add(s, r), t.add(t.mul(e, l), th)));
    };
    CHECK(fd_error(build, {away_from_kinks(4, 3, 6)}) < 1e-6);
}

TEST_CASE("softmax, clamp interior, transpose, gather, reshape, concat gradients") {
    auto build = [](Tape& t, const std::vector<Var>& v) {
        Var p = t.softmax_rows(v[0]);
        Var c = t.clamp(v[0], -50.0, 50.0);  // interior: gradient passes everywhere
        Var g = t.gather_rows(v[0], {2, 0, 0, 1});
        Var rs = t.reshape(g, 2, 6);
        Var cc = t.concat_rows({p, c});
        Var cl = t.concat_cols({t.transpose(rs), t.transpose(rs)});
        return t.add(t.mean(t.mul(cc, cc)), t.add(t.sum(cl), t.mean(rs)));
    };
    CHECK(fd_error(build, {away_from_kinks(3, 3, 7)}) < 1e-6);
}

TEST_CASE("clamp blocks gradient outside the interval") {
    Tensor x(1, 3);
    x.data = {-2.0, 0.5, 2.0};
    Tape tape;
    Var v = tape.param(x);
    Var loss = tape.sum(tape.clamp(v, -1.0, 1.0));
    Tensor g = tape.grad(loss, {v})[0];
    CHECK(g.data == std::vector<double>{0.0, 1.0, 0.0});
}

TEST_CASE("row_sum and mean gradients") {
    auto build = [](Tape& t, const std::vector<Var>& v) {
        return t.mean(t.mul(t.row_sum(v[0]), t.row_sum(v[0])));
    };
    CHECK(fd_error(build, {away_from_kinks(4, 3, 8)}) < 1e-6);
}

TEST_CASE("reused vars accumulate gradients") {
    Tensor x = Tensor::full(2, 2, 3.0);
    Tape tape;
    Var v = tape.param(x);
    Var loss = tape.sum(tape.add(v, v));  // d/dx sum(2x) = 2
    Tensor g = tape.grad(loss, {v})[0];
    for (double d : g.data) CHECK(d == 2.0);
}

TEST_CASE("constant leaves receive zero gradient and skip backward work") {
    Rng rng(9);
    Tensor a = Tensor::gaussian(3, 3, rng), b = Tensor::gaussian(3, 3, rng);
    Tape tape;
    Var pa = tape.param(a);
    Var cb = tape.input(b);
    Var loss = tape.sum(tape.matmul(pa, cb));
    auto grads = tape.grad(loss, {pa, cb});
    CHECK(grads[0].same_shape(a));
    bool nonzero = false;
    for (double v : grads[0].data) nonzero |= v != 0.0;
    CHECK(nonzero);
    // The constant leaf reports zeros by contract.
    for (double v : grads[1].data) CHECK(v == 0.0);
}

TEST_CASE("unreached params get zero gradients of their shape") {
    Tape tape;
    Var used = tape.param(Tensor::ones(1, 2));
    Var unused = tape.param(Tensor::ones(4, 5));
    Tensor g = tape.grad(tape.sum(used), {unused})[0];
    CHECK(g.rows == 4);
    CHECK(g.cols == 5);
    for (double v : g.data) CHECK(v == 0.0);
}

TEST_CASE("hard_onehot_rows: forward argmax, backward contract") {
    Tensor x(2, 3);
    x.data = {0.1, 0.7, 0.2, 0.5, 0.2, 0.3};
    Tape tape;
    Var v = tape.param(x);
    Var h = tape.hard_onehot_rows(v, false);
    CHECK(tape.value(h).data == std::vector<double>{0.0, 1.0, 0.0, 1.0, 0.0, 0.0});
    CHECK_THROWS_AS(tape.grad(tape.sum(h), {v}), ContractError);

    Tape tape2;
    Var v2 = tape2.param(x);
    Var h2 = tape2.hard_onehot_rows(v2, true);
    Tensor g = tape2.grad(tape2.sum(h2), {v2})[0];  // straight-through passes 1s
    for (double d : g.data) CHECK(d == 1.0);
}

TEST_CASE("activation dispatch rejects unknown names") {
    Tape tape;
    Var v = tape.input(Tensor::ones(1, 1));
    CHECK_THROWS_AS(tape.activation("swish", v), ContractError);
    CHECK(tape.value(tape.activation("identity", v)).at(0, 0) == 1.0);
    CHECK(tape.value(tape.activation("tanh", v)).at(0, 0) ==
          doctest::Approx(std::tanh(1.0)).epsilon(1e-12));
}

TEST_CASE("grad demands a scalar loss and in-range vars") {
    Tape tape;
    Var v = tape.param(Tensor::ones(2, 2));
    CHECK_THROWS_AS(tape.grad(v, {v}), ArgumentError);
    CHECK_THROWS_AS(tape.value(Var{99}), ArgumentError);
    CHECK_THROWS_AS(tape.value(Var{}), ArgumentError);
}

TEST_CASE("a composite loss in the shape of the training objective checks out") {
    // KL-like + BCE-like + bilinear pieces in one graph, gradients vs FD.
    auto build = [](Tape& t, const std::vector<Var>& v) {
        Var mu = t.matmul(v[0], v[1]);
        Var kl = t.scale(t.sum(t.mul(mu, mu)), 0.5);
        Var p = t.clamp(t.sigmoid(t.row_sum(mu)), 1e-12, 1.0 - 1e-12);
        Var bce = t.scale(t.mean(t.log(p)), -1.0);
        Var q = t.softmax_rows(t.matmul(mu, t.transpose(v[2])));
        Var ent = t.scale(t.sum(t.mul(q, t.log(t.clamp(q, 1e-300, 1.0)))), -1.0);
        return t.add(kl, t.add(bce, ent));
    };
    CHECK(fd_error(build, {away_from_kinks(4, 3, 10), away_from_kinks(3, 2, 11),
                           away_from_kinks(3, 2, 12)}) < 1e-5);
}
