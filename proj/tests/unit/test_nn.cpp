#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <doctest.h>

#include "agecharge/common/errors.hpp"
#include "agecharge/nn/adam.hpp"
#include "agecharge/nn/checkpoint.hpp"
#include "agecharge/nn/gaussian.hpp"
#include "agecharge/nn/kernels.hpp"
#include "agecharge/nn/mlp.hpp"

using namespace agecharge;
using namespace agecharge::nn;

namespace {

Matrix random_matrix(int r, int c, std::mt19937_64& rng) {
    std::normal_distribution<double> N(0.0, 1.0);
    Matrix m(r, c);
    for (auto& x : m.v) x = N(rng);
    return m;
}

// 0.5 * sum (y - t)^2 with its gradient
double sq_loss(const Matrix& y, const Matrix& t, Matrix* dy) {
    double l = 0.0;
    if (dy) *dy = Matrix(y.rows, y.cols);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y.v[i] - t.v[i];
        l += 0.5 * d * d;
        if (dy) dy->v[i] = d;
    }
    return l;
}

}  // namespace

TEST_CASE("parallel kernels match the serial reference") {
    std::mt19937_64 rng(1);
    for (auto [n, in, out] : {std::tuple{3, 5, 7}, std::tuple{64, 33, 65}, std::tuple{300, 128, 96}}) {
        const auto X = random_matrix(n, in, rng), W = random_matrix(out, in, rng), b = random_matrix(1, out, rng),
                   dY = random_matrix(n, out, rng);
        Matrix Y1(n, out), Y2(n, out), dX1(n, in), dX2(n, in);
        Matrix dW1(out, in, 0.5), dW2(out, in, 0.5), db1(1, out, 0.25), db2(1, out, 0.25);
        kernels::dense_forward_serial(X.data(), W.data(), b.data(), Y1.data(), n, in, out);
        kernels::dense_forward(X.data(), W.data(), b.data(), Y2.data(), n, in, out);
        kernels::dense_grad_weights_serial(X.data(), dY.data(), dW1.data(), db1.data(), n, in, out);
        kernels::dense_grad_weights(X.data(), dY.data(), dW2.data(), db2.data(), n, in, out);
        kernels::dense_grad_input_serial(dY.data(), W.data(), dX1.data(), n, in, out);
        kernels::dense_grad_input(dY.data(), W.data(), dX2.data(), n, in, out);
        for (std::size_t i = 0; i < Y1.size(); ++i) CHECK(Y1.v[i] == doctest::Approx(Y2.v[i]).epsilon(1e-12));
        for (std::size_t i = 0; i < dW1.size(); ++i) CHECK(dW1.v[i] == doctest::Approx(dW2.v[i]).epsilon(1e-12));
        for (std::size_t i = 0; i < db1.size(); ++i) CHECK(db1.v[i] == doctest::Approx(db2.v[i]).epsilon(1e-12));
        for (std::size_t i = 0; i < dX1.size(); ++i) CHECK(dX1.v[i] == doctest::Approx(dX2.v[i]).epsilon(1e-12));
        // spot check one entry by hand
        double y = b.v[2];
        for (int k = 0; k < in; ++k) y += X(1, k) * W(2, k);
        CHECK(Y1(1, 2) == doctest::Approx(y).epsilon(1e-13));
    }
}

TEST_CASE("zero weights output the last bias") {
    MlpNet net({4, 8, 8, 3});
    net.params()[net.bias_offset(2) + 0] = 1.5;
    net.params()[net.bias_offset(2) + 2] = -0.5;
    const auto y = net.predict(std::vector<double>{1.0, -2.0, 3.0, 0.1});
    CHECK(y == std::vector<double>{1.5, 0.0, -0.5});
}

TEST_CASE("single linear layer gradient in closed form") {
    std::mt19937_64 rng(2);
    MlpNet net({3, 2});
    net.init_uniform(rng);
    const auto X = random_matrix(5, 3, rng), T = random_matrix(5, 2, rng);
    const auto Y = net.forward(X);
    Matrix dY;
    sq_loss(Y, T, &dY);
    net.zero_grad();
    const auto dX = net.backward(dY);
    for (int o = 0; o < 2; ++o) {
        double gb = 0.0;
        for (int r = 0; r < 5; ++r) gb += Y(r, o) - T(r, o);
        CHECK(net.grads()[net.bias_offset(0) + o] == doctest::Approx(gb).epsilon(1e-12));
        for (int i = 0; i < 3; ++i) {
            double gw = 0.0;
            for (int r = 0; r < 5; ++r) gw += (Y(r, o) - T(r, o)) * X(r, i);
            CHECK(net.grads()[net.weight_offset(0) + o * 3 + i] == doctest::Approx(gw).epsilon(1e-12));
        }
    }
    for (int r = 0; r < 5; ++r) {
        for (int i = 0; i < 3; ++i) {
            double g = 0.0;
            for (int o = 0; o < 2; ++o) g += (Y(r, o) - T(r, o)) * net.params()[net.weight_offset(0) + o * 3 + i];
            CHECK(dX(r, i) == doctest::Approx(g).epsilon(1e-12));
        }
    }
}

TEST_CASE("identity weights pass positive inputs through ReLU layers") {
    MlpNet net({3, 3, 3});
    for (int l = 0; l < 2; ++l) {
        for (int i = 0; i < 3; ++i) net.params()[net.weight_offset(l) + i * 3 + i] = 1.0;
    }
    const std::vector<double> x{0.5, 2.0, 7.0};
    CHECK(net.predict(x) == x);
    CHECK(net.predict(std::vector<double>{-1.0, 2.0, -3.0}) == std::vector<double>{0.0, 2.0, 0.0});
}

TEST_CASE("backpropagation agrees with finite differences") {
    std::mt19937_64 rng(5);
    for (bool serial : {true, false}) {
        MlpNet net({6, 16, 16, 2});
        net.set_serial(serial);
        net.init_uniform(rng);
        const auto X = random_matrix(8, 6, rng), T = random_matrix(8, 2, rng);
        Matrix dY;
        sq_loss(net.forward(X), T, &dY);
        REQUIRE(net.min_abs_preactivation() > 1e-4);
        net.zero_grad();
        const auto dX = net.backward(dY);
        const double h = 1e-6;
        for (std::size_t i = 0; i < net.n_params(); i += 7) {
            const double p = net.params()[i];
            net.params()[i] = p + h;
            const double lp = sq_loss(net.predict(X), T, nullptr);
            net.params()[i] = p - h;
            const double lm = sq_loss(net.predict(X), T, nullptr);
            net.params()[i] = p;
            const double fd = (lp - lm) / (2 * h);
            CHECK(net.grads()[i] == doctest::Approx(fd).epsilon(1e-5).scale(1e-6));
        }
        for (int r = 0; r < 8; r += 3) {
            for (int c = 0; c < 6; ++c) {
                auto Xp = X, Xm = X;
                Xp(r, c) += h;
                Xm(r, c) -= h;
                const double fd = (sq_loss(net.predict(Xp), T, nullptr) - sq_loss(net.predict(Xm), T, nullptr)) / (2 * h);
                CHECK(dX(r, c) == doctest::Approx(fd).epsilon(1e-5).scale(1e-6));
            }
        }
    }
}

TEST_CASE("gradients accumulate until zeroed") {
    std::mt19937_64 rng(6);
    MlpNet net({2, 4, 1});
    net.init_uniform(rng);
    const auto X = random_matrix(3, 2, rng);
    Matrix dY(3, 1, 1.0);
    net.forward(X);
    net.zero_grad();
    net.backward(dY);
    const auto g1 = net.grads();
    net.backward(dY);
    for (std::size_t i = 0; i < g1.size(); ++i) CHECK(net.grads()[i] == doctest::Approx(2.0 * g1[i]));
}

TEST_CASE("misuse of the network is reported") {
    MlpNet net({2, 3, 1});
    CHECK_THROWS_AS(net.backward(Matrix(1, 1)), std::logic_error);
    CHECK_THROWS_AS(net.forward(Matrix(1, 3)), ShapeError);
    net.forward(Matrix(2, 2));
    CHECK_THROWS_AS(net.backward(Matrix(2, 2)), ShapeError);
}

TEST_CASE("Adam first step moves each parameter by the learning rate") {
    Adam opt(3, 0.01);
    std::vector<double> p{1.0, -2.0, 0.5};
    opt.step(p, {4.0, -1e-3, 0.0});
    CHECK(p[0] == doctest::Approx(1.0 - 0.01).epsilon(1e-6));
    CHECK(p[1] == doctest::Approx(-2.0 + 0.01).epsilon(1e-4));
    CHECK(p[2] == 0.5);
    CHECK(opt.steps() == 1);
}

TEST_CASE("Adam second step against the recurrence") {
    const double lr = 0.1, b1 = 0.9, b2 = 0.999, eps = 1e-8;
    Adam opt(1, lr, b1, b2, eps);
    std::vector<double> p{0.0};
    opt.step(p, {1.0});
    opt.step(p, {-3.0});
    double m = 0.0, v = 0.0, x = 0.0;
    for (auto [t, g] : {std::pair{1, 1.0}, std::pair{2, -3.0}}) {
        m = b1 * m + (1 - b1) * g;
        v = b2 * v + (1 - b2) * g * g;
        x -= lr * (m / (1 - std::pow(b1, t))) / (std::sqrt(v / (1 - std::pow(b2, t))) + eps);
    }
    CHECK(p[0] == doctest::Approx(x).epsilon(1e-12));
}

TEST_CASE("Adam rejects non-finite gradients without side effects") {
    Adam opt(2, 0.1);
    std::vector<double> p{1.0, 2.0};
    try {
        opt.step(p, {0.5, NAN});
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("1") != std::string::npos);
    }
    CHECK(p == std::vector<double>{1.0, 2.0});
    CHECK(opt.steps() == 0);
    CHECK(opt.m() == std::vector<double>{0.0, 0.0});
    CHECK_THROWS_AS(opt.step(p, {1.0}), ShapeError);
}

TEST_CASE("Adam minimises a quadratic") {
    Adam opt(2, 0.05);
    std::vector<double> p{3.0, -4.0};
    for (int k = 0; k < 2000; ++k) opt.step(p, {2.0 * (p[0] - 1.0), 2.0 * (p[1] + 0.5)});
    CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(p[1] == doctest::Approx(-0.5).epsilon(1e-3));
}

TEST_CASE("squash Jacobian is stable in the tails") {
    for (double u : {-30.0, -3.0, -0.2, 0.0, 0.7, 5.0, 30.0}) {
        const double t = std::tanh(u);
        if (std::abs(u) < 10.0) CHECK(log_squash_jacobian(u) == doctest::Approx(std::log(0.5 * (1 - t * t))).epsilon(1e-10));
        CHECK(std::isfinite(log_squash_jacobian(u)));
    }
    CHECK(log_squash_jacobian(30.0) == doctest::Approx(std::log(2.0) - 60.0).epsilon(1e-12));
}

TEST_CASE("squashed Gaussian density integrates to one") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> mu(-2.0, 2.0), ls(-2.0, 0.5);
    boost::math::quadrature::tanh_sinh<double> q;
    for (int i = 0; i < 20; ++i) {
        GaussianPolicyHead h{mu(rng), ls(rng)};
        const double mass = q.integrate([&](double a) { return std::exp(h.log_prob(a)); }, 0.0, 1.0);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("sample log-probability matches the density") {
    GaussianPolicyHead h{0.3, -0.7};
    std::mt19937_64 rng(9);
    std::normal_distribution<double> N;
    for (int i = 0; i < 50; ++i) {
        const auto s = h.sample(N(rng));
        CHECK(s.action == doctest::Approx(squash(s.u)));
        if (s.action > 1e-9 && s.action < 1 - 1e-9) CHECK(h.log_prob(s.action) == doctest::Approx(s.log_prob).epsilon(1e-6));
    }
    CHECK(std::isinf(h.log_prob(0.0)));
    CHECK(std::isinf(h.log_prob(1.0)));
}

TEST_CASE("Monte Carlo entropy matches numerical integration") {
    GaussianPolicyHead h{-0.4, -1.0};
    boost::math::quadrature::tanh_sinh<double> q;
    const double H = q.integrate(
        [&](double a) {
            const double lp = h.log_prob(a);
            return std::isfinite(lp) ? -std::exp(lp) * lp : 0.0;
        },
        0.0, 1.0);
    std::mt19937_64 rng(10);
    std::normal_distribution<double> N;
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double lp = h.sample(N(rng)).log_prob;
        sum -= lp;
        sq += lp * lp;
    }
    const double mean = sum / n, sd = std::sqrt(sq / n - mean * mean);
    CHECK(std::abs(mean - H) < 5.0 * sd / std::sqrt(n));
}

TEST_CASE("log standard deviation is clamped") {
    GaussianPolicyHead h{0.0, 5.0};
    CHECK(h.clamped());
    CHECK(h.log_std() == 2.0);
    h.log_std_raw = -30.0;
    CHECK(h.log_std() == -20.0);
    h.log_std_raw = -1.0;
    CHECK_FALSE(h.clamped());
}

TEST_CASE("checkpoint round trip restores networks and optimizer state") {
    std::mt19937_64 rng(12);
    MlpNet a({3, 5, 2}), b({3, 5, 2});
    a.init_uniform(rng);
    Adam oa(a.n_params(), 1e-3), ob(b.n_params(), 1e-3);
    std::vector<double> g(a.n_params(), 0.1);
    oa.step(a.params(), g);
    oa.step(a.params(), g);

    Checkpoint c;
    c.meta["note"] = "unit";
    c.add_net("net", a);
    c.add_adam("opt", oa);
    const auto path = std::filesystem::temp_directory_path() / "agecharge_unit.ckpt";
    save_checkpoint(path, c);
    const auto back = load_checkpoint(path);
    CHECK(back.meta["note"] == "unit");
    back.load_net("net", b);
    back.load_adam("opt", ob);
    CHECK(b.params() == a.params());
    CHECK(ob.m() == oa.m());
    CHECK(ob.v() == oa.v());
    CHECK(ob.steps() == 2);

    MlpNet wrong({3, 6, 2});
    CHECK_THROWS_AS(back.load_net("net", wrong), ShapeError);
    CHECK_THROWS_AS(back.get("missing"), std::out_of_range);

    std::ofstream(path, std::ios::binary) << "garbage";
    CHECK_THROWS(load_checkpoint(path));
    std::filesystem::remove(path);
}
