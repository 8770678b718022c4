// Copyright (c) 2026, The suppax authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "suppax/autograd.hpp"
#include "suppax/nn.hpp"

using namespace suppax;

namespace {

std::vector<double> random_values(std::size_t n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

std::vector<double> grad_of(const Tensor& t) { return {t.grad().begin(), t.grad().end()}; }

}  // namespace

TEST(Matmul, IdentityLeavesMatrixUnchanged) {
  auto eye = Tensor::from({2, 2}, {1, 0, 0, 1});
  auto m = Tensor::from({2, 2}, {1, 2, 3, 4});
  auto r = matmul(eye, m);
  EXPECT_EQ(std::vector<double>(r.values().begin(), r.values().end()), (std::vector<double>{1, 2, 3, 4}));
}

TEST(Matmul, RowTimesColumn) {
  auto r = matmul(Tensor::from({1, 2}, {1, 2}), Tensor::from({2, 1}, {3, 4}));
  ASSERT_EQ(r.shape(), (Shape{1, 1}));
  EXPECT_DOUBLE_EQ(r.item(), 11.0);
}

TEST(Matmul, ShapeMismatchThrows) {
  EXPECT_THROW(matmul(Tensor::zeros({2, 3}), Tensor::zeros({2, 3})), DimensionError);
}

TEST(Matmul, GradientOfSumMatchesOnesTimesBTransposed) {
  std::mt19937_64 rng(1);
  auto av = random_values(12, rng), bv = random_values(8, rng);
  auto a = Tensor::from({3, 4}, av, true);
  auto b = Tensor::from({4, 2}, bv, true);
  backward(sum(matmul(a, b)));
  // analytic: ones(3x2) * b^T, i.e. row sums of b repeated per row
  std::vector<double> expected(12);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < 4; ++k) expected[i * 4 + k] = bv[k * 2] + bv[k * 2 + 1];
  EXPECT_LT(oracle::max_rel_err(grad_of(a), expected), 1e-12);
  auto fd = oracle::numeric_gradient(
      [&](const std::vector<double>& x) {
        auto c = oracle::matmul(x, bv, 3, 4, 2);
        double s = 0;
        for (double v : c) s += v;
        return s;
      },
      av);
  EXPECT_LT(oracle::max_rel_err(grad_of(a), fd), 1e-5);
}

TEST(Relu, ClampsNegativesAndZero) {
  auto r = relu(Tensor::from({3}, {-1, 0, 2}));
  EXPECT_EQ(std::vector<double>(r.values().begin(), r.values().end()), (std::vector<double>{0, 0, 2}));
}

TEST(Relu, AllNegativeGivesZeroGradient) {
  auto x = Tensor::from({1, 3}, {-1, -2, -0.5}, true);
  auto y = relu(x);
  for (double v : y.values()) EXPECT_EQ(v, 0.0);
  backward(sum(y));
  for (double g : x.grad()) EXPECT_EQ(g, 0.0);
}

TEST(Relu, DerivativeAtZeroIsZero) {
  auto x = Tensor::from({1, 1}, {0.0}, true);
  backward(sum(relu(x)));
  EXPECT_EQ(x.grad()[0], 0.0);
}

TEST(Relu, MatchesFiniteDifferencesAwayFromKink) {
  std::mt19937_64 rng(2);
  auto v = random_values(50, rng, -2, 2);
  for (auto& x : v)
    if (std::abs(x) < 1e-3) x = 0.5;
  auto x = Tensor::from({5, 10}, v, true);
  // weight the outputs so the gradient is not just the indicator
  std::vector<double> w = random_values(50, rng);
  backward(sum(mul(relu(x), Tensor::from({5, 10}, w))));
  auto fd = oracle::numeric_gradient(
      [&](const std::vector<double>& z) {
        double s = 0;
        for (std::size_t i = 0; i < z.size(); ++i) s += w[i] * std::max(0.0, z[i]);
        return s;
      },
      v);
  EXPECT_LT(oracle::max_rel_err(grad_of(x), fd), 1e-5);
}

TEST(SoftmaxCrossEntropy, SymmetricLogitsGiveLog2) {
  std::vector<int> labels{0};
  EXPECT_NEAR(softmax_cross_entropy(Tensor::from({1, 2}, {0, 0}), labels).item(), std::log(2.0), 1e-15);
}

TEST(SoftmaxCrossEntropy, LargeLogitsStayFinite) {
  std::vector<int> labels{0};
  const double l = softmax_cross_entropy(Tensor::from({1, 2}, {1000, 0}), labels).item();
  EXPECT_TRUE(std::isfinite(l));
  EXPECT_NEAR(l, 0.0, 1e-12);
  std::vector<int> wrong{1};
  EXPECT_NEAR(softmax_cross_entropy(Tensor::from({1, 2}, {1000, 0}), wrong).item(), 1000.0, 1e-9);
}

TEST(SoftmaxCrossEntropy, LabelOutOfRangeThrows) {
  std::vector<int> labels{2};
  EXPECT_THROW(softmax_cross_entropy(Tensor::from({1, 2}, {0, 0}), labels), IndexError);
  std::vector<int> neg{-1};
  EXPECT_THROW(softmax_cross_entropy(Tensor::from({1, 2}, {0, 0}), neg), IndexError);
}

TEST(SoftmaxCrossEntropy, ValueAndGradientMatchOracle) {
  std::mt19937_64 rng(3);
  auto z = random_values(12, rng, -2, 2);
  std::vector<int> labels{0, 2, 1, 2};
  auto t = Tensor::from({4, 3}, z, true);
  auto loss = softmax_cross_entropy(t, labels);
  EXPECT_NEAR(loss.item(), oracle::softmax_xent(z, labels, 3), 1e-13);
  backward(loss);
  auto fd = oracle::numeric_gradient([&](const std::vector<double>& v) { return oracle::softmax_xent(v, labels, 3); }, z);
  EXPECT_LT(oracle::max_rel_err(grad_of(t), fd), 1e-5);
}

TEST(BceLogits, ZeroLogitTargetOneIsLog2) {
  EXPECT_NEAR(bce_logits(Tensor::from({1, 1}, {0}), Tensor::from({1, 1}, {1})).item(), std::log(2.0), 1e-15);
}

TEST(BceLogits, SaturatedLogitIsNearZeroWithoutNan) {
  const double l = bce_logits(Tensor::from({1, 1}, {50}), Tensor::from({1, 1}, {1})).item();
  EXPECT_TRUE(std::isfinite(l));
  EXPECT_LT(l, 1e-20);
  const double big = bce_logits(Tensor::from({1, 1}, {-800}), Tensor::from({1, 1}, {1})).item();
  EXPECT_NEAR(big, 800.0, 1e-9);
}

TEST(BceLogits, ShapeMismatchThrows) {
  EXPECT_THROW(bce_logits(Tensor::zeros({2, 1}), Tensor::zeros({1, 2})), DimensionError);
}

TEST(BceLogits, ValueAndGradientMatchOracle) {
  std::mt19937_64 rng(4);
  auto z = random_values(8, rng, -3, 3);
  std::vector<double> t{1, 0, 0, 1, 1, 0, 1, 0};
  auto zt = Tensor::from({8, 1}, z, true);
  auto loss = bce_logits(zt, Tensor::from({8, 1}, t));
  EXPECT_NEAR(loss.item(), oracle::bce(z, t), 1e-13);
  backward(loss);
  auto fd = oracle::numeric_gradient([&](const std::vector<double>& v) { return oracle::bce(v, t); }, z);
  EXPECT_LT(oracle::max_rel_err(grad_of(zt), fd), 1e-5);
}

TEST(Concat, AppendsColumns) {
  auto a = Tensor::from({2, 2}, {1, 2, 3, 4});
  auto c = Tensor::from({2, 1}, {5, 6});
  auto r = concat(a, c);
  ASSERT_EQ(r.shape(), (Shape{2, 3}));
  EXPECT_EQ(r(0, 2), 5);
  EXPECT_EQ(r(1, 2), 6);
  EXPECT_EQ(r(1, 0), 3);
}

TEST(Concat, ZeroWidthIsIdentity) {
  auto a = Tensor::from({2, 2}, {1, 2, 3, 4});
  auto r = concat(a, Tensor::zeros({2, 0}));
  EXPECT_EQ(r.shape(), a.shape());
  EXPECT_EQ(std::vector<double>(r.values().begin(), r.values().end()),
            std::vector<double>(a.values().begin(), a.values().end()));
}

TEST(Concat, GradientOfSumIsOnesForEachPart) {
  auto a = Tensor::from({3, 2}, {1, 2, 3, 4, 5, 6}, true);
  auto c = Tensor::from({3, 1}, {7, 8, 9}, true);
  backward(sum(concat(a, c)));
  for (double g : a.grad()) EXPECT_EQ(g, 1.0);
  for (double g : c.grad()) EXPECT_EQ(g, 1.0);
}

TEST(Concat, BatchMismatchThrows) {
  EXPECT_THROW(concat(Tensor::zeros({2, 1}), Tensor::zeros({3, 1})), DimensionError);
}

TEST(Concat, SplitRoundTripsValuesAndGradients) {
  std::mt19937_64 rng(5);
  auto av = random_values(6, rng), cv = random_values(9, rng), w = random_values(15, rng);
  auto a = Tensor::from({3, 2}, av, true);
  auto c = Tensor::from({3, 3}, cv, true);
  auto joined = concat(a, c);
  auto a2 = slice_cols(joined, 0, 2), c2 = slice_cols(joined, 2, 5);
  EXPECT_EQ(std::vector<double>(a2.values().begin(), a2.values().end()), av);
  EXPECT_EQ(std::vector<double>(c2.values().begin(), c2.values().end()), cv);
  std::vector<double> wa(w.begin(), w.begin() + 6), wc(w.begin() + 6, w.end());
  backward(add(sum(mul(a2, Tensor::from({3, 2}, wa))), sum(mul(c2, Tensor::from({3, 3}, wc)))));
  EXPECT_EQ(grad_of(a), wa);
  EXPECT_EQ(grad_of(c), wc);
}

TEST(Backward, SquareAtThreeGivesSix) {
  auto x = Tensor::scalar(3.0, true);
  backward(mul(x, x));
  EXPECT_DOUBLE_EQ(x.grad()[0], 6.0);
}

TEST(Backward, ReluOfLinearMatchesAnalytic) {
  // W is 2x3 acting on x as W x, written here as x^T W^T with x a 1x2 row.
  std::vector<double> wt{1, -1, 0.5, -2, 3, 0.25};  // W^T, 2x3
  auto x = Tensor::from({1, 2}, {0.7, 0.2}, true);
  auto w = Tensor::from({2, 3}, wt);
  auto pre = matmul(x, w);
  backward(sum(relu(pre)));
  std::vector<double> expected(2, 0.0);
  for (std::size_t j = 0; j < 3; ++j) {
    if (pre(0, j) > 0)
      for (std::size_t i = 0; i < 2; ++i) expected[i] += wt[i * 3 + j];
  }
  EXPECT_LT(oracle::max_rel_err(grad_of(x), expected), 1e-14);
}

TEST(Backward, NonScalarLossThrows) {
  auto x = Tensor::from({1, 2}, {1, 2}, true);
  EXPECT_THROW(backward(relu(x)), ContractError);
}

TEST(Backward, LossWithoutGradThrows) {
  EXPECT_THROW(backward(sum(Tensor::from({1, 2}, {1, 2}))), ContractError);
}

TEST(Backward, SharedSubexpressionAccumulates) {
  auto x = Tensor::scalar(2.0, true);
  auto y = mul(x, x);         // 4, dy/dx = 2x
  backward(add(y, mul(y, x)));  // x^2 + x^3 -> 2x + 3x^2 = 16
  EXPECT_DOUBLE_EQ(x.grad()[0], 16.0);
}

TEST(Backward, TwoLayerMlpMatchesFiniteDifferences) {
  Network net = make_mlp({3, 5, 2}, Activation::identity, std::nullopt);
  init_params(net, 11);
  std::mt19937_64 rng(6);
  auto x = Tensor::from({4, 3}, random_values(12, rng));
  std::vector<int> labels{0, 1, 1, 0};
  const double err = grad_check([&] { return softmax_cross_entropy(net.forward(x), labels); }, net.parameters(), 1e-5);
  EXPECT_LT(err, 1e-5);
}

TEST(Tensor, RejectsNonFiniteAndBadShape) {
  EXPECT_THROW(Tensor::from({1, 1}, {NAN}), NumericError);
  EXPECT_THROW(Tensor::from({2, 2}, {1, 2, 3}), DimensionError);
}

TEST(Tensor, NonFiniteResultSurfaces) {
  auto x = Tensor::from({1, 1}, {1e300});
  EXPECT_THROW(mul(x, x), NumericError);
}

TEST(Tensor, EvaluationIsDeterministic) {
  Network net = make_mlp({2, 4, 2}, Activation::identity, std::nullopt);
  init_params(net, 3);
  auto x = Tensor::from({2, 2}, {0.1, 0.2, -0.3, 0.4});
  auto a = net.forward(x), b = net.forward(x);
  EXPECT_EQ(std::vector<double>(a.values().begin(), a.values().end()),
            std::vector<double>(b.values().begin(), b.values().end()));
}

TEST(GradCheck, SumIsExact) {
  auto p = Tensor::from({2, 3}, {1, -2, 3, 0.5, 7, -1});
  EXPECT_LE(grad_check([](const Tensor& x) { return sum(x); }, p, 1e-5), 1e-9);
}

TEST(GradCheck, SumOfSquares) {
  std::mt19937_64 rng(7);
  auto p = Tensor::from({3, 3}, random_values(9, rng));
  EXPECT_LE(grad_check([](const Tensor& x) { return sum(mul(x, x)); }, p, 1e-5), 1e-6);
}

TEST(GradCheck, RejectsNonPositiveStep) {
  auto p = Tensor::from({1, 1}, {1});
  EXPECT_THROW(grad_check([](const Tensor& x) { return sum(x); }, p, 0.0), ContractError);
}

TEST(GradCheck, FullModelBForwardAndLoss) {
  Network net = build_model(ModelKind::B, 3, FeatureKind::distance);
  init_params(net, 21);
  std::mt19937_64 rng(8);
  auto xv = random_values(10, rng);
  auto x = Tensor::from({5, 2}, xv);
  Matrix xm(5, 2, xv);
  auto supp = Tensor::from_matrix(feature_eval(FeatureKind::distance, xm));
  std::vector<int> labels{0, 1, 0, 1, 1};
  const double err =
      grad_check([&] { return softmax_cross_entropy(net.forward(x, supp), labels); }, net.parameters(), 1e-5);
  EXPECT_LE(err, 1e-4);
}

TEST(GradCheck, EveryOpAtRandomPoints) {
  std::mt19937_64 rng(9);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    auto a = Tensor::from({3, 4}, random_values(12, rng));
    auto b = Tensor::from({4, 2}, random_values(8, rng));
    auto bias = Tensor::from({1, 2}, random_values(2, rng));
    auto w = Tensor::from({3, 2}, random_values(6, rng));
    // keep relu inputs off the kink
    auto f = [&](const Tensor& x) {
      auto h = add_bias(matmul(x, b), bias);
      auto g = sigmoid(h);
      auto c = concat(g, scale(h, 0.5));
      auto s = slice_cols(c, 1, 3);
      return add(sum(mul(s, w)), sub(mean(relu(add(h, Tensor::from({3, 2}, std::vector<double>(6, 5.0))))),
                                      sum(broadcast_rows(bias, 3))));
    };
    worst = std::max(worst, grad_check(f, a, 1e-5));
  }
  EXPECT_LT(worst, 1e-4);
}
