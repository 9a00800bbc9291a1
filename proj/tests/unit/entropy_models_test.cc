// Copyright 2026 The hdrc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hdrc/entropy_models.h"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hdrc/errors.h"
#include "hdrc/model.h"
#include "test_util.h"

namespace hdrc {
namespace {

using testing::tiny_config;

double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

Tensor random_integers(const Shape& s, std::uint64_t seed, double scale) {
  Rng rng(seed);
  Tensor t(s);
  for (std::size_t i = 0; i < t.size(); ++i)
    t[i] = std::round(scale * rng.normal());
  return t;
}

TEST(QuantizerTest, RoundsHalfUp) {
  EXPECT_EQ(quantize(0.4), 0.0);
  EXPECT_EQ(quantize(0.5), 1.0);
  EXPECT_EQ(quantize(-1.2), -1.0);
  EXPECT_EQ(quantize(-0.5), 0.0);
  for (int n = -50; n <= 50; ++n)
    EXPECT_EQ(quantize(static_cast<double>(n)), n);
  EXPECT_THROW(quantize(std::nan("")), ParameterError);
  EXPECT_THROW(quantize(INFINITY), ParameterError);
}

TEST(NoiseProxyTest, BoundedZeroMeanIdentityGradient) {
  Rng rng(1);
  const int n = 100000;
  ag::Var x(Tensor(Shape{1, 1, 1, n}), true);
  const ag::Var y = noise_proxy(x, rng);
  double mean = 0.0;
  for (int i = 0; i < n; ++i) {
    EXPECT_LT(std::abs(y.value()[i]), 0.5);
    mean += y.value()[i] / n;
  }
  EXPECT_NEAR(mean, 0.0, 0.01);
  ag::sum(y).backward();
  for (int i = 0; i < n; i += 997) EXPECT_EQ(x.grad()[i], 1.0);
}

TEST(GaussianPmfTest, IntervalMassMatchesErf) {
  EXPECT_NEAR(gaussian_pmf(0, 0, 1), phi(0.5) - phi(-0.5), 1e-15);
  EXPECT_NEAR(gaussian_pmf(0, 0, 1), 0.38292, 1e-5);
  EXPECT_EQ(gaussian_pmf(1, 0, 0.7), gaussian_pmf(-1, 0, 0.7));
  EXPECT_EQ(gaussian_pmf(40, 0, 1), kLikelihoodFloor);
  for (double mu : {-3.3, 0.2, 7.9}) {
    for (double sigma : {0.11, 1.0, 12.0}) {
      for (int n = -5; n <= 5; ++n) {
        const double want =
            phi((n + 0.5 - mu) / sigma) - phi((n - 0.5 - mu) / sigma);
        EXPECT_NEAR(gaussian_pmf(n, mu, sigma),
                    std::max(want, kLikelihoodFloor), 1e-14);
      }
    }
  }
}

TEST(GaussianPmfTest, TelescopesToOneAndRenormalizesOnSupport) {
  double total = 0.0;
  for (int n = -200; n <= 200; ++n) {
    total += phi((n + 0.5 - 0.3) / 2.0) - phi((n - 0.5 - 0.3) / 2.0);
  }
  EXPECT_NEAR(total, 1.0, 1e-14);
  int lo = 0;
  const std::vector<double> p = gaussian_support_pmf(0.3, 2.0, &lo);
  EXPECT_EQ(lo, static_cast<int>(std::floor(0.3 - 64.0)));
  double s = 0.0;
  for (double v : p) s += v;
  EXPECT_NEAR(s, 1.0, 1e-12);
  const std::vector<double> edge = gaussian_support_pmf(1020.0, 10.0, &lo);
  EXPECT_EQ(lo + static_cast<int>(edge.size()) - 2, kSymbolMax);
}

TEST(GaussianPmfTest, GraphLikelihoodMatchesScalar) {
  ag::NoGradGuard guard;
  const ag::Var y = ag::constant(Tensor(Shape{1, 1, 1, 3}, {-1.0, 0.0, 4.0}));
  const ag::Var mu = ag::constant(Tensor(Shape{1, 1, 1, 3}, {0.2, -0.1, 0.0}));
  const ag::Var sigma =
      ag::constant(Tensor(Shape{1, 1, 1, 3}, {0.5, 3.0, 0.11}));
  const Tensor l = gaussian_likelihood(y, mu, sigma).value();
  EXPECT_NEAR(l[0], gaussian_pmf(-1, 0.2, 0.5), 1e-15);
  EXPECT_NEAR(l[1], gaussian_pmf(0, -0.1, 3.0), 1e-15);
  EXPECT_EQ(l[2], kLikelihoodFloor);
}

TEST(BitsTest, HalfProbabilityCostsOneBitEach) {
  const ag::Var p =
      ag::constant(Tensor(Shape{1, 2, 3, 4}, std::vector<double>(24, 0.5)));
  EXPECT_NEAR(bits(p).item(), 24.0, 1e-12);
}

TEST(SplitParamsTest, SigmaIsBoundedBelow) {
  Rng rng(3);
  Tensor raw(Shape{1, 4, 3, 3});
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = rng.uniform(-100, 100);
  const EntropyParams p = split_params(ag::constant(raw), 2);
  EXPECT_EQ(p.mu.shape(), (Shape{1, 2, 3, 3}));
  for (std::size_t i = 0; i < p.sigma.value().size(); ++i) {
    EXPECT_GE(p.sigma.value()[i], kSigmaMin);
    EXPECT_TRUE(std::isfinite(p.mu.value()[i]));
  }
  EXPECT_NEAR(sigma_from_raw(0.0), kSigmaMin + std::log(2.0), 1e-15);
}

TEST(ContextModelTest, CausalAndSerialFormAgrees) {
  ParamStore store;
  Rng rng(4);
  const ContextModel ctx(store, "ctx", 3, 6, rng);
  const Tensor y = random_integers(Shape{1, 3, 6, 7}, 5, 2.0);
  ag::NoGradGuard guard;
  const Tensor full = ctx(ag::constant(y)).value();
  std::vector<double> out(6);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 7; ++j) {
      ctx.at(y, i, j, out);
      for (int c = 0; c < 6; ++c)
        EXPECT_NEAR(out[c], full.at(0, c, i, j), 1e-12);
    }
  }
  // Position (0, 0) has no past: the response of an all-zero input.
  const Tensor zero = ctx(ag::constant(Tensor(y.shape()))).value();
  for (int c = 0; c < 6; ++c)
    EXPECT_EQ(full.at(0, c, 0, 0), zero.at(0, c, 0, 0));
  // Perturbing (3, 3) affects no earlier position and some later one.
  Tensor y2 = y;
  y2.at(0, 1, 3, 3) += 5.0;
  const Tensor f2 = ctx(ag::constant(y2)).value();
  bool later_changed = false;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 7; ++j) {
      const bool before = i < 3 || (i == 3 && j <= 3);
      for (int c = 0; c < 6; ++c) {
        if (before) {
          EXPECT_EQ(f2.at(0, c, i, j), full.at(0, c, i, j));
        } else if (f2.at(0, c, i, j) != full.at(0, c, i, j)) {
          later_changed = true;
        }
      }
    }
  }
  EXPECT_TRUE(later_changed);
}

TEST(ParameterNetTest, SerialFormAgrees) {
  ParamStore store;
  Rng rng(6);
  const ParameterNet net(store, "p", 5, 3, rng);
  Tensor f(Shape{1, 5, 2, 2});
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = rng.normal();
  ag::NoGradGuard guard;
  const Tensor full = net(ag::constant(f)).value();
  ASSERT_EQ(full.shape(), (Shape{1, 6, 2, 2}));
  std::vector<double> in(5), out(6);
  for (int c = 0; c < 5; ++c) in[c] = f.at(0, c, 1, 0);
  net.at(in, out);
  for (int c = 0; c < 6; ++c) EXPECT_NEAR(out[c], full.at(0, c, 1, 0), 1e-12);
}

TEST(FactorizedPriorTest, MonotoneCdfAndValidPmf) {
  ParamStore store;
  Rng rng(7);
  const FactorizedPrior prior(store, "prior", 3, rng);
  for (int c = 0; c < 3; ++c) {
    double prev = 0.0;
    for (double x = -30.5; x <= 30.5; x += 1.0) {
      const double v = prior.cdf(c, x);
      EXPECT_GT(v, prev);
      prev = v;
    }
    for (int n = -5; n <= 5; ++n) {
      const double p = prior.pmf(c, n);
      EXPECT_GT(p, 0.0);
      EXPECT_LT(p, 1.0);
      EXPECT_NEAR(p, prior.cdf(c, n + 0.5) - prior.cdf(c, n - 0.5), 1e-9);
    }
  }
  EXPECT_EQ(prior.coding_tables().size(), 3u);
}

TEST(LdrEntropyModelTest, HyperShapes) {
  const Model m(tiny_config(), 8);
  const LdrEntropyModel& e = m.ldr_entropy();
  ag::NoGradGuard guard;
  const ag::Var y = ag::constant(random_integers(Shape{1, 8, 8, 12}, 9, 3.0));
  const ag::Var z = e.hyper_analysis(y);
  EXPECT_EQ(z.shape(), (Shape{1, 8, 2, 3}));
  EXPECT_EQ(e.hyper_shape(y.shape()), z.shape());
  const ag::Var psi =
      e.hyper_synthesis(ag::constant(quantize(z.value())), 8, 12);
  EXPECT_EQ(psi.shape(), (Shape{1, 16, 8, 12}));
  const ag::Var z_odd =
      e.hyper_analysis(ag::constant(Tensor(Shape{1, 8, 5, 7})));
  EXPECT_EQ(z_odd.shape(), (Shape{1, 8, 2, 2}));
}

TEST(LdrEntropyModelTest, RateMatchesPerElementOracle) {
  const Model m(tiny_config(), 10);
  const LdrEntropyModel& e = m.ldr_entropy();
  const Tensor y = random_integers(Shape{1, 8, 4, 5}, 11, 2.0);
  const Tensor z = random_integers(e.hyper_shape(y.shape()), 12, 1.0);
  ag::NoGradGuard guard;
  const EntropyParams p = e.params(e.hyper_synthesis(ag::constant(z), 4, 5),
                                   e.context(ag::constant(y)));
  double oracle = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    oracle -=
        std::log2(gaussian_pmf(y[i], p.mu.value()[i], p.sigma.value()[i]));
  }
  const Shape& zs = z.shape();
  for (int c = 0; c < zs.c; ++c) {
    for (int i = 0; i < zs.h; ++i) {
      for (int j = 0; j < zs.w; ++j) {
        oracle -= std::log2(
            std::max(e.prior().pmf(c, z.at(0, c, i, j)), kLikelihoodFloor));
      }
    }
  }
  EXPECT_NEAR(e.rate(y, z), oracle, 1e-9 * oracle);
  EXPECT_GT(oracle, 0.0);
}

TEST(HdrEntropyModelTest, RateMatchesPerElementOracle) {
  for (bool ctx : {true, false}) {
    NetworkConfig c = tiny_config();
    c.hdr_context = ctx;
    const Model m(c, 13);
    const HdrEntropyModel& e = m.hdr_entropy();
    const Tensor y = random_integers(Shape{1, 4, 4, 4}, 14, 2.0);
    ag::NoGradGuard guard;
    const EntropyParams p = e.params(ag::constant(y));
    const bool per_channel = p.mu.shape().h == 1 && p.mu.shape().w == 1;
    EXPECT_EQ(per_channel, !ctx);
    double oracle = 0.0;
    for (int c = 0; c < 4; ++c) {
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          const int pi = per_channel ? 0 : i;
          const int pj = per_channel ? 0 : j;
          oracle -= std::log2(gaussian_pmf(y.at(0, c, i, j),
                                           p.mu.value().at(0, c, pi, pj),
                                           p.sigma.value().at(0, c, pi, pj)));
        }
      }
    }
    EXPECT_NEAR(e.rate(y), oracle, 1e-9 * oracle);
    EXPECT_GT(oracle, 0.0);
  }
}

TEST(HdrEntropyModelTest, CodingRoundTrip) {
  const Model m(tiny_config(), 15);
  const Tensor y = random_integers(Shape{1, 4, 3, 5}, 16, 4.0);
  const std::vector<std::uint8_t> bytes = m.hdr_entropy().encode(y);
  const Tensor back = m.hdr_entropy().decode(bytes, y.shape());
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_EQ(back[i], y[i]);
}

TEST(LdrEntropyModelTest, CodingRoundTripWithEscapes) {
  const Model m(tiny_config(), 17);
  Tensor y = random_integers(Shape{1, 8, 4, 4}, 18, 3.0);
  y[5] = 3000.0;
  y[17] = -2000.0;
  const Tensor z =
      random_integers(m.ldr_entropy().hyper_shape(y.shape()), 19, 1.0);
  const std::vector<std::uint8_t> bytes = m.ldr_entropy().encode(y, z);
  const LdrEntropyModel::Decoded d = m.ldr_entropy().decode(bytes, y.shape());
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_EQ(d.y_bar[i], y[i]);
  for (std::size_t i = 0; i < z.size(); ++i) EXPECT_EQ(d.z_bar[i], z[i]);
}

}  // namespace
}  // namespace hdrc
