#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "advmod/numerics.hpp"
#include "advmod/rng.hpp"
#include "advmod/tensor.hpp"

using namespace advmod;

TEST_CASE("tensor shape bookkeeping") {
  Tensor t({2, 3});
  CHECK(t.size() == 6);
  CHECK(t.rank() == 2);
  CHECK(t.dim(1) == 3);
  for (double v : t.data) CHECK(v == 0.0);

  Tensor u({2, 2}, {1, 2, 3, 4});
  CHECK(u.at(1, 0) == 3.0);
  CHECK_THROWS_AS(Tensor({2, 2}, {1.0}), std::invalid_argument);

  Tensor r = u.reshaped({4});
  CHECK(r.rank() == 1);
  CHECK(r[3] == 4.0);
  CHECK_THROWS_AS(u.reshaped({3}), std::invalid_argument);
}

TEST_CASE("matmul hand examples") {
  Tensor a({1, 2}, {1, 2});
  Tensor b({2, 1}, {3, 4});
  const Tensor c = matmul(a, b);
  CHECK(c.shape == std::vector<std::size_t>{1, 1});
  CHECK(c[0] == 11.0);

  Tensor eye({2, 2}, {1, 0, 0, 1});
  Tensor m({2, 2}, {5, 6, 7, 8});
  const Tensor same = matmul(m, eye);
  for (std::size_t i = 0; i < 4; ++i) CHECK(same[i] == m[i]);

  const Tensor z = matmul(Tensor({2, 3}), Tensor({3, 2}));
  for (double v : z.data) CHECK(v == 0.0);

  CHECK_THROWS_AS(matmul(Tensor({2, 3}), Tensor({2, 3})), std::invalid_argument);
}

TEST_CASE("hcat and col_slice round-trip") {
  Tensor left({2, 2}, {1, 2, 5, 6});
  Tensor right({2, 1}, {3, 7});
  const Tensor joined = hcat(left, right);
  CHECK(joined.shape == std::vector<std::size_t>{2, 3});
  CHECK(joined.at(1, 2) == 7.0);
  const Tensor back = col_slice(joined, 0, 2);
  for (std::size_t i = 0; i < 4; ++i) CHECK(back[i] == left[i]);
  CHECK_THROWS_AS(col_slice(joined, 2, 2), std::invalid_argument);
}

TEST_CASE("rng determinism and stream independence") {
  RngStream a(7), b(7), c(8);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  bool differs = false;
  for (int i = 0; i < 10; ++i) differs |= a.next_u64() != c.next_u64();
  CHECK(differs);

  RngStream base(42);
  RngStream f0 = base.fork(0), f1 = base.fork(1);
  bool fork_differs = false;
  for (int i = 0; i < 10; ++i) fork_differs |= f0.next_u64() != f1.next_u64();
  CHECK(fork_differs);

  RngStream u(3);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
    const auto bit = u.bit();
    CHECK((bit == 0 || bit == 1));
    CHECK(u.below(17) < 17);
  }
}

TEST_CASE("rng normal moments") {
  RngStream rng(11);
  double sum = 0.0, sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n / 2; ++i) {
    const auto [z1, z2] = rng.normal_pair();
    sum += z1 + z2;
    sq += z1 * z1 + z2 * z2;
  }
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(std::abs(sq / n - 1.0) < 0.02);
}

TEST_CASE("xavier_init bounds and moments") {
  RngStream rng(5);
  const Tensor w33 = xavier_init(3, 3, rng);
  CHECK(w33.shape == std::vector<std::size_t>{3, 3});
  for (double v : w33.data) CHECK(std::abs(v) <= 1.0);

  const Tensor w11 = xavier_init(1, 1, rng);
  CHECK(std::abs(w11[0]) <= std::sqrt(3.0));

  // 10^5 draws at fan 3+3: mean ~ 0, variance ~ b^2/3 with b = 1.
  double sum = 0.0, sq = 0.0;
  const std::size_t n = 100000;
  for (std::size_t i = 0; i < n / 9; ++i) {
    const Tensor w = xavier_init(3, 3, rng);
    for (double v : w.data) {
      sum += v;
      sq += v * v;
    }
  }
  const double count = std::floor(n / 9.0) * 9.0;
  CHECK(std::abs(sum / count) < 0.01);
  CHECK(sq / count == doctest::Approx(1.0 / 3.0).epsilon(0.05));

  CHECK_THROWS_AS(xavier_init(0, 3, rng), std::invalid_argument);
}

TEST_CASE("adam zero gradient leaves parameters unchanged") {
  Tensor p({2}, {1.5, -2.5});
  Tensor g({2}, {0.0, 0.0});
  AdamState state;
  adam_step({&p}, {&g}, state);
  CHECK(p[0] == 1.5);
  CHECK(p[1] == -2.5);
  CHECK(state.step_count == 1);
}

TEST_CASE("adam first step matches the hand-evaluated recurrence") {
  Tensor p({1}, {1.0});
  Tensor g({1}, {1.0});
  AdamState state;
  adam_step({&p}, {&g}, state);
  // m_hat = v_hat = 1 at t=1, so the update is -lr / (1 + eps).
  const double expected = 1.0 - 0.001 / (1.0 + 1e-8);
  CHECK(p[0] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("adam treats parameters elementwise") {
  Tensor p1({1}, {0.7});
  Tensor p2({1}, {-0.3});
  Tensor g1({1}, {0.2});
  Tensor g2({1}, {-0.9});
  AdamState joint;
  adam_step({&p1, &p2}, {&g1, &g2}, joint);

  Tensor q1({1}, {0.7});
  Tensor q2({1}, {-0.3});
  AdamState solo1, solo2;
  adam_step({&q1}, {&g1}, solo1);
  adam_step({&q2}, {&g2}, solo2);
  CHECK(p1[0] == q1[0]);
  CHECK(p2[0] == q2[0]);
}

TEST_CASE("adam shape mismatch is a hard error") {
  Tensor p({2}, {1.0, 2.0});
  Tensor g({3});
  AdamState state;
  CHECK_THROWS_AS(adam_step({&p}, {&g}, state), std::invalid_argument);
}

TEST_CASE("adam descends w^2 from w=1") {
  Tensor w({1}, {1.0});
  AdamState state;
  std::vector<double> losses;
  for (int i = 0; i < 500; ++i) {
    losses.push_back(w[0] * w[0]);
    Tensor g({1}, {2.0 * w[0]});
    adam_step({&w}, {&g}, state);
  }
  CHECK(std::abs(w[0]) < 0.9);
  CHECK(state.step_count == 500);

  // 50-step window averages of the loss never increase.
  auto window = [&](std::size_t start) {
    double total = 0.0;
    for (std::size_t i = start; i < start + 50; ++i) total += losses[i];
    return total / 50.0;
  };
  for (std::size_t start = 0; start + 100 <= losses.size(); start += 50) {
    CHECK(window(start + 50) <= window(start));
  }
}

TEST_CASE("finite differences on known functions") {
  auto square_sum = [](const Tensor& t) {
    double total = 0.0;
    for (double v : t.data) total += v * v;
    return total;
  };
  Tensor x({1}, {3.0});
  const Tensor g = finite_diff_grad(square_sum, x, 1e-5);
  CHECK(g[0] == doctest::Approx(6.0).epsilon(1e-8));

  const Tensor zero =
      finite_diff_grad([](const Tensor&) { return 4.2; }, Tensor({3}), 1e-5);
  for (double v : zero.data) CHECK(v == 0.0);

  auto sigmoid_at = [](const Tensor& t) { return 1.0 / (1.0 + std::exp(-t[0])); };
  Tensor origin({1}, {0.0});
  CHECK(finite_diff_grad(sigmoid_at, origin, 1e-5)[0] ==
        doctest::Approx(0.25).epsilon(1e-8));

  // Degree-2 polynomials are exact under central differences.
  auto poly = [](const Tensor& t) { return 2.0 * t[0] * t[0] - 3.0 * t[0] + 1.0; };
  Tensor at({1}, {1.7});
  CHECK(std::abs(finite_diff_grad(poly, at, 1e-4)[0] - (4.0 * 1.7 - 3.0)) < 1e-7);

  CHECK_THROWS_AS(
      finite_diff_grad([](const Tensor&) { return std::nan(""); }, at, 1e-5),
      std::runtime_error);
}
