#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "advroad/grad_check.hpp"
#include "advroad/ops.hpp"
#include "advroad/rng.hpp"
#include "advroad/tensor.hpp"

using namespace advroad;

namespace {

Tensor<double> rand_tensor(Shape shape, Rng& rng, double lo = -2.0, double hi = 2.0) {
  Tensor<double> t = Tensor<double>::zeros(std::move(shape));
  for (long i = 0; i < t.size(); ++i) t.data()[i] = rng.uniform(lo, hi);
  return t;
}

// Avoid kink neighborhoods so central differences stay valid.
void push_away_from(Tensor<double>& t, std::initializer_list<double> kinks, double margin) {
  for (long i = 0; i < t.size(); ++i)
    for (double k : kinks)
      if (std::abs(t.data()[i] - k) < margin) t.data()[i] = k + (t.data()[i] >= k ? margin : -margin);
}

}  // namespace

TEST_CASE("forward: elementwise examples") {
  auto a = Tensor<float>::from({2}, {1, 2});
  auto b = Tensor<float>::from({2}, {3, 4});
  auto s = add(a, b);
  CHECK(s.data()[0] == doctest::Approx(4));
  CHECK(s.data()[1] == doctest::Approx(6));

  auto l = leaky_relu(Tensor<float>::from({2}, {-1, 2}), 0.2);
  CHECK(l.data()[0] == doctest::Approx(-0.2f));
  CHECK(l.data()[1] == doctest::Approx(2.0f));
}

TEST_CASE("forward: bilinear sample of 2x2 grid at the cell midpoint") {
  auto src = Tensor<float>::from({1, 2, 2}, {0, 1, 2, 3});
  auto grid = Tensor<float>::from({1, 1, 2}, {0.5f, 0.5f});
  auto out = bilinear_sample(src, grid);
  CHECK(out.item() == doctest::Approx(1.5f));
}

TEST_CASE("forward: shape mismatch names the op") {
  auto a = Tensor<float>::from({2}, {1, 2});
  auto b = Tensor<float>::from({3}, {1, 2, 3});
  CHECK_THROWS_WITH_AS(add(a, b), doctest::Contains("add"), Error);
  try {
    add(a, b);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ShapeMismatch);
  }
}

TEST_CASE("forward: unknown op") {
  CHECK_THROWS_AS(forward<float>("fused-madness", {}), Error);
  try {
    forward<float>("fused-madness", {});
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnknownOp);
  }
}

TEST_CASE("backward: sum gives ones") {
  auto x = Tensor<float>::from({3}, {5, -1, 2});
  x.set_requires_grad(true);
  Tape<float> tape;
  typename Tape<float>::Scope scope(tape);
  auto loss = sum(x);
  auto grads = backward(tape, loss);
  REQUIRE(grads.has(x));
  for (long i = 0; i < 3; ++i) CHECK(grads.at(x).data()[i] == doctest::Approx(1.0f));
}

TEST_CASE("backward: mean of squares") {
  auto x = Tensor<float>::from({2}, {1, 2});
  x.set_requires_grad(true);
  Tape<float> tape;
  typename Tape<float>::Scope scope(tape);
  auto loss = mean(mul(x, x));
  auto grads = backward(tape, loss);
  REQUIRE(grads.has(x));
  CHECK(grads.at(x).data()[0] == doctest::Approx(1.0f));
  CHECK(grads.at(x).data()[1] == doctest::Approx(2.0f));
}

TEST_CASE("backward: loss detached from x lacks a gradient") {
  auto x = Tensor<float>::from({2}, {1, 2});
  x.set_requires_grad(true);
  auto y = Tensor<float>::from({2}, {3, 4});
  y.set_requires_grad(true);
  Tape<float> tape;
  typename Tape<float>::Scope scope(tape);
  auto loss = sum(mul(y, y));
  auto grads = backward(tape, loss);
  CHECK(!grads.has(x));
  CHECK(grads.has(y));
}

TEST_CASE("backward: non-scalar loss is rejected") {
  auto x = Tensor<float>::from({2}, {1, 2});
  x.set_requires_grad(true);
  Tape<float> tape;
  typename Tape<float>::Scope scope(tape);
  auto y = mul(x, x);
  CHECK_THROWS_AS(backward(tape, y), Error);
}

TEST_CASE("backward: two passes over the same tape agree bitwise") {
  Rng rng(7);
  auto x = rand_tensor({4, 4}, rng);
  x.set_requires_grad(true);
  Tape<double> tape;
  typename Tape<double>::Scope scope(tape);
  auto loss = mean(sigmoid(matmul(x, x)));
  auto g1 = backward(tape, loss);
  auto g2 = backward(tape, loss);
  for (long i = 0; i < x.size(); ++i) CHECK(g1.at(x).data()[i] == g2.at(x).data()[i]);
}

TEST_CASE("grad_check: exact for linear functions") {
  Rng rng(3);
  auto x = rand_tensor({5}, rng);
  auto r = grad_check<double>([](const Tensor<double>& t) { return sum(t); }, x, 1e-4, 1e-9);
  CHECK(r.pass);
  CHECK(r.max_rel_err < 1e-9);
}

TEST_CASE("grad_check: mean of sigmoid at a random point") {
  Rng rng(11);
  auto x = rand_tensor({8}, rng);
  auto r = grad_check<double>(
      [](const Tensor<double>& t) { return mean(sigmoid(t)); }, x, 1e-4, 1e-5);
  CHECK(r.pass);
}

TEST_CASE("grad_check: relu coordinate exactly at zero is excluded") {
  auto x = Tensor<double>::from({3}, {1.0, 0.0, -1.0});
  std::vector<bool> exclude = {false, true, false};
  auto r = grad_check<double>(
      [](const Tensor<double>& t) { return sum(relu(t)); }, x, 1e-4, 1e-6, &exclude);
  CHECK(r.pass);
  CHECK(r.checked == 2);
}

TEST_CASE("forward dispatch covers the registered set") {
  Rng rng(5);
  for (const auto& name : registered_ops()) {
    CAPTURE(name);
    OpAttrs attrs;
    std::vector<Tensor<double>> ins;
    if (name == "add" || name == "sub" || name == "mul") {
      ins = {rand_tensor({3, 2}, rng), rand_tensor({3, 2}, rng)};
    } else if (name == "scalar-mul") {
      attrs.scalars["value"] = 1.5;
      ins = {rand_tensor({4}, rng)};
    } else if (name == "matmul") {
      ins = {rand_tensor({2, 3}, rng), rand_tensor({3, 4}, rng)};
    } else if (name == "conv2d") {
      attrs.scalars["stride"] = 1;
      attrs.scalars["pad"] = 1;
      ins = {rand_tensor({2, 5, 5}, rng), rand_tensor({3, 2, 3, 3}, rng), rand_tensor({3}, rng)};
    } else if (name == "transposed-conv2d") {
      attrs.scalars["stride"] = 2;
      attrs.scalars["pad"] = 1;
      ins = {rand_tensor({2, 4, 4}, rng), rand_tensor({2, 3, 4, 4}, rng), rand_tensor({3}, rng)};
    } else if (name == "bilinear-sample") {
      ins = {rand_tensor({2, 4, 4}, rng), rand_tensor({3, 3, 2}, rng, 0.0, 3.0)};
    } else if (name == "concat") {
      attrs.scalars["axis"] = 1;
      ins = {rand_tensor({2, 3}, rng), rand_tensor({2, 2}, rng)};
    } else if (name == "reshape") {
      attrs.shapes["shape"] = {6};
      ins = {rand_tensor({2, 3}, rng)};
    } else if (name == "clamp") {
      attrs.scalars["lo"] = -0.5;
      attrs.scalars["hi"] = 0.5;
      ins = {rand_tensor({5}, rng)};
    } else if (name == "power") {
      attrs.scalars["exponent"] = 1.7;
      ins = {rand_tensor({5}, rng, 0.1, 2.0)};
    } else if (name == "leaky-relu") {
      attrs.scalars["slope"] = 0.2;
      ins = {rand_tensor({5}, rng)};
    } else if (name == "log") {
      ins = {rand_tensor({5}, rng, 0.05, 2.0)};
    } else {
      ins = {rand_tensor({5}, rng)};
    }
    auto out = forward(name, ins, attrs);
    for (long i = 0; i < out.size(); ++i) CHECK(std::isfinite(out.data()[i]));
  }
}

// Every registered primitive, 100 random points, high-precision mode,
// eps 1e-4, tol 1e-5, kink coordinates excluded.
TEST_CASE("grad sweep over all primitives") {
  Rng root(2024);
  const double eps = 1e-4, tol = 1e-5;
  const double margin = 1e-3;

  struct Case {
    std::string op;
    std::function<void(Rng&, std::vector<Tensor<double>>&, OpAttrs&)> make;
  };

  std::vector<Case> cases;
  for (const auto& name : registered_ops()) {
    Case c;
    c.op = name;
    c.make = [name, margin](Rng& rng, std::vector<Tensor<double>>& ins, OpAttrs& attrs) {
      if (name == "add" || name == "sub" || name == "mul") {
        if (rng.uniform01() < 0.3) {
          ins = {rand_tensor({1}, rng), rand_tensor({2, 3}, rng)};
        } else {
          ins = {rand_tensor({2, 3}, rng), rand_tensor({2, 3}, rng)};
        }
      } else if (name == "scalar-mul") {
        attrs.scalars["value"] = rng.uniform(-2, 2);
        ins = {rand_tensor({4}, rng)};
      } else if (name == "matmul") {
        ins = {rand_tensor({3, 4}, rng), rand_tensor({4, 2}, rng)};
      } else if (name == "conv2d") {
        const long s = rng.uniform01() < 0.5 ? 1 : 2;
        attrs.scalars["stride"] = double(s);
        attrs.scalars["pad"] = double(rng.uniform_int(0, 1));
        ins = {rand_tensor({2, 2, 5, 6}, rng), rand_tensor({3, 2, 3, 3}, rng),
               rand_tensor({3}, rng)};
      } else if (name == "transposed-conv2d") {
        const long s = rng.uniform01() < 0.5 ? 1 : 2;
        attrs.scalars["stride"] = double(s);
        attrs.scalars["pad"] = double(rng.uniform_int(0, 1));
        ins = {rand_tensor({2, 2, 3, 4}, rng), rand_tensor({2, 3, 3, 3}, rng),
               rand_tensor({3}, rng)};
      } else if (name == "bilinear-sample") {
        ins = {rand_tensor({2, 4, 5}, rng), rand_tensor({3, 3, 2}, rng, -0.5, 4.5)};
      } else if (name == "concat") {
        attrs.scalars["axis"] = 0;
        ins = {rand_tensor({2, 3}, rng), rand_tensor({1, 3}, rng), rand_tensor({2, 3}, rng)};
      } else if (name == "reshape") {
        attrs.shapes["shape"] = {3, 2};
        ins = {rand_tensor({6}, rng)};
      } else if (name == "relu" || name == "leaky-relu") {
        if (name == "leaky-relu") attrs.scalars["slope"] = 0.2;
        auto t = rand_tensor({6}, rng);
        push_away_from(t, {0.0}, margin);
        ins = {t};
      } else if (name == "clamp") {
        attrs.scalars["lo"] = -0.5;
        attrs.scalars["hi"] = 0.5;
        auto t = rand_tensor({6}, rng);
        push_away_from(t, {-0.5, 0.5}, margin);
        ins = {t};
      } else if (name == "log") {
        ins = {rand_tensor({6}, rng, 0.05, 2.0)};
      } else if (name == "power") {
        attrs.scalars["exponent"] = 1.0 + rng.uniform01() * 2.0;
        ins = {rand_tensor({6}, rng, 0.1, 2.0)};
      } else {
        ins = {rand_tensor({6}, rng)};
      }
    };
    cases.push_back(std::move(c));
  }

  for (const auto& c : cases) {
    CAPTURE(c.op);
    Rng rng = root.split(c.op);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<Tensor<double>> ins;
      OpAttrs attrs;
      c.make(rng, ins, attrs);
      // bilinear-sample differentiates only the source tensor
      const std::size_t n_diff = c.op == "bilinear-sample" ? 1 : ins.size();
      for (std::size_t j = 0; j < n_diff; ++j) {
        auto fn = [&, j](const Tensor<double>& t) {
          std::vector<Tensor<double>> local = ins;
          local[j] = t;
          return sum(forward(c.op, local, attrs));
        };
        auto r = grad_check<double>(fn, ins[j], eps, tol);
        worst = std::max(worst, r.max_rel_err);
        if (!r.pass) { CAPTURE(trial); CAPTURE(j); }
        CHECK(r.pass);
      }
    }
    MESSAGE(c.op << " max_rel_err " << worst);
  }
}

TEST_CASE("finite outputs on finite inputs") {
  Rng rng(99);
  auto x = rand_tensor({64}, rng, -8.0, 8.0);
  for (auto fn : {&relu<double>, &sigmoid<double>, &advroad::tanh<double>, &advroad::exp<double>}) {
    auto y = fn(x);
    for (long i = 0; i < y.size(); ++i) CHECK(std::isfinite(y.data()[i]));
  }
  auto tiny = Tensor<double>::from({3}, {0.0, 1e-14, 5.0});
  auto y = advroad::log(tiny, 1e-12);
  for (long i = 0; i < y.size(); ++i) CHECK(std::isfinite(y.data()[i]));
  auto sp = softplus(rand_tensor({32}, rng, -40.0, 40.0));
  for (long i = 0; i < sp.size(); ++i) CHECK(std::isfinite(sp.data()[i]));
}

TEST_CASE("softplus matches reference values and gradient") {
  auto x = Tensor<double>::from({4}, {-3.0, -0.4, 0.7, 5.0});
  auto y = softplus(x);
  for (long i = 0; i < 4; ++i)
    CHECK(y.data()[i] == doctest::Approx(std::log1p(std::exp(x.data()[i]))).epsilon(1e-12));
  auto r = grad_check<double>(
      [](const Tensor<double>& t) { return sum(softplus(t)); }, x, 1e-5, 1e-6);
  CHECK(r.pass);
}

TEST_CASE("ops without an active tape still compute") {
  auto x = Tensor<float>::from({2}, {1, 2});
  x.set_requires_grad(true);
  auto y = mul(x, x);
  CHECK(y.data()[1] == doctest::Approx(4.0f));
  CHECK(y.requires_grad());
}
