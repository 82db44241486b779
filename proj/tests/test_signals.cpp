#include <doctest.h>

#include <cmath>

#include "declust/signals.hpp"

using namespace declust;

TEST_CASE("function sets have four members each") {
  CHECK(function_set(FunctionSet::Smooth).size() == 4);
  CHECK(function_set(FunctionSet::Nonsmooth).size() == 4);
}

TEST_CASE("smooth set values at reference points") {
  auto fs = function_set(FunctionSet::Smooth);
  CHECK(fs[0](0.125) == doctest::Approx(1.0).epsilon(1e-12));        // sin(pi/2)
  CHECK(fs[1](0.125 + 1.0 / 16) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fs[2](0.5) == doctest::Approx(0.0));
  CHECK(fs[2](0.0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(fs[3](1.0) == doctest::Approx(0.0625).epsilon(1e-12));
}

TEST_CASE("nonsmooth set reference values") {
  // blip: continuous except the jump at x = 0.8
  CHECK(blip(0.3) == doctest::Approx(0.32 + 0.18 + 0.3).epsilon(1e-12));
  CHECK(blip(0.81) - blip(0.79) < -0.5);  // downward jump
  // wave at x = 0: 0.5 + 0.2 + 0.1
  CHECK(wave(0.0) == doctest::Approx(0.8).epsilon(1e-12));
  // parabolas: value at the left knot region is the base level
  CHECK(parabolas(0.05) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(parabolas(0.2) == doctest::Approx(0.8 - 30.0 * 0.01).epsilon(1e-12));
  auto fs = function_set(FunctionSet::Nonsmooth);
  CHECK(fs[3](0.25) == doctest::Approx(0.25).epsilon(1e-12));  // |x - 1/2|
}

TEST_CASE("grid sampling uses points j/n") {
  auto f = [](double x) { return x; };
  Eigen::VectorXd v = sample_on_grid(f, 8);
  REQUIRE(v.size() == 8);
  CHECK(v(0) == doctest::Approx(1.0 / 8));
  CHECK(v(7) == doctest::Approx(1.0));
}
