#include "declust/signals.hpp"

#include <cmath>

namespace declust {

double blip(double x) {
  if (x <= 0.8)
    return 0.32 + 0.6 * x + 0.3 * std::exp(-100.0 * (x - 0.3) * (x - 0.3));
  return -0.28 + 0.6 * x + 0.3 * std::exp(-100.0 * (x - 1.3) * (x - 1.3));
}

double wave(double x) {
  return 0.5 + 0.2 * std::cos(4.0 * M_PI * x) + 0.1 * std::cos(24.0 * M_PI * x);
}

namespace {
double ramp2(double u) { return u > 0.0 ? u * u : 0.0; }
}  // namespace

double parabolas(double x) {
  return 0.8 - 30.0 * ramp2(x - 0.1) + 60.0 * ramp2(x - 0.2) -
         30.0 * ramp2(x - 0.3) + 500.0 * ramp2(x - 0.35) -
         1000.0 * ramp2(x - 0.37) + 1000.0 * ramp2(x - 0.41) -
         500.0 * ramp2(x - 0.43);
}

std::vector<std::function<double(double)>> function_set(FunctionSet set) {
  if (set == FunctionSet::Smooth)
    return {
        [](double x) { return std::sin(4.0 * M_PI * x); },
        [](double x) { return std::sin(4.0 * M_PI * (x - 1.0 / 16.0)); },
        [](double x) { return (x - 0.5) * (x - 0.5); },
        [](double x) {
          double u = (x - 0.5) * (x - 0.5);
          return u * u;
        },
    };
  return {
      [](double x) { return blip(x); },
      [](double x) { return wave(x); },
      [](double x) { return parabolas(x); },
      [](double x) { return std::abs(x - 0.5); },
  };
}

Eigen::VectorXd sample_on_grid(const std::function<double(double)>& f,
                               std::size_t n) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(n));
  for (std::size_t j = 1; j <= n; ++j)
    out(static_cast<Eigen::Index>(j - 1)) =
        f(static_cast<double>(j) / static_cast<double>(n));
  return out;
}

}  // namespace declust
