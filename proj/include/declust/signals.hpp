#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace declust {

enum class FunctionSet { Smooth, Nonsmooth };

// The two benchmark families, four functions each.
// Smooth: sin(4 pi x), sin(4 pi (x - 1/16)), (x - 1/2)^2, (x - 1/2)^4.
// Nonsmooth: blip, wave, parabolas, |x - 1/2| (standard test signals).
std::vector<std::function<double(double)>> function_set(FunctionSet set);

double blip(double x);
double wave(double x);
double parabolas(double x);

// Samples f on the grid j/n, j = 1..n.
Eigen::VectorXd sample_on_grid(const std::function<double(double)>& f, std::size_t n);

}  // namespace declust
