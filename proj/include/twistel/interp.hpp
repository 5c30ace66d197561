#pragma once

#include <complex>
#include <vector>

namespace twistel {

// Shape-preserving cubic Hermite interpolant (Fritsch-Carlson slopes).
// Evaluation outside [x.front(), x.back()] follows the extension policy.
class MonotoneCubic {
public:
    enum class Extend { Zero, Clamp };

    MonotoneCubic(std::vector<double> x, std::vector<double> y, Extend ext = Extend::Zero);

    double operator()(double xq) const;

private:
    std::vector<double> x_, y_, d_; // nodes, values, endpoint-limited slopes
    Extend ext_;
};

std::vector<double> resample(const std::vector<double>& x, const std::vector<double>& y,
                             const std::vector<double>& xq, MonotoneCubic::Extend ext);

std::vector<std::complex<double>> resample(const std::vector<double>& x,
                                           const std::vector<std::complex<double>>& y,
                                           const std::vector<double>& xq,
                                           MonotoneCubic::Extend ext);

} // namespace twistel
