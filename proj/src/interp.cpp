#include "twistel/interp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "twistel/errors.hpp"

namespace twistel {

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y, Extend ext)
    : x_(std::move(x)), y_(std::move(y)), ext_(ext) {
    const size_t n = x_.size();
    if (n < 2 || y_.size() != n)
        throw SizeMismatch("interpolant needs matching x/y with at least 2 nodes");
    for (size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1]))
            throw std::invalid_argument("interpolation nodes must be strictly increasing");

    std::vector<double> h(n - 1), s(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        s[i] = (y_[i + 1] - y_[i]) / h[i];
    }

    d_.assign(n, 0.0);
    if (n == 2) {
        d_[0] = d_[1] = s[0];
    } else {
        for (size_t i = 1; i + 1 < n; ++i) {
            if (s[i - 1] * s[i] <= 0.0) {
                d_[i] = 0.0;
            } else {
                double w1 = 2.0 * h[i] + h[i - 1];
                double w2 = h[i] + 2.0 * h[i - 1];
                d_[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
            }
        }
        auto end_slope = [](double h0, double h1, double s0, double s1) {
            double d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
            if (d * s0 <= 0.0)
                d = 0.0;
            else if (s0 * s1 <= 0.0 && std::abs(d) > 3.0 * std::abs(s0))
                d = 3.0 * s0;
            return d;
        };
        d_[0] = end_slope(h[0], h[1], s[0], s[1]);
        d_[n - 1] = end_slope(h[n - 2], h[n - 3], s[n - 2], s[n - 3]);
    }
}

double MonotoneCubic::operator()(double xq) const {
    if (xq < x_.front() || xq > x_.back()) {
        if (ext_ == Extend::Zero)
            return 0.0;
        return xq < x_.front() ? y_.front() : y_.back();
    }
    auto it = std::upper_bound(x_.begin(), x_.end(), xq);
    size_t i = (it == x_.begin()) ? 0 : size_t(it - x_.begin()) - 1;
    if (i >= x_.size() - 1)
        i = x_.size() - 2;
    double h = x_[i + 1] - x_[i];
    double t = (xq - x_[i]) / h;
    double t2 = t * t, t3 = t2 * t;
    double h00 = 2 * t3 - 3 * t2 + 1;
    double h10 = t3 - 2 * t2 + t;
    double h01 = -2 * t3 + 3 * t2;
    double h11 = t3 - t2;
    return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
}

std::vector<double> resample(const std::vector<double>& x, const std::vector<double>& y,
                             const std::vector<double>& xq, MonotoneCubic::Extend ext) {
    MonotoneCubic f(x, y, ext);
    std::vector<double> out(xq.size());
    for (size_t i = 0; i < xq.size(); ++i)
        out[i] = f(xq[i]);
    return out;
}

std::vector<std::complex<double>> resample(const std::vector<double>& x,
                                           const std::vector<std::complex<double>>& y,
                                           const std::vector<double>& xq,
                                           MonotoneCubic::Extend ext) {
    std::vector<double> re(y.size()), im(y.size());
    for (size_t i = 0; i < y.size(); ++i) {
        re[i] = y[i].real();
        im[i] = y[i].imag();
    }
    std::vector<double> vre = resample(x, re, xq, ext);
    std::vector<double> vim = resample(x, im, xq, ext);
    std::vector<std::complex<double>> out(xq.size());
    for (size_t i = 0; i < xq.size(); ++i)
        out[i] = {vre[i], vim[i]};
    return out;
}

} // namespace twistel
