#include "fhnet/numeric.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/bessel.hpp>

namespace fhnet {

double pairwise_sum(std::span<const double> values) noexcept {
    constexpr std::size_t leaf = 32;
    if (values.size() <= leaf) {
        double s = 0.0;
        for (double v : values) {
            s += v;
        }
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

std::vector<double> isotonic_nondecreasing(std::span<const double> values) {
    struct Block {
        double sum;
        std::size_t count;
        double mean() const { return sum / static_cast<double>(count); }
    };
    std::vector<Block> blocks;
    blocks.reserve(values.size());
    for (double v : values) {
        blocks.push_back({v, 1});
        while (blocks.size() > 1 && blocks[blocks.size() - 2].mean() > blocks.back().mean()) {
            Block top = blocks.back();
            blocks.pop_back();
            blocks.back().sum += top.sum;
            blocks.back().count += top.count;
        }
    }
    std::vector<double> out;
    out.reserve(values.size());
    for (const Block& b : blocks) {
        out.insert(out.end(), b.count, b.mean());
    }
    return out;
}

double log_bessel_i0(double x) noexcept {
    x = std::fabs(x);
    if (x < 700.0) {
        return std::log(boost::math::cyl_bessel_i(0, x));
    }
    // Hankel asymptotic expansion; relative error of the series < 1e-12 here.
    const double inv = 1.0 / x;
    const double series = inv * (1.0 / 8.0 + inv * (9.0 / 128.0 + inv * (225.0 / 3072.0)));
    return x - 0.5 * std::log(2.0 * std::numbers::pi * x) + std::log1p(series);
}

double log_sum_exp(std::span<const double> values) noexcept {
    if (values.empty()) {
        return -std::numeric_limits<double>::infinity();
    }
    const double peak = *std::max_element(values.begin(), values.end());
    if (!std::isfinite(peak)) {
        return peak;
    }
    double s = 0.0;
    for (double v : values) {
        s += std::exp(v - peak);
    }
    return peak + std::log(s);
}

std::uint64_t fnv1a(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string format_double(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) {
        throw std::runtime_error("format_double: conversion failed");
    }
    return std::string(buf, end);
}

std::vector<double> make_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || hi < lo) {
        throw std::invalid_argument("make_grid: need step > 0 and hi >= lo");
    }
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> grid;
    grid.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = lo + static_cast<double>(i) * step;
        grid.push_back(std::round(v * 1e9) / 1e9);
    }
    return grid;
}

}  // namespace fhnet
