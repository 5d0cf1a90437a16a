#pragma once

// Brute-force reference computations for the unit tests. Nothing here calls
// into the library's own averaging, convolution or norm code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "recon/multiscale.hpp"

namespace oracle {

inline constexpr double pi = 3.14159265358979323846;

// O(N^2) periodic convolution h * sum_j a[j] b[i - j].
inline std::vector<double> direct_convolution(std::span<const double> a, std::span<const double> b, double h) {
  const std::size_t n = a.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    long double s = 0.0L;
    for (std::size_t j = 0; j < n; ++j) s += static_cast<long double>(a[j]) * b[(i + n - j) % n];
    out[i] = static_cast<double>(s * h);
  }
  return out;
}

// Mean over [x - R, x + R] of the piecewise-constant extension (cell i = [ih - h/2, ih + h/2)).
inline double overlap_average(std::span<const double> v, double x, double radius) {
  const std::size_t n = v.size();
  const double h = 1.0 / static_cast<double>(n);
  if (radius >= 0.5) {
    double s = 0.0;
    for (double e : v) s += e;
    return s / static_cast<double>(n);
  }
  double num = 0.0, den = 0.0;
  const long lo = static_cast<long>(std::floor((x - radius) / h)) - 2;
  const long hi = static_cast<long>(std::ceil((x + radius) / h)) + 2;
  for (long i = lo; i <= hi; ++i) {
    const double a = std::max(i * h - 0.5 * h, x - radius);
    const double b = std::min(i * h + 0.5 * h, x + radius);
    if (b <= a) continue;
    const double w = (b - a) / h;
    const long m = ((i % static_cast<long>(n)) + static_cast<long>(n)) % static_cast<long>(n);
    num += w * v[static_cast<std::size_t>(m)];
    den += w;
  }
  return num / den;
}

inline double lq(const std::vector<double>& t, double q) {
  if (std::isinf(q)) return *std::max_element(t.begin(), t.end());
  double s = 0.0;
  for (double e : t) s += std::pow(e, q);
  return std::pow(s, 1.0 / q);
}

inline double weighted_lp(std::span<const double> v, double w, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double e : v) m = std::max(m, std::abs(e));
    return m;
  }
  double s = 0.0;
  for (double e : v) s += w * std::pow(std::abs(e), p);
  return std::pow(s, 1.0 / p);
}

inline double besov(const recon::MultiscaleField& H, double p, double q, double gamma, bool averaged) {
  std::vector<double> terms;
  for (int k = H.k_min(); k <= H.k_max(); ++k) {
    std::vector<double> v(H.slice(k).begin(), H.slice(k).end());
    if (averaged) {
      std::vector<double> a(v.size());
      for (std::size_t j = 0; j < v.size(); ++j)
        a[j] = overlap_average(H.slice(k), static_cast<double>(j) / static_cast<double>(v.size()), std::ldexp(1.0, -k));
      v = a;
    }
    terms.push_back(std::exp2(gamma * k) * weighted_lp(v, 1.0 / static_cast<double>(v.size()), p));
  }
  return lq(terms, q);
}

// Finite p and q only.
inline double triebel_lizorkin(const recon::MultiscaleField& H, double p, double q, double gamma) {
  std::size_t fine = 0;
  for (int k = H.k_min(); k <= H.k_max(); ++k) fine = std::max(fine, H.count(k));
  std::vector<double> outer(fine);
  for (std::size_t i = 0; i < fine; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(fine);
    double s = 0.0;
    for (int k = H.k_min(); k <= H.k_max(); ++k) {
      std::vector<double> pw(H.slice(k).begin(), H.slice(k).end());
      for (double& e : pw) e = std::pow(std::abs(e), q);
      s += std::pow(std::exp2(gamma * k), q) * overlap_average(pw, x, std::ldexp(1.0, -k));
    }
    outer[i] = std::pow(s, 1.0 / q);
  }
  return weighted_lp(outer, 1.0 / static_cast<double>(fine), p);
}

}  // namespace oracle
