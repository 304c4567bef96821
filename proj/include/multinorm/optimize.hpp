#pragma once

#include "multinorm/algebra.hpp"

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace multinorm {

struct OptimizerConfig {
  int restarts = 32;
  int max_iters = 200;
  double step = 0.05;
  double fd_step = 1e-5;
  double obj_tol = 1e-8;
  std::uint64_t seed = 0;

  OptimizerConfig scaled(int r, int it) const {
    OptimizerConfig c = *this;
    c.restarts = r;
    c.max_iters = it;
    return c;
  }
};

// splitmix64; used to derive independent per-restart streams from one seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline Rng derived_rng(std::uint64_t seed, std::uint64_t salt) {
  return Rng(mix_seed(seed, salt));
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the
/// diagonal of R phase-corrected.
inline Mat haar_unitary(int dim, Rng& rng) {
  if (dim < 1) throw std::invalid_argument("haar_unitary: dim < 1");
  std::normal_distribution<double> g(0.0, 1.0);
  Mat z(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) z(r, c) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<Mat> qr(z);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < dim; ++c) {
    Complex d = r(c, c);
    double ad = std::abs(d);
    q.col(c) *= (ad > 1e-300) ? d / ad : Complex(1.0, 0.0);
  }
  return q;
}

/// Nearest unitary to m (polar factor via SVD).
inline Mat polar_unitary(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

namespace detail {

// Orthogonal basis of skew-Hermitian dim x dim matrices, dim^2 of them.
inline std::vector<Mat> skew_basis(int dim) {
  std::vector<Mat> basis;
  basis.reserve(static_cast<size_t>(dim) * static_cast<size_t>(dim));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int r = 0; r < dim; ++r) {
    Mat b = Mat::Zero(dim, dim);
    b(r, r) = Complex(0.0, 1.0);
    basis.push_back(b);
  }
  for (int r = 0; r < dim; ++r)
    for (int c = r + 1; c < dim; ++c) {
      Mat b = Mat::Zero(dim, dim);
      b(r, c) = Complex(inv_sqrt2, 0.0);
      b(c, r) = Complex(-inv_sqrt2, 0.0);
      basis.push_back(b);
      Mat bi = Mat::Zero(dim, dim);
      bi(r, c) = Complex(0.0, inv_sqrt2);
      bi(c, r) = Complex(0.0, inv_sqrt2);
      basis.push_back(bi);
    }
  return basis;
}

}  // namespace detail

/// Riemannian ascent on U(dim): finite-difference gradient over
/// skew-Hermitian tangent directions, polar retraction, backtracking on
/// non-improvement.  Returns the best iterate; never below f(start).
inline std::pair<Mat, double> unitary_ascent(
    const std::function<double(const Mat&)>& objective, int dim,
    const OptimizerConfig& cfg, const Mat& start) {
  Mat u = start;
  double fu = objective(u);
  const std::vector<Mat> basis = detail::skew_basis(dim);
  double step = cfg.step;
  for (int it = 0; it < cfg.max_iters; ++it) {
    // One-sided finite differences in the tangent space at u.
    Mat grad_dir = Mat::Zero(dim, dim);
    for (const Mat& b : basis) {
      Mat probe = polar_unitary(u + cfg.fd_step * (b * u));
      double g = (objective(probe) - fu) / cfg.fd_step;
      grad_dir += g * b;
    }
    double gn = grad_dir.norm();
    if (gn < 1e-14) break;
    grad_dir /= gn;
    bool improved = false;
    double s = step;
    for (int bt = 0; bt < 20; ++bt) {
      Mat cand = polar_unitary(u + s * (grad_dir * u));
      double fc = objective(cand);
      if (fc > fu + 1e-15) {
        u = cand;
        fu = fc;
        improved = true;
        step = std::min(s * 2.0, 1.0);
        break;
      }
      s *= 0.5;
    }
    if (!improved) break;
    if (it > 0 && step * gn < cfg.obj_tol) break;
  }
  return {u, fu};
}

/// Ascent on the unit sphere of C^dim: finite-difference tangent gradient
/// with renormalization retraction.
inline std::pair<Vec, double> sphere_ascent(
    const std::function<double(const Vec&)>& objective, int dim,
    const OptimizerConfig& cfg, const Vec& start) {
  Vec xi = start / start.norm();
  double fx = objective(xi);
  if (dim == 1) return {xi, fx};
  double step = cfg.step;
  for (int it = 0; it < cfg.max_iters; ++it) {
    Vec grad = Vec::Zero(dim);
    for (int i = 0; i < dim; ++i) {
      for (int part = 0; part < 2; ++part) {
        Vec dir = Vec::Zero(dim);
        dir(i) = (part == 0) ? Complex(1.0, 0.0) : Complex(0.0, 1.0);
        // Project onto the tangent space at xi.
        dir -= xi * (xi.dot(dir));
        double dn = dir.norm();
        if (dn < 1e-12) continue;
        dir /= dn;
        Vec probe = xi + cfg.fd_step * dir;
        probe /= probe.norm();
        double g = (objective(probe) - fx) / cfg.fd_step;
        grad += g * dir;
      }
    }
    double gn = grad.norm();
    if (gn < 1e-14) break;
    grad /= gn;
    bool improved = false;
    double s = step;
    for (int bt = 0; bt < 20; ++bt) {
      Vec cand = xi + s * grad;
      cand /= cand.norm();
      double fc = objective(cand);
      if (fc > fx + 1e-15) {
        xi = cand;
        fx = fc;
        improved = true;
        step = std::min(s * 2.0, 1.0);
        break;
      }
      s *= 0.5;
    }
    if (!improved) break;
  }
  return {xi, fx};
}

/// Unconstrained ascent on R^dim with one-sided finite differences and
/// backtracking; used for the homogeneous-ratio objectives.
inline std::pair<Eigen::VectorXd, double> coordinate_ascent(
    const std::function<double(const Eigen::VectorXd&)>& objective,
    const OptimizerConfig& cfg, const Eigen::VectorXd& start) {
  Eigen::VectorXd x = start;
  double fx = objective(x);
  const int dim = static_cast<int>(x.size());
  double step = cfg.step;
  for (int it = 0; it < cfg.max_iters; ++it) {
    Eigen::VectorXd grad(dim);
    for (int i = 0; i < dim; ++i) {
      Eigen::VectorXd probe = x;
      probe(i) += cfg.fd_step;
      grad(i) = (objective(probe) - fx) / cfg.fd_step;
    }
    double gn = grad.norm();
    if (gn < 1e-14) break;
    grad /= gn;
    bool improved = false;
    double s = step;
    for (int bt = 0; bt < 20; ++bt) {
      Eigen::VectorXd cand = x + s * grad;
      double fc = objective(cand);
      if (fc > fx + 1e-15) {
        x = cand;
        fx = fc;
        improved = true;
        step = std::min(s * 2.0, 1.0);
        break;
      }
      s *= 0.5;
    }
    if (!improved) break;
    if (it > 0 && step * gn < cfg.obj_tol) break;
  }
  return {x, fx};
}

/// All n-tuples of nonnegative integers summing to total, lexicographic.
inline std::vector<std::vector<int>> rank_assignments(int total, int n) {
  if (total < 0 || n < 1)
    throw std::invalid_argument("rank_assignments: bad arguments");
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<size_t>(n), 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == n - 1) {
      cur[static_cast<size_t>(pos)] = left;
      out.push_back(cur);
      return;
    }
    for (int r = 0; r <= left; ++r) {
      cur[static_cast<size_t>(pos)] = r;
      rec(pos + 1, left - r);
    }
  };
  rec(0, total);
  return out;
}

}  // namespace multinorm
