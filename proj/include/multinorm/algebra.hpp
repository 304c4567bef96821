#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

namespace multinorm {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using Rng = std::mt19937_64;

// Eigenvalues of a nominally PSD element may dip below zero in floating
// point; anything in [-kPsdTol, 0) is clamped to zero.
inline constexpr double kPsdTol = 1e-9;

/// Shape of a finite-dimensional C*-algebra A = M_{k1} (+) ... (+) M_{kB}.
struct AlgebraShape {
  std::vector<int> blocks;

  AlgebraShape() = default;
  explicit AlgebraShape(std::vector<int> ks) : blocks(std::move(ks)) {
    if (blocks.empty()) throw std::invalid_argument("AlgebraShape: no blocks");
    for (int k : blocks)
      if (k < 1) throw std::invalid_argument("AlgebraShape: block size < 1");
  }

  int num_blocks() const { return static_cast<int>(blocks.size()); }
  int block_size(int j) const { return blocks.at(static_cast<size_t>(j)); }
  // Sum of block sizes; the orthogonal dimension of A as a module over itself.
  int total_dim() const {
    int s = 0;
    for (int k : blocks) s += k;
    return s;
  }
  bool commutative() const {
    for (int k : blocks)
      if (k != 1) return false;
    return true;
  }
  friend bool operator==(const AlgebraShape& a, const AlgebraShape& b) {
    return a.blocks == b.blocks;
  }
  friend bool operator!=(const AlgebraShape& a, const AlgebraShape& b) {
    return !(a == b);
  }
};

/// One complex matrix per block.
class AlgebraElement {
 public:
  AlgebraElement() = default;
  explicit AlgebraElement(const AlgebraShape& shape)
      : shape_(shape) {
    data_.reserve(static_cast<size_t>(shape.num_blocks()));
    for (int j = 0; j < shape.num_blocks(); ++j)
      data_.push_back(Mat::Zero(shape.block_size(j), shape.block_size(j)));
  }
  AlgebraElement(const AlgebraShape& shape, std::vector<Mat> data)
      : shape_(shape), data_(std::move(data)) {
    if (static_cast<int>(data_.size()) != shape.num_blocks())
      throw std::invalid_argument("AlgebraElement: block count mismatch");
    for (int j = 0; j < shape.num_blocks(); ++j)
      if (data_[static_cast<size_t>(j)].rows() != shape.block_size(j) ||
          data_[static_cast<size_t>(j)].cols() != shape.block_size(j))
        throw std::invalid_argument("AlgebraElement: block dimension mismatch");
  }

  const AlgebraShape& shape() const { return shape_; }
  const Mat& block(int j) const { return data_.at(static_cast<size_t>(j)); }
  Mat& block(int j) { return data_.at(static_cast<size_t>(j)); }

  static AlgebraElement zero(const AlgebraShape& shape) {
    return AlgebraElement(shape);
  }
  static AlgebraElement identity(const AlgebraShape& shape) {
    AlgebraElement a(shape);
    for (int j = 0; j < shape.num_blocks(); ++j)
      a.block(j) = Mat::Identity(shape.block_size(j), shape.block_size(j));
    return a;
  }

  AlgebraElement adjoint() const {
    AlgebraElement r(shape_);
    for (size_t j = 0; j < data_.size(); ++j)
      r.data_[j] = data_[j].adjoint();
    return r;
  }

  friend AlgebraElement operator+(const AlgebraElement& a,
                                  const AlgebraElement& b) {
    check_shapes(a, b);
    AlgebraElement r(a.shape_);
    for (size_t j = 0; j < a.data_.size(); ++j)
      r.data_[j] = a.data_[j] + b.data_[j];
    return r;
  }
  friend AlgebraElement operator-(const AlgebraElement& a,
                                  const AlgebraElement& b) {
    check_shapes(a, b);
    AlgebraElement r(a.shape_);
    for (size_t j = 0; j < a.data_.size(); ++j)
      r.data_[j] = a.data_[j] - b.data_[j];
    return r;
  }
  friend AlgebraElement operator*(const AlgebraElement& a,
                                  const AlgebraElement& b) {
    check_shapes(a, b);
    AlgebraElement r(a.shape_);
    for (size_t j = 0; j < a.data_.size(); ++j)
      r.data_[j] = a.data_[j] * b.data_[j];
    return r;
  }
  friend AlgebraElement operator*(Complex s, const AlgebraElement& a) {
    AlgebraElement r(a.shape_);
    for (size_t j = 0; j < a.data_.size(); ++j) r.data_[j] = s * a.data_[j];
    return r;
  }
  AlgebraElement operator-() const { return Complex(-1.0, 0.0) * *this; }

 private:
  static void check_shapes(const AlgebraElement& a, const AlgebraElement& b) {
    if (a.shape_ != b.shape_)
      throw std::invalid_argument("AlgebraElement: shape mismatch");
  }

  AlgebraShape shape_;
  std::vector<Mat> data_;
};

/// C*-norm: max over blocks of the largest singular value.
inline double alg_norm(const AlgebraElement& a) {
  double best = 0.0;
  for (int j = 0; j < a.shape().num_blocks(); ++j) {
    const Mat& m = a.block(j);
    if (m.rows() == 1) {
      best = std::max(best, std::abs(m(0, 0)));
    } else {
      Eigen::JacobiSVD<Mat> svd(m);
      best = std::max(best, svd.singularValues()(0));
    }
  }
  return best;
}

inline AlgebraElement hermitian_part(const AlgebraElement& a) {
  return Complex(0.5, 0.0) * (a + a.adjoint());
}

inline bool is_hermitian(const AlgebraElement& a, double tol = 1e-9) {
  return alg_norm(a - a.adjoint()) <= tol;
}

/// Applies f to the spectrum of a Hermitian element.  The input is
/// symmetrized first to strip floating-point asymmetry.
inline AlgebraElement functional_calculus(
    const AlgebraElement& a, const std::function<double(double)>& f,
    double herm_tol = 1e-8) {
  if (alg_norm(a - a.adjoint()) > herm_tol * std::max(1.0, alg_norm(a)))
    throw std::invalid_argument("functional_calculus: non-Hermitian input");
  AlgebraElement h = hermitian_part(a);
  AlgebraElement r(a.shape());
  for (int j = 0; j < a.shape().num_blocks(); ++j) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h.block(j));
    Eigen::VectorXd ev = es.eigenvalues();
    for (int i = 0; i < ev.size(); ++i) ev(i) = f(ev(i));
    r.block(j) = es.eigenvectors() * ev.cast<Complex>().asDiagonal() *
                 es.eigenvectors().adjoint();
  }
  return r;
}

/// Unique positive square root of a PSD element.  Eigenvalues in
/// [-tol_psd, 0) are clamped; anything lower is rejected.
inline AlgebraElement positive_sqrt(const AlgebraElement& a,
                                    double tol_psd = kPsdTol) {
  AlgebraElement h = hermitian_part(a);
  if (alg_norm(a - h) > 1e-8 * std::max(1.0, alg_norm(a)))
    throw std::invalid_argument("positive_sqrt: non-Hermitian input");
  AlgebraElement r(a.shape());
  for (int j = 0; j < a.shape().num_blocks(); ++j) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h.block(j));
    Eigen::VectorXd ev = es.eigenvalues();
    for (int i = 0; i < ev.size(); ++i) {
      if (ev(i) < -tol_psd)
        throw std::invalid_argument("positive_sqrt: negative eigenvalue");
      ev(i) = std::sqrt(std::max(0.0, ev(i)));
    }
    r.block(j) = es.eigenvectors() * ev.cast<Complex>().asDiagonal() *
                 es.eigenvectors().adjoint();
  }
  return r;
}

inline bool is_projection(const AlgebraElement& a, double tol) {
  return alg_norm(a * a - a) <= tol && alg_norm(a.adjoint() - a) <= tol;
}

inline bool is_unitary(const AlgebraElement& a, double tol) {
  AlgebraElement id = AlgebraElement::identity(a.shape());
  return alg_norm(a.adjoint() * a - id) <= tol &&
         alg_norm(a * a.adjoint() - id) <= tol;
}

/// A pure state on A: a vector state at a unit vector of one block.
/// For commutative shapes this is a character.
struct PureState {
  AlgebraShape shape;
  int block = 0;
  Vec vector;

  PureState() = default;
  PureState(const AlgebraShape& s, int j, Vec xi)
      : shape(s), block(j), vector(std::move(xi)) {
    if (j < 0 || j >= s.num_blocks())
      throw std::invalid_argument("PureState: block index out of range");
    if (vector.size() != s.block_size(j))
      throw std::invalid_argument("PureState: vector dimension mismatch");
    if (std::abs(vector.norm() - 1.0) > 1e-12)
      throw std::invalid_argument("PureState: vector not unit");
  }
};

inline Complex state_eval(const PureState& tau, const AlgebraElement& a) {
  if (tau.shape != a.shape())
    throw std::invalid_argument("state_eval: shape mismatch");
  return (tau.vector.adjoint() * a.block(tau.block) * tau.vector)(0, 0);
}

inline Vec gaussian_vector(int dim, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = Complex(g(rng), g(rng));
  return v;
}

inline Vec random_unit_vector(int dim, Rng& rng) {
  Vec v = gaussian_vector(dim, rng);
  while (v.norm() < 1e-12) v = gaussian_vector(dim, rng);
  return v / v.norm();
}

/// Random block weighted by k_j / sum(k), Haar-random unit vector inside it.
inline PureState pure_state_sampler(const AlgebraShape& shape, Rng& rng) {
  std::vector<double> w(shape.blocks.begin(), shape.blocks.end());
  std::discrete_distribution<int> pick(w.begin(), w.end());
  int j = pick(rng);
  return PureState(shape, j, random_unit_vector(shape.block_size(j), rng));
}

/// All characters of a commutative shape, one per block.
inline std::vector<PureState> enumerate_characters(const AlgebraShape& shape) {
  if (!shape.commutative())
    throw std::invalid_argument(
        "enumerate_characters: shape is not commutative");
  std::vector<PureState> out;
  for (int j = 0; j < shape.num_blocks(); ++j) {
    Vec one(1);
    one(0) = Complex(1.0, 0.0);
    out.emplace_back(shape, j, one);
  }
  return out;
}

inline AlgebraElement gaussian_element(const AlgebraShape& shape, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  AlgebraElement a(shape);
  for (int j = 0; j < shape.num_blocks(); ++j) {
    int k = shape.block_size(j);
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c) a.block(j)(r, c) = Complex(g(rng), g(rng));
  }
  return a;
}

}  // namespace multinorm
