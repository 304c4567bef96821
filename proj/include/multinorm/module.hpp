#pragma once

#include "multinorm/algebra.hpp"
#include "multinorm/optimize.hpp"

#include <numeric>
#include <stdexcept>
#include <vector>

namespace multinorm {

/// The free module X = l^2_p(A) over a block algebra.
struct ModuleSpace {
  AlgebraShape shape;
  int rank = 1;

  ModuleSpace() = default;
  ModuleSpace(AlgebraShape s, int p) : shape(std::move(s)), rank(p) {
    if (p < 1) throw std::invalid_argument("ModuleSpace: rank < 1");
  }
  // Cardinality of any orthonormal basis of basic vectors.
  int o_dim() const { return rank * shape.total_dim(); }
  friend bool operator==(const ModuleSpace& a, const ModuleSpace& b) {
    return a.shape == b.shape && a.rank == b.rank;
  }
  friend bool operator!=(const ModuleSpace& a, const ModuleSpace& b) {
    return !(a == b);
  }
};

class ModuleVector {
 public:
  ModuleVector() = default;
  explicit ModuleVector(const ModuleSpace& space) : space_(space) {
    coords_.assign(static_cast<size_t>(space.rank),
                   AlgebraElement::zero(space.shape));
  }
  ModuleVector(const ModuleSpace& space, std::vector<AlgebraElement> coords)
      : space_(space), coords_(std::move(coords)) {
    if (static_cast<int>(coords_.size()) != space.rank)
      throw std::invalid_argument("ModuleVector: coordinate count mismatch");
    for (const auto& a : coords_)
      if (a.shape() != space.shape)
        throw std::invalid_argument("ModuleVector: coordinate shape mismatch");
  }

  const ModuleSpace& space() const { return space_; }
  const AlgebraElement& coord(int i) const {
    return coords_.at(static_cast<size_t>(i));
  }
  AlgebraElement& coord(int i) { return coords_.at(static_cast<size_t>(i)); }

  /// Block-j coordinates stacked into a (p*k_j) x k_j matrix.
  Mat block_stack(int j) const {
    int k = space_.shape.block_size(j);
    Mat m(space_.rank * k, k);
    for (int i = 0; i < space_.rank; ++i)
      m.middleRows(i * k, k) = coords_[static_cast<size_t>(i)].block(j);
    return m;
  }
  void set_block_stack(int j, const Mat& m) {
    int k = space_.shape.block_size(j);
    for (int i = 0; i < space_.rank; ++i)
      coords_[static_cast<size_t>(i)].block(j) = m.middleRows(i * k, k);
  }

  friend ModuleVector operator+(const ModuleVector& x, const ModuleVector& y) {
    check_spaces(x, y);
    ModuleVector r(x.space_);
    for (int i = 0; i < x.space_.rank; ++i)
      r.coord(i) = x.coord(i) + y.coord(i);
    return r;
  }
  friend ModuleVector operator-(const ModuleVector& x, const ModuleVector& y) {
    check_spaces(x, y);
    ModuleVector r(x.space_);
    for (int i = 0; i < x.space_.rank; ++i)
      r.coord(i) = x.coord(i) - y.coord(i);
    return r;
  }
  friend ModuleVector operator*(Complex s, const ModuleVector& x) {
    ModuleVector r(x.space_);
    for (int i = 0; i < x.space_.rank; ++i) r.coord(i) = s * x.coord(i);
    return r;
  }
  /// Right action x.a, coordinatewise.
  friend ModuleVector operator*(const ModuleVector& x, const AlgebraElement& a) {
    ModuleVector r(x.space_);
    for (int i = 0; i < x.space_.rank; ++i) r.coord(i) = x.coord(i) * a;
    return r;
  }

 private:
  static void check_spaces(const ModuleVector& x, const ModuleVector& y) {
    if (x.space_ != y.space_)
      throw std::invalid_argument("ModuleVector: space mismatch");
  }

  ModuleSpace space_;
  std::vector<AlgebraElement> coords_;
};

/// <x,y> = sum_i x_i^* y_i.
inline AlgebraElement inner(const ModuleVector& x, const ModuleVector& y) {
  if (x.space() != y.space())
    throw std::invalid_argument("inner: space mismatch");
  AlgebraElement r(x.space().shape);
  for (int j = 0; j < x.space().shape.num_blocks(); ++j)
    r.block(j) = x.block_stack(j).adjoint() * y.block_stack(j);
  return r;
}

inline AlgebraElement vec_abs(const ModuleVector& x) {
  return positive_sqrt(inner(x, x));
}

inline double vec_norm(const ModuleVector& x) {
  return std::sqrt(alg_norm(inner(x, x)));
}

struct ModuleTuple {
  ModuleSpace space;
  std::vector<ModuleVector> entries;

  ModuleTuple() = default;
  ModuleTuple(const ModuleSpace& s, std::vector<ModuleVector> es)
      : space(s), entries(std::move(es)) {
    for (const auto& e : entries)
      if (e.space() != s)
        throw std::invalid_argument("ModuleTuple: entry space mismatch");
  }
  int n() const { return static_cast<int>(entries.size()); }
};

/// An element of L(X) = M_p(A), stored per block as the flattened
/// (p*k_j) x (p*k_j) complex matrix.
class OperatorOnModule {
 public:
  OperatorOnModule() = default;
  explicit OperatorOnModule(const ModuleSpace& space) : space_(space) {
    for (int j = 0; j < space.shape.num_blocks(); ++j) {
      int d = space.rank * space.shape.block_size(j);
      blocks_.push_back(Mat::Zero(d, d));
    }
  }
  OperatorOnModule(const ModuleSpace& space, std::vector<Mat> blocks)
      : space_(space), blocks_(std::move(blocks)) {
    if (static_cast<int>(blocks_.size()) != space.shape.num_blocks())
      throw std::invalid_argument("OperatorOnModule: block count mismatch");
    for (int j = 0; j < space.shape.num_blocks(); ++j) {
      int d = space.rank * space.shape.block_size(j);
      if (blocks_[static_cast<size_t>(j)].rows() != d ||
          blocks_[static_cast<size_t>(j)].cols() != d)
        throw std::invalid_argument("OperatorOnModule: block dim mismatch");
    }
  }

  const ModuleSpace& space() const { return space_; }
  const Mat& block(int j) const { return blocks_.at(static_cast<size_t>(j)); }
  Mat& block(int j) { return blocks_.at(static_cast<size_t>(j)); }

  /// The (i,l) entry as an element of A.
  AlgebraElement entry(int i, int l) const {
    AlgebraElement a(space_.shape);
    for (int j = 0; j < space_.shape.num_blocks(); ++j) {
      int k = space_.shape.block_size(j);
      a.block(j) = blocks_[static_cast<size_t>(j)].block(i * k, l * k, k, k);
    }
    return a;
  }
  void set_entry(int i, int l, const AlgebraElement& a) {
    for (int j = 0; j < space_.shape.num_blocks(); ++j) {
      int k = space_.shape.block_size(j);
      blocks_[static_cast<size_t>(j)].block(i * k, l * k, k, k) = a.block(j);
    }
  }

  static OperatorOnModule identity(const ModuleSpace& space) {
    OperatorOnModule t(space);
    for (int j = 0; j < space.shape.num_blocks(); ++j) {
      int d = space.rank * space.shape.block_size(j);
      t.block(j) = Mat::Identity(d, d);
    }
    return t;
  }

  OperatorOnModule adjoint() const {
    OperatorOnModule r(space_);
    for (size_t j = 0; j < blocks_.size(); ++j)
      r.blocks_[j] = blocks_[j].adjoint();
    return r;
  }

  friend OperatorOnModule operator+(const OperatorOnModule& a,
                                    const OperatorOnModule& b) {
    check_spaces(a, b);
    OperatorOnModule r(a.space_);
    for (size_t j = 0; j < a.blocks_.size(); ++j)
      r.blocks_[j] = a.blocks_[j] + b.blocks_[j];
    return r;
  }
  friend OperatorOnModule operator-(const OperatorOnModule& a,
                                    const OperatorOnModule& b) {
    check_spaces(a, b);
    OperatorOnModule r(a.space_);
    for (size_t j = 0; j < a.blocks_.size(); ++j)
      r.blocks_[j] = a.blocks_[j] - b.blocks_[j];
    return r;
  }
  friend OperatorOnModule operator*(const OperatorOnModule& a,
                                    const OperatorOnModule& b) {
    check_spaces(a, b);
    OperatorOnModule r(a.space_);
    for (size_t j = 0; j < a.blocks_.size(); ++j)
      r.blocks_[j] = a.blocks_[j] * b.blocks_[j];
    return r;
  }
  friend OperatorOnModule operator*(Complex s, const OperatorOnModule& a) {
    OperatorOnModule r(a.space_);
    for (size_t j = 0; j < a.blocks_.size(); ++j)
      r.blocks_[j] = s * a.blocks_[j];
    return r;
  }

 private:
  static void check_spaces(const OperatorOnModule& a,
                           const OperatorOnModule& b) {
    if (a.space_ != b.space_)
      throw std::invalid_argument("OperatorOnModule: space mismatch");
  }

  ModuleSpace space_;
  std::vector<Mat> blocks_;
};

inline ModuleVector op_apply(const OperatorOnModule& t, const ModuleVector& x) {
  if (t.space() != x.space())
    throw std::invalid_argument("op_apply: space mismatch");
  ModuleVector r(x.space());
  for (int j = 0; j < x.space().shape.num_blocks(); ++j)
    r.set_block_stack(j, t.block(j) * x.block_stack(j));
  return r;
}

inline double op_norm(const OperatorOnModule& t) {
  double best = 0.0;
  for (int j = 0; j < t.space().shape.num_blocks(); ++j) {
    Eigen::JacobiSVD<Mat> svd(t.block(j));
    best = std::max(best, svd.singularValues()(0));
  }
  return best;
}

/// theta_{y,x}: z -> y<x,z>; the M_p(A) matrix with (i,l) entry y_i x_l^*.
inline OperatorOnModule theta(const ModuleVector& y, const ModuleVector& x) {
  if (y.space() != x.space())
    throw std::invalid_argument("theta: space mismatch");
  OperatorOnModule t(y.space());
  for (int j = 0; j < y.space().shape.num_blocks(); ++j)
    t.block(j) = y.block_stack(j) * x.block_stack(j).adjoint();
  return t;
}

inline bool op_is_projection(const OperatorOnModule& p, double tol) {
  return op_norm(p * p - p) <= tol && op_norm(p.adjoint() - p) <= tol;
}

/// Orthonormal basis of basic vectors: for coordinate i, block j, row r,
/// the vector whose coordinate i holds e_r e_1^* in block j.
inline std::vector<ModuleVector> orthonormal_basis(const ModuleSpace& space) {
  std::vector<ModuleVector> basis;
  for (int i = 0; i < space.rank; ++i)
    for (int j = 0; j < space.shape.num_blocks(); ++j) {
      int k = space.shape.block_size(j);
      for (int r = 0; r < k; ++r) {
        ModuleVector u(space);
        u.coord(i).block(j)(r, 0) = Complex(1.0, 0.0);
        basis.push_back(u);
      }
    }
  return basis;
}

/// Lemma-base transform on a single-block space: v = u . theta_{xi,eta},
/// where <u,u> = theta_{xi,xi} and eta is the requested unit vector.
inline std::vector<ModuleVector> lemma_base_transform(
    const std::vector<ModuleVector>& basis, const std::vector<Vec>& targets) {
  if (basis.empty()) return {};
  const ModuleSpace& space = basis.front().space();
  if (space.shape.num_blocks() != 1)
    throw std::invalid_argument("lemma_base_transform: multi-block shape");
  if (targets.size() != basis.size())
    throw std::invalid_argument("lemma_base_transform: target count mismatch");
  int k = space.shape.block_size(0);
  std::vector<ModuleVector> out;
  out.reserve(basis.size());
  for (size_t idx = 0; idx < basis.size(); ++idx) {
    const Vec& eta = targets[idx];
    if (eta.size() != k || std::abs(eta.norm() - 1.0) > 1e-9)
      throw std::invalid_argument("lemma_base_transform: non-unit target");
    // Recover xi as the top eigenvector of <u,u> = theta_{xi,xi}.
    AlgebraElement g = inner(basis[idx], basis[idx]);
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(g).block(0));
    Vec xi = es.eigenvectors().col(k - 1);
    AlgebraElement t(space.shape);
    t.block(0) = xi * eta.adjoint();
    out.push_back(basis[idx] * t);
  }
  return out;
}

/// A mutually orthogonal tuple whose self-inner-products are projections
/// (an element of D_n^X).
struct OrthoTuple {
  ModuleTuple tuple;
  std::vector<AlgebraElement> gram;  // <v_i, v_i>, verified projections

  static OrthoTuple checked(ModuleTuple t, double tol = 1e-9) {
    OrthoTuple o;
    for (int i = 0; i < t.n(); ++i) {
      for (int l = 0; l < t.n(); ++l) {
        AlgebraElement g = inner(t.entries[static_cast<size_t>(i)],
                                 t.entries[static_cast<size_t>(l)]);
        if (i == l) {
          if (!is_projection(g, tol))
            throw std::invalid_argument("OrthoTuple: <v,v> not a projection");
          o.gram.push_back(g);
        } else if (alg_norm(g) > tol) {
          throw std::invalid_argument("OrthoTuple: entries not orthogonal");
        }
      }
    }
    o.tuple = std::move(t);
    return o;
  }
};

/// Samples D_n^X: assigns each slot a distinct coordinate carrying a random
/// diagonal projection per block, then applies a Haar-random unitary of
/// M_p(A).  Summing first-column basic vectors directly would not give a
/// projection inner product, so the diagonal targets stand in for the
/// transformed basis elements.
inline OrthoTuple sample_D_n(const ModuleSpace& space, int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_D_n: n < 1");
  if (n > space.rank)
    throw std::invalid_argument("sample_D_n: n > rank not supported");
  // Distinct coordinates for the n slots.
  std::vector<int> coords(static_cast<size_t>(space.rank));
  std::iota(coords.begin(), coords.end(), 0);
  std::shuffle(coords.begin(), coords.end(), rng);
  std::vector<ModuleVector> entries;
  for (int s = 0; s < n; ++s) {
    ModuleVector v(space);
    for (int j = 0; j < space.shape.num_blocks(); ++j) {
      int k = space.shape.block_size(j);
      // Nonempty random subset of diagonal positions.
      Mat diag = Mat::Zero(k, k);
      bool any = false;
      for (int r = 0; r < k; ++r)
        if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < 0.5) {
          diag(r, r) = Complex(1.0, 0.0);
          any = true;
        }
      if (!any) {
        int r = static_cast<int>(rng() % static_cast<std::uint64_t>(k));
        diag(r, r) = Complex(1.0, 0.0);
      }
      v.coord(coords[static_cast<size_t>(s)]).block(j) = diag;
    }
    entries.push_back(v);
  }
  // Haar rotation, blockwise.
  OperatorOnModule u(space);
  for (int j = 0; j < space.shape.num_blocks(); ++j)
    u.block(j) = haar_unitary(space.rank * space.shape.block_size(j), rng);
  for (auto& v : entries) v = op_apply(u, v);
  return OrthoTuple::checked(ModuleTuple(space, std::move(entries)));
}

/// Samples aco_A(D_n^X): sum_j z_j a_j with sum ||a_j|| <= 1.
inline ModuleTuple sample_aco(const ModuleSpace& space, int n, int m_terms,
                              Rng& rng) {
  if (m_terms < 1) throw std::invalid_argument("sample_aco: m_terms < 1");
  // Random point of the simplex for the coefficient norms.
  std::vector<double> w(static_cast<size_t>(m_terms));
  double total = 0.0;
  std::exponential_distribution<double> ex(1.0);
  for (auto& t : w) {
    t = ex(rng);
    total += t;
  }
  std::vector<ModuleVector> acc(static_cast<size_t>(n), ModuleVector(space));
  for (int m = 0; m < m_terms; ++m) {
    OrthoTuple z = sample_D_n(space, n, rng);
    AlgebraElement a = gaussian_element(space.shape, rng);
    double an = alg_norm(a);
    if (an < 1e-12) continue;
    a = Complex(w[static_cast<size_t>(m)] / (total * an), 0.0) * a;
    for (int i = 0; i < n; ++i)
      acc[static_cast<size_t>(i)] =
          acc[static_cast<size_t>(i)] + z.tuple.entries[static_cast<size_t>(i)] * a;
  }
  return ModuleTuple(space, std::move(acc));
}

inline ModuleVector gaussian_module_vector(const ModuleSpace& space, Rng& rng) {
  ModuleVector x(space);
  for (int i = 0; i < space.rank; ++i) x.coord(i) = gaussian_element(space.shape, rng);
  return x;
}

}  // namespace multinorm
