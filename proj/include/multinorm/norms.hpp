#pragma once

#include "multinorm/localization.hpp"
#include "multinorm/module.hpp"
#include "multinorm/optimize.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace multinorm {

/// Feasible witness attached to a norm estimate.
struct Certificate {
  std::string method;  // trivial | spectral | slot | projection-family |
                       // y-tuple | pure-state
  std::vector<OperatorOnModule> family;    // mutually orthogonal projections
  std::optional<ModuleTuple> tuple_witness;  // y-tuple, or spectral witness y
  std::optional<PureState> state;
  std::vector<Mat> local_family;  // projection family on H_tau
};

struct NormEstimate {
  enum class Kind { exact, lower_bound_certified };
  double value = 0.0;
  Kind kind = Kind::exact;
  Certificate certificate;
  long effort = 0;  // objective evaluations spent
  double tol = 0.0;
};

/// Seed for the pure-state optimizer: a state plus a family on its H_tau.
struct PureStateSeed {
  PureState state;
  std::vector<Mat> local_family;
};

namespace detail {

// Canonical slot order: sort by the raw coefficient stream so that every
// permutation of a tuple optimizes from the identical internal instance.
inline std::vector<double> entry_key(const ModuleVector& v) {
  std::vector<double> key;
  for (int i = 0; i < v.space().rank; ++i)
    for (int j = 0; j < v.space().shape.num_blocks(); ++j) {
      const Mat& m = v.coord(i).block(j);
      for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) {
          key.push_back(m(r, c).real());
          key.push_back(m(r, c).imag());
        }
    }
  return key;
}

inline std::vector<int> canonical_order(const ModuleTuple& t) {
  std::vector<std::vector<double>> keys;
  keys.reserve(static_cast<size_t>(t.n()));
  for (const auto& e : t.entries) keys.push_back(entry_key(e));
  std::vector<int> idx(static_cast<size_t>(t.n()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return std::lexicographical_compare(
        keys[static_cast<size_t>(a)].begin(), keys[static_cast<size_t>(a)].end(),
        keys[static_cast<size_t>(b)].begin(), keys[static_cast<size_t>(b)].end());
  });
  return idx;
}

inline ModuleTuple permuted(const ModuleTuple& t, const std::vector<int>& ord) {
  std::vector<ModuleVector> es;
  es.reserve(static_cast<size_t>(t.n()));
  for (int i : ord) es.push_back(t.entries[static_cast<size_t>(i)]);
  return ModuleTuple(t.space, std::move(es));
}

inline bool tuple_is_zero(const ModuleTuple& t) {
  for (const auto& e : t.entries)
    if (vec_norm(e) > 0.0) return false;
  return true;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// mu*_n — exact, spectral
// ---------------------------------------------------------------------------

/// mu*_n(y)^2 = || sum_i theta_{y_i,y_i} ||: the row map x -> (<y_i,x>)_i
/// satisfies T*T = sum theta_{y_i,y_i}, so the sup over the unit ball is the
/// top eigenvalue.  Entries are summed in canonical order so permutations
/// evaluate bit-identically.
inline NormEstimate mu_star(const ModuleTuple& t) {
  if (t.n() == 0) throw std::invalid_argument("mu_star: empty tuple");
  std::vector<int> ord = detail::canonical_order(t);
  OperatorOnModule sum(t.space);
  for (int i : ord) {
    const ModuleVector& y = t.entries[static_cast<size_t>(i)];
    sum = sum + theta(y, y);
  }
  NormEstimate est;
  est.kind = NormEstimate::Kind::exact;
  est.tol = 0.0;

  // Spectral witness: top eigenvector w of the dominating flattened block,
  // planted as a module vector with <y,y> = theta_{e1,e1}.
  double best = -1.0;
  int best_block = 0;
  for (int j = 0; j < t.space.shape.num_blocks(); ++j) {
    Eigen::SelfAdjointEigenSolver<Mat> es(
        0.5 * (sum.block(j) + sum.block(j).adjoint()));
    double lam = es.eigenvalues()(es.eigenvalues().size() - 1);
    if (lam > best) {
      best = lam;
      best_block = j;
    }
  }
  est.value = std::sqrt(std::max(0.0, best));
  Eigen::SelfAdjointEigenSolver<Mat> es(
      0.5 * (sum.block(best_block) + sum.block(best_block).adjoint()));
  Vec w = es.eigenvectors().col(es.eigenvectors().cols() - 1);
  ModuleVector witness(ModuleSpace(t.space.shape, t.space.rank));
  int k = t.space.shape.block_size(best_block);
  Mat stack(t.space.rank * k, k);
  stack.setZero();
  stack.col(0) = w;
  witness.set_block_stack(best_block, stack);
  est.certificate.method = "spectral";
  est.certificate.tuple_witness =
      ModuleTuple(t.space, std::vector<ModuleVector>{witness});
  return est;
}

inline double mu_star_value(const ModuleTuple& t) { return mu_star(t).value; }

namespace detail {

inline Eigen::VectorXd pack_tuple(const ModuleTuple& t) {
  std::vector<double> flat;
  for (const auto& e : t.entries) {
    auto key = entry_key(e);
    flat.insert(flat.end(), key.begin(), key.end());
  }
  return Eigen::Map<Eigen::VectorXd>(flat.data(),
                                     static_cast<long>(flat.size()));
}

inline ModuleTuple unpack_tuple(const ModuleSpace& space, int n,
                                const Eigen::VectorXd& v) {
  std::vector<ModuleVector> es;
  long pos = 0;
  for (int s = 0; s < n; ++s) {
    ModuleVector x(space);
    for (int i = 0; i < space.rank; ++i)
      for (int j = 0; j < space.shape.num_blocks(); ++j) {
        Mat& m = x.coord(i).block(j);
        for (int r = 0; r < m.rows(); ++r)
          for (int c = 0; c < m.cols(); ++c) {
            m(r, c) = Complex(v(pos), v(pos + 1));
            pos += 2;
          }
      }
    es.push_back(std::move(x));
  }
  return ModuleTuple(space, std::move(es));
}

// ||(sum_i |<x_i,y>|^2)^{1/2}|| for a candidate y (form 1 of the mu* sup).
inline double mu_star_form1(const ModuleTuple& t, const ModuleVector& y) {
  AlgebraElement s(t.space.shape);
  for (const auto& x : t.entries) {
    AlgebraElement c = inner(x, y);
    s = s + c.adjoint() * c;
  }
  return std::sqrt(alg_norm(s));
}

}  // namespace detail

/// Sampling oracle for mu*: maximizes both displayed sup forms over random
/// feasible points, with a finite-difference polish of the best form-1 ratio.
inline double mu_star_sampled(const ModuleTuple& t, int samples, Rng& rng,
                              bool polish = true) {
  if (samples < 1) throw std::invalid_argument("mu_star_sampled: samples < 1");
  if (detail::tuple_is_zero(t)) return 0.0;
  double best = 0.0;
  ModuleVector best_y(t.space);
  double best_ratio = -1.0;
  for (int s = 0; s < samples; ++s) {
    // Form 1: y on the unit sphere of X.
    ModuleVector y = gaussian_module_vector(t.space, rng);
    double yn = vec_norm(y);
    if (yn > 1e-12) {
      double v = detail::mu_star_form1(t, y) / yn;
      if (v > best) best = v;
      if (v > best_ratio) {
        best_ratio = v;
        best_y = y;
      }
    }
    // Form 2: coefficients with ||sum a_i^* a_i|| <= 1.
    AlgebraElement g(t.space.shape);
    std::vector<AlgebraElement> as;
    for (int i = 0; i < t.n(); ++i) {
      as.push_back(gaussian_element(t.space.shape, rng));
      g = g + as.back().adjoint() * as.back();
    }
    double gn = std::sqrt(alg_norm(g));
    if (gn > 1e-12) {
      ModuleVector z(t.space);
      for (int i = 0; i < t.n(); ++i)
        z = z + t.entries[static_cast<size_t>(i)] *
                    (Complex(1.0 / gn, 0.0) * as[static_cast<size_t>(i)]);
      best = std::max(best, vec_norm(z));
    }
  }
  if (polish && best_ratio > 0.0) {
    ModuleTuple wrap(t.space, {best_y});
    Eigen::VectorXd x0 = detail::pack_tuple(wrap);
    auto obj = [&](const Eigen::VectorXd& v) {
      ModuleVector y = detail::unpack_tuple(t.space, 1, v).entries[0];
      double yn = vec_norm(y);
      if (yn < 1e-12) return 0.0;
      return detail::mu_star_form1(t, y) / yn;
    };
    OptimizerConfig cfg;
    cfg.max_iters = 120;
    auto [xb, fb] = coordinate_ascent(obj, cfg, x0);
    best = std::max(best, fb);
  }
  return best;
}

// ---------------------------------------------------------------------------
// minimum multi-norm — exact
// ---------------------------------------------------------------------------

inline NormEstimate min_multinorm(const ModuleTuple& t) {
  if (t.n() == 0) throw std::invalid_argument("min_multinorm: empty tuple");
  NormEstimate est;
  est.kind = NormEstimate::Kind::exact;
  int best = 0;
  for (int i = 0; i < t.n(); ++i) {
    double v = vec_norm(t.entries[static_cast<size_t>(i)]);
    if (v > est.value) {
      est.value = v;
      best = i;
    }
  }
  est.certificate.method = "slot";
  est.certificate.tuple_witness =
      ModuleTuple(t.space, {t.entries[static_cast<size_t>(best)]});
  return est;
}

// ---------------------------------------------------------------------------
// Projection-family machinery for the Hilbert C*-multi-norm
// ---------------------------------------------------------------------------

inline bool family_feasible(const std::vector<OperatorOnModule>& family,
                            double tol = 1e-9) {
  if (family.empty()) return false;
  OperatorOnModule sum(family.front().space());
  for (size_t i = 0; i < family.size(); ++i) {
    if (!op_is_projection(family[i], tol)) return false;
    for (size_t l = i + 1; l < family.size(); ++l)
      if (op_norm(family[i] * family[l]) > tol) return false;
    sum = sum + family[i];
  }
  return op_norm(sum - OperatorOnModule::identity(sum.space())) <= tol;
}

/// ||sum_i P_i x_i|| for a fixed family; exact evaluation.
inline double hilbert_family_value(const ModuleTuple& t,
                                   const std::vector<OperatorOnModule>& family) {
  if (static_cast<int>(family.size()) != t.n())
    throw std::invalid_argument("hilbert_family_value: family size mismatch");
  ModuleVector s(t.space);
  for (int i = 0; i < t.n(); ++i)
    s = s + op_apply(family[static_cast<size_t>(i)],
                     t.entries[static_cast<size_t>(i)]);
  return vec_norm(s);
}

namespace detail {

// Per-block engine: vectors X_i are (d x k) flattened slabs; a family is a
// list of n mutually orthogonal d x d projections summing to I_d.
struct BlockFamilyResult {
  double value = 0.0;
  std::vector<Mat> family;
  long evals = 0;
};

inline double block_family_value(const std::vector<Mat>& xs,
                                 const std::vector<Mat>& fam) {
  Mat m = Mat::Zero(xs[0].rows(), xs[0].cols());
  for (size_t i = 0; i < xs.size(); ++i) m += fam[i] * xs[i];
  if (m.cols() == 1) return m.norm();
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

inline std::vector<Mat> selector_family(int d, const std::vector<int>& ranks) {
  std::vector<Mat> fam;
  int at = 0;
  for (int r : ranks) {
    Mat p = Mat::Zero(d, d);
    for (int q = 0; q < r; ++q) p(at + q, at + q) = Complex(1.0, 0.0);
    at += r;
    fam.push_back(p);
  }
  return fam;
}

inline std::vector<Mat> rotated_family(const std::vector<Mat>& fam,
                                       const Mat& u) {
  std::vector<Mat> out;
  out.reserve(fam.size());
  for (const Mat& p : fam) out.push_back(u * p * u.adjoint());
  return out;
}

// Alternating refinement: from the top singular pair of the current
// aggregate, rebuild a family aligned with the per-slot images and keep it
// when it improves.
inline std::vector<Mat> aligned_family(const std::vector<Mat>& xs,
                                       const std::vector<Mat>& fam) {
  const int d = static_cast<int>(xs[0].rows());
  const int n = static_cast<int>(xs.size());
  Mat m = Mat::Zero(d, xs[0].cols());
  for (int i = 0; i < n; ++i) m += fam[static_cast<size_t>(i)] * xs[static_cast<size_t>(i)];
  Vec v;
  if (m.cols() == 1) {
    v = Vec::Ones(1);
  } else {
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
    v = svd.matrixV().col(0);
  }
  // Greedy orthogonalization of the per-slot images w_i = X_i v.
  std::vector<std::pair<double, int>> order;
  std::vector<Vec> w(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    w[static_cast<size_t>(i)] = xs[static_cast<size_t>(i)] * v;
    order.emplace_back(-w[static_cast<size_t>(i)].norm(), i);
  }
  std::sort(order.begin(), order.end());
  std::vector<Mat> fam2(static_cast<size_t>(n), Mat::Zero(d, d));
  Mat used = Mat::Zero(d, d);  // projection onto already-claimed directions
  int first = order.front().second;
  for (auto [negn, i] : order) {
    Vec b = w[static_cast<size_t>(i)] - used * w[static_cast<size_t>(i)];
    double bn = b.norm();
    if (bn < 1e-12) continue;
    b /= bn;
    fam2[static_cast<size_t>(i)] += b * b.adjoint();
    used += b * b.adjoint();
  }
  // Unclaimed dimensions go to the dominant slot.
  Mat rest = Mat::Identity(d, d) - used;
  fam2[static_cast<size_t>(first)] += rest;
  return fam2;
}

inline BlockFamilyResult hilbert_block(const std::vector<Mat>& xs,
                                       const OptimizerConfig& cfg,
                                       const std::vector<std::vector<Mat>>& seeds,
                                       Rng& rng) {
  const int d = static_cast<int>(xs[0].rows());
  const int n = static_cast<int>(xs.size());
  long evals = 0;
  std::vector<std::pair<double, std::vector<Mat>>> cands;
  auto push = [&](std::vector<Mat> fam) {
    double v = block_family_value(xs, fam);
    ++evals;
    cands.emplace_back(v, std::move(fam));
  };
  // Single-slot families.
  for (int i = 0; i < n; ++i) {
    std::vector<Mat> fam(static_cast<size_t>(n), Mat::Zero(d, d));
    fam[static_cast<size_t>(i)] = Mat::Identity(d, d);
    push(std::move(fam));
  }
  for (const auto& s : seeds) push(s);
  // Rank assignments: identity-basis family plus two Haar rotations each.
  for (const auto& ranks : rank_assignments(d, n)) {
    std::vector<Mat> base = selector_family(d, ranks);
    push(base);
    for (int h = 0; h < 2; ++h)
      push(rotated_family(base, haar_unitary(d, rng)));
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  const int starts =
      std::min<int>(std::max(1, cfg.restarts), static_cast<int>(cands.size()));
  double best_v = cands.front().first;
  std::vector<Mat> best_f = cands.front().second;
  for (int s = 0; s < starts; ++s) {
    const std::vector<Mat>& fam0 = cands[static_cast<size_t>(s)].second;
    auto obj = [&](const Mat& u) {
      ++evals;
      return block_family_value(xs, rotated_family(fam0, u));
    };
    auto [u, v] = unitary_ascent(obj, d, cfg, Mat::Identity(d, d));
    std::vector<Mat> fam = rotated_family(fam0, u);
    // Alternating refinement passes.
    for (int pass = 0; pass < 8; ++pass) {
      std::vector<Mat> fam2 = aligned_family(xs, fam);
      double v2 = block_family_value(xs, fam2);
      ++evals;
      if (v2 > v + 1e-14) {
        v = v2;
        fam = std::move(fam2);
      } else {
        break;
      }
    }
    if (v > best_v) {
      best_v = v;
      best_f = fam;
    }
  }
  return {best_v, std::move(best_f), evals};
}

// Theta-built candidate families per Lemma multinorm: P_i = theta_{v_i,v_i}
// with the last slot taking the complement.
inline std::vector<std::vector<OperatorOnModule>> theta_families(
    const ModuleSpace& space, int n, Rng& rng, int count) {
  std::vector<std::vector<OperatorOnModule>> out;
  if (n > space.rank) return out;
  for (int c = 0; c < count; ++c) {
    OrthoTuple z = sample_D_n(space, n, rng);
    std::vector<OperatorOnModule> fam;
    OperatorOnModule sum(space);
    for (int i = 0; i < n - 1; ++i) {
      fam.push_back(theta(z.tuple.entries[static_cast<size_t>(i)],
                          z.tuple.entries[static_cast<size_t>(i)]));
      sum = sum + fam.back();
    }
    fam.push_back(OperatorOnModule::identity(space) - sum);
    out.push_back(std::move(fam));
  }
  return out;
}

}  // namespace detail

/// The Hilbert C*-multi-norm: best ||sum P_i x_i|| over candidate projection
/// families.  The sup decomposes blockwise (the ambient norm is a blockwise
/// max and family choices are blockwise independent), so each flattened
/// block is optimized separately and the per-block winners are recombined.
inline NormEstimate hilbert_multinorm(
    const ModuleTuple& t, const OptimizerConfig& cfg = {},
    const std::vector<std::vector<OperatorOnModule>>& extra_families = {}) {
  if (t.n() == 0) throw std::invalid_argument("hilbert_multinorm: empty tuple");
  NormEstimate est;
  est.tol = 1e-4;
  if (detail::tuple_is_zero(t)) {
    est.kind = NormEstimate::Kind::exact;
    est.certificate.method = "trivial";
    return est;
  }
  if (t.n() == 1) {
    est.kind = NormEstimate::Kind::exact;
    est.value = vec_norm(t.entries[0]);
    est.certificate.method = "projection-family";
    est.certificate.family = {OperatorOnModule::identity(t.space)};
    return est;
  }
  std::vector<int> ord = detail::canonical_order(t);
  ModuleTuple ct = detail::permuted(t, ord);
  const int n = ct.n();

  std::vector<std::vector<OperatorOnModule>> fams;
  for (const auto& f : extra_families) {
    if (static_cast<int>(f.size()) != n) continue;
    std::vector<OperatorOnModule> pf;
    for (int i : ord) pf.push_back(f[static_cast<size_t>(i)]);
    fams.push_back(std::move(pf));
  }
  Rng rng = derived_rng(cfg.seed, 0x48494C42ULL);
  for (auto& f : detail::theta_families(ct.space, n, rng, 4))
    fams.push_back(std::move(f));

  long evals = 0;
  double best = 0.0;
  std::vector<OperatorOnModule> family(
      static_cast<size_t>(n), OperatorOnModule(ct.space));
  for (int j = 0; j < ct.space.shape.num_blocks(); ++j) {
    std::vector<Mat> xs;
    for (const auto& e : ct.entries) xs.push_back(e.block_stack(j));
    std::vector<std::vector<Mat>> seeds;
    for (const auto& f : fams) {
      std::vector<Mat> s;
      for (const auto& p : f) s.push_back(p.block(j));
      seeds.push_back(std::move(s));
    }
    Rng brng = derived_rng(cfg.seed, 0x424C4BULL + static_cast<std::uint64_t>(j));
    detail::BlockFamilyResult r = detail::hilbert_block(xs, cfg, seeds, brng);
    evals += r.evals;
    best = std::max(best, r.value);
    for (int i = 0; i < n; ++i)
      family[static_cast<size_t>(i)].block(j) = r.family[static_cast<size_t>(i)];
  }
  est.kind = NormEstimate::Kind::lower_bound_certified;
  est.value = best;
  est.effort = evals;
  est.certificate.method = "projection-family";
  // Undo the canonical permutation.
  est.certificate.family.resize(static_cast<size_t>(n),
                                OperatorOnModule(ct.space));
  for (int s = 0; s < n; ++s)
    est.certificate.family[static_cast<size_t>(ord[static_cast<size_t>(s)])] =
        family[static_cast<size_t>(s)];
  return est;
}

// ---------------------------------------------------------------------------
// Certificate transfers (constructive proof steps)
// ---------------------------------------------------------------------------

/// From a projection family attaining v = ||sum P_i x_i||, builds y with
/// mu*(y) <= 1 and sum |<y_i,x_i>|^2 within eps of v^2:
/// y_i = P_i x_i (|P_i x_i|^2 + eps/n)^{-1/2}.
inline ModuleTuple transfer_projection_certificate(
    const std::vector<OperatorOnModule>& family, const ModuleTuple& t,
    double eps) {
  if (eps <= 0.0)
    throw std::invalid_argument("transfer_projection_certificate: eps <= 0");
  if (!family_feasible(family, 1e-9))
    throw std::invalid_argument(
        "transfer_projection_certificate: infeasible family");
  const int n = t.n();
  std::vector<ModuleVector> ys;
  for (int i = 0; i < n; ++i) {
    ModuleVector w = op_apply(family[static_cast<size_t>(i)],
                              t.entries[static_cast<size_t>(i)]);
    AlgebraElement g = inner(w, w);
    double shift = eps / n;
    AlgebraElement inv_sqrt = functional_calculus(
        g, [shift](double lam) { return 1.0 / std::sqrt(std::max(lam, 0.0) + shift); });
    ys.push_back(w * inv_sqrt);
  }
  return ModuleTuple(t.space, std::move(ys));
}

/// From a feasible family, picks the pure state attaining ||sum |P_i x_i|^2||
/// (vector state at the top eigenvector of the dominating block).  Returns
/// the state, the attained value ||sum P_i x_i||, and the localized family.
inline std::pair<PureStateSeed, double> transfer_to_purestate(
    const std::vector<OperatorOnModule>& family, const ModuleTuple& t) {
  if (!family_feasible(family, 1e-9))
    throw std::invalid_argument("transfer_to_purestate: infeasible family");
  AlgebraElement s(t.space.shape);
  for (int i = 0; i < t.n(); ++i) {
    ModuleVector w = op_apply(family[static_cast<size_t>(i)],
                              t.entries[static_cast<size_t>(i)]);
    s = s + inner(w, w);
  }
  double best = -1.0;
  int bj = 0;
  Vec xi;
  for (int j = 0; j < t.space.shape.num_blocks(); ++j) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(s).block(j));
    double lam = es.eigenvalues()(es.eigenvalues().size() - 1);
    if (lam > best) {
      best = lam;
      bj = j;
      xi = es.eigenvectors().col(es.eigenvectors().cols() - 1);
    }
  }
  PureState tau(t.space.shape, bj, xi);
  Localization loc = localize(t.space, tau);
  PureStateSeed seed;
  seed.state = tau;
  for (const auto& p : family) seed.local_family.push_back(phi_tau(loc, p));
  return {std::move(seed), std::sqrt(std::max(0.0, best))};
}

// ---------------------------------------------------------------------------
// ||.||_n^* — optimization with the homogeneity reduction
// ---------------------------------------------------------------------------

/// h(y) = || sum_i |<y_i,x_i>|^2 ||^{1/2}; the constrained sup over
/// mu*(y) <= 1 equals sup h(y)/mu*(y) since both sides are 1-homogeneous.
inline double star_objective(const ModuleTuple& t, const ModuleTuple& y) {
  AlgebraElement s(t.space.shape);
  for (int i = 0; i < t.n(); ++i) {
    AlgebraElement c = inner(y.entries[static_cast<size_t>(i)],
                             t.entries[static_cast<size_t>(i)]);
    s = s + c.adjoint() * c;
  }
  return std::sqrt(alg_norm(s));
}

inline double star_ratio(const ModuleTuple& t, const ModuleTuple& y) {
  double mu = mu_star_value(y);
  if (mu < 1e-12) return 0.0;
  return star_objective(t, y) / mu;
}

inline NormEstimate star_multinorm(
    const ModuleTuple& t, const OptimizerConfig& cfg = {},
    const std::vector<ModuleTuple>& extra_seeds = {}) {
  if (t.n() == 0) throw std::invalid_argument("star_multinorm: empty tuple");
  NormEstimate est;
  est.tol = 1e-4;
  if (detail::tuple_is_zero(t)) {
    est.kind = NormEstimate::Kind::exact;
    est.certificate.method = "trivial";
    return est;
  }
  if (t.n() == 1) {
    // Cauchy-Schwarz saturates at y = x / ||x||.
    est.kind = NormEstimate::Kind::exact;
    est.value = vec_norm(t.entries[0]);
    est.certificate.method = "y-tuple";
    est.certificate.tuple_witness = ModuleTuple(
        t.space, {Complex(1.0 / est.value, 0.0) * t.entries[0]});
    return est;
  }
  std::vector<int> ord = detail::canonical_order(t);
  ModuleTuple ct = detail::permuted(t, ord);
  const int n = ct.n();
  long evals = 0;

  std::vector<ModuleTuple> seeds;
  seeds.push_back(ct);  // x itself
  // Orthonormal slot tuples.
  std::vector<ModuleVector> basis = orthonormal_basis(ct.space);
  for (int offset = 0; offset < 2; ++offset) {
    std::vector<ModuleVector> ys;
    for (int i = 0; i < n; ++i)
      ys.push_back(basis[static_cast<size_t>((i + offset) %
                                             static_cast<int>(basis.size()))]);
    seeds.emplace_back(ct.space, std::move(ys));
  }
  Rng rng = derived_rng(cfg.seed, 0x53544152ULL);
  if (n <= ct.space.rank)
    for (int c = 0; c < 2; ++c) seeds.push_back(sample_D_n(ct.space, n, rng).tuple);
  // Transfer from a reduced-budget Hilbert-multi-norm family.
  {
    OptimizerConfig hc = cfg.scaled(std::min(cfg.restarts, 4),
                                    std::min(cfg.max_iters, 60));
    NormEstimate h = hilbert_multinorm(ct, hc);
    evals += h.effort;
    if (!h.certificate.family.empty()) {
      double eps = 1e-6 * std::max(1.0, h.value * h.value);
      seeds.push_back(
          transfer_projection_certificate(h.certificate.family, ct, eps));
    }
  }
  for (const auto& s : extra_seeds) {
    if (s.n() != n || s.space != ct.space) continue;
    std::vector<ModuleVector> ys;
    for (int i : ord) ys.push_back(s.entries[static_cast<size_t>(i)]);
    seeds.emplace_back(ct.space, std::move(ys));
  }
  // Structured seeds always run; extra restarts are filled with randoms.
  while (static_cast<int>(seeds.size()) < cfg.restarts) {
    std::vector<ModuleVector> ys;
    for (int i = 0; i < n; ++i) ys.push_back(gaussian_module_vector(ct.space, rng));
    seeds.emplace_back(ct.space, std::move(ys));
  }

  auto obj = [&](const Eigen::VectorXd& v) {
    ++evals;
    return star_ratio(ct, detail::unpack_tuple(ct.space, n, v));
  };
  double best = 0.0;
  ModuleTuple best_y = seeds.front();
  for (const auto& seed : seeds) {
    double r0 = star_ratio(ct, seed);
    if (r0 <= 0.0 && detail::tuple_is_zero(seed)) continue;
    auto [xb, fb] = coordinate_ascent(obj, cfg, detail::pack_tuple(seed));
    if (fb > best) {
      best = fb;
      best_y = detail::unpack_tuple(ct.space, n, xb);
    }
  }
  double mu = mu_star_value(best_y);
  if (mu > 1e-12) {
    std::vector<ModuleVector> ys;
    for (const auto& y : best_y.entries) ys.push_back(Complex(1.0 / mu, 0.0) * y);
    best_y = ModuleTuple(ct.space, std::move(ys));
  }
  est.kind = NormEstimate::Kind::lower_bound_certified;
  est.value = best;
  est.effort = evals;
  est.certificate.method = "y-tuple";
  // Undo the canonical permutation.
  std::vector<ModuleVector> ys(static_cast<size_t>(n), ModuleVector(ct.space));
  for (int s = 0; s < n; ++s)
    ys[static_cast<size_t>(ord[static_cast<size_t>(s)])] =
        best_y.entries[static_cast<size_t>(s)];
  est.certificate.tuple_witness = ModuleTuple(ct.space, std::move(ys));
  return est;
}

// ---------------------------------------------------------------------------
// ||.||_n^{P(A)} — pure-state localization norm
// ---------------------------------------------------------------------------

/// Exact evaluation at a fixed state with a fixed family on H_tau.
inline double purestate_eval(const ModuleTuple& t, const PureState& tau,
                             const std::vector<Mat>& local_family) {
  Localization loc = localize(t.space, tau);
  std::vector<Vec> q = localize_tuple(loc, t);
  Vec s = Vec::Zero(loc.dim);
  for (int i = 0; i < t.n(); ++i)
    s += local_family[static_cast<size_t>(i)] * q[static_cast<size_t>(i)];
  return s.norm();
}

inline NormEstimate purestate_multinorm(
    const ModuleTuple& t, const OptimizerConfig& cfg = {},
    const std::vector<PureStateSeed>& seeds = {}) {
  if (t.n() == 0) throw std::invalid_argument("purestate_multinorm: empty tuple");
  NormEstimate est;
  est.tol = 1e-4;
  if (detail::tuple_is_zero(t)) {
    est.kind = NormEstimate::Kind::exact;
    est.certificate.method = "trivial";
    return est;
  }
  const int n = t.n();
  if (n == 1) {
    // sup_tau tau(<x,x>)^{1/2} = ||x||, attained at the top eigenvector of
    // the dominating block of <x,x>.
    AlgebraElement g = inner(t.entries[0], t.entries[0]);
    double best = -1.0;
    int bj = 0;
    Vec xi;
    for (int j = 0; j < t.space.shape.num_blocks(); ++j) {
      Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(g).block(j));
      double lam = es.eigenvalues()(es.eigenvalues().size() - 1);
      if (lam > best) {
        best = lam;
        bj = j;
        xi = es.eigenvectors().col(es.eigenvectors().cols() - 1);
      }
    }
    est.kind = NormEstimate::Kind::exact;
    est.value = std::sqrt(std::max(0.0, best));
    est.certificate.method = "pure-state";
    est.certificate.state = PureState(t.space.shape, bj, xi);
    est.certificate.local_family = {
        Mat::Identity(t.space.rank * t.space.shape.block_size(bj),
                      t.space.rank * t.space.shape.block_size(bj))};
    return est;
  }

  std::vector<int> ord = detail::canonical_order(t);
  ModuleTuple ct = detail::permuted(t, ord);
  std::vector<PureStateSeed> cseeds;
  for (const auto& s : seeds) {
    if (static_cast<int>(s.local_family.size()) != n) continue;
    PureStateSeed ps;
    ps.state = s.state;
    for (int i : ord)
      ps.local_family.push_back(s.local_family[static_cast<size_t>(i)]);
    cseeds.push_back(std::move(ps));
  }
  long evals = 0;

  double best = 0.0;
  PureState best_state;
  std::vector<Mat> best_family;

  auto eval_xi = [&](int j, const Vec& xi, const OptimizerConfig& inner_cfg,
                     const std::vector<std::vector<Mat>>& fam_seeds)
      -> detail::BlockFamilyResult {
    PureState tau(ct.space.shape, j, xi);
    Localization loc = localize(ct.space, tau);
    std::vector<Vec> q = localize_tuple(loc, ct);
    std::vector<Mat> xs;
    for (const auto& v : q) xs.push_back(v);
    Rng brng = derived_rng(cfg.seed, 0x505552ULL + static_cast<std::uint64_t>(j));
    return detail::hilbert_block(xs, inner_cfg, fam_seeds, brng);
  };

  for (int j = 0; j < ct.space.shape.num_blocks(); ++j) {
    const int k = ct.space.shape.block_size(j);
    // Projection-family seeds usable at any xi of this block (H_tau is the
    // same C^{p k_j} for all of them).
    std::vector<std::vector<Mat>> fam_seeds;
    for (const auto& s : cseeds)
      if (s.state.block == j) fam_seeds.push_back(s.local_family);

    std::vector<Vec> xis;
    for (const auto& s : cseeds)
      if (s.state.block == j) xis.push_back(s.state.vector);
    {
      // Concentration point: top eigenvector of sum <x_i,x_i> in this block.
      AlgebraElement g(ct.space.shape);
      for (const auto& e : ct.entries) g = g + inner(e, e);
      Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(g).block(j));
      xis.push_back(es.eigenvectors().col(es.eigenvectors().cols() - 1));
    }
    for (int r = 0; r < k; ++r) {
      Vec e = Vec::Zero(k);
      e(r) = Complex(1.0, 0.0);
      xis.push_back(e);
    }
    Rng rng = derived_rng(cfg.seed, 0x5853ULL + static_cast<std::uint64_t>(j));
    for (int c = 0; c < 3; ++c) xis.push_back(random_unit_vector(k, rng));

    OptimizerConfig probe_cfg = cfg.scaled(2, std::min(cfg.max_iters, 40));
    double bj_val = -1.0;
    Vec bj_xi = xis.front();
    for (const auto& xi : xis) {
      auto r = eval_xi(j, xi, probe_cfg, fam_seeds);
      evals += r.evals;
      if (r.value > bj_val) {
        bj_val = r.value;
        bj_xi = xi;
      }
    }
    if (k > 1) {
      // Sphere ascent over xi with a coarse inner engine.
      OptimizerConfig coarse = cfg.scaled(1, 20);
      auto sobj = [&](const Vec& xi) {
        auto r = eval_xi(j, xi, coarse, fam_seeds);
        evals += r.evals;
        return r.value;
      };
      OptimizerConfig scfg = cfg.scaled(1, std::min(cfg.max_iters, 60));
      auto [xi2, v2] = sphere_ascent(sobj, k, scfg, bj_xi);
      if (v2 > bj_val) bj_xi = xi2;
    }
    // Refined final evaluation at the winning state.
    auto rf = eval_xi(j, bj_xi,
                      cfg.scaled(std::max(2, std::min(cfg.restarts, 6)),
                                 cfg.max_iters),
                      fam_seeds);
    evals += rf.evals;
    if (rf.value > best) {
      best = rf.value;
      best_state = PureState(ct.space.shape, j, bj_xi);
      best_family = rf.family;
    }
  }

  est.kind = NormEstimate::Kind::lower_bound_certified;
  est.value = best;
  est.effort = evals;
  est.certificate.method = "pure-state";
  est.certificate.state = best_state;
  est.certificate.local_family.resize(static_cast<size_t>(n));
  for (int s = 0; s < n; ++s)
    est.certificate.local_family[static_cast<size_t>(
        ord[static_cast<size_t>(s)])] = best_family[static_cast<size_t>(s)];
  return est;
}

// ---------------------------------------------------------------------------
// Hilbert-space specializations
// ---------------------------------------------------------------------------

inline void require_scalar_shape(const ModuleSpace& space, const char* who) {
  if (space.shape.num_blocks() != 1 || space.shape.block_size(0) != 1)
    throw std::invalid_argument(std::string(who) + ": requires shape (1)");
}

/// Weak 2-summing norm on a plain Hilbert space; via Riesz identification
/// the dual-functional sup coincides with the module sup, so this delegates
/// to mu*.
inline NormEstimate weak_two_summing(const ModuleTuple& t) {
  require_scalar_shape(t.space, "weak_two_summing");
  return mu_star(t);
}

/// (2,2)-multi-norm on a plain Hilbert space; delegates to ||.||*.
inline NormEstimate two_two_multinorm(const ModuleTuple& t,
                                      const OptimizerConfig& cfg = {}) {
  require_scalar_shape(t.space, "two_two_multinorm");
  return star_multinorm(t, cfg);
}

}  // namespace multinorm
