#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dimcat/category.hpp"

namespace dimcat {

// ---------------------------------------------------------------------------
// word utilities
// ---------------------------------------------------------------------------

inline ObjectRef strip_prefix(const ObjectRef& whole, const ObjectRef& prefix) {
  const auto& w = whole.word;
  const auto& p = prefix.word;
  if (p.size() > w.size() || !std::equal(p.begin(), p.end(), w.begin()))
    throw Error("strip_prefix: " + prefix.name() + " is not a prefix of " +
                whole.name());
  std::vector<std::string> rest(w.begin() + long(p.size()), w.end());
  return whole.cat->object_word(rest);
}

inline ObjectRef strip_suffix(const ObjectRef& whole, const ObjectRef& suffix) {
  const auto& w = whole.word;
  const auto& s = suffix.word;
  if (s.size() > w.size() || !std::equal(s.rbegin(), s.rend(), w.rbegin()))
    throw Error("strip_suffix: " + suffix.name() + " is not a suffix of " +
                whole.name());
  std::vector<std::string> rest(w.begin(), w.end() - long(s.size()));
  return whole.cat->object_word(rest);
}

// ---------------------------------------------------------------------------
// solutions of the conjugate equations
// ---------------------------------------------------------------------------

/// A quadruple (ρ, ρ̄, R, R̄) with R ∈ (ι, ρ̄ρ) and R̄ ∈ (ι, ρρ̄), claimed to
/// satisfy
///   R̄*⊗1_ρ ∘ 1_ρ⊗R = 1_ρ   and   R*⊗1_ρ̄ ∘ 1_ρ̄⊗R̄ = 1_ρ̄.
struct ConjugateSolution {
  ObjectRef rho, rho_bar;
  Arrow r, r_bar;

  /// The same data read as a solution for ρ̄ with conjugate ρ.
  ConjugateSolution swapped() const { return {rho_bar, rho, r_bar, r}; }
};

/// R = Σ_{i,k} P(k,i) e_i⊗e_k ∈ (ι, ρ̄ρ); P is dim(ρ) × dim(ρ̄).
/// With Q the matrix of R̄ ∈ (ι, ρρ̄), the conjugate equations reduce to
/// P·conj(Q) = 1, i.e. Q = conj(P)^{-1}.
inline Arrow arrow_from_pairing(const ObjectRef& left, const ObjectRef& right,
                                const CMat& p) {
  if (p.rows() != right.dim || p.cols() != left.dim)
    throw Error("arrow_from_pairing: matrix shape mismatch");
  CMat v(left.dim * right.dim, 1);
  for (Eigen::Index i = 0; i < left.dim; ++i)
    for (Eigen::Index k = 0; k < right.dim; ++k) v(i * right.dim + k, 0) = p(k, i);
  return Arrow{left.cat->unit(), tensor(left, right), std::move(v)};
}

inline CMat pairing_matrix(const Arrow& r, const ObjectRef& left,
                           const ObjectRef& right) {
  CMat p(right.dim, left.dim);
  for (Eigen::Index i = 0; i < left.dim; ++i)
    for (Eigen::Index k = 0; k < right.dim; ++k) p(k, i) = r.mat(i * right.dim + k, 0);
  return p;
}

inline ConjugateSolution solution_from_pairing(const ObjectRef& rho,
                                               const ObjectRef& rho_bar,
                                               const CMat& p) {
  Eigen::FullPivLU<CMat> lu(p);
  if (!lu.isInvertible())
    throw Error("solution_from_pairing: pairing matrix is singular");
  CMat q = lu.inverse().conjugate();
  return {rho, rho_bar, arrow_from_pairing(rho_bar, rho, p),
          arrow_from_pairing(rho, rho_bar, q)};
}

/// The Hilbert-space solution R = R̄ = Σ_i e_i⊗e_i against the
/// entrywise-conjugate realization of ρ̄. Standard for Hilb and for unitary
/// representations of a finite group.
inline ConjugateSolution standard_pairing_solution(const ObjectRef& rho) {
  ObjectRef rho_bar = rho.cat->conjugate_object(rho);
  return solution_from_pairing(rho, rho_bar, ident(rho.dim));
}

/// Woronowicz solution attached to an invertible antilinear intertwiner J:
/// R = Σ_i e_i ⊗ J^{-1}e_i, R̄ = Σ_i e_i ⊗ Je_i. Then R*∘R = Tr J^{-1*}J^{-1}
/// and R̄*∘R̄ = Tr J*J.
inline ConjugateSolution solution_from_antilinear(const ObjectRef& rho,
                                                  const ObjectRef& rho_bar,
                                                  const AntilinearMap& j) {
  if (j.dim() != rho.dim || rho.dim != rho_bar.dim)
    throw Error("solution_from_antilinear: dimension mismatch");
  CMat p = j.inverse_mat();
  CMat q = j.mat;
  return {rho, rho_bar, arrow_from_pairing(rho_bar, rho, p),
          arrow_from_pairing(rho, rho_bar, q)};
}

struct ConjugateReport {
  bool ok = false;
  double residual_1 = 0.0;  // ‖R̄*⊗1_ρ ∘ 1_ρ⊗R − 1_ρ‖
  double residual_2 = 0.0;  // ‖R*⊗1_ρ̄ ∘ 1_ρ̄⊗R̄ − 1_ρ̄‖
};

inline ConjugateReport verify_conjugate(const ConjugateSolution& s) {
  const Arrow one_rho = identity_arrow(s.rho);
  const Arrow one_bar = identity_arrow(s.rho_bar);
  if (s.r.dst != tensor(s.rho_bar, s.rho) || !s.r.src.is_unit())
    throw Error("verify_conjugate: R has wrong endpoints");
  if (s.r_bar.dst != tensor(s.rho, s.rho_bar) || !s.r_bar.src.is_unit())
    throw Error("verify_conjugate: R̄ has wrong endpoints");
  Arrow lhs1 = compose(tensor(adjoint(s.r_bar), one_rho), tensor(one_rho, s.r));
  Arrow lhs2 = compose(tensor(adjoint(s.r), one_bar), tensor(one_bar, s.r_bar));
  ConjugateReport rep;
  rep.residual_1 = op_norm(lhs1.mat - one_rho.mat);
  rep.residual_2 = op_norm(lhs2.mat - one_bar.mat);
  rep.ok = rep.residual_1 < tol().equality && rep.residual_2 < tol().equality;
  return rep;
}

/// Lemma-2.2-style check: X := R̄*⊗1 ∘ 1⊗R invertible and
/// ω(T) = R* ∘ T⊗1_ρ ∘ R faithful on (ρ̄,ρ̄). When both hold, the corrected
/// pair (R, X^{-1*}⊗1 ∘ R̄) is a true solution.
struct WeakConjugateReport {
  bool ok = false;
  bool x_invertible = false;
  double x_min_singular_value = 0.0;
  bool omega_faithful = false;
  double omega_min_eigenvalue = 0.0;
  ConjugateSolution corrected;
  ConjugateReport corrected_check;
};

inline CMat functional_density(const std::vector<Arrow>& basis,
                               const std::vector<Complex>& values) {
  if (basis.empty()) return CMat();
  CMat d = CMat::Zero(basis[0].mat.rows(), basis[0].mat.cols());
  for (size_t a = 0; a < basis.size(); ++a)
    d += std::conj(values[a]) * basis[a].mat;
  return d;
}

inline WeakConjugateReport verify_weak_conjugate(const ConjugateSolution& s) {
  WeakConjugateReport rep;
  const Arrow one_rho = identity_arrow(s.rho);
  const Arrow one_bar = identity_arrow(s.rho_bar);
  Arrow x = compose(tensor(adjoint(s.r_bar), one_rho), tensor(one_rho, s.r));
  Eigen::JacobiSVD<CMat> svd(x.mat);
  rep.x_min_singular_value =
      svd.singularValues().size() ? svd.singularValues().minCoeff() : 0.0;
  rep.x_invertible = rep.x_min_singular_value > tol().spectral;

  // density of ω on hom(ρ̄, ρ̄)
  auto basis = s.rho.cat->hom_basis(s.rho_bar, s.rho_bar);
  std::vector<Complex> vals;
  for (const auto& b : basis)
    vals.push_back(
        compose(adjoint(s.r), compose(tensor(b, one_rho), s.r)).mat(0, 0));
  CMat dw = functional_density(basis, vals);
  rep.omega_min_eigenvalue = dw.size() ? min_eigenvalue(dw) : 0.0;
  rep.omega_faithful = rep.omega_min_eigenvalue > tol().spectral;

  if (rep.x_invertible) {
    CMat xinv_adj = x.mat.inverse().adjoint();
    Arrow corr = compose(tensor(Arrow{s.rho, s.rho, xinv_adj}, one_bar), s.r_bar);
    rep.corrected = ConjugateSolution{s.rho, s.rho_bar, s.r, corr};
    rep.corrected_check = verify_conjugate(rep.corrected);
  }
  rep.ok = rep.x_invertible && rep.omega_faithful && rep.corrected_check.ok;
  return rep;
}

// ---------------------------------------------------------------------------
// Frobenius reciprocity
// ---------------------------------------------------------------------------

/// The four natural bijections (ρσ,τ) ↔ (σ, ρ̄τ) and (σρ,τ) ↔ (σ, τρ̄)
/// attached to a solution of the conjugate equations.
struct FrobeniusMaps {
  ConjugateSolution sol;

  /// (ρσ,τ) → (σ, ρ̄τ):  S ↦ 1_ρ̄⊗S ∘ R⊗1_σ
  Arrow lift_left(const Arrow& s) const {
    ObjectRef sigma = strip_prefix(s.src, sol.rho);
    return compose(tensor(identity_arrow(sol.rho_bar), s),
                   tensor(sol.r, identity_arrow(sigma)));
  }
  /// (σ, ρ̄τ) → (ρσ,τ):  S' ↦ R̄*⊗1_τ ∘ 1_ρ⊗S'
  Arrow drop_left(const Arrow& sp) const {
    ObjectRef tau = strip_prefix(sp.dst, sol.rho_bar);
    return compose(tensor(adjoint(sol.r_bar), identity_arrow(tau)),
                   tensor(identity_arrow(sol.rho), sp));
  }
  /// (σρ,τ) → (σ, τρ̄):  T ↦ T⊗1_ρ̄ ∘ 1_σ⊗R̄
  Arrow lift_right(const Arrow& t) const {
    ObjectRef sigma = strip_suffix(t.src, sol.rho);
    return compose(tensor(t, identity_arrow(sol.rho_bar)),
                   tensor(identity_arrow(sigma), sol.r_bar));
  }
  /// (σ, τρ̄) → (σρ,τ):  T' ↦ 1_τ⊗R* ∘ T'⊗1_ρ
  Arrow drop_right(const Arrow& tp) const {
    ObjectRef tau = strip_suffix(tp.dst, sol.rho_bar);
    return compose(tensor(identity_arrow(tau), adjoint(sol.r)),
                   tensor(tp, identity_arrow(sol.rho)));
  }
};

/// Unique X ∈ (ρ̄, ρ₁) with R₁ = X⊗1_ρ ∘ R, for R₁ ∈ (ι, ρ₁ρ).
inline Arrow recover_left_factor(const Arrow& r1, const ConjugateSolution& sol) {
  ObjectRef rho1 = strip_suffix(r1.dst, sol.rho);
  return compose(tensor(identity_arrow(rho1), adjoint(sol.r_bar)),
                 tensor(r1, identity_arrow(sol.rho_bar)));
}

// ---------------------------------------------------------------------------
// left and right inverses
// ---------------------------------------------------------------------------

/// φ_{σ,τ}(X) = n · R*⊗1_τ ∘ 1_ρ̄⊗X ∘ R⊗1_σ for X ∈ (ρσ, ρτ).
/// `apply` uses n = (R*∘R)^{-1} so that φ_{ι,ι}(1_ρ) = 1; `apply_raw` is the
/// unnormalized version appearing in the Pimsner-Popa bound.
struct LeftInverse {
  ConjugateSolution sol;
  double norm_factor = 1.0;

  Arrow apply_raw(const Arrow& x) const {
    ObjectRef sigma = strip_prefix(x.src, sol.rho);
    ObjectRef tau = strip_prefix(x.dst, sol.rho);
    Arrow lift = compose(tensor(identity_arrow(sol.rho_bar), x),
                         tensor(sol.r, identity_arrow(sigma)));
    return compose(tensor(adjoint(sol.r), identity_arrow(tau)), lift);
  }
  Arrow apply(const Arrow& x) const { return norm_factor * apply_raw(x); }
};

/// ψ_{σ,τ}(X) = n · 1_τ⊗R̄* ∘ X⊗1_ρ̄ ∘ 1_σ⊗R̄ for X ∈ (σρ, τρ).
struct RightInverse {
  ConjugateSolution sol;
  double norm_factor = 1.0;

  Arrow apply_raw(const Arrow& x) const {
    ObjectRef sigma = strip_suffix(x.src, sol.rho);
    ObjectRef tau = strip_suffix(x.dst, sol.rho);
    Arrow lift = compose(tensor(x, identity_arrow(sol.rho_bar)),
                         tensor(identity_arrow(sigma), sol.r_bar));
    return compose(tensor(identity_arrow(tau), adjoint(sol.r_bar)), lift);
  }
  Arrow apply(const Arrow& x) const { return norm_factor * apply_raw(x); }
};

inline double solution_norm_r(const ConjugateSolution& s) {
  return s.r.mat.norm();
}
inline double solution_norm_r_bar(const ConjugateSolution& s) {
  return s.r_bar.mat.norm();
}

inline LeftInverse left_inverse(const ConjugateSolution& s) {
  double rr = solution_norm_r(s);
  if (rr == 0.0) throw Error("left_inverse: zero R");
  return {s, 1.0 / (rr * rr)};
}

inline RightInverse right_inverse(const ConjugateSolution& s) {
  double rr = solution_norm_r_bar(s);
  if (rr == 0.0) throw Error("right_inverse: zero R̄");
  return {s, 1.0 / (rr * rr)};
}

/// Lemma 2.5 family: the (unnormalized) left inverse with S* = R* ∘ Y⊗1_ρ,
/// Y ∈ (ρ̄, ρ̄).
inline Arrow left_inverse_from_y(const ConjugateSolution& s, const Arrow& y,
                                 const Arrow& x) {
  ObjectRef sigma = strip_prefix(x.src, s.rho);
  ObjectRef tau = strip_prefix(x.dst, s.rho);
  Arrow s_star = compose(adjoint(s.r), tensor(y, identity_arrow(s.rho)));
  Arrow lift = compose(tensor(identity_arrow(s.rho_bar), x),
                       tensor(s.r, identity_arrow(sigma)));
  return compose(tensor(s_star, identity_arrow(tau)), lift);
}

// ---------------------------------------------------------------------------
// conjugation on arrows, scalar products, trace
// ---------------------------------------------------------------------------

/// T• ∈ (ρ̄, ρ̄') for T ∈ (ρ, ρ'):
/// T• = 1_ρ̄'⊗R̄_ρ* ∘ 1_ρ̄'⊗T*⊗1_ρ̄ ∘ R_ρ'⊗1_ρ̄.
/// Antilinear; the unique solution of T•⊗1_ρ ∘ R_ρ = 1_ρ̄'⊗T* ∘ R_ρ'.
inline Arrow arrow_conjugate(const Arrow& t, const ConjugateSolution& sol_src,
                             const ConjugateSolution& sol_dst) {
  if (t.src != sol_src.rho || t.dst != sol_dst.rho)
    throw Error("arrow_conjugate: endpoints do not match the solutions");
  const Arrow one_dst_bar = identity_arrow(sol_dst.rho_bar);
  const Arrow one_src_bar = identity_arrow(sol_src.rho_bar);
  Arrow inner = tensor(tensor(one_dst_bar, adjoint(t)), one_src_bar);
  return compose(tensor(one_dst_bar, adjoint(sol_src.r_bar)),
                 compose(inner, tensor(sol_dst.r, one_src_bar)));
}

/// (S,T)_ℓ = R_ρ* ∘ 1_ρ̄⊗(S*∘T) ∘ R_ρ for S,T ∈ (ρ, ρ').
inline Complex scalar_product_left(const Arrow& s, const Arrow& t,
                                   const ConjugateSolution& sol) {
  Arrow st = compose(adjoint(s), t);
  Arrow mid = tensor(identity_arrow(sol.rho_bar), st);
  return compose(adjoint(sol.r), compose(mid, sol.r)).mat(0, 0);
}

/// (S,T)_r = R̄_ρ* ∘ (S*∘T)⊗1_ρ̄ ∘ R̄_ρ.
inline Complex scalar_product_right(const Arrow& s, const Arrow& t,
                                    const ConjugateSolution& sol) {
  Arrow st = compose(adjoint(s), t);
  Arrow mid = tensor(st, identity_arrow(sol.rho_bar));
  return compose(adjoint(sol.r_bar), compose(mid, sol.r_bar)).mat(0, 0);
}

/// tr(T) = (1_ρ, T)_ℓ for T ∈ (ρ,ρ). Positive and tracial for standard
/// solutions; tr(1_ρ) = d(ρ).
inline Complex trace_arrow(const Arrow& t, const ConjugateSolution& sol) {
  return scalar_product_left(identity_arrow(sol.rho), t, sol);
}

// ---------------------------------------------------------------------------
// standardness, standardization, dimension
// ---------------------------------------------------------------------------

/// Densities of φ_{ι,ι} and ψ_{ι,ι} as elements of the hom algebra (ρ,ρ),
/// written in a Hilbert-Schmidt-orthonormal basis:
///   tr(D_φ X) = R*∘1⊗X∘R and tr(D_ψ X) = R̄*∘X⊗1∘R̄ for X ∈ (ρ,ρ).
struct DensityPair {
  CMat d_phi, d_psi;
  std::vector<Arrow> basis;
};

inline DensityPair density_pair(const ConjugateSolution& s) {
  DensityPair d;
  d.basis = s.rho.cat->hom_basis(s.rho, s.rho);
  if (d.basis.empty()) throw Error("density_pair: empty hom basis");
  const Arrow one_bar = identity_arrow(s.rho_bar);
  std::vector<Complex> phi_vals, psi_vals;
  for (const auto& b : d.basis) {
    phi_vals.push_back(
        compose(adjoint(s.r), compose(tensor(one_bar, b), s.r)).mat(0, 0));
    psi_vals.push_back(
        compose(adjoint(s.r_bar), compose(tensor(b, one_bar), s.r_bar)).mat(0, 0));
  }
  d.d_phi = functional_density(d.basis, phi_vals);
  d.d_psi = functional_density(d.basis, psi_vals);
  return d;
}

struct StandardReport {
  bool standard = false;
  double gap = 0.0;  // ‖D_φ − D_ψ‖
};

/// A solution is standard iff its left and right inverses agree on (ι,ι),
/// iff the two densities coincide.
inline StandardReport is_standard(const ConjugateSolution& s) {
  DensityPair d = density_pair(s);
  StandardReport rep;
  rep.gap = op_norm(d.d_phi - d.d_psi);
  double scale = std::max(1.0, 0.5 * (op_norm(d.d_phi) + op_norm(d.d_psi)));
  rep.standard = rep.gap < tol().equality * scale;
  return rep;
}

/// Replace (R, R̄) by (1⊗Y ∘ R, Y^{-1}⊗1 ∘ R̄) with Y > 0 in the hom algebra
/// chosen so that the result is standard. Y² is the unique positive solution
/// of Y² D_φ Y² = D_ψ,
///   Y² = D_φ^{-1/2} (D_φ^{1/2} D_ψ D_φ^{1/2})^{1/2} D_φ^{-1/2},
/// and both legs are rescaled afterwards so that ‖R‖ = ‖R̄‖.
inline ConjugateSolution standardize(const ConjugateSolution& s) {
  DensityPair d = density_pair(s);
  double scale = std::max(op_norm(d.d_phi), op_norm(d.d_psi));
  if (scale <= 0.0 || min_eigenvalue(d.d_phi) < tol().spectral * scale ||
      min_eigenvalue(d.d_psi) < tol().spectral * scale)
    throw Error("standardize: degenerate densities (invalid input solution)");
  CMat phi_h = herm_sqrt(d.d_phi);
  CMat phi_ih = herm_inv_sqrt(d.d_phi);
  CMat y2 = phi_ih * herm_sqrt(CMat(phi_h * d.d_psi * phi_h)) * phi_ih;
  CMat y = herm_sqrt(y2);
  Arrow ya{s.rho, s.rho, y};
  Arrow yinv{s.rho, s.rho, y.inverse()};
  Arrow r = compose(tensor(identity_arrow(s.rho_bar), ya), s.r);
  Arrow rb = compose(tensor(yinv, identity_arrow(s.rho_bar)), s.r_bar);
  double c = std::sqrt(rb.mat.norm() / r.mat.norm());
  return {s.rho, s.rho_bar, c * r, (1.0 / c) * rb};
}

/// d(φ) = ‖R‖·‖R̄‖ of the defining solution.
inline double dim_solution(const ConjugateSolution& s) {
  return solution_norm_r(s) * solution_norm_r_bar(s);
}

// ---------------------------------------------------------------------------
// closure constructions
// ---------------------------------------------------------------------------

/// Direct sum of solutions along isometries W_i ∈ (ρ_i, ρ), W̄_i ∈ (ρ̄_i, ρ̄):
/// R = Σ W̄_i⊗W_i ∘ R_i, R̄ = Σ W_i⊗W̄_i ∘ R̄_i.
inline ConjugateSolution direct_sum_solution(
    const std::vector<ConjugateSolution>& sols, const std::vector<Arrow>& ws,
    const std::vector<Arrow>& w_bars) {
  if (sols.empty() || sols.size() != ws.size() || sols.size() != w_bars.size())
    throw Error("direct_sum_solution: mismatched inputs");
  ObjectRef rho = ws[0].dst, rho_bar = w_bars[0].dst;
  Arrow r{rho.cat->unit(), tensor(rho_bar, rho),
          CMat::Zero(rho_bar.dim * rho.dim, 1)};
  Arrow rb{rho.cat->unit(), tensor(rho, rho_bar),
           CMat::Zero(rho.dim * rho_bar.dim, 1)};
  for (size_t i = 0; i < sols.size(); ++i) {
    if (ws[i].dst != rho || w_bars[i].dst != rho_bar)
      throw Error("direct_sum_solution: isometries target different objects");
    if (ws[i].src != sols[i].rho || w_bars[i].src != sols[i].rho_bar)
      throw Error("direct_sum_solution: isometry endpoints do not match");
    r = r + compose(tensor(w_bars[i], ws[i]), sols[i].r);
    rb = rb + compose(tensor(ws[i], w_bars[i]), sols[i].r_bar);
  }
  return {rho, rho_bar, r, rb};
}

/// Lemma 3.6 product: conjugate for ρ₁ρ₂ with (ρ₁ρ₂)‾ = ρ̄₂ρ̄₁,
/// R = 1_ρ̄₂⊗R₁⊗1_ρ₂ ∘ R₂, R̄ = 1_ρ₁⊗R̄₂⊗1_ρ̄₁ ∘ R̄₁.
inline ConjugateSolution product_solution(const ConjugateSolution& s1,
                                          const ConjugateSolution& s2) {
  Arrow r = compose(
      tensor(tensor(identity_arrow(s2.rho_bar), s1.r), identity_arrow(s2.rho)),
      s2.r);
  Arrow rb = compose(
      tensor(tensor(identity_arrow(s1.rho), s2.r_bar), identity_arrow(s1.rho_bar)),
      s1.r_bar);
  return {tensor(s1.rho, s2.rho), tensor(s2.rho_bar, s1.rho_bar), r, rb};
}

/// Subobject: given an isometry W ∈ (ρ', ρ) and a solution for ρ, produce a
/// solution for ρ'. The conjugate subobject is cut out of ρ̄ by the
/// projection F = (W∘W*)•.
inline ConjugateSolution subobject_solution(const ConjugateSolution& s,
                                            const Arrow& w) {
  if (w.dst != s.rho) throw Error("subobject_solution: W must land in ρ");
  ObjectRef rho_p = w.src;
  Arrow f = arrow_conjugate(compose(w, adjoint(w)), s, s);
  ObjectRef rho_p_bar = rho_p.cat->conjugate_object(rho_p);
  if (rho_p_bar.dim != rho_p.dim)
    throw Error("subobject_solution: conjugate object dimension mismatch");

  CMat xbar;
  CMat wc = w.mat.conjugate();
  if ((f.mat * wc - wc).norm() < tol().equality * (1.0 + wc.norm()) &&
      herm_residual(f.mat) < tol().equality * (1.0 + f.mat.norm())) {
    xbar = wc;  // standard case: F is the orthogonal projection onto conj(W)
  } else {
    // rank factorization of the (possibly oblique) idempotent F
    Eigen::JacobiSVD<CMat> svd(f.mat, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > 0.5) ++rank;  // idempotent: singular values near 0 or ≥ 1
    if (rank != rho_p.dim)
      throw Error("subobject_solution: projection rank does not match W");
    xbar = svd.matrixU().leftCols(rank);
  }
  Arrow xb{rho_p_bar, s.rho_bar, xbar};
  Arrow yb{s.rho_bar, rho_p_bar, CMat(xbar.adjoint() * f.mat)};
  Arrow r = compose(tensor(yb, adjoint(w)), s.r);
  Arrow rb = compose(tensor(adjoint(w), adjoint(xb)), s.r_bar);
  return {rho_p, rho_p_bar, r, rb};
}

// ---------------------------------------------------------------------------
// standard solutions and intrinsic dimension (Hilb / RepFiniteGroup)
// ---------------------------------------------------------------------------

/// Standard solution assembled from the seeded irreducible decomposition:
/// R = Σ_i W̄_i⊗W_i ∘ R_i with per-irreducible normalized solutions.
inline ConjugateSolution standard_solution(const ObjectRef& rho,
                                           std::uint64_t seed = 7) {
  auto cat = rho.cat;
  if (cat->kind() == BackendKind::Free)
    throw Error("standard_solution: free backend objects carry explicit solutions");
  ObjectRef rho_bar = cat->conjugate_object(rho);
  auto parts = cat->decompose(rho, seed);
  std::vector<ConjugateSolution> sols;
  std::vector<Arrow> ws, wbars;
  for (const auto& part : parts) {
    sols.push_back(standard_pairing_solution(part.irreducible));
    ws.push_back(part.isometry);
    wbars.push_back(Arrow{sols.back().rho_bar, rho_bar,
                          part.isometry.mat.conjugate()});
  }
  return direct_sum_solution(sols, ws, wbars);
}

/// Intrinsic dimension d(ρ) = Σ_i mult_i · d(irr_i), computed through the
/// standard solution; d(zero object) = 0, d(ι) = 1.
inline double dim_object(const ObjectRef& rho, std::uint64_t seed = 7) {
  if (rho.dim == 0) return 0.0;
  if (rho.is_unit()) return 1.0;
  return dim_solution(standard_solution(rho, seed));
}

// ---------------------------------------------------------------------------
// minimality, reality
// ---------------------------------------------------------------------------

struct MinimalityReport {
  double product = 0.0;    // (R*∘R)(R̄*∘R̄)
  double d_squared = 0.0;  // d(ρ)²
  bool minimal = false;
};

/// Thm-3.11-style check: R*∘R∘R̄*∘R̄ ≥ d(ρ)², equality iff a multiple of R is
/// standard. d² may be supplied for backends without decomposition.
inline MinimalityReport minimality_check(const ConjugateSolution& s,
                                         double d_squared = -1.0) {
  MinimalityReport rep;
  double rr = solution_norm_r(s), bb = solution_norm_r_bar(s);
  rep.product = rr * rr * bb * bb;
  rep.d_squared = d_squared >= 0.0 ? d_squared : std::pow(dim_object(s.rho), 2);
  rep.minimal = std::abs(rep.product - rep.d_squared) <
                tol().equality * std::max(1.0, rep.d_squared) * 10.0;
  return rep;
}

/// Frobenius-Schur sign of a self-conjugate irreducible realized with ρ̄ = ρ:
/// with M spanning the one-dimensional (ι, ρ²) and A its pairing matrix,
/// conj(A)·A = c·1 with c real; +1 means real (a solution with R̄ = R
/// exists), -1 pseudoreal.
inline int real_sign(const ObjectRef& rho) {
  auto basis = rho.cat->hom_basis(rho.cat->unit(), tensor(rho, rho));
  if (basis.size() != 1)
    throw Error("real_sign: (ι, ρ²) is " + std::to_string(basis.size()) +
                "-dimensional, expected 1");
  CMat a = pairing_matrix(basis[0], rho, rho);
  CMat ca = a.conjugate() * a;
  Complex c = ca.trace() / double(rho.dim);
  if (op_norm(ca - c * ident(rho.dim)) > tol().equality * (1.0 + std::abs(c)))
    throw Error("real_sign: conj(M)·M is not scalar");
  if (std::abs(c.imag()) > tol().equality * (1.0 + std::abs(c)))
    throw Error("real_sign: scalar not real (non-self-conjugate realization)");
  return c.real() >= 0.0 ? +1 : -1;
}

/// Thm-5.14 criterion: ρ is real iff mult(σ,ρ) = mult(σ̄,ρ) for every
/// irreducible σ and mult(σ,ρ) is even for every pseudoreal σ.
inline bool is_real(const ObjectRef& rho, std::uint64_t seed = 7) {
  auto cat = rho.cat;
  auto parts = cat->decompose(rho, seed);
  std::map<std::string, int> mult;
  std::map<std::string, ObjectRef> reps;
  for (const auto& p : parts) {
    mult[p.irreducible.name()] += 1;
    reps.emplace(p.irreducible.name(), p.irreducible);
  }
  for (const auto& [name, obj] : reps) {
    ObjectRef bar = cat->conjugate_object(obj);
    // find the label equivalent to σ̄
    std::string bar_name;
    for (const auto& [n2, o2] : reps)
      if (o2.dim == bar.dim && cat->hom_dim(bar, o2) > 0) {
        bar_name = n2;
        break;
      }
    int self_mult = mult[name];
    int bar_mult = bar_name.empty() ? 0 : mult[bar_name];
    if (self_mult != bar_mult) return false;
    if (bar_name == name && real_sign(obj) < 0 && self_mult % 2 != 0)
      return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// iterated solutions for real objects
// ---------------------------------------------------------------------------

struct IteratedRealResult {
  Arrow r_m;             // ∈ (ι, ρ^{2m})
  double norm_squared;   // R_m*∘R_m, should equal d^m
  Complex lambda;        // scalar of S_m*⊗1 ∘ 1⊗S_m, = ±d^{-m}
  double scalar_residual;
  int sign;              // the ± convention of the input (R̄ = ±R)
};

/// R_m = 1_ρ⊗R_{m-1}⊗1_ρ ∘ R, R₁ = R, for solutions with R̄ = ±R. Then
/// R_m*∘R_m = d^m and S_m = d^{-m/2}R_m is an isometry with
/// S_m*⊗1 ∘ 1⊗S_m = ±d^{-m}·1.
inline IteratedRealResult iterated_real_solution(const ConjugateSolution& s,
                                                 int m) {
  if (m < 1) throw Error("iterated_real_solution: m must be ≥ 1");
  double rn = s.r.mat.norm();
  int sign;
  if ((s.r_bar.mat - s.r.mat).norm() < tol().equality * (1.0 + rn))
    sign = +1;
  else if ((s.r_bar.mat + s.r.mat).norm() < tol().equality * (1.0 + rn))
    sign = -1;
  else
    throw Error("iterated_real_solution: requires R̄ = ±R");
  const Arrow one = identity_arrow(s.rho);
  Arrow rm = s.r;
  for (int k = 2; k <= m; ++k)
    rm = compose(tensor(tensor(one, rm), one), s.r);
  double d = rn * rn;
  IteratedRealResult out;
  out.sign = sign;
  out.r_m = rm;
  out.norm_squared = compose(adjoint(rm), rm).mat(0, 0).real();
  Arrow sm = std::pow(d, -0.5 * m) * rm;
  std::vector<std::string> w;
  for (int k = 0; k < m; ++k)
    w.insert(w.end(), s.rho.word.begin(), s.rho.word.end());
  ObjectRef rho_m = s.rho.cat->object_word(w);
  Arrow one_m = identity_arrow(rho_m);
  Arrow l = compose(tensor(adjoint(sm), one_m), tensor(one_m, sm));
  Complex lam = l.mat.trace() / double(rho_m.dim);
  out.lambda = lam;
  out.scalar_residual = op_norm(l.mat - lam * one_m.mat);
  return out;
}

}  // namespace dimcat
