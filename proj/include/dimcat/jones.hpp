#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "dimcat/conjugation.hpp"

namespace dimcat {

/// Range projections of R and R̄:
///   E = ‖R‖⁻² R∘R* ∈ (ρ̄ρ, ρ̄ρ),  Ē = ‖R̄‖⁻² R̄∘R̄* ∈ (ρρ̄, ρρ̄),
/// with the Jones-relation scalar lam = ‖R‖⁻²‖R̄‖⁻².
struct JonesPair {
  Arrow e, e_bar;
  double lam = 0.0;
  ObjectRef rho, rho_bar;
};

inline JonesPair jones_projections(const ConjugateSolution& s) {
  double rn = s.r.mat.squaredNorm(), bn = s.r_bar.mat.squaredNorm();
  if (rn <= 0.0 || bn <= 0.0) throw Error("jones_projections: zero solution leg");
  JonesPair jp;
  jp.rho = s.rho;
  jp.rho_bar = s.rho_bar;
  jp.e = (1.0 / rn) * compose(s.r, adjoint(s.r));
  jp.e_bar = (1.0 / bn) * compose(s.r_bar, adjoint(s.r_bar));
  jp.lam = 1.0 / (rn * bn);
  return jp;
}

struct JonesReport {
  double projection_residual = 0.0;  // max of ‖E²−E‖, ‖E*−E‖ over both
  double relation_residual = 0.0;    // max over the two Jones relations
  double lam = 0.0;
  bool ok = false;
};

/// 1⊗E ∘ Ē⊗1 ∘ 1⊗E = lam·(1⊗E) and the Ē-side mirror.
inline JonesReport verify_jones_relations(const JonesPair& jp) {
  JonesReport rep;
  rep.lam = jp.lam;
  auto proj_res = [](const Arrow& p) {
    return std::max(op_norm(compose(p, p).mat - p.mat),
                    op_norm(p.mat - p.mat.adjoint().eval()));
  };
  rep.projection_residual = std::max(proj_res(jp.e), proj_res(jp.e_bar));

  Arrow one_r = identity_arrow(jp.rho);
  Arrow one_b = identity_arrow(jp.rho_bar);
  Arrow le = tensor(one_r, jp.e);        // on ρρ̄ρ
  Arrow be = tensor(jp.e_bar, one_r);    // on ρρ̄ρ
  Arrow lhs1 = compose(le, compose(be, le));
  double r1 = op_norm(lhs1.mat - jp.lam * le.mat);
  Arrow lb = tensor(one_b, jp.e_bar);    // on ρ̄ρρ̄
  Arrow eb = tensor(jp.e, one_b);        // on ρ̄ρρ̄
  Arrow lhs2 = compose(lb, compose(eb, lb));
  double r2 = op_norm(lhs2.mat - jp.lam * lb.mat);
  rep.relation_residual = std::max(r1, r2);
  rep.ok = rep.projection_residual < tol().equality &&
           rep.relation_residual < tol().equality;
  return rep;
}

/// Where d² sits in {4cos²(π/k) : k ≥ 3} ∪ [4, ∞).
struct IndexRange {
  enum Kind { Discrete, Continuous, Outside } kind = Outside;
  int k = 0;  // set for the discrete series

  std::string to_string() const {
    switch (kind) {
      case Discrete:
        return "discrete(" + std::to_string(k) + ")";
      case Continuous:
        return "continuous";
      default:
        return "outside";
    }
  }
};

inline IndexRange index_range(double d_squared, double tolerance = 1e-7,
                              int k_max = 1000) {
  if (d_squared < 0.0) throw Error("index_range: negative input");
  for (int k = 3; k <= k_max; ++k) {
    double v = 4.0 * std::pow(std::cos(std::numbers::pi / k), 2);
    if (std::abs(d_squared - v) < tolerance) return {IndexRange::Discrete, k};
  }
  if (d_squared >= 4.0 - tolerance) return {IndexRange::Continuous, 0};
  return {IndexRange::Outside, 0};
}

}  // namespace dimcat
