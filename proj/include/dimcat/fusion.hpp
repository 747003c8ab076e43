#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "dimcat/linalg.hpp"

namespace dimcat {

using BigInt = boost::multiprecision::cpp_int;

/// Multiplicity vector over the labels of a fusion ring.
struct ObjectVec {
  std::map<std::string, std::int64_t> mult;

  static ObjectVec single(const std::string& label) {
    ObjectVec v;
    v.mult[label] = 1;
    return v;
  }
};

/// Skeletal fusion data: finite (or lazily extended) label set with unit,
/// conjugation involution and nonnegative integer structure constants
/// N^k_{ij} = dim(ρ_k, ρ_iρ_j). Structure constants are exact integers;
/// only spectral quantities go through floating point.
class FusionRing {
 public:
  // extender(ring, depth): append labels/constants so that every label with
  // index ≤ depth exists. Used for infinite ladders.
  using Extender = std::function<void(FusionRing&, std::size_t)>;

  FusionRing(std::vector<std::string> labels, std::string unit)
      : labels_(std::move(labels)), unit_(std::move(unit)) {
    for (std::size_t i = 0; i < labels_.size(); ++i) index_[labels_[i]] = i;
    if (!index_.count(unit_)) throw Error("fusion ring: unit not in label set");
    for (const auto& l : labels_) conj_[l] = l;  // default: self-conjugate
  }

  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& unit() const { return unit_; }

  void set_conj(const std::string& a, const std::string& b) {
    require_label(a);
    require_label(b);
    conj_[a] = b;
    conj_[b] = a;
  }
  const std::string& conj(const std::string& a) const {
    require_label(a);
    return conj_.at(a);
  }

  void set_n(const std::string& i, const std::string& j, const std::string& k,
             std::int64_t value) {
    require_label(i);
    require_label(j);
    require_label(k);
    if (value < 0) throw Error("fusion ring: negative structure constant");
    if (value == 0) return;
    n_[key(i, j, k)] = value;
  }

  /// N^k_{ij} = dim(ρ_k, ρ_iρ_j).
  std::int64_t n(const std::string& i, const std::string& j,
                 const std::string& k) const {
    if (rule_) return rule_(i, j, k);
    if (i == unit_) return j == k ? 1 : 0;
    if (j == unit_) return i == k ? 1 : 0;
    auto it = n_.find(key(i, j, k));
    return it == n_.end() ? 0 : it->second;
  }

  /// Closed-form structure constants (lazy rings); replaces the stored table.
  using Rule = std::function<std::int64_t(
      const std::string&, const std::string&, const std::string&)>;
  void set_rule(Rule r) { rule_ = std::move(r); }

  void set_fs_sign(const std::string& l, int sign) {
    require_label(l);
    if (sign != 0 && conj_.at(l) != l)
      throw Error("fusion ring: fs_sign on a non-self-conjugate label");
    fs_sign_[l] = sign;
  }
  /// +1 real, -1 pseudoreal, 0 complex/unknown.
  int fs_sign(const std::string& l) const {
    auto it = fs_sign_.find(l);
    return it == fs_sign_.end() ? 0 : it->second;
  }

  void set_extender(Extender e) { extender_ = std::move(e); }
  bool lazy() const { return bool(extender_); }

  /// Make sure at least `depth`+1 labels exist (lazy rings only).
  void ensure_depth(std::size_t depth) const {
    if (!extender_) return;
    std::scoped_lock lk(*ext_mtx_);
    if (labels_.size() > depth)
      return;  // readers see a consistent, already-extended table
    extender_(const_cast<FusionRing&>(*this), depth);
    for (std::size_t i = 0; i < labels_.size(); ++i) index_[labels_[i]] = i;
  }

  void add_label(const std::string& l, const std::string& conj_label,
                 int fs = 0) {
    labels_.push_back(l);
    index_[l] = labels_.size() - 1;
    conj_[l] = conj_label;
    conj_[conj_label] = l;
    if (fs != 0) fs_sign_[l] = fs;
  }

  /// Checks the unit laws, the conjugation involution, Frobenius symmetry in
  /// the form N^ι_{ij} = δ_{j, ī}, and associativity. Throws on violation.
  /// Lazy rings only get the involution checks here; their rule is validated
  /// separately on finite truncations.
  void validate() const {
    if (conj_.at(unit_) != unit_) throw Error("fusion ring: conj(unit) ≠ unit");
    for (const auto& [a, b] : conj_)
      if (conj_.at(b) != a) throw Error("fusion ring: conj not an involution");
    if (extender_) return;
    for (const auto& i : labels_)
      for (const auto& j : labels_) {
        std::int64_t expect = (j == conj_.at(i)) ? 1 : 0;
        if (n(i, j, unit_) != expect)
          throw Error("fusion ring: N^unit_{" + i + "," + j + "} violates " +
                      "Frobenius symmetry");
      }
    for (const auto& i : labels_)
      for (const auto& j : labels_)
        for (const auto& k : labels_)
          for (const auto& l : labels_) {
            std::int64_t lhs = 0, rhs = 0;
            for (const auto& m : labels_) {
              lhs += n(i, j, m) * n(m, k, l);
              rhs += n(j, k, m) * n(i, m, l);
            }
            if (lhs != rhs)
              throw Error("fusion ring: associativity fails at (" + i + "," +
                          j + "," + k + ";" + l + ")");
          }
    for (const auto& [l, s] : fs_sign_)
      if (s != 0 && conj_.at(l) != l)
        throw Error("fusion ring: fs_sign set on non-self-conjugate label " + l);
  }

  ObjectVec conj(const ObjectVec& v) const {
    ObjectVec out;
    for (const auto& [l, m] : v.mult) out.mult[conj(l)] += m;
    return out;
  }

  /// Fusion matrix m^ρ with m^ρ_{ij} = dim(ρ_j, ρ ρ_i) = Σ_k ρ_k N^j_{ki},
  /// over the currently materialized labels (lazy rings are extended first).
  RMat fusion_matrix(const ObjectVec& rho, std::size_t min_depth = 0) const {
    ensure_depth(std::max(min_depth, labels_.size()));
    const std::size_t n_lab = labels_.size();
    RMat m = RMat::Zero(Eigen::Index(n_lab), Eigen::Index(n_lab));
    for (const auto& [l, mult] : rho.mult) {
      require_label(l);
      for (std::size_t i = 0; i < n_lab; ++i)
        for (std::size_t j = 0; j < n_lab; ++j)
          m(Eigen::Index(i), Eigen::Index(j)) +=
              double(mult) * double(n(l, labels_[i], labels_[j]));
    }
    return m;
  }

  std::size_t label_index(const std::string& l) const {
    require_label(l);
    return index_.at(l);
  }

 private:
  static std::string key(const std::string& i, const std::string& j,
                         const std::string& k) {
    return i + "\x1f" + j + "\x1f" + k;
  }
  void require_label(const std::string& l) const {
    if (!index_.count(l)) {
      if (extender_) {
        // lazy rings may simply not have materialized it yet
        throw Error("fusion ring: label '" + l + "' not materialized");
      }
      throw Error("fusion ring: unknown label '" + l + "'");
    }
  }

  mutable std::vector<std::string> labels_;
  std::string unit_;
  mutable std::map<std::string, std::size_t> index_;
  std::map<std::string, std::string> conj_;
  std::map<std::string, std::int64_t> n_;
  std::map<std::string, int> fs_sign_;
  Extender extender_;
  Rule rule_;
  std::shared_ptr<std::recursive_mutex> ext_mtx_ =
      std::make_shared<std::recursive_mutex>();
};

// ---------------------------------------------------------------------------
// spectral invariants
// ---------------------------------------------------------------------------

/// Perron-Frobenius dimension: the PF eigenvalue of m^ρ on the component of
/// the label set reachable from the unit by fusing with ρ and ρ̄. Errors out
/// listing unreachable labels.
inline double pf_dimension(const FusionRing& ring, const ObjectVec& rho) {
  RMat m = ring.fusion_matrix(rho);
  RMat mc = ring.fusion_matrix(ring.conj(rho));
  const auto& labels = ring.labels();
  std::size_t n = labels.size();
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> queue{ring.label_index(ring.unit())};
  seen[queue[0]] = true;
  while (!queue.empty()) {
    std::size_t i = queue.back();
    queue.pop_back();
    for (std::size_t j = 0; j < n; ++j)
      if (!seen[j] && (m(Eigen::Index(i), Eigen::Index(j)) > 0 ||
                       mc(Eigen::Index(i), Eigen::Index(j)) > 0)) {
        seen[j] = true;
        queue.push_back(j);
      }
  }
  std::vector<std::size_t> reach;
  std::string unreachable;
  for (std::size_t j = 0; j < n; ++j) {
    if (seen[j])
      reach.push_back(j);
    else
      unreachable += (unreachable.empty() ? "" : ", ") + labels[j];
  }
  if (!unreachable.empty() && !ring.lazy())
    throw Error("pf_dimension: labels unreachable from the unit: " + unreachable);
  RMat sub(Eigen::Index(reach.size()), Eigen::Index(reach.size()));
  for (std::size_t a = 0; a < reach.size(); ++a)
    for (std::size_t b = 0; b < reach.size(); ++b)
      sub(Eigen::Index(a), Eigen::Index(b)) =
          m(Eigen::Index(reach[a]), Eigen::Index(reach[b]));
  return pf_eigen(sub).value;
}

inline double pf_dimension(const FusionRing& ring, const std::string& label) {
  return pf_dimension(ring, ObjectVec::single(label));
}

/// Spectral norm of m^ρ on ℓ²(labels). For lazy rings this is a certified
/// bracket from truncations: the truncated norm is a lower bound (monotone in
/// depth) and the max row/column sum an upper bound.
struct NormBracket {
  double lower = 0.0;
  double upper = 0.0;
};

inline NormBracket fusion_matrix_norm(const FusionRing& ring,
                                      const ObjectVec& rho,
                                      std::size_t depth = 0) {
  RMat m = ring.fusion_matrix(rho, depth);
  Eigen::JacobiSVD<RMat> svd(m);
  double lower = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  if (!ring.lazy()) return {lower, lower};
  // ‖m‖ ≤ √(‖m‖₁ ‖m‖_∞); row/column sums of the infinite ladder are read off
  // the truncation soon as interior rows repeat
  double rmax = 0.0, cmax = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    rmax = std::max(rmax, m.row(i).sum());
    cmax = std::max(cmax, m.col(i).sum());
  }
  return {lower, std::sqrt(rmax * cmax)};
}

struct AmenabilityReport {
  double m_norm_lower = 0.0;
  double m_norm_upper = 0.0;
  double d = 0.0;
  bool amenable = false;
};

/// Amenability at the fusion level: d(ρ) = ‖m^ρ‖. For finite label sets the
/// two sides agree by Perron-Frobenius theory; the report carries the bracket
/// so that a strict gap certifies non-amenability.
inline AmenabilityReport amenability_gap(const FusionRing& ring,
                                         const ObjectVec& rho, double d,
                                         std::size_t depth = 64) {
  auto nb = fusion_matrix_norm(ring, rho, depth);
  AmenabilityReport rep;
  rep.m_norm_lower = nb.lower;
  rep.m_norm_upper = nb.upper;
  rep.d = d;
  rep.amenable =
      d <= nb.upper + tol().spectral && d >= nb.lower - tol().spectral;
  return rep;
}

inline AmenabilityReport amenability_gap(const FusionRing& ring,
                                         const ObjectVec& rho,
                                         std::size_t depth = 64) {
  return amenability_gap(ring, rho, pf_dimension(ring, rho), depth);
}

// ---------------------------------------------------------------------------
// growth of intertwiner spaces
// ---------------------------------------------------------------------------

struct GrowthPoint {
  int n = 0;
  BigInt dim;   // dim(ρⁿ, ρⁿ) = ‖(m^ρ)ⁿ e_ι‖², exact
  double root;  // dim^{1/2n}
};

inline double big_log(const BigInt& v) {
  if (v <= 0) return -std::numeric_limits<double>::infinity();
  unsigned bits = boost::multiprecision::msb(v);
  if (bits <= 52) return std::log(v.convert_to<double>());
  BigInt top = v >> (bits - 52);
  return std::log(top.convert_to<double>()) + double(bits - 52) * std::log(2.0);
}

/// dim(ρⁿ,ρⁿ) for n = 1..n_max in exact integer arithmetic.
inline std::vector<GrowthPoint> growth_sequence(const FusionRing& ring,
                                                const ObjectVec& rho,
                                                int n_max) {
  if (ring.lazy()) {
    ring.ensure_depth(2);  // materialize enough to resolve the indices below
    std::size_t reach = 1;
    for (const auto& [l, m] : rho.mult)
      reach = std::max(reach, ring.label_index(l));
    ring.ensure_depth(std::size_t(n_max) * reach + 2);
  }
  const auto& labels = ring.labels();
  std::map<std::string, BigInt> v;
  v[ring.unit()] = 1;
  std::vector<GrowthPoint> out;
  for (int n = 1; n <= n_max; ++n) {
    std::map<std::string, BigInt> next;
    for (const auto& [i, coeff] : v) {
      if (coeff == 0) continue;
      for (const auto& [l, mult] : rho.mult)
        for (const auto& j : labels) {
          std::int64_t nk = ring.n(l, i, j);
          if (nk) next[j] += coeff * mult * nk;
        }
    }
    v = std::move(next);
    BigInt dim = 0;
    for (const auto& [j, c] : v) dim += c * c;
    GrowthPoint p;
    p.n = n;
    p.dim = dim;
    p.root = std::exp(big_log(dim) / (2.0 * n));
    out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// dimension functions, reality
// ---------------------------------------------------------------------------

struct DimensionFunctionReport {
  bool valid = false;
  double max_violation = 0.0;
};

/// f is a dimension function when f(ι) = 1, f(ī) = f(i) and
/// f(g)·f_i = Σ_j m^g_{ij} f_j for every generator label g.
inline DimensionFunctionReport validate_dimension_function(
    const FusionRing& ring,
    const std::function<double(const std::string&)>& f) {
  DimensionFunctionReport rep;
  const auto& labels = ring.labels();
  rep.max_violation = std::abs(f(ring.unit()) - 1.0);
  for (const auto& l : labels) {
    rep.max_violation =
        std::max(rep.max_violation, std::abs(f(l) - f(ring.conj(l))));
    if (f(l) <= 0.0) rep.max_violation = std::max(rep.max_violation, 1.0);
  }
  std::vector<std::string> gens = labels;
  std::size_t row_limit = labels.size();
  if (ring.lazy()) {
    // boundary rows of a truncation reference labels beyond it; check the
    // ladder generator on the interior only
    gens = {labels.size() > 1 ? labels[1] : ring.unit()};
    row_limit = labels.size() - 1;
  }
  for (const auto& g : gens) {
    RMat m = ring.fusion_matrix(ObjectVec::single(g));
    for (std::size_t i = 0; i < row_limit; ++i) {
      double lhs = f(g) * f(labels[i]);
      double rhs = 0.0;
      for (std::size_t j = 0; j < labels.size(); ++j)
        rhs += m(Eigen::Index(i), Eigen::Index(j)) * f(labels[j]);
      rep.max_violation = std::max(rep.max_violation, std::abs(lhs - rhs));
    }
  }
  rep.valid = rep.max_violation < tol().spectral;
  return rep;
}

/// Skeletal Thm-5.14 reality test: mult(σ) = mult(σ̄) for all σ and even
/// multiplicity on every pseudoreal self-conjugate constituent.
inline bool fusion_real_check(const FusionRing& ring, const ObjectVec& rho) {
  for (const auto& [l, m] : rho.mult) {
    if (m == 0) continue;
    const std::string& bar = ring.conj(l);
    std::int64_t mbar = 0;
    auto it = rho.mult.find(bar);
    if (it != rho.mult.end()) mbar = it->second;
    if (m != mbar) return false;
    if (bar == l) {
      int s = ring.fs_sign(l);
      if (s == 0)
        throw Error("fusion_real_check: missing fs_sign on self-conjugate '" +
                    l + "'");
      if (s < 0 && m % 2 != 0) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// built-in ring constructors (used by the data-file corpus)
// ---------------------------------------------------------------------------

inline FusionRing fibonacci_ring() {
  FusionRing r({"1", "tau"}, "1");
  r.set_n("tau", "tau", "1", 1);
  r.set_n("tau", "tau", "tau", 1);
  r.set_fs_sign("1", +1);
  r.set_fs_sign("tau", +1);
  r.validate();
  return r;
}

inline FusionRing ising_ring() {
  FusionRing r({"1", "sigma", "psi"}, "1");
  r.set_n("sigma", "sigma", "1", 1);
  r.set_n("sigma", "sigma", "psi", 1);
  r.set_n("sigma", "psi", "sigma", 1);
  r.set_n("psi", "sigma", "sigma", 1);
  r.set_n("psi", "psi", "1", 1);
  r.set_fs_sign("1", +1);
  r.set_fs_sign("sigma", +1);
  r.set_fs_sign("psi", +1);
  r.validate();
  return r;
}

/// SU(2)_k labels 0..k with the truncated Clebsch-Gordan rule.
inline FusionRing su2_level_k_ring(int k) {
  if (k < 1) throw Error("su2_level_k: level must be ≥ 1");
  std::vector<std::string> labels;
  for (int a = 0; a <= k; ++a) labels.push_back(std::to_string(a));
  FusionRing r(labels, "0");
  for (int a = 0; a <= k; ++a)
    for (int b = 0; b <= k; ++b)
      for (int c = std::abs(a - b); c <= std::min(a + b, 2 * k - a - b); c += 2)
        r.set_n(std::to_string(a), std::to_string(b), std::to_string(c), 1);
  for (int a = 0; a <= k; ++a)
    r.set_fs_sign(std::to_string(a), a % 2 == 0 ? +1 : -1);
  r.validate();
  return r;
}

inline FusionRing rep_s3_ring() {
  FusionRing r({"triv", "sgn", "std"}, "triv");
  r.set_n("sgn", "sgn", "triv", 1);
  r.set_n("sgn", "std", "std", 1);
  r.set_n("std", "sgn", "std", 1);
  r.set_n("std", "std", "triv", 1);
  r.set_n("std", "std", "sgn", 1);
  r.set_n("std", "std", "std", 1);
  for (const char* l : {"triv", "sgn", "std"}) r.set_fs_sign(l, +1);
  r.validate();
  return r;
}

inline FusionRing rep_z_n_ring(int n) {
  if (n < 1) throw Error("rep_z_n: n must be ≥ 1");
  std::vector<std::string> labels;
  for (int a = 0; a < n; ++a) labels.push_back("chi" + std::to_string(a));
  FusionRing r(labels, "chi0");
  for (int a = 0; a < n; ++a) {
    r.set_conj("chi" + std::to_string(a), "chi" + std::to_string((n - a) % n));
    for (int b = 0; b < n; ++b)
      r.set_n("chi" + std::to_string(a), "chi" + std::to_string(b),
              "chi" + std::to_string((a + b) % n), 1);
  }
  for (int a = 0; a < n; ++a)
    if ((2 * a) % n == 0) r.set_fs_sign("chi" + std::to_string(a), +1);
  r.validate();
  return r;
}

/// The A_∞ ladder: labels 0, 1, 2, … with the untruncated Clebsch-Gordan
/// rule; labels materialize lazily to whatever depth a query touches, the
/// structure constants come from the closed form.
inline FusionRing a_infinity_ring(std::size_t initial_depth = 8) {
  FusionRing r({"0"}, "0");
  r.set_fs_sign("0", +1);
  r.set_rule([](const std::string& i, const std::string& j,
                const std::string& k) -> std::int64_t {
    long a = std::stol(i), b = std::stol(j), c = std::stol(k);
    return (std::labs(a - b) <= c && c <= a + b && (a + b + c) % 2 == 0) ? 1 : 0;
  });
  r.set_extender([](FusionRing& ring, std::size_t depth) {
    for (std::size_t n = ring.labels().size(); n <= depth; ++n) {
      std::string lab = std::to_string(n);
      ring.add_label(lab, lab, n % 2 == 0 ? +1 : -1);
    }
  });
  r.ensure_depth(initial_depth);
  return r;
}

}  // namespace dimcat
