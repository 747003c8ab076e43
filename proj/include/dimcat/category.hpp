#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "dimcat/linalg.hpp"

namespace dimcat {

enum class BackendKind { Hilb, RepFiniteGroup, Free };

/// Finitely presented group: `generators` abstract generators, relations as
/// words of signed 1-based indices (+k = generator k, -k = its inverse), each
/// asserted to equal the identity.
struct GroupPresentation {
  int generators = 0;
  std::vector<std::vector<int>> relations;
};

struct GeneratorData {
  std::string id;
  Eigen::Index dim = 0;
  std::vector<CMat> rep;     // RepFiniteGroup: one unitary per group generator
  bool irreducible = false;  // Free backend: supplied flag
  std::string conj_id;       // id of a conjugate generator, "" = self
};

class Category;
using CategoryPtr = std::shared_ptr<Category>;

struct ObjectRef {
  CategoryPtr cat;
  std::vector<std::string> word;  // generator ids, empty = tensor unit
  Eigen::Index dim = 1;

  bool is_unit() const { return word.empty(); }
  bool operator==(const ObjectRef& o) const {
    return cat.get() == o.cat.get() && word == o.word;
  }
  bool operator!=(const ObjectRef& o) const { return !(*this == o); }
  std::string name() const {
    if (word.empty()) return "1";
    std::string s;
    for (size_t i = 0; i < word.size(); ++i) {
      if (i) s += "*";
      s += word[i];
    }
    return s;
  }
};

struct Arrow {
  ObjectRef src, dst;
  CMat mat;  // dim(dst) x dim(src)
};

inline Arrow identity_arrow(const ObjectRef& obj) {
  return {obj, obj, ident(obj.dim)};
}

inline Arrow adjoint(const Arrow& f) { return {f.dst, f.src, f.mat.adjoint()}; }

/// g∘f, defined when src(g) = dst(f).
inline Arrow compose(const Arrow& g, const Arrow& f) {
  if (g.src != f.dst)
    throw Error("compose: endpoint mismatch (" + g.src.name() + " vs " +
                f.dst.name() + ")");
  return {f.src, g.dst, g.mat * f.mat};
}

/// f⊗g on arrows; endpoints are concatenated tensor words.
inline Arrow tensor(const Arrow& f, const Arrow& g);

inline Arrow operator*(Complex c, const Arrow& f) { return {f.src, f.dst, c * f.mat}; }
inline Arrow operator+(const Arrow& f, const Arrow& g) {
  if (f.src != g.src || f.dst != g.dst) throw Error("arrow sum: endpoint mismatch");
  return {f.src, f.dst, f.mat + g.mat};
}
inline Arrow operator-(const Arrow& f, const Arrow& g) {
  if (f.src != g.src || f.dst != g.dst) throw Error("arrow diff: endpoint mismatch");
  return {f.src, f.dst, f.mat - g.mat};
}

struct DecompositionPart {
  ObjectRef irreducible;
  Arrow isometry;  // W ∈ (irreducible, ρ), W*W = 1
};

/// A concrete strict tensor C*-category. Objects are tensor words over a
/// registry of generator objects; arrows are complex matrices between the
/// underlying Hilbert spaces. Three flavours of hom-space oracle: full matrix
/// spaces (Hilb), intertwiner spaces of finite-group representations solved
/// by SVD nullspace, or user-supplied spanning sets (Free).
class Category : public std::enable_shared_from_this<Category> {
 public:
  static CategoryPtr hilb() {
    return CategoryPtr(new Category(BackendKind::Hilb));
  }
  static CategoryPtr rep_group(GroupPresentation g) {
    auto c = CategoryPtr(new Category(BackendKind::RepFiniteGroup));
    c->group_ = std::move(g);
    return c;
  }
  static CategoryPtr free_backend() {
    return CategoryPtr(new Category(BackendKind::Free));
  }

  BackendKind kind() const { return kind_; }
  const GroupPresentation& group() const { return group_; }

  ObjectRef unit() {
    return ObjectRef{shared_from_this(), {}, 1};
  }

  ObjectRef object(const std::string& id) {
    return object_word({id});
  }

  ObjectRef object_word(const std::vector<std::string>& word) {
    Eigen::Index d = 1;
    for (const auto& id : word) d *= gen(id).dim;
    return ObjectRef{shared_from_this(), word, d};
  }

  /// Hilb generator: a plain Hilbert space of the given dimension.
  ObjectRef add_hilb_object(const std::string& id, Eigen::Index dim) {
    if (kind_ != BackendKind::Hilb) throw Error("add_hilb_object: wrong backend");
    GeneratorData g{id, dim, {}, dim == 1, id};
    add_generator(std::move(g));
    return object(id);
  }

  /// Representation generator; unitarity and the group relations are checked.
  ObjectRef add_rep_object(const std::string& id, std::vector<CMat> rep,
                           const std::string& conj_id = "") {
    if (kind_ != BackendKind::RepFiniteGroup)
      throw Error("add_rep_object: wrong backend");
    if (int(rep.size()) != group_.generators)
      throw Error("add_rep_object: expected one matrix per group generator");
    Eigen::Index d = rep.empty() ? 1 : rep[0].rows();
    for (const auto& u : rep) {
      if (u.rows() != d || u.cols() != d)
        throw Error("add_rep_object '" + id + "': inconsistent matrix sizes");
      if ((u * u.adjoint() - ident(d)).norm() > tol().equality * d)
        throw Error("add_rep_object '" + id + "': generator matrix not unitary");
    }
    for (const auto& rel : group_.relations) {
      CMat w = ident(d);
      for (int s : rel) {
        int k = std::abs(s) - 1;
        if (k < 0 || k >= int(rep.size())) throw Error("bad relation index");
        w = w * (s > 0 ? rep[k] : CMat(rep[k].adjoint()));
      }
      if ((w - ident(d)).norm() > tol().equality * d)
        throw Error("add_rep_object '" + id + "': group relation violated");
    }
    GeneratorData g{id, d, std::move(rep), false, conj_id};
    add_generator(std::move(g));
    return object(id);
  }

  ObjectRef add_free_object(const std::string& id, Eigen::Index dim,
                            bool irreducible, const std::string& conj_id = "") {
    if (kind_ != BackendKind::Free) throw Error("add_free_object: wrong backend");
    GeneratorData g{id, dim, {}, irreducible, conj_id.empty() ? id : conj_id};
    add_generator(std::move(g));
    return object(id);
  }

  void set_free_hom(const ObjectRef& src, const ObjectRef& dst,
                    std::vector<CMat> spanning) {
    if (kind_ != BackendKind::Free) throw Error("set_free_hom: wrong backend");
    std::unique_lock lk(mtx_);
    free_hom_[hom_key(src, dst)] = std::move(spanning);
  }

  const GeneratorData& gen(const std::string& id) const {
    std::shared_lock lk(mtx_);
    auto it = gens_.find(id);
    if (it == gens_.end()) throw Error("unknown object id '" + id + "'");
    return it->second;
  }

  bool has_gen(const std::string& id) const {
    std::shared_lock lk(mtx_);
    return gens_.count(id) > 0;
  }

  std::vector<std::string> generator_ids() const {
    std::shared_lock lk(mtx_);
    return order_;
  }

  /// Representation matrices of a tensor word (RepFiniteGroup only).
  std::vector<CMat> word_rep(const ObjectRef& obj) const {
    if (kind_ != BackendKind::RepFiniteGroup)
      throw Error("word_rep: not a representation backend");
    std::vector<CMat> out;
    for (int k = 0; k < group_.generators; ++k) {
      CMat u = ident(1);
      for (const auto& id : obj.word) u = kron(u, gen(id).rep[size_t(k)]);
      out.push_back(std::move(u));
    }
    return out;
  }

  /// Conjugate object: the word of entrywise-conjugate generators (same
  /// order). For Hilb every generator is its own conjugate; for Rep the
  /// conjugate generator is registered on demand.
  ObjectRef conjugate_object(const ObjectRef& obj) {
    std::vector<std::string> w;
    for (const auto& id : obj.word) w.push_back(conj_gen(id));
    return object_word(w);
  }

  /// Direct sum: registers a fresh generator carrying the block sum and
  /// returns it with the two canonical isometries.
  struct DirectSum {
    ObjectRef sum;
    Arrow w1, w2;
  };
  DirectSum direct_sum(const ObjectRef& a, const ObjectRef& b) {
    if (a.cat.get() != this || b.cat.get() != this)
      throw Error("direct_sum: objects from another category");
    if (kind_ == BackendKind::Free)
      throw Error("direct_sum: not supported on the free backend");
    std::string id = "(" + a.name() + "+" + b.name() + ")#" + std::to_string(fresh_++);
    GeneratorData g;
    g.id = id;
    g.dim = a.dim + b.dim;
    g.irreducible = false;
    if (kind_ == BackendKind::RepFiniteGroup) {
      auto ra = word_rep(a);
      auto rb = word_rep(b);
      for (int k = 0; k < group_.generators; ++k) {
        CMat u = CMat::Zero(g.dim, g.dim);
        u.topLeftCorner(a.dim, a.dim) = ra[size_t(k)];
        u.bottomRightCorner(b.dim, b.dim) = rb[size_t(k)];
        g.rep.push_back(std::move(u));
      }
    }
    add_generator(std::move(g));
    ObjectRef s = object(id);
    CMat m1 = CMat::Zero(s.dim, a.dim), m2 = CMat::Zero(s.dim, b.dim);
    m1.topRows(a.dim) = ident(a.dim);
    m2.bottomRows(b.dim) = ident(b.dim);
    return {s, Arrow{a, s, m1}, Arrow{b, s, m2}};
  }

  /// Hilbert-Schmidt-orthonormal spanning set of (src, dst); empty means the
  /// hom space is zero.
  std::vector<Arrow> hom_basis(const ObjectRef& src, const ObjectRef& dst) {
    std::vector<CMat> mats;
    switch (kind_) {
      case BackendKind::Hilb: {
        mats.reserve(size_t(src.dim * dst.dim));
        for (Eigen::Index j = 0; j < src.dim; ++j)
          for (Eigen::Index i = 0; i < dst.dim; ++i) {
            CMat e = CMat::Zero(dst.dim, src.dim);
            e(i, j) = 1.0;
            mats.push_back(std::move(e));
          }
        break;
      }
      case BackendKind::RepFiniteGroup:
        mats = intertwiners(word_rep(src), src.dim, word_rep(dst), dst.dim);
        break;
      case BackendKind::Free: {
        std::shared_lock lk(mtx_);
        auto it = free_hom_.find(hom_key(src, dst));
        if (it == free_hom_.end()) {
          lk.unlock();
          if (auto d = default_free_hom(src, dst)) {
            mats = *d;
            break;
          }
          throw Error("free backend: no hom data for (" + src.name() + ", " +
                      dst.name() + ")");
        }
        mats = it->second;
        lk.unlock();
        mats = orthonormalize(mats);
        break;
      }
    }
    std::vector<Arrow> out;
    out.reserve(mats.size());
    for (auto& m : mats) out.push_back(Arrow{src, dst, std::move(m)});
    return out;
  }

  Eigen::Index hom_dim(const ObjectRef& src, const ObjectRef& dst) {
    return Eigen::Index(hom_basis(src, dst).size());
  }

  bool is_irreducible(const ObjectRef& obj) {
    if (kind_ == BackendKind::Free) {
      if (obj.is_unit()) return true;
      if (obj.word.size() == 1) return gen(obj.word[0]).irreducible;
    }
    return hom_dim(obj, obj) == 1;
  }

  /// Decomposition of ρ into irreducibles: W_i*W_j = δ_ij, Σ W_i W_i* = 1,
  /// each W_i carrying a registered irreducible object. Deterministic given
  /// the seed: eigenspaces of a seeded random Hermitian element of the hom
  /// algebra, refined until every block is irreducible. Equivalent blocks are
  /// rotated onto the registered representative, so equal labels carry equal
  /// representations.
  std::vector<DecompositionPart> decompose(const ObjectRef& obj,
                                           std::uint64_t seed = 7) {
    if (kind_ == BackendKind::Free)
      throw Error("decompose: not supported on the free backend");
    ensure_declared_irreps();
    Rng rng(seed);
    std::vector<DecompositionPart> out;
    CMat w0 = ident(obj.dim);
    split(obj, w0, rng, out);
    return out;
  }

 private:
  explicit Category(BackendKind k) : kind_(k) {}

  static std::string hom_key(const ObjectRef& src, const ObjectRef& dst) {
    return src.name() + ">" + dst.name();
  }

  void add_generator(GeneratorData g) {
    std::unique_lock lk(mtx_);
    if (gens_.count(g.id)) throw Error("duplicate object id '" + g.id + "'");
    order_.push_back(g.id);
    gens_.emplace(g.id, std::move(g));
  }

  std::string conj_gen(const std::string& id) {
    if (kind_ == BackendKind::Hilb) return id;
    {
      const auto& g = gen(id);
      if (!g.conj_id.empty()) return g.conj_id;
    }
    // Register the entrywise-conjugate representation under a derived id.
    std::string cid = id + "~";
    if (!has_gen(cid)) {
      GeneratorData g = gen(id);
      GeneratorData c;
      c.id = cid;
      c.dim = g.dim;
      c.irreducible = g.irreducible;
      c.conj_id = id;
      for (const auto& u : g.rep) c.rep.push_back(u.conjugate());
      add_generator(std::move(c));
      std::unique_lock lk(mtx_);
      gens_[id].conj_id = cid;
    }
    return cid;
  }

  // Solve X * U_src(g) = U_dst(g) * X over all group generators.
  static std::vector<CMat> intertwiners(const std::vector<CMat>& src_rep,
                                        Eigen::Index ds,
                                        const std::vector<CMat>& dst_rep,
                                        Eigen::Index dd) {
    const Eigen::Index n = ds * dd;
    if (src_rep.empty()) {  // trivial group: every matrix intertwines
      std::vector<CMat> all;
      for (Eigen::Index j = 0; j < ds; ++j)
        for (Eigen::Index i = 0; i < dd; ++i) {
          CMat e = CMat::Zero(dd, ds);
          e(i, j) = 1.0;
          all.push_back(std::move(e));
        }
      return all;
    }
    CMat a(Eigen::Index(src_rep.size()) * n, n);
    for (size_t k = 0; k < src_rep.size(); ++k)
      a.middleRows(Eigen::Index(k) * n, n) =
          kron(src_rep[k].transpose(), ident(dd)) - kron(ident(ds), dst_rep[k]);
    Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double cut = (sv.size() ? sv(0) : 0.0) * 1e-10;
    std::vector<CMat> out;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > cut && sv(i) > 1e-14) ++rank;
    for (Eigen::Index c = rank; c < n; ++c) {
      CVec v = svd.matrixV().col(c);
      out.push_back(Eigen::Map<const CMat>(v.data(), dd, ds));
    }
    return out;
  }

  static std::vector<CMat> orthonormalize(const std::vector<CMat>& mats) {
    if (mats.empty()) return {};
    const Eigen::Index r = mats[0].rows(), c = mats[0].cols();
    CMat a(r * c, Eigen::Index(mats.size()));
    for (size_t k = 0; k < mats.size(); ++k)
      a.col(Eigen::Index(k)) = Eigen::Map<const CVec>(mats[k].data(), r * c);
    Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    double cut = sv.size() ? sv(0) * 1e-10 : 0.0;
    std::vector<CMat> out;
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
      if (sv(k) <= cut) break;
      CVec v = svd.matrixU().col(k);
      out.push_back(Eigen::Map<const CMat>(v.data(), r, c));
    }
    return out;
  }

  // ---- irreducible registry used by decompose ----

  struct Irrep {
    std::string id;
    Eigen::Index dim;
    std::vector<CMat> rep;  // empty for Hilb
  };

  void ensure_declared_irreps() {
    std::vector<std::string> ids = generator_ids();
    std::call_once(irrep_init_, [&] {
      {
        std::unique_lock lk(mtx_);
        irreps_.push_back({"1", 1, unit_rep()});
      }
      for (const auto& id : ids) {
        const GeneratorData g = gen(id);
        if (g.dim == 1 && kind_ == BackendKind::Hilb) continue;  // = unit
        std::vector<CMat> rep = g.rep;
        if (intertwiners_self_dim(rep, g.dim) == 1) {
          std::unique_lock lk(mtx_);
          irreps_.push_back({id, g.dim, rep});
        }
      }
    });
  }

  std::vector<CMat> unit_rep() const {
    std::vector<CMat> r;
    if (kind_ == BackendKind::RepFiniteGroup)
      for (int k = 0; k < group_.generators; ++k) r.push_back(ident(1));
    return r;
  }

  Eigen::Index intertwiners_self_dim(const std::vector<CMat>& rep,
                                     Eigen::Index d) const {
    if (kind_ == BackendKind::Hilb) return d * d;
    return Eigen::Index(intertwiners(rep, d, rep, d).size());
  }

  // Recursively split the subobject of `root` cut out by the isometry w.
  void split(const ObjectRef& root, const CMat& w, Rng& rng,
             std::vector<DecompositionPart>& out) {
    const Eigen::Index d = w.cols();
    std::vector<CMat> sub_rep;
    if (kind_ == BackendKind::RepFiniteGroup)
      for (const auto& u : word_rep(root)) sub_rep.push_back(w.adjoint() * u * w);
    std::vector<CMat> hom =
        kind_ == BackendKind::Hilb
            ? std::vector<CMat>{}  // full matrix algebra, handled below
            : intertwiners(sub_rep, d, sub_rep, d);
    Eigen::Index hdim = kind_ == BackendKind::Hilb ? d * d : Eigen::Index(hom.size());
    if (hdim == 1) {
      out.push_back({register_or_match(sub_rep, d, w, root)});
      return;
    }
    // random Hermitian element of the hom algebra
    CMat h;
    if (kind_ == BackendKind::Hilb) {
      h = random_hermitian(rng, d);
    } else {
      h = CMat::Zero(d, d);
      std::normal_distribution<double> gauss(0.0, 1.0);
      for (const auto& b : hom) h += Complex(gauss(rng), gauss(rng)) * b;
      h = (h + CMat(h.adjoint())) / 2.0;
    }
    Eigen::SelfAdjointEigenSolver<CMat> es(h);
    const RVec& ev = es.eigenvalues();
    double gap = 1e-8 * std::max(1.0, std::abs(ev(d - 1)) + std::abs(ev(0)));
    Eigen::Index start = 0;
    for (Eigen::Index i = 1; i <= d; ++i) {
      if (i == d || ev(i) - ev(i - 1) > gap) {
        CMat v = es.eigenvectors().middleCols(start, i - start);
        if (i - start == d) {
          // single cluster: retry with a fresh random element
          split(root, w, rng, out);
          return;
        }
        split(root, CMat(w * v), rng, out);
        start = i;
      }
    }
  }

  DecompositionPart register_or_match(const std::vector<CMat>& rep,
                                      Eigen::Index d, const CMat& w,
                                      const ObjectRef& root) {
    ensure_declared_irreps();
    std::vector<Irrep> snapshot;
    {
      std::shared_lock lk(mtx_);
      snapshot = irreps_;
    }
    for (const auto& ir : snapshot) {
      if (ir.dim != d) continue;
      std::vector<CMat> t =
          kind_ == BackendKind::Hilb
              ? std::vector<CMat>{ident(1)}
              : intertwiners(ir.rep, ir.dim, rep, d);
      if (t.empty()) continue;
      // unitary intertwiner from the registered copy onto this block
      CMat u = t[0];
      CMat g = u.adjoint() * u;
      u = u / std::sqrt(std::abs(g(0, 0)));
      // deterministic phase: first nonzero entry real positive
      for (Eigen::Index k = 0; k < u.size(); ++k) {
        Complex z = u(k % u.rows(), k / u.rows());
        if (std::abs(z) > 1e-8) {
          u *= std::conj(z) / std::abs(z);
          break;
        }
      }
      ObjectRef label = ir.id == "1" ? unit() : object(ir.id);
      return {label, Arrow{label, root, CMat(w * u)}};
    }
    // genuinely new irreducible: register it as a generator object
    std::string id = "irr#" + std::to_string(fresh_++);
    GeneratorData g;
    g.id = id;
    g.dim = d;
    g.rep = rep;
    g.irreducible = true;
    add_generator(g);
    {
      std::unique_lock lk(mtx_);
      irreps_.push_back({id, d, rep});
    }
    ObjectRef label = object(id);
    return {label, Arrow{label, root, w}};
  }

  std::optional<std::vector<CMat>> default_free_hom(const ObjectRef& src,
                                                    const ObjectRef& dst) {
    if (src == dst) {
      if (src.is_unit()) return std::vector<CMat>{ident(1)};
      if (src.word.size() == 1 && gen(src.word[0]).irreducible)
        return std::vector<CMat>{ident(src.dim) / std::sqrt(double(src.dim))};
    }
    return std::nullopt;
  }

  BackendKind kind_;
  GroupPresentation group_;
  mutable std::shared_mutex mtx_;
  std::map<std::string, GeneratorData> gens_;
  std::vector<std::string> order_;
  std::map<std::string, std::vector<CMat>> free_hom_;
  std::vector<Irrep> irreps_;
  std::once_flag irrep_init_;
  std::atomic<std::uint64_t> fresh_{0};
};

inline Arrow tensor(const Arrow& f, const Arrow& g) {
  if (f.src.cat.get() != g.src.cat.get())
    throw Error("tensor: arrows from different categories");
  auto cat = f.src.cat;
  auto join = [&](const ObjectRef& a, const ObjectRef& b) {
    std::vector<std::string> w = a.word;
    w.insert(w.end(), b.word.begin(), b.word.end());
    return ObjectRef{cat, std::move(w), a.dim * b.dim};
  };
  return {join(f.src, g.src), join(f.dst, g.dst), kron(f.mat, g.mat)};
}

/// ρ⊗σ on objects.
inline ObjectRef tensor(const ObjectRef& a, const ObjectRef& b) {
  if (a.cat.get() != b.cat.get())
    throw Error("tensor: objects from different categories");
  std::vector<std::string> w = a.word;
  w.insert(w.end(), b.word.begin(), b.word.end());
  return ObjectRef{a.cat, std::move(w), a.dim * b.dim};
}

}  // namespace dimcat
