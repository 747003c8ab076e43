#include <catch2/catch_amalgamated.hpp>

#include "dimcat/conjugation.hpp"
#include "test_helpers.hpp"

using namespace dimcat;

namespace {

// Y-perturbed solution (1⊗Y ∘ R, Y^{-1*}⊗1 ∘ R̄); Y invertible in (ρ,ρ).
ConjugateSolution perturb(const ConjugateSolution& s, const CMat& y) {
  Arrow ya{s.rho, s.rho, y};
  Arrow yia{s.rho, s.rho, y.inverse().adjoint()};
  return {s.rho, s.rho_bar,
          compose(tensor(identity_arrow(s.rho_bar), ya), s.r),
          compose(tensor(yia, identity_arrow(s.rho_bar)), s.r_bar)};
}

}  // namespace

TEST_CASE("is_standard: canonical yes, perturbed no", "[standard]") {
  auto hilb = Category::hilb();
  auto c2 = hilb->add_hilb_object("c2", 2);
  auto sol = standard_pairing_solution(c2);
  CHECK(is_standard(sol).standard);

  CMat y = CMat::Zero(2, 2);
  y.diagonal() << 2.0, 1.0;
  auto bad = perturb(sol, y);
  CHECK(verify_conjugate(bad).ok);
  auto rep = is_standard(bad);
  CHECK_FALSE(rep.standard);
  CHECK(rep.gap > 0.1);
}

TEST_CASE("is_standard: norm-balanced irreducible", "[standard]") {
  auto suq2 = th::make_suq2(0.5);
  auto bal = standardize(suq2.sol);
  CHECK(is_standard(bal).standard);
  // unbalanced: R and R̄ norms differ, not standard
  CHECK_FALSE(is_standard(suq2.sol).standard);
}

TEST_CASE("standardize: fixed point on standard input", "[standard]") {
  auto s3 = th::make_s3();
  auto sol = standard_solution(s3->object("std"));
  auto out = standardize(sol);
  CHECK((out.r.mat - sol.r.mat).norm() < 1e-10);
  CHECK((out.r_bar.mat - sol.r_bar.mat).norm() < 1e-10);
}

TEST_CASE("standardize: SU_q(2) fundamental at q = 1/2", "[standard]") {
  auto suq2 = th::make_suq2(0.5);
  CHECK(verify_conjugate(suq2.sol).ok);
  auto std_sol = standardize(suq2.sol);
  CHECK(verify_conjugate(std_sol).ok);
  CHECK(std_sol.r.mat.squaredNorm() == Catch::Approx(2.5).epsilon(1e-10));
  CHECK(std_sol.r_bar.mat.squaredNorm() == Catch::Approx(2.5).epsilon(1e-10));
  CHECK(dim_solution(std_sol) == Catch::Approx(2.5).epsilon(1e-10));
  // the standardized fundamental is real: R̄ = R
  CHECK((std_sol.r.mat - std_sol.r_bar.mat).norm() < 1e-10);
}

TEST_CASE("standardize: random perturbations round-trip", "[standard]") {
  auto hilb = Category::hilb();
  auto c3 = hilb->add_hilb_object("c3", 3);
  auto sol = standard_pairing_solution(c3);
  Rng rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    auto bad = perturb(sol, random_invertible(rng, 3));
    REQUIRE(verify_conjugate(bad).ok);
    auto fixed = standardize(bad);
    CHECK(verify_conjugate(fixed).ok);
    CHECK(is_standard(fixed).gap < 1e-9);
    CHECK(dim_solution(fixed) == Catch::Approx(3.0).epsilon(1e-9));
  }
  // degenerate input is rejected
  ConjugateSolution junk{sol.rho, sol.rho_bar,
                         Arrow{hilb->unit(), tensor(sol.rho_bar, sol.rho),
                               CMat::Zero(9, 1)},
                         sol.r_bar};
  CHECK_THROWS_AS(standardize(junk), Error);
}

TEST_CASE("dimension: unit, additivity, multiplicativity", "[standard]") {
  auto hilb = Category::hilb();
  CHECK(dim_object(hilb->unit()) == Catch::Approx(1.0));
  auto c2 = hilb->add_hilb_object("c2", 2);
  auto c3 = hilb->add_hilb_object("c3", 3);
  auto ds = hilb->direct_sum(c2, c3);
  CHECK(dim_object(ds.sum) == Catch::Approx(5.0).epsilon(1e-10));

  // product of standard solutions for C², C³ → d = 6 and standard
  auto sol = product_solution(standard_pairing_solution(c2),
                              standard_pairing_solution(c3));
  CHECK(verify_conjugate(sol).ok);
  CHECK(dim_solution(sol) == Catch::Approx(6.0).epsilon(1e-12));
  CHECK(is_standard(sol).standard);
}

TEST_CASE("direct sum of solutions adds dimensions", "[standard]") {
  auto s3 = th::make_s3();
  auto a = s3->object("std"), b = s3->object("sgn");
  auto ds = s3->direct_sum(a, b);
  auto sum_bar = s3->conjugate_object(ds.sum);
  auto sa = standard_solution(a), sb = standard_solution(b);
  std::vector<Arrow> ws{ds.w1, ds.w2};
  std::vector<Arrow> wbars{
      Arrow{sa.rho_bar, sum_bar, ds.w1.mat.conjugate()},
      Arrow{sb.rho_bar, sum_bar, ds.w2.mat.conjugate()}};
  auto sol = direct_sum_solution({sa, sb}, ws, wbars);
  CHECK(verify_conjugate(sol).ok);
  CHECK(dim_solution(sol) == Catch::Approx(3.0).epsilon(1e-12));
  CHECK(is_standard(sol).standard);
}

TEST_CASE("product of standard solutions is standard (Thm 3.8)", "[standard]") {
  auto s3 = th::make_s3();
  auto sol1 = standard_solution(s3->object("std"));
  auto sol2 = standard_solution(tensor(s3->object("std"), s3->object("sgn")));
  auto prod = product_solution(sol1, sol2);
  CHECK(verify_conjugate(prod).ok);
  CHECK(is_standard(prod).gap < 1e-9);
  CHECK(dim_solution(prod) ==
        Catch::Approx(dim_solution(sol1) * dim_solution(sol2)).epsilon(1e-10));
}

TEST_CASE("subobject solution: rank-2 isometry into C³", "[standard]") {
  auto hilb = Category::hilb();
  auto c3 = hilb->add_hilb_object("c3", 3);
  auto c2 = hilb->add_hilb_object("c2", 2);
  auto sol = standard_pairing_solution(c3);
  Rng rng(32);
  CMat w0 = random_gaussian(rng, 3, 2);
  Eigen::HouseholderQR<CMat> qr(w0);
  CMat w = CMat(qr.householderQ()).leftCols(2);
  auto sub = subobject_solution(sol, Arrow{c2, c3, w});
  CHECK(verify_conjugate(sub).ok);
  CHECK(dim_solution(sub) == Catch::Approx(2.0).epsilon(1e-10));

  // also from a non-standard parent solution
  CMat y = random_invertible(rng, 3);
  auto bad = perturb(sol, y);
  auto sub2 = subobject_solution(bad, Arrow{c2, c3, w});
  CHECK(verify_conjugate(sub2).ok);
}

TEST_CASE("minimality (Thm 3.11)", "[standard]") {
  auto hilb = Category::hilb();
  auto c3 = hilb->add_hilb_object("c3", 3);
  auto sol = standard_pairing_solution(c3);
  auto rep = minimality_check(sol);
  CHECK(rep.minimal);
  CHECK(rep.product == Catch::Approx(9.0));

  CMat y = CMat::Zero(3, 3);
  y.diagonal() << 2.0, 1.0, 1.0;
  auto bad = perturb(sol, y);
  auto rep2 = minimality_check(bad);
  CHECK_FALSE(rep2.minimal);
  CHECK(rep2.product == Catch::Approx(13.5));  // (4+1+1)(1/4+1+1)

  Rng rng(33);
  for (int t = 0; t < 50; ++t) {
    bool unitary = t % 2 == 0;
    CMat yy = unitary ? random_unitary(rng, 3) : random_invertible(rng, 3);
    if (!unitary && op_norm(CMat(yy * yy.adjoint() - ident(3))) < 0.1)
      yy = 2.0 * yy;
    auto p = perturb(sol, yy);
    auto r = minimality_check(p);
    CHECK(r.product >= 9.0 - 1e-9);
    CHECK(r.minimal == unitary);
    CHECK(r.minimal == is_standard(p).standard);
  }
}

TEST_CASE("real sign: real, pseudoreal, trivial", "[standard]") {
  auto suq2 = th::make_suq2(0.5);
  CHECK(real_sign(suq2.rho) == +1);

  // SU(2)-type pseudoreal datum M = [[0,1],[-1,0]]
  auto cat = Category::free_backend();
  auto rho = cat->add_free_object("spin", 2, true);
  CMat m(2, 2);
  m << 0, 1, -1, 0;
  cat->set_free_hom(cat->unit(), tensor(rho, rho),
                    {arrow_from_pairing(rho, rho, m).mat});
  CHECK(real_sign(rho) == -1);

  auto hilb = Category::hilb();
  CHECK(real_sign(hilb->unit()) == +1);

  // Q8 two-dimensional irreducible is pseudoreal
  auto q8 = th::make_q8();
  CHECK(real_sign(q8->object("x")) == -1);
  // S3 irreducibles are all real
  auto s3 = th::make_s3();
  CHECK(real_sign(s3->object("std")) == +1);
  CHECK(real_sign(s3->object("sgn")) == +1);
}

TEST_CASE("real sign: error cases", "[standard]") {
  auto hilb = Category::hilb();
  auto c2 = hilb->add_hilb_object("c2", 2);
  // (ι, ρ²) is 4-dimensional in Hilb for d = 2
  CHECK_THROWS_AS(real_sign(c2), Error);
  auto z5 = th::make_z(5);
  // chi1 is not self-conjugate: (ι, chi1²) = 0
  CHECK_THROWS_AS(real_sign(z5->object("chi1")), Error);
}

TEST_CASE("is_real on composite objects", "[standard]") {
  auto z5 = th::make_z(5);
  auto chi1 = z5->object("chi1"), chi4 = z5->object("chi4");
  auto sum = z5->direct_sum(chi1, chi4);
  CHECK(is_real(sum.sum));
  auto doubled = z5->direct_sum(chi1, chi1);
  CHECK_FALSE(is_real(doubled.sum));

  auto hilb = Category::hilb();
  auto c3 = hilb->add_hilb_object("c3", 3);
  CHECK(is_real(c3));

  auto q8 = th::make_q8();
  auto x = q8->object("x");
  CHECK_FALSE(is_real(x));  // single pseudoreal irreducible
  auto xx = q8->direct_sum(x, x);
  CHECK(is_real(xx.sum));  // its double is real
}

TEST_CASE("double conjugate signs (Thm 5.14 computation)", "[standard]") {
  // ρ real, σ real: X•• = +X on (σ, ρ)
  auto s3 = th::make_s3();
  auto std2 = s3->object("std");
  auto obj = tensor(std2, std2);
  auto sol_s = standard_solution(std2);
  auto sol_o = standard_solution(obj);
  Rng rng(34);
  Arrow t{std2, obj, s3->hom_basis(std2, obj)[0].mat};
  // with ρ̄ realized by conjugate words, •• needs solutions for the bars
  Arrow tc = arrow_conjugate(t, sol_s, sol_o);
  Arrow tcc = arrow_conjugate(tc, sol_s.swapped(), sol_o.swapped());
  CHECK((tcc.mat - t.mat).norm() < 1e-10);

  // σ pseudoreal (Q8), ρ = σ⊕σ real: X•• = -X with R̄_σ = -R_σ, R̄_ρ = R_ρ
  auto q8 = th::make_q8();
  auto x = q8->object("x");
  auto mbasis = q8->hom_basis(q8->unit(), tensor(x, x));
  REQUIRE(mbasis.size() == 1);
  CMat a = pairing_matrix(mbasis[0], x, x);
  a *= std::sqrt(2.0) / a.norm();       // normalize: conj(A)A = -1, ‖A‖² = 2
  CMat ca = a.conjugate() * a;
  REQUIRE((ca + ident(2)).norm() < 1e-10);
  Arrow r_sigma = arrow_from_pairing(x, x, a);
  ConjugateSolution sol_sigma{x, x, r_sigma, -1.0 * r_sigma};
  REQUIRE(verify_conjugate(sol_sigma).ok);

  auto dsum = q8->direct_sum(x, x);
  ObjectRef rho = dsum.sum;
  CMat c(2, 2);
  c << 0, 1, -1, 0;
  CMat big = kron(c, a);  // real structure on σ⊗C²: M conj(M) = 1
  Arrow r_rho = arrow_from_pairing(rho, rho, big);
  ConjugateSolution sol_rho{rho, rho, r_rho, r_rho};
  REQUIRE(verify_conjugate(sol_rho).ok);

  // the conjugation is induced by the fixed assignment ρ ↦ R_ρ; with σ̄ = σ
  // and ρ̄ = ρ realized on the nose, •• reuses the same solutions
  for (int rep = 0; rep < 4; ++rep) {
    Arrow w = th::random_hom(rng, x, rho);
    Arrow wcc = arrow_conjugate(arrow_conjugate(w, sol_sigma, sol_rho),
                                sol_sigma, sol_rho);
    CHECK((wcc.mat + w.mat).norm() < 1e-10 * (1.0 + w.mat.norm()));
  }
  // both endpoints pseudoreal: the signs cancel
  for (int rep = 0; rep < 4; ++rep) {
    Arrow w = th::random_hom(rng, x, x);
    Arrow wcc = arrow_conjugate(arrow_conjugate(w, sol_sigma, sol_sigma),
                                sol_sigma, sol_sigma);
    CHECK((wcc.mat - w.mat).norm() < 1e-10 * (1.0 + w.mat.norm()));
  }
}

TEST_CASE("iterated solutions for real objects", "[standard]") {
  auto hilb = Category::hilb();
  auto c2 = hilb->add_hilb_object("c2", 2);
  auto sol = standard_pairing_solution(c2);
  auto r3 = iterated_real_solution(sol, 3);
  CHECK(r3.norm_squared == Catch::Approx(8.0).epsilon(1e-12));
  CHECK(r3.scalar_residual < 1e-10);
  CHECK(r3.lambda.real() == Catch::Approx(std::pow(2.0, -3)).epsilon(1e-9));

  auto r1 = iterated_real_solution(sol, 1);
  CHECK(r1.lambda.real() == Catch::Approx(0.5).epsilon(1e-12));

  auto suq2 = th::make_suq2(0.5);
  auto bal = standardize(suq2.sol);
  auto r2 = iterated_real_solution(bal, 2);
  CHECK(r2.norm_squared == Catch::Approx(6.25).epsilon(1e-9));
  CHECK(std::abs(r2.lambda) ==
        Catch::Approx(std::pow(2.5, -2)).epsilon(1e-9));
  CHECK(r2.sign == +1);

  // pseudoreal input: sign flips at odd m
  auto q8 = th::make_q8();
  auto x = q8->object("x");
  auto mb = q8->hom_basis(q8->unit(), tensor(x, x));
  CMat a = pairing_matrix(mb[0], x, x);
  a *= std::sqrt(2.0) / a.norm();
  Arrow r = arrow_from_pairing(x, x, a);
  ConjugateSolution ps{x, x, r, -1.0 * r};
  REQUIRE(verify_conjugate(ps).ok);
  auto p1 = iterated_real_solution(ps, 1);
  CHECK(p1.sign == -1);
  CHECK(p1.lambda.real() == Catch::Approx(-0.5).epsilon(1e-9));
  auto p2 = iterated_real_solution(ps, 2);
  CHECK(p2.lambda.real() == Catch::Approx(+0.25).epsilon(1e-9));

  // non-real input rejected
  auto c3 = hilb->add_hilb_object("c3", 3);
  auto pr = product_solution(standard_pairing_solution(c2),
                             standard_pairing_solution(c3));
  CHECK_THROWS_AS(iterated_real_solution(pr, 2), Error);
}
