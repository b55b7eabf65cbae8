#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "core/builtins.hpp"
#include "core/module.hpp"
#include "core/syzygy.hpp"

using namespace torkos;

namespace {

std::string str(const LVec& v) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ")";
  return os.str();
}

// All lattice points of the box [lo,hi]^d.
std::vector<LVec> box(int d, long long lo, long long hi) {
  std::vector<LVec> out;
  LVec cur(d, lo);
  while (true) {
    out.push_back(cur);
    int i = 0;
    while (i < d && cur[i] == hi) { cur[i] = lo; ++i; }
    if (i == d) break;
    ++cur[i];
  }
  return out;
}

// Brute-force oracle: at every degree the kernel module's piece must have the
// dimension of the evaluated kernel, the inclusion must be injective, and the
// composite must vanish; together these pin image = kernel exactly.
void check_kernel_against_oracle(const Morphism& f, const std::vector<LVec>& degs) {
  KernelResult kr = kernel_presentation(f);
  for (const LVec& x : degs) {
    INFO("degree ", str(x));
    QMat fm = evaluate(f, x);
    QMat im = evaluate(kr.incl, x);
    const int expected = fm.cols() - rank(fm);
    CHECK(piece_dim(kr.ker, x) == expected);
    CHECK(rank(im) == expected);
    CHECK(fm.mul(im).is_zero());
  }
}

Morphism random_free_morphism_b(const Fan& fan, int cone, std::mt19937_64& rng, int max_rows = 3,
                                int max_cols = 4) {
  const int d = fan.dim(cone);
  const int nr = 1 + static_cast<int>(rng() % max_rows);
  const int nc = 1 + static_cast<int>(rng() % max_cols);
  std::vector<LVec> row_deg(nr), col_deg(nc);
  for (LVec& r : row_deg) {
    r.resize(d);
    for (auto& c : r) c = static_cast<long long>(rng() % 3);
  }
  for (LVec& cd : col_deg) {
    cd = row_deg[rng() % nr];
    for (auto& c : cd) c += static_cast<long long>(rng() % 3);
  }
  HomMat mat;
  mat.row_deg = row_deg;
  mat.col_deg = col_deg;
  for (int j = 0; j < nc; ++j)
    for (int i = 0; i < nr; ++i)
      if (leq_all(row_deg[i], col_deg[j]) && rng() % 10 < 7) {
        long long c = static_cast<long long>(rng() % 6) - 2;
        if (c == 0) c = 3;
        mat.set(i, j, c, sub(col_deg[j], row_deg[i]));
      }
  return make_morphism(free_module(fan, cone, Flavor::B, col_deg),
                       free_module(fan, cone, Flavor::B, row_deg), std::move(mat), zero_vec(d));
}

Module random_module_a(const Fan& fan, int cone, std::mt19937_64& rng) {
  const int n = fan.rank();
  const int d = fan.dim(cone);
  const auto& dual = fan.completion(cone).dual;
  const int ng = 1 + static_cast<int>(rng() % 3);
  std::vector<LVec> gens(ng);
  for (LVec& g : gens) {
    g.resize(n);
    for (auto& c : g) c = static_cast<long long>(rng() % 5) - 2;
  }
  HomMat rels;
  rels.row_deg = gens;
  const int nrel = static_cast<int>(rng() % 3);
  for (int j = 0; j < nrel; ++j) {
    LVec cd = gens[rng() % ng];
    for (int k = 0; k < d; ++k) cd = add(cd, scale(static_cast<long long>(rng() % 3), dual[k]));
    rels.col_deg.push_back(cd);
    for (int i = 0; i < ng; ++i) {
      LVec diff = sub(cd, gens[i]);
      if (fan.dual_member(cone, diff) && rng() % 4 != 0) {
        long long c = static_cast<long long>(rng() % 5) - 2;
        if (c == 0) c = 1;
        rels.set(i, static_cast<int>(rels.col_deg.size()) - 1, c, diff);
      }
    }
  }
  return make_module(fan, cone, Flavor::A, std::move(gens), std::move(rels));
}

}  // namespace

TEST_CASE("pieces of free, twisted and presented modules") {
  Fan fan = builtin_fan("p2");
  int sigma = fan.cone_id({0, 1});  // cone(e1, e2); dual = first quadrant
  Module a = free_module(fan, sigma, Flavor::A, {zero_vec(2)});
  CHECK(piece_dim(a, {0, 0}) == 1);
  CHECK(piece_dim(a, {1, 2}) == 1);
  CHECK(piece_dim(a, {-1, 0}) == 0);

  Module tw = twisted(a, {2, -1});
  for (const LVec& m : box(2, -2, 3)) {
    INFO("degree ", str(m));
    CHECK(piece_dim(tw, m) == piece_dim(a, sub(m, {2, -1})));
  }

  // Quotient by one monomial: survives exactly on the complementary axis.
  Module q = a;
  q.rels.col_deg = {{1, 0}};
  q.rels.set(0, 0, 1, {1, 0});
  q = make_module(fan, sigma, Flavor::A, q.gens, q.rels);
  CHECK(piece_dim(q, {0, 0}) == 1);
  CHECK(piece_dim(q, {0, 5}) == 1);
  CHECK(piece_dim(q, {1, 0}) == 0);
  CHECK(piece_dim(q, {2, 3}) == 0);

  // Scaled relation with a coefficient: same vanishing.
  Module ck = make_module(fan, sigma, Flavor::A, {{0, 0}}, q.rels);
  ck.rels.entries[{0, 0}].coeff = 2;
  ck.rels.col_deg = {{1, 1}};
  ck.rels.entries[{0, 0}].deg = {1, 1};
  ck = make_module(fan, sigma, Flavor::A, ck.gens, ck.rels);
  CHECK(piece_dim(ck, {1, 1}) == 0);
  CHECK(piece_dim(ck, {1, 0}) == 1);

  // On the zero cone every degree of the free module is occupied.
  Module z = free_module(fan, 0, Flavor::A, {zero_vec(2)});
  CHECK(piece_dim(z, {-3, 7}) == 1);

  // Flavor B over the same cone.
  Module b = free_module(fan, sigma, Flavor::B, {zero_vec(2)});
  CHECK(piece_dim(b, {0, 0}) == 1);
  CHECK(piece_dim(b, {2, 1}) == 1);
  CHECK(piece_dim(b, {-1, 2}) == 0);
}

TEST_CASE("module construction rejects malformed data") {
  Fan fan = builtin_fan("p2");
  int sigma = fan.cone_id({0, 1});
  HomMat rels;
  rels.row_deg = {{0, 0}};
  rels.col_deg = {{1, 0}};
  rels.set(0, 0, 1, {0, 1});  // wrong degree: must be col - row = (1,0)
  CHECK_THROWS_WITH_AS(static_cast<void>(make_module(fan, sigma, Flavor::A, {{0, 0}}, rels)),
                       doctest::Contains("degree law"), Error);
  rels.set(0, 0, 1, {1, 0});
  CHECK_NOTHROW(static_cast<void>(make_module(fan, sigma, Flavor::A, {{0, 0}}, rels)));
  // Entry outside the dual cone.
  HomMat bad;
  bad.row_deg = {{0, 0}};
  bad.col_deg = {{-1, 0}};
  bad.set(0, 0, 1, {-1, 0});
  CHECK_THROWS_WITH_AS(static_cast<void>(make_module(fan, sigma, Flavor::A, {{0, 0}}, bad)),
                       doctest::Contains("outside support"), Error);
}

TEST_CASE("morphism validation and evaluation") {
  Fan fan = builtin_fan("p2");
  int sigma = fan.cone_id({0, 1});
  Module a = free_module(fan, sigma, Flavor::A, {zero_vec(2)});

  Morphism id = identity_morphism(a);
  for (const LVec& m : box(2, -1, 2)) {
    QMat e = evaluate(id, m);
    CHECK(e == QMat::identity(piece_dim(a, m)));
  }

  Morphism mult = mult_morphism(a, ScaledChar{Rat(3), {1, 1}});
  QMat e = evaluate(mult, {0, 0});
  REQUIRE(e.rows() == 1);
  REQUIRE(e.cols() == 1);
  CHECK(e.at(0, 0) == 3);
  CHECK(evaluate(mult, {-1, 0}).cols() == 0);
  CHECK_THROWS_AS(static_cast<void>(mult_morphism(a, ScaledChar{Rat(1), {-1, 0}})), Error);

  // Quotient by chi^{(1,0)}: projection is fine, a section is not.
  HomMat rels;
  rels.row_deg = {{0, 0}};
  rels.col_deg = {{1, 0}};
  rels.set(0, 0, 1, {1, 0});
  Module q = make_module(fan, sigma, Flavor::A, {{0, 0}}, rels);
  HomMat one;
  one.row_deg = {{0, 0}};
  one.col_deg = {{0, 0}};
  one.set(0, 0, 1, {0, 0});
  CHECK_NOTHROW(static_cast<void>(make_morphism(a, q, one, zero_vec(2))));
  CHECK_THROWS_WITH_AS(static_cast<void>(make_morphism(q, a, one, zero_vec(2))),
                       doctest::Contains("relation does not map to zero"), Error);
}

TEST_CASE("composition evaluates functorially") {
  Fan fan = builtin_fan("p2");
  int sigma = fan.cone_id({0, 1});
  Module a = free_module(fan, sigma, Flavor::A, {zero_vec(2)});
  Morphism f = mult_morphism(a, ScaledChar{Rat(2), {1, 0}});
  Morphism g = mult_morphism(a, ScaledChar{Rat(1, 3), {0, 2}});
  Morphism gf = compose(g, f);
  CHECK(gf.shift == LVec{1, 2});
  for (const LVec& m : box(2, -1, 2)) {
    INFO("degree ", str(m));
    QMat lhs = evaluate(gf, m);
    QMat rhs = evaluate(g, f.tgt_deg(m)).mul(evaluate(f, m));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("restriction morphisms to a face cone") {
  Fan fan = builtin_fan("p2");
  int sigma = fan.cone_id({0, 1});
  int tau = fan.cone_id({0});
  // A over sigma restricting into A over tau: the generator maps across.
  Module big = free_module(fan, sigma, Flavor::A, {zero_vec(2)});
  Module small = free_module(fan, tau, Flavor::A, {zero_vec(2)});
  HomMat one;
  one.row_deg = {{0, 0}};
  one.col_deg = {{0, 0}};
  one.set(0, 0, 1, {0, 0});
  Morphism r = make_morphism(big, small, one, zero_vec(2));
  // tau's dual half-plane sees degrees the quadrant does not.
  CHECK(piece_dim(small, {0, -4}) == 1);
  CHECK(evaluate(r, {1, 1}).at(0, 0) == 1);
  // Entries must lie in the *target* support: (0,-1) is tau-dual but the law
  // still has to match, and a sigma-only degree in the source is fine.
  HomMat shifted;
  shifted.row_deg = {{0, 1}};
  shifted.col_deg = {{0, 0}};
  shifted.set(0, 0, 1, {0, -1});
  Module small_up = free_module(fan, tau, Flavor::A, {{0, 1}});
  CHECK_NOTHROW(static_cast<void>(make_morphism(big, small_up, shifted, zero_vec(2))));

  // Flavor B: degrees project along the ray subset.
  Module bigb = free_module(fan, sigma, Flavor::B, {zero_vec(2)});
  Module smallb = free_module(fan, tau, Flavor::B, {zero_vec(1)});
  HomMat oneb;
  oneb.row_deg = {{0}};
  oneb.col_deg = {{0, 0}};
  oneb.set(0, 0, 1, {0});
  Morphism rb = make_morphism(bigb, smallb, oneb, zero_vec(1));
  CHECK(rb.tgt_deg({3, 5}) == LVec{3});
  CHECK(evaluate(rb, {3, 5}).at(0, 0) == 1);
}

TEST_CASE("direct sums add pieces and assemble block morphisms") {
  Fan fan = builtin_fan("p2");
  int sigma = fan.cone_id({1, 2});
  std::mt19937_64 rng(7);
  Module x = random_module_a(fan, sigma, rng);
  Module y = random_module_a(fan, sigma, rng);
  Module s = direct_sum({x, y});
  for (const LVec& m : box(2, -2, 2)) {
    INFO("degree ", str(m));
    CHECK(piece_dim(s, m) == piece_dim(x, m) + piece_dim(y, m));
  }
  Morphism fx = mult_morphism(x, ScaledChar{Rat(1), zero_vec(2)});
  Morphism fy = mult_morphism(y, ScaledChar{Rat(1), zero_vec(2)});
  Morphism diag = direct_sum_morphism({{&fx, nullptr}, {nullptr, &fy}}, {x, y}, {x, y}, zero_vec(2));
  for (const LVec& m : box(2, -1, 1)) CHECK(evaluate(diag, m) == QMat::identity(piece_dim(s, m)));
}

TEST_CASE("graded dual conventions") {
  Fan fan = builtin_fan("p2");
  int sigma = fan.cone_id({0, 1});
  Module a = free_module(fan, sigma, Flavor::A, {zero_vec(2)});
  DualModule av = dual_of(a);
  CHECK(dual_piece_dim(av, {0, 0}) == 1);
  CHECK(dual_piece_dim(av, {-2, -3}) == 1);
  CHECK(dual_piece_dim(av, {1, 0}) == 0);

  // (F(t))v agrees with Fv(-t) degreewise.
  LVec t{1, -2};
  DualModule lhs = dual_of(twisted(a, t));
  DualModule rhs = dual_twisted(av, neg(t));
  for (const LVec& m : box(2, -3, 3)) {
    INFO("degree ", str(m));
    CHECK(dual_piece_dim(lhs, m) == dual_piece_dim(rhs, m));
    // Double dual: piece function returns to the original.
    CHECK(dual_piece_dim(lhs, neg(m)) == piece_dim(twisted(a, t), m));
  }
}

TEST_CASE("regrading to ray coordinates preserves pieces, evaluations and homs") {
  for (const char* name : {"p2", "hirzebruch1"}) {
    Fan fan = builtin_fan(name);
    std::mt19937_64 rng(11);
    for (int mc : fan.max_cones()) {
      Module x = random_module_a(fan, mc, rng);
      Module xb = delta_extension(x);
      for (const LVec& m : box(fan.rank(), -2, 2)) {
        INFO(name, " cone ", mc, " degree ", str(m));
        CHECK(piece_dim_at_M(x, m) == piece_dim(xb, fan.b_degree(mc, m)));
      }
      Module y = random_module_a(fan, mc, rng);
      // Free-source morphisms into a presented target are always valid.
      Module fsrc = free_module(fan, mc, Flavor::A, {y.gens[0]});
      HomMat col;
      col.row_deg = y.gens;
      col.col_deg = {y.gens[0]};
      col.set(0, 0, 1, zero_vec(fan.rank()));
      Morphism f = make_morphism(fsrc, y, col, zero_vec(fan.rank()));
      Morphism fb = delta_extension_morphism(f);
      for (const LVec& m : box(fan.rank(), -2, 2)) {
        INFO(name, " cone ", mc, " degree ", str(m));
        CHECK(evaluate_at_M(f, m) == evaluate(fb, fan.b_degree(mc, m)));
      }
      CHECK(module_hom_dim(x, y, zero_vec(fan.rank())) ==
            module_hom_dim(delta_extension(x), delta_extension(y), zero_vec(fan.dim(mc))));
    }
  }
}

TEST_CASE("syzygy basis of a monomial row") {
  Fan fan = builtin_fan("p2");
  int sigma = fan.cone_id({0, 1});
  HomMat m;
  m.row_deg = {zero_vec(2)};
  m.col_deg = {{2, 0}, {1, 1}, {0, 2}};
  for (int j = 0; j < 3; ++j) m.set(0, j, 1, m.col_deg[j]);
  std::vector<SyzygyGen> syz = syzygy_basis(m);
  REQUIRE(syz.size() == 2);  // adjacent Koszul pairs; the far pair is dependent
  CHECK(syz[0].deg == LVec{1, 2});  // candidates are visited by ascending sum, then lex
  CHECK(syz[1].deg == LVec{2, 1});
  (void)sigma;
}

TEST_CASE("kernel of the Koszul column over the smooth quadrant") {
  Fan fan = builtin_fan("p2");
  int sigma = fan.cone_id({0, 1});
  Module src = free_module(fan, sigma, Flavor::A, {{1, 0}, {0, 1}});
  Module tgt = free_module(fan, sigma, Flavor::A, {zero_vec(2)});
  HomMat mat;
  mat.row_deg = tgt.gens;
  mat.col_deg = src.gens;
  mat.set(0, 0, 1, {1, 0});
  mat.set(0, 1, 1, {0, 1});
  Morphism f = make_morphism(src, tgt, mat, zero_vec(2));
  KernelResult kr = kernel_presentation(f);
  REQUIRE(kr.ker.gens.size() == 1);
  CHECK(kr.ker.gens[0] == LVec{1, 1});
  CHECK(kr.ker.rels.cols() == 0);
  check_kernel_against_oracle(f, box(2, -2, 3));
}

TEST_CASE("kernels respect Laurent directions on a ray cone") {
  Fan fan = builtin_fan("p2");
  int tau = fan.cone_id({0});
  Module a = free_module(fan, tau, Flavor::A, {zero_vec(2)});
  // Injective multiplication: kernel is zero.
  Module shifted = twisted(a, {1, 0});
  HomMat inj;
  inj.row_deg = a.gens;
  inj.col_deg = shifted.gens;
  inj.set(0, 0, 1, {1, 0});
  KernelResult kz = kernel_presentation(make_morphism(shifted, a, inj, zero_vec(2)));
  CHECK(is_zero_module(kz.ker));
  // Two-column map with a genuine syzygy reaching along the free direction.
  Module src = direct_sum({twisted(a, {1, 0}), twisted(a, {0, -3})});
  HomMat mat;
  mat.row_deg = a.gens;
  mat.col_deg = src.gens;
  mat.set(0, 0, 1, {1, 0});
  mat.set(0, 1, 2, {0, -3});
  Morphism f = make_morphism(src, a, mat, zero_vec(2));
  check_kernel_against_oracle(f, box(2, -4, 2));
}

TEST_CASE("kernel of the zero morphism is the source") {
  Fan fan = builtin_fan("p2");
  int sigma = fan.cone_id({0, 2});
  std::mt19937_64 rng(23);
  Module y = random_module_a(fan, sigma, rng);
  Morphism to_zero = zero_morphism(y, zero_module(fan, sigma, Flavor::A), zero_vec(2));
  KernelResult kr = kernel_presentation(to_zero);
  for (const LVec& m : box(2, -2, 2)) {
    INFO("degree ", str(m));
    CHECK(piece_dim(kr.ker, m) == piece_dim(y, m));
  }
}

TEST_CASE("random flavor-B kernels match the brute-force oracle") {
  Fan fan = builtin_fan("p2");
  int sigma = fan.cone_id({0, 1});
  std::mt19937_64 rng(2024);
  std::vector<LVec> degs = box(2, 0, 4);
  degs.push_back({-1, 2});
  for (int trial = 0; trial < 12; ++trial) {
    INFO("trial ", trial);
    Morphism f = random_free_morphism_b(fan, sigma, rng);
    check_kernel_against_oracle(f, degs);
    // Second syzygies: the inclusion of a kernel is degreewise injective, so
    // its own kernel presentation must be the zero module.
    KernelResult kr = kernel_presentation(f);
    CHECK(is_zero_module(kernel_presentation(kr.incl).ker));
  }
}

TEST_CASE("kernels with presented targets and sources") {
  Fan fan = builtin_fan("p2");
  int sigma = fan.cone_id({0, 1});
  std::mt19937_64 rng(99);
  std::vector<LVec> degs = box(2, 0, 4);
  for (int trial = 0; trial < 6; ++trial) {
    INFO("trial ", trial);
    Morphism g = random_free_morphism_b(fan, sigma, rng);
    // Target presented by g's matrix; kernel of the projection from its cover.
    Module y = make_module(fan, sigma, Flavor::B, g.tgt.gens, g.mat);
    HomMat id;
    id.row_deg = y.gens;
    id.col_deg = y.gens;
    for (int i = 0; i < y.num_gens(); ++i) id.set(i, i, 1, zero_vec(2));
    Morphism proj = make_morphism(g.tgt, y, id, zero_vec(2));
    check_kernel_against_oracle(proj, degs);
    // Presented source: everything maps to zero.
    Morphism to_zero = zero_morphism(y, zero_module(fan, sigma, Flavor::B), zero_vec(2));
    check_kernel_against_oracle(to_zero, degs);
  }
}

TEST_CASE("kernels over the zero cone are plain linear algebra") {
  Fan fan = builtin_fan("p2");
  Module src = free_module(fan, 0, Flavor::B, {LVec{}, LVec{}, LVec{}});
  Module tgt = free_module(fan, 0, Flavor::B, {LVec{}});
  HomMat mat;
  mat.row_deg = tgt.gens;
  mat.col_deg = src.gens;
  mat.set(0, 0, 1, LVec{});
  mat.set(0, 1, -2, LVec{});
  mat.set(0, 2, 5, LVec{});
  Morphism f = make_morphism(src, tgt, mat, LVec{});
  KernelResult kr = kernel_presentation(f);
  CHECK(piece_dim(kr.ker, LVec{}) == 2);
  CHECK(evaluate(f, LVec{}).mul(evaluate(kr.incl, LVec{})).is_zero());
}

TEST_CASE("hom dimensions between modules") {
  Fan fan = builtin_fan("p2");
  int sigma = fan.cone_id({0, 1});
  Module a = free_module(fan, sigma, Flavor::A, {zero_vec(2)});
  std::mt19937_64 rng(5);
  Module y = random_module_a(fan, sigma, rng);
  // Hom out of the rank-one free module is the target piece at the shift.
  for (const LVec& m : box(2, -2, 2)) {
    INFO("degree ", str(m));
    CHECK(module_hom_dim(a, y, m) == piece_dim(y, m));
  }
  HomMat rels;
  rels.row_deg = {{0, 0}};
  rels.col_deg = {{1, 0}};
  rels.set(0, 0, 1, {1, 0});
  Module q = make_module(fan, sigma, Flavor::A, {{0, 0}}, rels);
  CHECK(module_hom_dim(q, a, zero_vec(2)) == 0);  // torsion cannot map to free
  CHECK(module_hom_dim(q, q, zero_vec(2)) == 1);  // identity only
  CHECK(module_hom_dim(a, a, {1, 1}) == 1);
  CHECK(module_hom_dim(a, a, {-1, 0}) == 0);
}

TEST_CASE("zero module detection") {
  Fan fan = builtin_fan("p2");
  int sigma = fan.cone_id({0, 1});
  CHECK(is_zero_module(zero_module(fan, sigma, Flavor::A)));
  Module a = free_module(fan, sigma, Flavor::A, {zero_vec(2)});
  CHECK(!is_zero_module(a));
  HomMat rels;
  rels.row_deg = {{0, 0}};
  rels.col_deg = {{0, 0}};
  rels.set(0, 0, 1, {0, 0});
  CHECK(is_zero_module(make_module(fan, sigma, Flavor::A, {{0, 0}}, rels)));
}
