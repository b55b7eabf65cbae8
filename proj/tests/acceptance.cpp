// Acceptance gate: one pass/fail line per criterion, exact arithmetic
// throughout, exit 0 only when every criterion holds.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include "core/builtins.hpp"
#include "core/suites.hpp"

using namespace torkos;

namespace {

int g_failures = 0;
const int g_jobs = std::max(2u, std::min(8u, std::thread::hardware_concurrency()));

const std::vector<std::string> kFans = {"a2", "p1", "p2", "p1xp1", "hirzebruch1"};
const std::vector<std::string> kComplete = {"p1", "p2", "p1xp1", "hirzebruch1"};

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
    while (i < d && cur[i] == hi) {
      cur[i] = lo;
      ++i;
    }
    if (i == d) break;
    ++cur[i];
  }
  return out;
}

// The criterion body returns an empty string on success and the first
// counterexample otherwise; exceptions count as failures, never as skips.
void criterion(int num, const char* name, const std::function<std::string()>& body) {
  auto start = std::chrono::steady_clock::now();
  std::string note;
  try {
    note = body();
  } catch (const std::exception& e) {
    note = std::string("exception: ") + e.what();
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (note.empty()) {
    std::printf("PASS %2d  %s  [%.1fs]\n", num, name, secs);
  } else {
    std::printf("FAIL %2d  %s  [%.1fs] — %s\n", num, name, secs, note.c_str());
    ++g_failures;
  }
  std::fflush(stdout);
}

// Runs one body per fan name concurrently (each thread builds its own fan)
// and reports the first failure in list order.
std::string per_fan(const std::vector<std::string>& names,
                    const std::function<std::string(const std::string&)>& body) {
  std::vector<std::string> notes(names.size());
  std::vector<std::thread> pool;
  for (size_t i = 0; i < names.size(); ++i)
    pool.emplace_back([&, i] {
      try {
        notes[i] = body(names[i]);
      } catch (const std::exception& e) {
        notes[i] = names[i] + ": exception: " + e.what();
      }
    });
  for (std::thread& t : pool) t.join();
  for (const std::string& n : notes)
    if (!n.empty()) return n;
  return "";
}

std::string first_fail_detail(const nlohmann::json& report) {
  for (const auto& c : report.at("checks"))
    if (c.at("status") == "fail") return c.value("detail", std::string(c.at("name")));
  return "a check failed without detail";
}

// Mirrors the randomized presentations used by the module tests: generators
// anywhere in a small box, relation columns shifted into the dual cone.
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
    const int base = static_cast<int>(rng() % ng);
    LVec cd = gens[base];
    for (int k = 0; k < d; ++k) cd = add(cd, scale(static_cast<long long>(rng() % 3), dual[k]));
    rels.col_deg.push_back(cd);
    rels.set(base, j, 1, sub(cd, gens[base]));
    for (int i = 0; i < ng; ++i) {
      if (i == base) continue;
      LVec diff = sub(cd, gens[i]);
      if (fan.dual_member(cone, diff) && rng() % 4 != 0) {
        long long c = static_cast<long long>(rng() % 5) - 2;
        if (c == 0) c = 1;
        rels.set(i, j, c, diff);
      }
    }
  }
  return make_module(fan, cone, Flavor::A, std::move(gens), std::move(rels));
}

Morphism random_free_morphism_b(const Fan& fan, int cone, std::mt19937_64& rng) {
  const int d = fan.dim(cone);
  const int nr = 1 + static_cast<int>(rng() % 4);
  const int nc = 1 + static_cast<int>(rng() % 4);
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

SuiteResult run(const Fan& fan, const std::string& suite,
                std::optional<EquivariantLineBundle> bundle = std::nullopt, int jobs = g_jobs) {
  SuiteJob job;
  job.fan = &fan;
  job.suite = suite;
  job.bundle = std::move(bundle);
  job.jobs = jobs;
  return run_suite(job);
}

// --- criteria -----------------------------------------------------------

std::string hom_identity() {
  return per_fan(kFans, [](const std::string& name) -> std::string {
    Fan fan = builtin_fan(name);
    const int n = fan.rank();
    std::vector<LVec> window = box(n, -2, 2);
    std::vector<long long> first_ray(fan.num_rays(), 0);
    first_ray[0] = 1;
    std::vector<Sheaf> targets = {
        structure_sheaf(fan, Flavor::A),
        to_sheaf(canonical_bundle(fan), Flavor::A),
        to_sheaf(line_bundle(fan, first_ray), Flavor::A),
        standard_open(fan, Flavor::A, fan.max_cones()[0], LVec(n, 1)),
        standard_point(fan, Flavor::A, fan.num_cones() > 1 ? 1 : 0, zero_vec(n)),
    };
    for (size_t g = 0; g < targets.size(); ++g)
      for (int sigma = 0; sigma < fan.num_cones(); ++sigma)
        for (const LVec& m : window) {
          Sheaf open = standard_open(fan, Flavor::A, sigma, m);
          for (const LVec& s : window) {
            int have = hom_pieces(open, targets[g], s);
            int want = targets[g].piece_dim(sigma, add(m, s));
            if (have != want)
              return name + ": Hom from the open over cone " + std::to_string(sigma) +
                     " twist " + str(m) + " into target " + std::to_string(g) + " at " + str(s) +
                     " is " + std::to_string(have) + ", stalk piece is " + std::to_string(want);
          }
        }
    return "";
  });
}

std::string regrade_fidelity() {
  return per_fan(kFans, [](const std::string& name) -> std::string {
    Fan fan = builtin_fan(name);
    std::mt19937_64 rng(11);
    std::vector<LVec> window = box(fan.rank(), -2, 2);
    std::map<int, Module> prev_on_cone;
    for (int i = 0; i < 20; ++i) {
      int cone = fan.max_cones()[i % fan.max_cones().size()];
      Module x = random_module_a(fan, cone, rng);
      Module xb = delta_extension(x);
      for (const LVec& m : window)
        if (piece_dim_at_M(x, m) != piece_dim(xb, fan.b_degree(cone, m)))
          return name + ": piece mismatch after regrading at cone " + std::to_string(cone) +
                 ", degree " + str(m) + " (module " + std::to_string(i) + ")";
      auto it = prev_on_cone.find(cone);
      if (it != prev_on_cone.end()) {
        int direct = module_hom_dim(it->second, x, zero_vec(fan.rank()));
        int regraded = module_hom_dim(delta_extension(it->second), xb, zero_vec(fan.dim(cone)));
        if (direct != regraded)
          return name + ": Hom dimension changed under regrading at cone " +
                 std::to_string(cone) + " (module " + std::to_string(i) + "): " +
                 std::to_string(direct) + " vs " + std::to_string(regraded);
      }
      prev_on_cone.insert_or_assign(cone, std::move(x));
    }
    return "";
  });
}

std::string ball_acyclicity() {
  for (const std::string& name : kFans) {
    Fan fan = builtin_fan(name);
    for (int sigma = 0; sigma < fan.num_cones(); ++sigma)
      for (int xi = 0; xi < fan.num_cones(); ++xi) {
        if (xi == sigma || !fan.is_face(xi, sigma)) continue;
        if (!is_exact(interval_cell_complex(fan, xi, sigma)))
          return name + ": interval [" + std::to_string(xi) + ", " + std::to_string(sigma) +
                 "] is not exact";
      }
  }
  return "";
}

std::string koszul_on_generators() {
  return per_fan(kFans, [](const std::string& name) -> std::string {
    Fan fan = builtin_fan(name);
    SuiteResult r = run(fan, "koszul-selfcheck", std::nullopt, 2);
    return r.passed ? "" : name + ": " + first_fail_detail(r.report);
  });
}

std::string hom_matching() {
  return per_fan(kFans, [](const std::string& name) -> std::string {
    Fan fan = builtin_fan(name);
    const int n = fan.rank();
    std::vector<LVec> window = box(n, -2, 2);
    for (int tau = 0; tau < fan.num_cones(); ++tau) {
      Module unit = free_module(fan, tau, Flavor::A, {zero_vec(n)});
      for (int xi = 0; xi < fan.num_cones(); ++xi)
        for (const LVec& m : window)
          for (const LVec& nn : window) {
            int direct = hom_pieces(standard_open(fan, Flavor::A, tau, m),
                                    standard_point(fan, Flavor::A, xi, nn), zero_vec(n));
            int dualized =
                cosheaf_hom_dim(sheaf_dual(standard_point(fan, Flavor::A, tau, neg(m))),
                                sheaf_dual(standard_open(fan, Flavor::A, xi, neg(nn))),
                                zero_vec(n));
            int expect = tau == xi ? piece_dim_at_M(unit, sub(m, nn)) : 0;
            if (direct != expect || dualized != expect)
              return name + ": cones (" + std::to_string(tau) + "," + std::to_string(xi) +
                     "), twists " + str(m) + "," + str(nn) + ": direct " +
                     std::to_string(direct) + ", dualized " + std::to_string(dualized) +
                     ", expected " + std::to_string(expect);
          }
    }
    return "";
  });
}

std::string complete_acyclicity() {
  std::string note = per_fan(kComplete, [](const std::string& name) -> std::string {
    Fan fan = builtin_fan(name);
    SuiteResult r = run(fan, "complete-acyclicity", std::nullopt, 2);
    return r.passed ? "" : name + ": " + first_fail_detail(r.report);
  });
  if (!note.empty()) return note;
  Fan a2 = builtin_fan("a2");
  try {
    run(a2, "complete-acyclicity");
    return "a2: the suite ran on a non-complete fan";
  } catch (const Error& e) {
    if (e.code() != ErrCode::FanNotComplete)
      return std::string("a2: wrong error kind: ") + e.what();
  }
  return "";
}

std::string affine_plane_sequence() {
  Fan a2 = builtin_fan("a2");
  int top = a2.cone_id({0, 1});
  CousinComplex c = cousin_complex(to_sheaf(canonical_bundle(a2), Flavor::A));
  for (const LVec& m : box(2, -2, 2)) {
    EvaluatedComplex ec = evaluate_cousin(c, top, m, true);
    if (!is_exact(ec)) return "four-term complex not exact at " + str(m);
    if (m == LVec{0, 0} && ec.dims != std::vector<int>{0, 1, 2, 1})
      return "dimensions at (0,0) are not (0,1,2,1)";
    if (m == LVec{1, 1} && ec.dims != std::vector<int>{1, 1, 0, 0})
      return "dimensions at (1,1) are not (1,1,0,0)";
  }
  return "";
}

// Serre inputs: the five twists on the line, the trivial bundle elsewhere.
std::vector<std::pair<std::string, std::vector<long long>>> serre_inputs() {
  std::vector<std::pair<std::string, std::vector<long long>>> out;
  for (long long k = -2; k <= 2; ++k) out.emplace_back("p1", std::vector<long long>{k, 0});
  out.emplace_back("p2", std::vector<long long>(3, 0));
  out.emplace_back("p1xp1", std::vector<long long>(4, 0));
  out.emplace_back("hirzebruch1", std::vector<long long>(4, 0));
  return out;
}

std::string serre_checks() {
  for (const auto& [name, coeffs] : serre_inputs()) {
    Fan fan = builtin_fan(name);
    EquivariantLineBundle l = line_bundle(fan, coeffs);
    std::vector<LVec> refs = l.character;
    refs.push_back(zero_vec(fan.rank()));
    SerreReport rep = serre_duality_check(l, degree_window(refs, fan.rank(), 2));
    for (const CheckItem& c : rep.checks)
      if (!c.passed)
        return name + " divisor " + str(coeffs) + ": " + c.name +
               ": " + c.detail;
  }
  return "";
}

std::string cousin_checks() {
  for (const auto& [name, coeffs] : serre_inputs()) {
    Fan fan = builtin_fan(name);
    SuiteResult r = run(fan, "cousin-check", line_bundle(fan, coeffs));
    if (!r.passed)
      return name + " divisor " + str(coeffs) + ": " +
             first_fail_detail(r.report);
  }
  return "";
}

std::string syzygy_oracle() {
  Fan a2 = builtin_fan("a2");
  Fan a3 = Fan::build(3, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {{0, 1, 2}});
  std::mt19937_64 rng(2024);
  struct Site {
    const Fan* fan;
    int cone;
  };
  std::vector<Site> sites = {{&a3, a3.cone_id({0, 1, 2})},
                             {&a2, a2.cone_id({0, 1})},
                             {&a2, a2.cone_id({0})}};
  for (int i = 0; i < 50; ++i) {
    const Site& site = sites[i % sites.size()];
    Morphism f = random_free_morphism_b(*site.fan, site.cone, rng);
    KernelResult kr = kernel_presentation(f);
    std::vector<LVec> degs;
    for (const LVec& d : f.mat.row_deg) degs.push_back(d);
    for (const LVec& d : f.mat.col_deg) degs.push_back(d);
    for (const LVec& x : degree_window(degs, site.fan->dim(site.cone), 2)) {
      QMat fm = evaluate(f, x);
      QMat im = evaluate(kr.incl, x);
      const int expected = fm.cols() - rank(fm);
      if (piece_dim(kr.ker, x) != expected)
        return "draw " + std::to_string(i) + ": kernel piece at " + str(x) + " is " +
               std::to_string(piece_dim(kr.ker, x)) + ", brute force gives " +
               std::to_string(expected);
      if (rank(im) != expected || !fm.mul(im).is_zero())
        return "draw " + std::to_string(i) + ": inclusion at " + str(x) +
               " is not a kernel isomorphism";
    }
  }
  return "";
}

std::string determinism_and_signs() {
  // Full-suite reports must serialize to identical bytes across runs and
  // worker counts.
  struct Probe {
    std::string fan;
    std::string suite;
    std::optional<std::vector<long long>> divisor;
  };
  for (const Probe& p : {Probe{"p1", "serre-check", std::vector<long long>{1, 0}},
                         Probe{"a2", "koszul-selfcheck", std::nullopt},
                         Probe{"p2", "cousin-check", std::nullopt}}) {
    Fan fan = builtin_fan(p.fan);
    std::optional<EquivariantLineBundle> l;
    if (p.divisor) l = line_bundle(fan, *p.divisor);
    std::string once = run(fan, p.suite, l, 1).report.dump(2);
    std::string again = run(fan, p.suite, l, g_jobs).report.dump(2);
    if (once != again) return p.fan + "/" + p.suite + ": reports differ between runs";
  }

  // A single flipped incidence sign must be caught when the boundary is
  // squared, with the offending cone named.
  Fan p2 = builtin_fan("p2");
  SignTable t = incidence_signs(p2);
  t.flip(4, 1);
  try {
    koszul_K(structure_sheaf(p2, Flavor::A), t);
    return "flipped sign not caught";
  } catch (const Error& e) {
    if (e.code() != ErrCode::SignIncoherence)
      return std::string("flipped sign raised the wrong error: ") + e.what();
    if (std::string(e.what()).find("cone") == std::string::npos)
      return "sign failure carries no localized counterexample";
  }
  return "";
}

}  // namespace

int main() {
  auto start = std::chrono::steady_clock::now();
  criterion(1, "projective Homs into sheaves equal stalk pieces", hom_identity);
  criterion(2, "regrading to ray coordinates preserves pieces and Homs", regrade_fidelity);
  criterion(3, "face interval complexes are exact", ball_acyclicity);
  criterion(4, "duality on generators concentrates with the dual piece function",
            koszul_on_generators);
  criterion(5, "Hom dimensions between generators match across duality", hom_matching);
  criterion(6, "augmented structure complex exact exactly on complete fans",
            complete_acyclicity);
  criterion(7, "affine plane Cousin sequence exact with pinned dimensions",
            affine_plane_sequence);
  criterion(8, "dualized line bundles concentrate to their canonical twist", serre_checks);
  criterion(9, "augmented Cousin complexes exact with orbit-sum supports", cousin_checks);
  criterion(10, "kernel presentations agree with brute-force ranks", syzygy_oracle);
  criterion(11, "reports byte-identical and flipped signs localized", determinism_and_signs);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d/11 criteria passed in %.1fs\n", 11 - g_failures, secs);
  return g_failures == 0 ? 0 : 1;
}
