#include "suites.hpp"

#include <atomic>
#include <functional>
#include <mutex>
#include <thread>

#include "error.hpp"

namespace torkos {

namespace {

using nlohmann::json;

std::string deg_str(const LVec& v) {
  std::string out = "(";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out + ")";
}

// Runs fn over 0..n-1, work-stealing across `jobs` threads. Results must be
// written into per-index slots by the callers, so the schedule never shows.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex mu;
  std::exception_ptr first;
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      while (true) {
        int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(mu);
          if (!first) first = std::current_exception();
        }
      }
    });
  for (std::thread& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

// The fan lazily caches basis completions; fill them before fanning out so
// worker threads only read.
void warm_fan(const Fan& fan) {
  for (int c = 0; c < fan.num_cones(); ++c) fan.completion(c);
}

// First counterexample of one check, with the grid position that found it
// so "first" means grid order, not thread arrival order.
struct SiteFail {
  long long order = -1;
  std::string detail;
  json counterexample;
  bool failed() const { return order >= 0; }
  void take(const SiteFail& other) {
    if (other.failed() && (!failed() || other.order < order)) *this = other;
  }
};

json check_json(const std::string& name, const SiteFail& f) {
  json out;
  out["name"] = name;
  out["status"] = f.failed() ? "fail" : "pass";
  if (f.failed()) {
    out["detail"] = f.detail;
    out["counterexample"] = f.counterexample;
  }
  return out;
}

json pass_check(const std::string& name) { return check_json(name, SiteFail{}); }

json site_json(int cone, const LVec& m, const EvaluatedComplex& ec) {
  json out;
  out["cone"] = cone;
  out["degree"] = degree_json(m);
  out["ranks"] = evaluated_json(ec);
  return out;
}

std::vector<LVec> job_window(const SuiteJob& job) {
  if (!job.window.empty()) return job.window;
  const Fan& fan = *job.fan;
  std::vector<LVec> refs = {zero_vec(fan.rank())};
  if (job.bundle) {
    for (const LVec& c : job.bundle->character) refs.push_back(c);
    if (job.suite == "serre-check" || job.suite == "cousin-check")
      for (const LVec& c : tensor_bundle(canonical_bundle(fan), *job.bundle).character)
        refs.push_back(c);
  }
  if (job.sheaf && job.sheaf->flavor == Flavor::A)
    for (const Module& s : job.sheaf->stalks) {
      for (const LVec& g : s.gens) refs.push_back(g);
      for (const LVec& c : s.rels.col_deg) refs.push_back(c);
    }
  if (job.chambers) return chamber_representatives(fan, refs, 2);
  return degree_window(refs, fan.rank(), 2);
}

std::string flavor_name(Flavor fl) { return fl == Flavor::A ? "A" : "B"; }

// --- validate ---------------------------------------------------------

SuiteResult suite_validate(const SuiteJob& job, json report) {
  const Fan& fan = *job.fan;
  json checks = json::array();
  checks.push_back(pass_check("fan-valid"));
  json data;
  data["rank"] = fan.rank();
  data["num_rays"] = fan.num_rays();
  data["num_cones"] = fan.num_cones();
  data["smooth"] = true;  // construction rejects non-smooth cones
  data["complete"] = fan.complete();
  json tops = json::array();
  for (int c : fan.max_cones()) tops.push_back(fan.cone(c).rays);
  data["max_cones"] = std::move(tops);
  if (job.sheaf) {
    checks.push_back(pass_check("sheaf-valid"));
    data["coherent"] = is_coherent(*job.sheaf);
    json ranks = json::array();
    for (const Module& s : job.sheaf->stalks) ranks.push_back(s.num_gens());
    data["stalk_gens"] = std::move(ranks);
  }
  if (job.bundle) {
    checks.push_back(pass_check("bundle-valid"));
    json chars = json::array();
    for (const LVec& c : job.bundle->character) chars.push_back(degree_json(c));
    data["characters"] = std::move(chars);
  }
  report["checks"] = std::move(checks);
  report["data"] = std::move(data);
  return SuiteResult{std::move(report), true};
}

// --- koszul-selfcheck --------------------------------------------------

// Cohomology of `cx` must sit entirely in degree `spot` and equal the
// costalk dimensions of `expect` there, at every cone and window degree.
SiteFail concentrated(const CoSheafComplex& cx, const CoSheaf& expect, int spot,
                      const std::vector<LVec>& window, const std::string& who,
                      long long order_base) {
  const Fan& fan = *expect.under.fan;
  SiteFail fail;
  long long order = order_base;
  for (int c = 0; c < fan.num_cones(); ++c)
    for (const LVec& m : window) {
      ++order;
      EvaluatedComplex ec = evaluate_complex(cx, c, m);
      std::vector<int> h = cohomology_dims(ec);
      int want = expect.costalk_dim(c, m);
      int hi = ec.lo + static_cast<int>(h.size()) - 1;
      for (int s = std::min(ec.lo, spot); s <= std::max(hi, spot); ++s) {
        int have = s >= ec.lo && s <= hi ? h[s - ec.lo] : 0;
        int need = s == spot ? want : 0;
        if (have != need) {
          fail.order = order;
          fail.detail = who + ": cohomology " + std::to_string(have) + " in degree " +
                        std::to_string(s) + " at cone " + std::to_string(c) + ", degree " +
                        deg_str(m) + ", expected " + std::to_string(need);
          fail.counterexample = site_json(c, m, ec);
          return fail;
        }
      }
    }
  return fail;
}

SuiteResult suite_koszul_selfcheck(const SuiteJob& job, json report,
                                   const std::vector<LVec>& window) {
  const Fan& fan = *job.fan;
  struct Cell {
    Flavor fl;
    int sigma;
    LVec twist;
  };
  std::vector<Cell> grid;
  for (Flavor fl : {Flavor::A, Flavor::B})
    for (int s = 0; s < fan.num_cones(); ++s)
      for (const LVec& t : window) grid.push_back({fl, s, t});

  const long long stride = 2LL * fan.num_cones() * window.size() + 2;
  std::vector<SiteFail> open_fail(grid.size()), point_fail(grid.size());
  warm_fan(fan);
  parallel_for(static_cast<int>(grid.size()), job.jobs, [&](int i) {
    const Cell& cell = grid[i];
    const std::string who = "open over cone " + std::to_string(cell.sigma) + ", twist " +
                            deg_str(cell.twist) + ", flavor " + flavor_name(cell.fl);
    KoszulResult ku = koszul_K(standard_open(fan, cell.fl, cell.sigma, cell.twist));
    open_fail[i] =
        concentrated(ku.cx, sheaf_dual(standard_point(fan, cell.fl, cell.sigma, neg(cell.twist))),
                     -fan.dim(cell.sigma), window, who, i * stride);
    KoszulResult kp = koszul_K(standard_point(fan, cell.fl, cell.sigma, cell.twist));
    point_fail[i] =
        concentrated(kp.cx, sheaf_dual(standard_open(fan, cell.fl, cell.sigma, neg(cell.twist))),
                     -fan.dim(cell.sigma), window,
                     "point at cone " + std::to_string(cell.sigma) + ", twist " +
                         deg_str(cell.twist) + ", flavor " + flavor_name(cell.fl),
                     i * stride);
  });
  SiteFail open_first, point_first;
  for (size_t i = 0; i < grid.size(); ++i) {
    open_first.take(open_fail[i]);
    point_first.take(point_fail[i]);
  }
  json checks = json::array();
  checks.push_back(check_json("open-to-dual-point", open_first));
  checks.push_back(check_json("point-to-dual-open", point_first));
  report["checks"] = std::move(checks);
  return SuiteResult{std::move(report), !open_first.failed() && !point_first.failed()};
}

// --- complete-acyclicity ------------------------------------------------

SuiteResult suite_complete_acyclicity(const SuiteJob& job, json report,
                                      const std::vector<LVec>& window) {
  const Fan& fan = *job.fan;
  json checks = json::array();
  bool all = true;
  warm_fan(fan);
  for (Flavor fl : {Flavor::A, Flavor::B}) {
    AugmentedKoszul aug = augmented_K_structure(fan, fl);
    struct Cell {
      int cone;
      LVec m;
    };
    std::vector<Cell> grid;
    for (int c = 0; c < fan.num_cones(); ++c)
      for (const LVec& m : window) grid.push_back({c, m});
    std::vector<SiteFail> fails(grid.size());
    parallel_for(static_cast<int>(grid.size()), job.jobs, [&](int i) {
      EvaluatedComplex ec = evaluate_augmented(aug, grid[i].cone, grid[i].m);
      if (!is_exact(ec)) {
        fails[i].order = i;
        fails[i].detail = "augmented structure complex not exact at cone " +
                          std::to_string(grid[i].cone) + ", degree " + deg_str(grid[i].m);
        fails[i].counterexample = site_json(grid[i].cone, grid[i].m, ec);
      }
    });
    SiteFail first;
    for (const SiteFail& f : fails) first.take(f);
    all = all && !first.failed();
    checks.push_back(check_json("augmented-exact-" + flavor_name(fl), first));
  }
  report["checks"] = std::move(checks);
  return SuiteResult{std::move(report), all};
}

// --- serre-check --------------------------------------------------------

SuiteResult suite_serre(const SuiteJob& job, json report, const std::vector<LVec>& window) {
  require(!job.sheaf, ErrCode::Unsupported,
          "serre-check: needs a line-bundle description, not a raw sheaf");
  const Fan& fan = *job.fan;
  EquivariantLineBundle l =
      job.bundle ? *job.bundle : line_bundle(fan, std::vector<long long>(fan.num_rays(), 0));
  SerreReport rep = serre_duality_check(l, window);
  json checks = json::array();
  for (const CheckItem& c : rep.checks) {
    SiteFail f;
    if (!c.passed) {
      f.order = 0;
      f.detail = c.detail;
      if (c.cone >= 0) {
        // Rebuild the complex the check was reading at the failing site.
        if (c.name == "concentration" || c.name == "twist-compatibility") {
          GeometricComplex g = direct_image_complex(koszul_K(to_sheaf(l, Flavor::A)).cx);
          f.counterexample = site_json(c.cone, c.degree, evaluate_geometric(g, c.cone, c.degree));
        } else {
          CousinComplex cc =
              cousin_complex(to_sheaf(tensor_bundle(canonical_bundle(fan), l), Flavor::A));
          f.counterexample =
              site_json(c.cone, c.degree, evaluate_cousin(cc, c.cone, c.degree, true));
        }
      } else {
        f.counterexample = json{{"detail", c.detail}};
      }
    }
    checks.push_back(check_json(c.name, f));
  }
  report["checks"] = std::move(checks);
  return SuiteResult{std::move(report), rep.passed()};
}

// --- cousin-check -------------------------------------------------------

// The orbit-sum formula for the Cousin term, computed straight from the
// sheaf's stalk generators: a generator w over tau contributes in degree
// dim tau exactly when every ray pairing of m - w is negative.
int orbit_sum_dim(const Sheaf& g, int chart, int i, const LVec& m) {
  const Fan& fan = *g.fan;
  int total = 0;
  for (int tau : fan.cones_of_dim(i)) {
    if (!fan.is_face(tau, chart)) continue;
    for (const LVec& w : g.stalks[tau].gens) {
      LVec p = g.flavor == Flavor::A ? fan.b_degree(tau, sub(m, w))
                                     : sub(fan.b_degree(tau, m), w);
      bool neg = true;
      for (long long x : p) neg = neg && x <= -1;
      if (neg) ++total;
    }
  }
  return total;
}

SuiteResult suite_cousin(const SuiteJob& job, json report, const std::vector<LVec>& window) {
  const Fan& fan = *job.fan;
  Sheaf g = job.sheaf ? *job.sheaf
                      : to_sheaf(tensor_bundle(canonical_bundle(fan),
                                               job.bundle ? *job.bundle
                                                          : line_bundle(fan, std::vector<long long>(
                                                                                 fan.num_rays(), 0))),
                                 Flavor::A);
  CousinComplex cc = cousin_complex(g);
  struct Cell {
    int chart;
    LVec m;
  };
  std::vector<Cell> grid;
  for (int chart : fan.max_cones())
    for (const LVec& m : window) grid.push_back({chart, m});
  std::vector<SiteFail> exact_fail(grid.size()), orbit_fail(grid.size());
  warm_fan(fan);
  parallel_for(static_cast<int>(grid.size()), job.jobs, [&](int i) {
    const Cell& cell = grid[i];
    EvaluatedComplex ec = evaluate_cousin(cc, cell.chart, cell.m, true);
    if (!is_exact(ec)) {
      exact_fail[i].order = i;
      exact_fail[i].detail = "augmented Cousin complex not exact on chart " +
                             std::to_string(cell.chart) + ", degree " + deg_str(cell.m);
      exact_fail[i].counterexample = site_json(cell.chart, cell.m, ec);
    }
    for (int d = 0; d <= fan.rank(); ++d) {
      int have = geo_term_dim(cc.cx, d, cell.chart, cell.m);
      int want = orbit_sum_dim(g, cell.chart, d, cell.m);
      if (have != want && !orbit_fail[i].failed()) {
        orbit_fail[i].order = i;
        orbit_fail[i].detail = "Cousin term " + std::to_string(d) + " has dimension " +
                               std::to_string(have) + " on chart " + std::to_string(cell.chart) +
                               ", degree " + deg_str(cell.m) + "; the orbit sum gives " +
                               std::to_string(want);
        orbit_fail[i].counterexample = site_json(cell.chart, cell.m, ec);
        orbit_fail[i].counterexample["term"] = d;
      }
    }
  });
  SiteFail exact_first, orbit_first;
  for (size_t i = 0; i < grid.size(); ++i) {
    exact_first.take(exact_fail[i]);
    orbit_first.take(orbit_fail[i]);
  }
  json checks = json::array();
  checks.push_back(check_json("augmented-exactness", exact_first));
  checks.push_back(check_json("orbit-term-supports", orbit_first));
  report["checks"] = std::move(checks);
  return SuiteResult{std::move(report), !exact_first.failed() && !orbit_first.failed()};
}

// --- hom-table ----------------------------------------------------------

SuiteResult suite_hom_table(const SuiteJob& job, json report, const std::vector<LVec>& window) {
  const Fan& fan = *job.fan;
  std::vector<std::pair<std::string, Sheaf>> targets;
  targets.emplace_back("structure", structure_sheaf(fan, Flavor::A));
  targets.emplace_back("canonical", to_sheaf(canonical_bundle(fan), Flavor::A));
  targets.emplace_back("point",
                       standard_point(fan, Flavor::A, fan.max_cones()[0], zero_vec(fan.rank())));
  if (job.bundle) targets.emplace_back("bundle", to_sheaf(*job.bundle, Flavor::A));
  if (job.sheaf) targets.emplace_back("input", *job.sheaf);

  struct Cell {
    size_t target;
    int sigma;
    LVec twist;
  };
  std::vector<Cell> grid;
  for (size_t g = 0; g < targets.size(); ++g)
    for (int s = 0; s < fan.num_cones(); ++s)
      for (const LVec& t : window) grid.push_back({g, s, t});
  std::vector<SiteFail> fails(grid.size());
  warm_fan(fan);
  parallel_for(static_cast<int>(grid.size()), job.jobs, [&](int i) {
    const Cell& cell = grid[i];
    const Sheaf& g = targets[cell.target].second;
    Sheaf open = standard_open(fan, g.flavor, cell.sigma, cell.twist);
    long long order = i * static_cast<long long>(window.size());
    for (const LVec& m : window) {
      ++order;
      int have = hom_pieces(open, g, m);
      int want = g.piece_dim(cell.sigma, add(cell.twist, m));
      if (have != want) {
        fails[i].order = order;
        fails[i].detail = "Hom from the open over cone " + std::to_string(cell.sigma) +
                          ", twist " + deg_str(cell.twist) + ", into " +
                          targets[cell.target].first + " at degree " + deg_str(m) + " is " +
                          std::to_string(have) + ", the stalk piece is " + std::to_string(want);
        fails[i].counterexample =
            json{{"cone", cell.sigma}, {"degree", degree_json(m)},
                 {"ranks", json{{"hom", have}, {"stalk_piece", want}}}};
        return;
      }
    }
  });
  SiteFail first;
  for (const SiteFail& f : fails) first.take(f);

  // Pairwise Hom dimensions of the named objects across the window.
  json table = json::array();
  for (const auto& [la, ga] : targets)
    for (const auto& [lb, gb] : targets) {
      if (ga.flavor != gb.flavor) continue;
      json dims = json::array();
      for (const LVec& m : window) {
        int d = hom_pieces(ga, gb, m);
        if (d != 0) dims.push_back(json{{"degree", degree_json(m)}, {"dim", d}});
      }
      table.push_back(json{{"source", la}, {"target", lb}, {"dims", std::move(dims)}});
    }

  json checks = json::array();
  checks.push_back(check_json("projective-hom-identity", first));
  report["checks"] = std::move(checks);
  report["table"] = std::move(table);
  return SuiteResult{std::move(report), !first.failed()};
}

// --- commute-check ------------------------------------------------------

SuiteResult suite_commute(const SuiteJob& job, json report, const std::vector<LVec>& window) {
  const Fan& fan = *job.fan;
  Sheaf f = job.sheaf ? *job.sheaf
            : job.bundle ? to_sheaf(*job.bundle, Flavor::A)
                         : structure_sheaf(fan, Flavor::A);
  require(f.flavor == Flavor::A, ErrCode::Unsupported,
          "commute-check: input must carry the dual-cone grading");
  std::string msg = commute_square_check(f, window);
  SiteFail fail;
  if (!msg.empty()) {
    fail.order = 0;
    fail.detail = msg;
    fail.counterexample = json{{"detail", msg}};
  }
  json checks = json::array();
  checks.push_back(check_json("regrade-dual-commute", fail));
  report["checks"] = std::move(checks);
  return SuiteResult{std::move(report), !fail.failed()};
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "validate",     "koszul-selfcheck", "complete-acyclicity", "serre-check",
      "cousin-check", "hom-table",        "commute-check"};
  return names;
}

void attach_sheaf_json(SuiteJob& job, const nlohmann::json& desc) {
  if (is_bundle_json(desc))
    job.bundle = bundle_from_json(*job.fan, desc);
  else
    job.sheaf = sheaf_from_json(*job.fan, desc);
}

SuiteResult run_suite(const SuiteJob& job) {
  require(job.fan != nullptr, ErrCode::Internal, "run_suite: no fan");
  const std::vector<std::string>& names = suite_names();
  require(std::find(names.begin(), names.end(), job.suite) != names.end(), ErrCode::Parse,
          "run_suite: unknown suite \"" + job.suite + "\"");
  require(!(job.sheaf && job.bundle), ErrCode::Parse,
          "run_suite: at most one of sheaf and bundle");

  std::vector<LVec> window = job_window(job);
  json report;
  report["suite"] = job.suite;
  report["fan"] = fan_to_json(*job.fan);
  if (job.bundle)
    report["sheaf"] = bundle_to_json(*job.bundle);
  else if (job.sheaf)
    report["sheaf"] = sheaf_to_json(*job.sheaf);
  else
    report["sheaf"] = nullptr;
  json win = json::array();
  for (const LVec& m : window) win.push_back(degree_json(m));
  report["window"] = std::move(win);

  if (job.suite == "validate") return suite_validate(job, std::move(report));
  if (job.suite == "koszul-selfcheck")
    return suite_koszul_selfcheck(job, std::move(report), window);
  if (job.suite == "complete-acyclicity")
    return suite_complete_acyclicity(job, std::move(report), window);
  if (job.suite == "serre-check") return suite_serre(job, std::move(report), window);
  if (job.suite == "cousin-check") return suite_cousin(job, std::move(report), window);
  if (job.suite == "hom-table") return suite_hom_table(job, std::move(report), window);
  return suite_commute(job, std::move(report), window);
}

}  // namespace torkos
