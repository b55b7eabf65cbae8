#include "json_io.hpp"

#include <algorithm>

#include "error.hpp"

namespace torkos {

namespace {

using nlohmann::json;

const json& field(const json& j, const char* key, const std::string& what) {
  require(j.is_object(), ErrCode::Parse, what + ": expected a JSON object");
  auto it = j.find(key);
  require(it != j.end(), ErrCode::Parse, what + ": missing field \"" + key + "\"");
  return *it;
}

long long as_int(const json& j, const std::string& what) {
  require(j.is_number_integer(), ErrCode::Parse, what + ": expected an integer");
  return j.get<long long>();
}

std::vector<int> int_list(const json& j, const std::string& what) {
  require(j.is_array(), ErrCode::Parse, what + ": expected an array of integers");
  std::vector<int> out;
  for (const json& e : j) out.push_back(static_cast<int>(as_int(e, what)));
  return out;
}

Rat coeff_from_json(const json& j, const std::string& what) {
  if (j.is_number_integer()) return Rat(j.get<long long>());
  require(j.is_string(), ErrCode::Parse, what + ": coefficient must be an integer or \"p/q\"");
  try {
    return rat_from_string(j.get<std::string>());
  } catch (const std::exception& e) {
    fail(ErrCode::Parse, what + ": bad coefficient: " + e.what());
  }
}

// Sparse homogeneous entries shared by relation blocks and restriction
// matrices: [{"row": i, "col": j, "coeff": c, "degree": [..]},...].
HomMat entries_from_json(const json& j, std::vector<LVec> row_deg,
                         const std::vector<LVec>* col_deg, const std::string& what) {
  require(j.is_array(), ErrCode::Parse, what + ": expected an array of entries");
  HomMat mat;
  mat.row_deg = std::move(row_deg);
  if (col_deg) mat.col_deg = *col_deg;
  for (const json& e : j) {
    int row = static_cast<int>(as_int(field(e, "row", what), what));
    int col = static_cast<int>(as_int(field(e, "col", what), what));
    Rat coeff = coeff_from_json(field(e, "coeff", what), what);
    LVec deg = degree_from_json(field(e, "degree", what), what);
    require(row >= 0 && row < mat.rows(), ErrCode::Parse, what + ": entry row out of range");
    require(col >= 0, ErrCode::Parse, what + ": negative entry column");
    if (!col_deg) {
      // Relation columns: grow as needed and fix each column's degree from
      // its first entry (the degree law pins the rest).
      while (mat.cols() <= col) mat.col_deg.push_back({});
      if (mat.col_deg[col].empty()) mat.col_deg[col] = add(mat.row_deg[row], deg);
    } else {
      require(col < mat.cols(), ErrCode::Parse, what + ": entry column out of range");
    }
    require(mat.entry(row, col) == nullptr, ErrCode::Parse, what + ": duplicate entry");
    mat.set(row, col, std::move(coeff), std::move(deg));
  }
  if (!col_deg)
    for (int c = 0; c < mat.cols(); ++c)
      require(!mat.col_deg[c].empty(), ErrCode::Parse,
              what + ": relation column " + std::to_string(c) + " has no entries");
  return mat;
}

json entries_to_json(const HomMat& mat) {
  json out = json::array();
  for (const auto& [key, e] : mat.entries) {
    json row;
    row["row"] = key.first;
    row["col"] = key.second;
    row["coeff"] = rat_to_string(e.coeff);
    row["degree"] = degree_json(e.deg);
    out.push_back(std::move(row));
  }
  return out;
}

std::string cone_key(const Fan& fan, int id) {
  std::string out;
  for (int r : fan.cone(id).rays) {
    if (!out.empty()) out += ",";
    out += std::to_string(r);
  }
  return out;
}

int cone_from_key(const Fan& fan, const std::string& key) {
  std::vector<int> rays;
  size_t pos = 0;
  while (pos < key.size()) {
    size_t next = key.find(',', pos);
    if (next == std::string::npos) next = key.size();
    try {
      rays.push_back(std::stoi(key.substr(pos, next - pos)));
    } catch (const std::exception&) {
      fail(ErrCode::Parse, "sheaf: bad cone key \"" + key + "\"");
    }
    pos = next + 1;
  }
  std::sort(rays.begin(), rays.end());
  int id = fan.cone_id(rays);
  require(id >= 0, ErrCode::Parse, "sheaf: cone key \"" + key + "\" names no cone of the fan");
  return id;
}

Flavor flavor_from_json(const json& j, const std::string& what) {
  require(j.is_string(), ErrCode::Parse, what + ": flavor must be \"A\" or \"B\"");
  std::string s = j.get<std::string>();
  if (s == "A") return Flavor::A;
  if (s == "B") return Flavor::B;
  fail(ErrCode::Parse, what + ": flavor must be \"A\" or \"B\"");
}

Module module_from_json_at(const Fan& fan, const json& j, int cone, const std::string& what) {
  Flavor flavor = flavor_from_json(field(j, "flavor", what), what);
  const json& jg = field(j, "gens", what);
  require(jg.is_array(), ErrCode::Parse, what + ": gens must be an array of degrees");
  std::vector<LVec> gens;
  for (const json& g : jg) gens.push_back(degree_from_json(g, what + " generator"));
  HomMat rels;
  rels.row_deg = gens;
  if (j.contains("relations"))
    rels = entries_from_json(j["relations"], gens, nullptr, what + " relations");
  return make_module(fan, cone, flavor, std::move(gens), std::move(rels));
}

}  // namespace

json parse_json_text(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  require(!j.is_discarded(), ErrCode::Parse, what + ": not valid JSON");
  return j;
}

Fan fan_from_json(const json& j) {
  const std::string what = "fan";
  int rank = static_cast<int>(as_int(field(j, "rank", what), what));
  const json& jr = field(j, "rays", what);
  require(jr.is_array(), ErrCode::Parse, "fan: rays must be an array");
  std::vector<LVec> rays;
  for (const json& r : jr) rays.push_back(degree_from_json(r, "fan ray"));
  const json& jm = field(j, "max_cones", what);
  require(jm.is_array(), ErrCode::Parse, "fan: max_cones must be an array");
  std::vector<std::vector<int>> max_cones;
  for (const json& c : jm) max_cones.push_back(int_list(c, "fan max cone"));
  int orientation = 1;
  if (j.contains("orientation")) orientation = static_cast<int>(as_int(j["orientation"], what));
  return Fan::build(rank, std::move(rays), std::move(max_cones), orientation);
}

json fan_to_json(const Fan& fan) {
  json out;
  out["rank"] = fan.rank();
  json rays = json::array();
  for (int i = 0; i < fan.num_rays(); ++i) rays.push_back(degree_json(fan.ray(i)));
  out["rays"] = std::move(rays);
  json tops = json::array();
  for (int c : fan.max_cones()) tops.push_back(fan.cone(c).rays);
  out["max_cones"] = std::move(tops);
  out["orientation"] = fan.orientation();
  return out;
}

Module module_from_json(const Fan& fan, const json& j) {
  std::vector<int> rays = int_list(field(j, "cone", "module"), "module cone");
  std::sort(rays.begin(), rays.end());
  int cone = fan.cone_id(rays);
  require(cone >= 0, ErrCode::Parse, "module: cone names no cone of the fan");
  return module_from_json_at(fan, j, cone, "module");
}

json module_to_json(const Module& m) {
  json out;
  out["cone"] = m.fan->cone(m.cone).rays;
  out["flavor"] = m.flavor == Flavor::A ? "A" : "B";
  json gens = json::array();
  for (const LVec& g : m.gens) gens.push_back(degree_json(g));
  out["gens"] = std::move(gens);
  out["relations"] = entries_to_json(m.rels);
  return out;
}

Sheaf sheaf_from_json(const Fan& fan, const json& j) {
  const json& js = field(j, "stalks", "sheaf");
  require(js.is_object(), ErrCode::Parse, "sheaf: stalks must map cone keys to modules");
  Flavor flavor = Flavor::A;
  if (j.contains("flavor")) flavor = flavor_from_json(j["flavor"], "sheaf");
  std::vector<Module> stalks;
  std::vector<bool> seen(fan.num_cones(), false);
  for (int c = 0; c < fan.num_cones(); ++c) stalks.push_back(zero_module(fan, c, flavor));
  bool first = !j.contains("flavor");
  for (auto it = js.begin(); it != js.end(); ++it) {
    int cone = cone_from_key(fan, it.key());
    require(!seen[cone], ErrCode::Parse, "sheaf: cone key \"" + it.key() + "\" repeated");
    seen[cone] = true;
    if (it.value().contains("cone")) {
      std::vector<int> rays = int_list(it.value()["cone"], "sheaf stalk cone");
      std::sort(rays.begin(), rays.end());
      require(fan.cone_id(rays) == cone, ErrCode::Parse,
              "sheaf: stalk under key \"" + it.key() + "\" names a different cone");
    }
    Module m = module_from_json_at(fan, it.value(), cone, "sheaf stalk \"" + it.key() + "\"");
    if (first) {
      flavor = m.flavor;
      first = false;
      for (int c = 0; c < fan.num_cones(); ++c)
        if (!seen[c]) stalks[c] = zero_module(fan, c, flavor);
    }
    require(m.flavor == flavor, ErrCode::Parse, "sheaf: stalks mix grading flavors");
    stalks[cone] = std::move(m);
  }
  std::map<std::pair<int, int>, Morphism> facet;
  if (j.contains("restrictions")) {
    const json& jr = j["restrictions"];
    require(jr.is_array(), ErrCode::Parse, "sheaf: restrictions must be an array");
    for (const json& r : jr) {
      std::vector<int> fr = int_list(field(r, "from", "restriction"), "restriction from");
      std::vector<int> to = int_list(field(r, "to", "restriction"), "restriction to");
      std::sort(fr.begin(), fr.end());
      std::sort(to.begin(), to.end());
      int sigma = fan.cone_id(fr);
      int tau = fan.cone_id(to);
      require(sigma >= 0 && tau >= 0, ErrCode::Parse, "restriction: endpoint names no cone");
      std::vector<int> fs = fan.facets(sigma);
      require(std::find(fs.begin(), fs.end(), tau) != fs.end(), ErrCode::NotAFacet,
              "restriction: \"to\" must be a facet of \"from\"");
      require(!facet.count({sigma, tau}), ErrCode::Parse, "restriction: facet pair repeated");
      HomMat mat = entries_from_json(field(r, "matrix", "restriction"), stalks[tau].gens,
                                     &stalks[sigma].gens, "restriction matrix");
      facet.emplace(std::make_pair(sigma, tau),
                    make_morphism(stalks[sigma], stalks[tau], std::move(mat),
                                  zero_vec(stalks[tau].deg_len())));
    }
  }
  return make_sheaf(fan, flavor, std::move(stalks), std::move(facet));
}

json sheaf_to_json(const Sheaf& f) {
  const Fan& fan = *f.fan;
  json out;
  out["flavor"] = f.flavor == Flavor::A ? "A" : "B";
  json stalks = json::object();
  for (int c = 0; c < fan.num_cones(); ++c)
    if (!is_zero_module(f.stalks[c])) stalks[cone_key(fan, c)] = module_to_json(f.stalks[c]);
  out["stalks"] = std::move(stalks);
  json res = json::array();
  for (int sigma = 0; sigma < fan.num_cones(); ++sigma)
    for (int tau : fan.facets(sigma)) {
      auto it = f.res.find({sigma, tau});
      if (it == f.res.end() || it->second.mat.entries.empty()) continue;
      json r;
      r["from"] = fan.cone(sigma).rays;
      r["to"] = fan.cone(tau).rays;
      r["matrix"] = entries_to_json(it->second.mat);
      res.push_back(std::move(r));
    }
  out["restrictions"] = std::move(res);
  return out;
}

bool is_bundle_json(const json& j) { return j.is_object() && j.contains("divisor"); }

EquivariantLineBundle bundle_from_json(const Fan& fan, const json& j) {
  const json& jd = field(j, "divisor", "bundle");
  require(jd.is_array(), ErrCode::Parse, "bundle: divisor must list one integer per ray");
  std::vector<long long> coeffs;
  for (const json& c : jd) coeffs.push_back(as_int(c, "bundle divisor"));
  EquivariantLineBundle l = line_bundle(fan, coeffs);
  if (j.contains("twist")) l = twisted_bundle(l, degree_from_json(j["twist"], "bundle twist"));
  return l;
}

json bundle_to_json(const EquivariantLineBundle& l) {
  json out;
  out["divisor"] = l.coeffs;
  return out;
}

LVec degree_from_json(const json& j, const std::string& what) {
  require(j.is_array(), ErrCode::Parse, what + ": expected an array of integers");
  LVec out;
  for (const json& e : j) out.push_back(as_int(e, what));
  return out;
}

json degree_json(const LVec& v) {
  json out = json::array();
  for (long long x : v) out.push_back(x);
  return out;
}

json evaluated_json(const EvaluatedComplex& ec) {
  json out;
  out["lo"] = ec.lo;
  out["dims"] = ec.dims;
  json maps = json::array();
  json ranks = json::array();
  for (const QMat& m : ec.mats) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (int j2 = 0; j2 < m.cols(); ++j2) row.push_back(rat_to_string(m.at(i, j2)));
      rows.push_back(std::move(row));
    }
    maps.push_back(std::move(rows));
    ranks.push_back(rank(m));
  }
  out["maps"] = std::move(maps);
  out["map_ranks"] = std::move(ranks);
  try {
    out["cohomology"] = cohomology_dims(ec);
  } catch (const Error&) {
    out["composite_nonzero"] = true;
  }
  return out;
}

}  // namespace torkos
