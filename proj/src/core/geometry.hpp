#pragma once

#include "koszul.hpp"

namespace torkos {

// A torus-stable divisor, one coefficient per ray, carried together with the
// chart characters that trivialize its line bundle: the character of a cone
// pairs with each of the cone's rays to the negated coefficient there.
// Characters of nested cones then agree on the shared rays, so transition
// maps between chart modules are single characters with coefficient one.
struct EquivariantLineBundle {
  const Fan* fan = nullptr;
  std::vector<long long> coeffs;  // per ray
  std::vector<LVec> character;    // per cone id
};

EquivariantLineBundle line_bundle(const Fan& fan, const std::vector<long long>& coeffs);
// All coefficients -1: minus the sum of the ray divisors.
EquivariantLineBundle canonical_bundle(const Fan& fan);
EquivariantLineBundle tensor_bundle(const EquivariantLineBundle& a, const EquivariantLineBundle& b);
// The same bundle twisted by a global character: every chart character
// moves by m, the coefficient at a ray drops by the pairing with m.
EquivariantLineBundle twisted_bundle(const EquivariantLineBundle& l, const LVec& m);

// The sheaf of chart modules of the bundle: free rank one in the chart
// character at every cone, with the coefficient-one transition characters
// as restrictions. Always coherent.
Sheaf to_sheaf(const EquivariantLineBundle& l, Flavor flavor);

// Explicit chart data for a coherent input: assembled like make_sheaf and
// then required to have isomorphic localization maps.
Sheaf coherent_sheaf(const Fan& fan, Flavor flavor, std::vector<Module> stalks,
                     std::map<std::pair<int, int>, Morphism> facet_res);

// Dimension of the degree-m sections over the whole fan: the equalizer of
// the maximal-cone pieces against restriction agreement on every pairwise
// common face.
int global_sections_dim(const Sheaf& f, const LVec& m);

// One summand of a geometric term: the direct image, from the open chart of
// the tagged cone, of a chart module (dual = false) or of the formal dual
// of one (dual = true). A dual piece restricts to zero on every chart whose
// cone does not contain the tag; a plain piece restricts through base
// change to the common face.
struct GeoPiece {
  int tau = 0;
  bool dual = true;
  Module payload;
};

// Differential entry between consecutive terms: a scalar times a payload
// morphism. The morphism runs from the target piece's payload to the source
// piece's payload, so formal duals evaluate through transposes.
struct GeoEntry {
  int row = 0;  // piece index in the target term
  int col = 0;  // piece index in the source term
  Rat coeff;
  Morphism under;
};

struct GeometricComplex {
  const Fan* fan = nullptr;
  Flavor flavor = Flavor::A;
  std::map<int, std::vector<GeoPiece>> terms;
  std::map<int, std::vector<GeoEntry>> diffs;  // diffs[d]: terms[d] -> terms[d+1]
};

int geo_piece_dim(const GeoPiece& p, const Fan& fan, int chart, const LVec& m);
int geo_term_dim(const GeometricComplex& g, int deg, int chart, const LVec& m);
EvaluatedComplex evaluate_geometric(const GeometricComplex& g, int chart, const LVec& m);

// Rearranges a complex of formal duals by source cone: the costalk over tau
// of the term in degree t lands in degree t + dim(tau), with the
// incidence-signed transposed restrictions inside each input term and the
// input differentials carrying the sign (-1)^{dim tau} across terms.
GeometricComplex direct_image_complex(const CoSheafComplex& c);
GeometricComplex direct_image_complex(const CoSheaf& c);

// The Cousin complex of a sheaf with free stalks: the term in degree i
// collects, per cone of dimension i and stalk generator there, the top
// local-cohomology piece supported on the cone's orbit — the formal dual of
// the free rank-one module in the reflected generator degree (pairings 1 -
// <w, r> over the cone's rays). Differentials are the incidence-signed
// transition coefficients.
struct CousinComplex {
  Sheaf g;
  GeometricComplex cx;
};
CousinComplex cousin_complex(const Sheaf& g);
// Degreewise value on a chart; with `augmented` the input sheaf itself is
// prepended in degree -1 via its restriction to the open orbit.
EvaluatedComplex evaluate_cousin(const CousinComplex& c, int chart, const LVec& m, bool augmented);

struct CheckItem {
  std::string name;
  bool passed = true;
  std::string detail;  // first counterexample, empty when passed
  int cone = -1;       // failing site, when one exists
  LVec degree;
};

struct SerreReport {
  std::vector<CheckItem> checks;
  bool passed() const;
};

// Verifies, chart by chart and window degree by window degree, that the
// dualized chart-module sheaf of the bundle behaves like its Serre twist:
// cohomology of the rearranged dual complex concentrated in degree -rank
// with the canonical-twisted chart piece there; full matrix agreement with
// the structure-sheaf run shifted by the chart character; Cousin term
// dimensions matching the costalk cohomology of the dual complex; and
// exactness of the augmented Cousin complex.
SerreReport serre_duality_check(const EquivariantLineBundle& l, const std::vector<LVec>& window);

}  // namespace torkos
