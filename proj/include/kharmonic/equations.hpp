#pragma once

// k-harmonicity conditions as ODE systems in the curvatures, constraint
// handling with case splits, and verification against the reference
// transcriptions in data/reference_displays.txt.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "kharmonic/diffpoly.hpp"
#include "kharmonic/frenet.hpp"

namespace kharmonic {

/// equations[i] is the e_{i+1} component; every entry is "= 0". Zero entries are kept.
struct EquationSystem {
  int dim = 0;
  int k = 0;
  std::vector<DiffPoly> equations;

  friend bool operator==(const EquationSystem&, const EquationSystem&) = default;
};

/// Components of tau_k(k, n) oriented by (-1)^{k-1}, so the leading
/// (nabla nabla)^{k-1} tau term enters with a plus sign.
EquationSystem kharmonic_system(int k, int n);

/// The same system with the opposite sign in front of K, i.e. the components of
/// (nabla nabla)^{k-1} tau - K{(nabla nabla)^{k-2} tau - <gamma', .> gamma'}.
/// Only used to demonstrate that this sign is inconsistent.
EquationSystem minus_k_variant_system(int k, int n);

EquationSystem system_from_field(const FrameField& field, int k);
FrameField field_from_system(const EquationSystem& sys);

enum class CanonicalMode { raw, primitive };
EquationSystem canonicalize_system(const EquationSystem& sys, CanonicalMode mode);

/// If p == r * q for a nonzero rational r, returns r.
std::optional<Rational> rational_multiple(const DiffPoly& p, const DiffPoly& q);

enum class VerificationStatus { pass, fail, pass_with_noted_discrepancy };
std::string to_string(VerificationStatus s);

struct EquationMatch {
  int index = 0;
  /// derived / reference, when both sides are nonzero multiples of each other.
  std::optional<Rational> scale;
  bool match = false;
  std::string detail;
};

struct VerificationReport {
  std::string target;
  VerificationStatus status = VerificationStatus::fail;
  std::vector<std::string> notes;
  std::vector<EquationMatch> per_equation;

  bool passed() const { return status != VerificationStatus::fail; }
};

nlohmann::json report_to_json(const VerificationReport& r);

/// Equation-by-equation comparison modulo positive rational scaling.
/// Throws std::invalid_argument when dim or k differ.
VerificationReport systems_equivalent(const EquationSystem& derived, const EquationSystem& reference,
                                      const std::string& target = "systems");

/// Exact componentwise comparison of frame fields.
VerificationReport fields_equal(const FrameField& derived, const FrameField& reference, const std::string& target);

/// A substitution rule kappa_i^(m) -> value, or K -> value when symbol is empty.
struct Relation {
  std::optional<CurvatureSymbol> symbol;
  DiffPoly value;

  static Relation for_k(DiffPoly v) { return {std::nullopt, std::move(v)}; }
  static Relation for_symbol(CurvatureSymbol s, DiffPoly v) { return {s, std::move(v)}; }
};

struct ConstraintSet {
  std::string label;
  std::set<int> constancy;  // every derivative of kappa_i vanishes
  std::set<int> zeros;      // kappa_i vanishes identically
  std::set<int> nonzero;    // kappa_i required nonzero (generic)
  std::vector<Relation> relations;
  /// Alternative refinements; each produces its own branch. Empty means one branch.
  std::vector<ConstraintSet> cases;
};

struct ConstrainedField {
  std::string label;
  bool vacuous = false;
  std::string reason;
  FrameField field;
};

/// One result per case branch (nested cases are flattened). Contradictory branches are
/// reported as vacuous and carry no meaningful field.
std::vector<ConstrainedField> apply_constraints(const FrameField& field, const ConstraintSet& constraints);

/// The flattened branches of a constraint set, each merged with its parents.
std::vector<ConstraintSet> constraint_branches(const ConstraintSet& constraints);

/// Substitution rules for a single (flattened) branch; throws std::invalid_argument on contradiction.
SubstitutionRules branch_rules(const ConstraintSet& branch, bool include_relations = true);

/// The proper-biharmonic conditions: kappa_1, kappa_2 constant, kappa_1 != 0,
/// K -> kappa_1^2 + kappa_2^2 (optional), split on kappa_2 = 0 | kappa_3 = 0.
ConstraintSet biharmonic_constraints(bool with_relation = true);

/// Oriented k-harmonic system in dimension 2k+2 on one branch, computed by
/// reducing modulo the branch's constancy/zero families after every derivative.
EquationSystem reduced_kharmonic_system(int k, const ConstraintSet& branch, bool include_relations);

/// Verification targets: Eq7, Expansion2, Prop4, Prop5. Unknown names throw std::invalid_argument.
VerificationReport verify_proposition(const std::string& target);

/// Biharmonic curves are k-harmonic for every k in 2..k_max, on both branches.
VerificationReport verify_biharmonic_implies_kharmonic(int k_max, bool with_relation = true);

}  // namespace kharmonic
