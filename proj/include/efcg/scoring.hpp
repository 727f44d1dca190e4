#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "efcg/rational.hpp"
#include "efcg/types.hpp"

namespace efcg {

struct InstructionRate {
  std::string instruction_id;
  std::int64_t n_constraints = 0;
  std::int64_t satisfied_count = 0;
  Rational rate;
};

struct CsrReport {
  std::vector<InstructionRate> per_instruction;
  std::int64_t m = 0;
  Rational csr;
};

struct InstructionResults {
  std::string instruction_id;
  std::vector<VerificationResult> results;
};

// CSR = (1/m) * sum_i (1/n_i) * sum_j s_ij, computed exactly.
// Throws Error{EmptyInput} if there are no instructions or one of them has
// no constraints.
CsrReport compute_csr(const std::vector<InstructionResults>& instructions);
// Instruction ids default to their zero-based index.
CsrReport compute_csr(const std::vector<std::vector<VerificationResult>>& instructions);

struct TypeRate {
  std::int64_t total = 0;
  std::int64_t satisfied = 0;
  Rational rate;
};

struct MacroReport {
  std::map<std::string, TypeRate> per_type;  // keyed by constraint type name
  Rational macro_accuracy;
  std::int64_t types_present = 0;
};

// Unweighted mean over constraint types of each type's satisfaction rate.
MacroReport compute_macro(const std::vector<std::pair<HardConstraint, VerificationResult>>& results);
MacroReport compute_macro(const std::vector<std::pair<ConstraintType, bool>>& results);

// (soft + hard) / 2; both inputs must lie in [0,1].
Rational combined_score(const Rational& soft_rate, const Rational& hard_macro);

// Fraction of pairs where both sides agree.
Rational agreement_rate(const std::vector<std::pair<bool, bool>>& pairs);

struct KappaResult {
  Rational kappa;
  Rational observed;  // p_o
  Rational expected;  // p_e
  // Both raters used a single identical label everywhere (p_e == 1); kappa
  // is reported as 1 by convention.
  bool degenerate = false;
};

KappaResult cohens_kappa(const std::vector<std::pair<bool, bool>>& pairs);

}  // namespace efcg
