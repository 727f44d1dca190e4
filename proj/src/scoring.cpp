#include "efcg/scoring.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "efcg/error.hpp"

namespace efcg {

CsrReport compute_csr(const std::vector<InstructionResults>& instructions) {
  if (instructions.empty()) {
    throw Error(ErrorCode::EmptyInput, "CSR needs at least one instruction");
  }
  CsrReport report;
  report.m = static_cast<std::int64_t>(instructions.size());
  Rational sum = 0;
  for (const auto& inst : instructions) {
    if (inst.results.empty()) {
      throw Error(ErrorCode::EmptyInput,
                  fmt::format("instruction '{}' has no constraints", inst.instruction_id));
    }
    InstructionRate r;
    r.instruction_id = inst.instruction_id;
    r.n_constraints = static_cast<std::int64_t>(inst.results.size());
    for (const auto& v : inst.results) r.satisfied_count += v.satisfied ? 1 : 0;
    r.rate = Rational(r.satisfied_count, r.n_constraints);
    sum += r.rate;
    report.per_instruction.push_back(std::move(r));
  }
  report.csr = sum / report.m;
  return report;
}

CsrReport compute_csr(const std::vector<std::vector<VerificationResult>>& instructions) {
  std::vector<InstructionResults> named;
  named.reserve(instructions.size());
  for (std::size_t i = 0; i < instructions.size(); ++i) {
    named.push_back({std::to_string(i), instructions[i]});
  }
  return compute_csr(named);
}

MacroReport compute_macro(const std::vector<std::pair<ConstraintType, bool>>& results) {
  if (results.empty()) {
    throw Error(ErrorCode::EmptyInput, "macro accuracy needs at least one result");
  }
  MacroReport report;
  for (const auto& [type, ok] : results) {
    auto& t = report.per_type[std::string(constraint_type_name(type))];
    ++t.total;
    t.satisfied += ok ? 1 : 0;
  }
  Rational sum = 0;
  for (auto& [_, t] : report.per_type) {
    t.rate = Rational(t.satisfied, t.total);
    sum += t.rate;
  }
  report.types_present = static_cast<std::int64_t>(report.per_type.size());
  report.macro_accuracy = sum / report.types_present;
  return report;
}

MacroReport compute_macro(
    const std::vector<std::pair<HardConstraint, VerificationResult>>& results) {
  std::vector<std::pair<ConstraintType, bool>> flat;
  flat.reserve(results.size());
  for (const auto& [c, r] : results) flat.emplace_back(constraint_type(c), r.satisfied);
  return compute_macro(flat);
}

Rational combined_score(const Rational& soft_rate, const Rational& hard_macro) {
  if (soft_rate < 0 || soft_rate > 1 || hard_macro < 0 || hard_macro > 1) {
    throw Error(ErrorCode::OutOfRange,
                fmt::format("scores must lie in [0,1], got soft={} hard={}",
                            to_fraction_string(soft_rate), to_fraction_string(hard_macro)));
  }
  return (soft_rate + hard_macro) / 2;
}

Rational agreement_rate(const std::vector<std::pair<bool, bool>>& pairs) {
  if (pairs.empty()) {
    throw Error(ErrorCode::EmptyInput, "agreement rate needs at least one pair");
  }
  std::int64_t agree = 0;
  for (const auto& [a, b] : pairs) agree += a == b ? 1 : 0;
  return Rational(agree, static_cast<std::int64_t>(pairs.size()));
}

KappaResult cohens_kappa(const std::vector<std::pair<bool, bool>>& pairs) {
  if (pairs.empty()) {
    throw Error(ErrorCode::EmptyInput, "kappa needs at least one pair");
  }
  const auto n = static_cast<std::int64_t>(pairs.size());
  std::int64_t agree = 0;
  std::int64_t a_yes = 0;
  std::int64_t b_yes = 0;
  for (const auto& [a, b] : pairs) {
    agree += a == b ? 1 : 0;
    a_yes += a ? 1 : 0;
    b_yes += b ? 1 : 0;
  }
  KappaResult k;
  k.observed = Rational(agree, n);
  const Rational pa_yes(a_yes, n);
  const Rational pb_yes(b_yes, n);
  k.expected = pa_yes * pb_yes + (1 - pa_yes) * (1 - pb_yes);
  if (k.expected == 1) {
    k.degenerate = true;
    k.kappa = 1;
    spdlog::warn("kappa: both raters used a single label throughout; reporting 1");
    return k;
  }
  k.kappa = (k.observed - k.expected) / (1 - k.expected);
  return k;
}

}  // namespace efcg
