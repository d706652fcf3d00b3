#pragma once

#include <optional>
#include <string>

#include "divcert/linalg.hpp"

namespace divcert {

enum class Verdict { Unbounded, Inconclusive };

inline const char* verdict_name(Verdict v) { return v == Verdict::Unbounded ? "UNBOUNDED" : "INCONCLUSIVE"; }

/// Outcome of an unboundedness test. When the verdict is Unbounded the
/// witness has squared norm witness_norm_sq > threshold_used at trigger_index.
struct CertificateReport {
  Verdict verdict = Verdict::Inconclusive;
  Vector witness;
  std::string witness_kind;  // "p", "q" or "grad"
  std::optional<std::size_t> trigger_index;
  double threshold_used = 0.0;
  double witness_norm_sq = 0.0;
  std::string bound_formula;
  std::size_t iterations_checked = 0;
};

}  // namespace divcert
