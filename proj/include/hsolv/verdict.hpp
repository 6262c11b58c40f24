#pragma once

#include <map>
#include <string>
#include <vector>

#include "hsolv/matching.hpp"

namespace hsolv {

enum class Status {
  NOT_SOLVABLE_PROVEN,
  SOLVABLE_CONDITIONAL,
  NOT_SOLVABLE_EVIDENCE,
  INCONCLUSIVE,
};

inline const char* to_string(Status s) {
  switch (s) {
    case Status::NOT_SOLVABLE_PROVEN: return "NOT_SOLVABLE_PROVEN";
    case Status::SOLVABLE_CONDITIONAL: return "SOLVABLE_CONDITIONAL";
    case Status::NOT_SOLVABLE_EVIDENCE: return "NOT_SOLVABLE_EVIDENCE";
    case Status::INCONCLUSIVE: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

struct CriterionRecord {
  std::string id;
  std::string detail;
  std::map<std::string, double> numbers;
};

struct Verdict {
  Status status = Status::INCONCLUSIVE;
  std::vector<CriterionRecord> reasons;
  int p_pos = 0;  // roots with positive real part
  int p_neg = 0;
  int n = 0;
  GenericityReport genericity;
  std::vector<ScanRow> scan_rows;  // populated when the parameter scan ran
};

// Decision ladder:
//   1. root-count imbalance (needs all real parts nonzero): proven not solvable
//   2. both top-grade limits have empty Schwartz adjoint kernels: solvable,
//      conditional on top-grade solvability
//   3. parameter scan accumulates rank-deficient values: evidence against
//      solvability
//   4. otherwise inconclusive
// Every failure path degrades to INCONCLUSIVE with a diagnostic record.
inline Verdict classify(const NcPolynomial& p, const Config& cfg) {
  Verdict v;
  try {
    v.genericity = check_generic(p, cfg);
  } catch (const std::exception& e) {
    v.reasons.push_back({"genericity-check-failed", e.what(), {}});
    return v;
  }
  v.n = p.degree();
  if (!v.genericity.is_generic) {
    v.reasons.push_back({"not-generic",
                         "top symbol is not monic with distinct roots",
                         {{"monic_defect_abs", std::abs(v.genericity.monic_defect)},
                          {"min_root_gap", v.genericity.min_root_gap}}});
    return v;
  }
  bool all_nonzero_re = true;
  for (const auto& r : v.genericity.roots) {
    if (r.real() > cfg.re_thresh) ++v.p_pos;
    if (r.real() < -cfg.re_thresh) ++v.p_neg;
    if (std::abs(r.real()) <= cfg.re_thresh) all_nonzero_re = false;
  }

  // Step 1: exact integer comparison 2*max(p_pos, p_neg) > n.
  if (all_nonzero_re && 2 * std::max(v.p_pos, v.p_neg) > v.n) {
    v.status = Status::NOT_SOLVABLE_PROVEN;
    v.reasons.push_back({"root-count-imbalance",
                         "more than n/2 characteristic roots on one side of the imaginary axis",
                         {{"p_pos", double(v.p_pos)},
                          {"p_neg", double(v.p_neg)},
                          {"n", double(v.n)}}});
    return v;
  }
  if (!all_nonzero_re) {
    v.reasons.push_back({"zero-real-part-root",
                         "a characteristic root has vanishing real part; the decay-side "
                         "classification is undefined",
                         {}});
    return v;  // INCONCLUSIVE
  }

  // Step 2: Schwartz test of the top-grade limit operators for both signs.
  try {
    auto top = homogeneous_part(p, v.n);
    bool both_empty = true;
    double worst_sigma = 1e300;
    for (int sign : {+1, -1}) {
      auto table = to_numeric(coefficient_table(realize(top, sign)));
      auto roots = characteristic_roots(top, cfg);
      auto match = schwartz_match(table, roots, Cplx(1.0, 0.0), cfg);
      worst_sigma = std::min(worst_sigma, match.sigma_min);
      if (match.sigma_min < cfg.sigma_tol) both_empty = false;
    }
    if (both_empty) {
      v.status = Status::SOLVABLE_CONDITIONAL;
      v.reasons.push_back(
          {"empty-adjoint-schwartz-kernel-at-top-grade",
           "both top-grade limit operators have trivial Schwartz adjoint kernels; the verdict "
           "is conditional on local solvability of the top-grade operator, which this "
           "numerical test supports but does not certify",
           {{"min_sigma_over_signs", worst_sigma}, {"sigma_tol", cfg.sigma_tol}}});
      return v;
    }
    v.reasons.push_back({"top-grade-schwartz-kernel-nonempty",
                         "a top-grade limit operator shows a rank-deficient jet matching",
                         {{"min_sigma_over_signs", worst_sigma}}});
  } catch (const std::exception& e) {
    v.reasons.push_back({"top-grade-test-failed", e.what(), {}});
  }

  // Step 3: evidence scan over the parameter interval, both signs.
  try {
    for (int sign : {+1, -1}) {
      auto table = to_numeric(coefficient_table(realize(p, sign)));
      auto scan = gamma_scan(table, v.genericity.roots, cfg.scan_lo, cfg.scan_hi,
                             cfg.scan_points, cfg);
      if (sign > 0) v.scan_rows = scan.rows;
      if (scan.limit_point_flag) {
        v.status = Status::NOT_SOLVABLE_EVIDENCE;
        v.reasons.push_back({"parameter-accumulation-evidence",
                             "sub-tolerance jet matchings accumulate under scan refinement "
                             "(numerical evidence, not a proof)",
                             {{"sign", double(sign)},
                              {"base_dips", double(scan.base_dips)},
                              {"refined_dips", double(scan.refined_dips)}}});
        return v;
      }
    }
    v.reasons.push_back({"no-parameter-accumulation",
                         "the scan found no accumulating rank deficiency",
                         {{"scan_lo", cfg.scan_lo}, {"scan_hi", cfg.scan_hi}}});
  } catch (const std::exception& e) {
    v.reasons.push_back({"scan-failed", e.what(), {}});
  }
  return v;  // INCONCLUSIVE
}

}  // namespace hsolv
