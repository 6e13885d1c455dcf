#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "glorenz/map_model.hpp"
#include "glorenz/ulam.hpp"

namespace glorenz {

/// One expanding branch g = f^total_iterates of a regular Cantor set, mapping
/// `domain` onto the common base.
struct CantorBranch {
  IntervalQ domain;
  int total_iterates = 0;
  // Leading iterates whose distortion is controlled separately (the steps
  // that blow a small piece up to macroscopic size); 0 in direct mode.
  int pre_iterates = 0;
  IntervalQ image;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  // Branch of f used at each step, true for x > 0.
  std::vector<bool> sides;
};

struct CantorSpec {
  IntervalQ base;
  std::vector<CantorBranch> branches;
  std::string mode;  // "theorem" or "direct"

  std::vector<IntervalQ> partition() const;
};

/// Forward image of x under the first `steps` maps of the branch.
double branch_eval(const MapModel& m, const CantorBranch& b, double x, int steps);
/// Derivative of the first `steps` maps of the branch at x.
double branch_deriv(const MapModel& m, const CantorBranch& b, double x, int steps);

struct MarkovCheck {
  bool disjoint = false;
  bool avoids_zero = false;
  bool images_match = false;  // every image equals the base within tol
  bool injective = false;
  bool expanding = false;
  double worst_image_error = 0.0;

  bool ok() const { return disjoint && avoids_zero && images_match && injective && expanding; }
};

MarkovCheck check_markov(const MapModel& m, const CantorSpec& spec, double tol = 1e-9);

struct StageCounts {
  double pieces_total = 0.0;  // 2^m_k per gap, summed
  long sampled = 0;
  long witnessed = 0;         // a sample avoids the small neighbourhood preimages
  long short_pieces = 0;         // piece shorter than 1/(3 m^3)
  long expanded = 0;         // some j <= 4m blows the piece up past 1/(3 m^3)
  long aleo = 0;           // almost-LEO pullback succeeded
  long inside_base = 0;    // domain lies in the base
};

struct TheoremRunLog {
  int k = 0;
  int m_k = 0;
  long m_k_uncapped = 0;
  double epsilon_k = 0.0;
  double density_sup = 0.0;
  double cut = 0.0;
  std::vector<std::vector<IntervalQ>> gaps;          // gaps[level-1]
  std::vector<std::vector<IntervalQ>> level_intervals;  // I-intervals added at each level
  std::vector<int> level_iterates;
  StageCounts counts;
  // Cardinality checks, evaluated on the sampled pieces.
  bool half_have_witness = false;
  bool few_long_pieces = false;
  double max_mass_error = 0.0;  // worst |mu(piece) - mu(gap)/2^m|
  // Distortion of the pre-iterates over random pairs.
  double H = 0.0;
  double ratio_min = 1.0;
  double ratio_max = 1.0;
  long ratio_samples = 0;
  // Explicit sup-derivative bound for the emitted branches.
  double log2_lambda_max = 0.0;
  double log2_lambda_bound = 0.0;
  double epsilon_slack = 0.0;
  bool lambda_bound_holds = false;

  bool filters_monotone() const;
};

struct TheoremOptions {
  int m_cap = 12;
  int budget = 256;     // sampled pieces per gap
  int witness_samples = 64;
  int pair_samples = 100;
  std::uint64_t seed = 1;
};

struct TheoremBuild {
  CantorSpec spec;
  TheoremRunLog log;
};

TheoremBuild build_theorem_cantor(const MapModel& m, const MeasureApprox& mu, int k,
                                  const TheoremOptions& opts);
/// Computes the Ulam measure at 1024 bins internally.
TheoremBuild build_theorem_cantor(const MapModel& m, int k, int m_cap);

/// (f^j)'(y) / (f^j)'(x) with j the branch's pre_iterates.
double distortion_ratio(const MapModel& m, const CantorBranch& b, double x, double y);

/// Every level-k gap of `coarse` contains a gap of `fine`, and every
/// I-interval of `coarse` is also one of `fine`.
bool nested_family(const TheoremRunLog& coarse, const TheoremRunLog& fine);

/// Base used by the direct builder: [f(0.05), -0.05].
IntervalQ direct_base(const MapModel& m);

CantorSpec build_direct_cantor(const MapModel& m, double delta, int depth);

std::string to_json(const CantorSpec& spec);
CantorSpec cantor_from_json(const std::string& text);
std::string to_json(const TheoremRunLog& log);

}  // namespace glorenz
