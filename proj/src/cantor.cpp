#include "glorenz/cantor.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>
#include <set>

#include "glorenz/errors.hpp"
#include "glorenz/one_d.hpp"
#include "json.hpp"

namespace glorenz {

namespace {

constexpr double kHalf = 0.5;
constexpr int kLambdaGrid = 65;
constexpr int kMaxLevel = 12;

bool side_of(const IntervalQ& j) { return j.lo + j.hi > 0.0; }

double clamp_side(double x, bool positive) { return positive ? std::max(x, 0.0) : std::min(x, 0.0); }

IntervalQ inverse_image(const MapModel& m, const IntervalQ& y, bool positive) {
  if (positive) return {m.right_inverse(y.lo), m.right_inverse(y.hi)};
  return {m.left_inverse(y.lo), m.left_inverse(y.hi)};
}

IntervalQ push(const MapModel& m, const CantorBranch& b, const IntervalQ& j) {
  return {branch_eval(m, b, j.lo, b.total_iterates), branch_eval(m, b, j.hi, b.total_iterates)};
}

void fill_extrema(const MapModel& m, CantorBranch& b) {
  b.lambda_min = std::numeric_limits<double>::infinity();
  b.lambda_max = 0.0;
  for (int i = 0; i < kLambdaGrid; ++i) {
    const double x = b.domain.lo + b.domain.length() * i / (kLambdaGrid - 1);
    const double d = std::abs(branch_deriv(m, b, x, b.total_iterates));
    b.lambda_min = std::min(b.lambda_min, d);
    b.lambda_max = std::max(b.lambda_max, d);
  }
  b.image = push(m, b, b.domain);
}

IntervalQ middle_third(const IntervalQ& j) {
  const double t = j.length() / 3.0;
  return {j.lo + t, j.hi - t};
}

struct GapResult {
  StageCounts counts;
  std::vector<CantorBranch> branches;
  double max_mass_error = 0.0;
};

GapResult process_gap(const MapModel& m, const MeasureApprox& mu, const IntervalQ& gap,
                      std::size_t gap_index, int mk, const IntervalQ& base,
                      const TheoremOptions& opts) {
  GapResult out;
  const double m3 = std::pow(static_cast<double>(mk), 3.0);
  const double small = 1.0 / m3;
  const double short_len = 1.0 / (3.0 * m3);
  const int horizon = 4 * mk;
  const double pieces = std::ldexp(1.0, mk);
  out.counts.pieces_total = pieces;

  const double mass_lo = mu.cdf(gap.lo);
  const double mass = mu.cdf(gap.hi) - mass_lo;
  const double step = mass / pieces;

  std::vector<long> picks;
  const long n_pieces = static_cast<long>(pieces);
  if (n_pieces <= opts.budget) {
    for (long r = 0; r < n_pieces; ++r) picks.push_back(r);
  } else {
    std::seed_seq seq{opts.seed, static_cast<std::uint64_t>(gap_index)};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<long> pick(0, n_pieces - 1);
    std::set<long> chosen;
    while (static_cast<int>(chosen.size()) < opts.budget) chosen.insert(pick(rng));
    picks.assign(chosen.begin(), chosen.end());
  }

  for (long r : picks) {
    ++out.counts.sampled;
    const IntervalQ piece{r == 0 ? gap.lo : mu.inverse_cdf(mass_lo + r * step),
                          r == n_pieces - 1 ? gap.hi : mu.inverse_cdf(mass_lo + (r + 1) * step)};
    out.max_mass_error = std::max(out.max_mass_error, std::abs(mu.mass(piece) - step));
    if (!(piece.length() > 0.0)) continue;

    // one witness point whose orbit stays out of (-1/m^3, 1/m^3).
    bool witness = false;
    for (int s = 0; s < opts.witness_samples && !witness; ++s) {
      double x = piece.lo + piece.length() * (s + 0.5) / opts.witness_samples;
      bool ok = std::abs(x) >= small;
      for (int j = 1; j <= horizon && ok; ++j) {
        if (x == 0.0) {
          ok = false;
          break;
        }
        x = m.eval(x);
        ok = std::abs(x) >= small;
      }
      witness = ok;
    }
    if (!witness) continue;
    ++out.counts.witnessed;

    // only short pieces are kept.
    if (!(piece.length() < short_len)) continue;
    ++out.counts.short_pieces;

    // minimal j with |f^j(piece)| > 1/(3 m^3).
    std::vector<bool> pre_sides;
    IntervalQ cur = piece;
    int j_found = 0;
    for (int t = 1; t <= horizon; ++t) {
      if (cur.straddles_zero()) break;
      pre_sides.push_back(side_of(cur));
      cur = m.image(cur);
      if (cur.hi < cur.lo) std::swap(cur.lo, cur.hi);
      if (cur.length() > short_len) {
        j_found = t;
        break;
      }
    }
    if (j_found == 0) continue;
    ++out.counts.expanded;

    AleoResult aleo;
    try {
      aleo = almost_leo(m, cur);
    } catch (const Error&) {
      continue;
    }
    ++out.counts.aleo;

    CantorBranch b;
    b.pre_iterates = j_found;
    b.total_iterates = j_found + aleo.n;
    b.sides = pre_sides;
    for (int i = 0; i < aleo.n; ++i) b.sides.push_back(side_of(aleo.step_images[static_cast<std::size_t>(i)]));
    IntervalQ dom = aleo.j_prime;
    for (int s = j_found - 1; s >= 0; --s) dom = inverse_image(m, dom, pre_sides[static_cast<std::size_t>(s)]);
    dom = {std::max(dom.lo, piece.lo), std::min(dom.hi, piece.hi)};
    b.domain = dom;
    if (!(dom.lo >= base.lo && dom.hi <= base.hi && dom.length() > 0.0)) continue;
    ++out.counts.inside_base;
    fill_extrema(m, b);
    out.branches.push_back(std::move(b));
  }
  return out;
}

}  // namespace

std::vector<IntervalQ> CantorSpec::partition() const {
  std::vector<IntervalQ> out;
  out.reserve(branches.size());
  for (const auto& b : branches) out.push_back(b.domain);
  return out;
}

double branch_eval(const MapModel& m, const CantorBranch& b, double x, int steps) {
  for (int s = 0; s < steps; ++s) {
    const bool pos = b.sides[static_cast<std::size_t>(s)];
    x = m.eval_side(clamp_side(x, pos), pos);
  }
  return x;
}

double branch_deriv(const MapModel& m, const CantorBranch& b, double x, int steps) {
  double d = 1.0;
  for (int s = 0; s < steps; ++s) {
    const bool pos = b.sides[static_cast<std::size_t>(s)];
    x = clamp_side(x, pos);
    d *= m.deriv_side(x, pos);
    x = m.eval_side(x, pos);
  }
  return d;
}

MarkovCheck check_markov(const MapModel& m, const CantorSpec& spec, double tol) {
  MarkovCheck c;
  c.disjoint = true;
  c.avoids_zero = true;
  c.injective = true;
  c.expanding = true;
  auto parts = spec.partition();
  std::sort(parts.begin(), parts.end(), [](const IntervalQ& a, const IntervalQ& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!(parts[i].hi < parts[i + 1].lo)) c.disjoint = false;
  }
  for (const auto& b : spec.branches) {
    if (b.domain.contains(0.0)) c.avoids_zero = false;
    if (!(b.lambda_min > 1.0 && b.lambda_min <= b.lambda_max)) c.expanding = false;
    const IntervalQ img = push(m, b, b.domain);
    c.worst_image_error = std::max({c.worst_image_error, std::abs(img.lo - spec.base.lo),
                                    std::abs(img.hi - spec.base.hi)});
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 32; ++i) {
      const double y = branch_eval(m, b, b.domain.lo + b.domain.length() * i / 32.0, b.total_iterates);
      if (!(y > prev) && i > 0) c.injective = false;
      prev = y;
    }
  }
  c.images_match = c.worst_image_error <= tol;
  return c;
}

bool TheoremRunLog::filters_monotone() const {
  const StageCounts& c = counts;
  return c.sampled >= c.witnessed && c.witnessed >= c.short_pieces && c.short_pieces >= c.expanded && c.expanded >= c.aleo &&
         c.aleo >= c.inside_base;
}

TheoremBuild build_theorem_cantor(const MapModel& m_in, const MeasureApprox& mu, int k,
                                  const TheoremOptions& opts) {
  if (k < 1 || k > kMaxLevel) throw Error(ErrorKind::Configuration, "k must lie in [1, 12]");
  if (opts.m_cap < 8 || opts.m_cap > 24) throw Error(ErrorKind::Configuration, "m_cap must lie in [8, 24]");
  if (opts.budget < 1 || opts.witness_samples < 1) throw Error(ErrorKind::Configuration, "budget and sample counts must be positive");
  if (mu.bins == 0 || mu.masses.empty()) throw Error(ErrorKind::Configuration, "invariant measure unavailable");

  MapModel m = m_in;
  if (!m.cut) m.cut = choose_aleo_a(m, 0.005);
  const double a = *m.cut;

  TheoremBuild out;
  TheoremRunLog& log = out.log;
  log.k = k;
  log.cut = a;
  log.density_sup = mu.density_sup;
  out.spec.mode = "theorem";
  out.spec.base = {m.right(1.0 - a), 0.0};

  // Gap hierarchy: each gap gets an I-interval pulled back from its middle
  // third onto the left half, splitting it into two gaps.
  std::vector<IntervalQ> gaps{{-kHalf, 0.0}};
  for (int level = 1; level <= k; ++level) {
    std::vector<IntervalQ> next;
    std::vector<IntervalQ> added;
    for (const auto& g : gaps) {
      const LeoPullback pb = leo_pullback(m, middle_third(g), true);
      added.push_back(pb.domain);
      log.level_iterates.push_back(pb.n);
      next.push_back({g.lo, pb.domain.lo});
      next.push_back({pb.domain.hi, g.hi});
    }
    log.level_intervals.push_back(added);
    log.gaps.push_back(next);
    gaps = std::move(next);
  }

  double min_mass = std::numeric_limits<double>::infinity();
  for (const auto& g : gaps) min_mass = std::min(min_mass, mu.mass(g));
  log.epsilon_k = min_mass / mu.density_sup;
  if (!(log.epsilon_k > 0.0)) throw Error(ErrorKind::ConstructionFailed, "a gap carries no invariant mass");
  log.m_k_uncapped = static_cast<long>(std::floor(1.0 / log.epsilon_k));
  log.m_k = static_cast<int>(std::min<long>(log.m_k_uncapped, opts.m_cap));
  log.m_k = std::max(log.m_k, 2);

  std::vector<std::future<GapResult>> jobs;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    jobs.push_back(std::async(std::launch::async, process_gap, std::cref(m), std::cref(mu), gaps[i], i,
                              log.m_k, out.spec.base, std::cref(opts)));
  }
  for (auto& job : jobs) {
    GapResult r = job.get();
    log.counts.pieces_total += r.counts.pieces_total;
    log.counts.sampled += r.counts.sampled;
    log.counts.witnessed += r.counts.witnessed;
    log.counts.short_pieces += r.counts.short_pieces;
    log.counts.expanded += r.counts.expanded;
    log.counts.aleo += r.counts.aleo;
    log.counts.inside_base += r.counts.inside_base;
    log.max_mass_error = std::max(log.max_mass_error, r.max_mass_error);
    for (auto& b : r.branches) out.spec.branches.push_back(std::move(b));
  }

  const StageCounts& c = log.counts;
  log.half_have_witness = 2 * c.witnessed >= c.sampled;
  log.few_long_pieces = 4 * (c.witnessed - c.short_pieces) < c.sampled;

  if (out.spec.branches.empty()) {
    const char* stage = c.witnessed == 0 ? "witness" : c.short_pieces == 0 ? "short" : c.expanded == 0 ? "expand"
                        : c.aleo == 0 ? "almost-LEO" : "base containment";
    throw Error(ErrorKind::ConstructionFailed, std::string("no survivors after ") + stage);
  }

  // Distortion of the pre-iterates.
  const DistortionConstants kc = closed_form_constants(m);
  log.H = distortion_h(kc);
  std::mt19937_64 rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  log.ratio_min = log.ratio_max = 1.0;
  for (const auto& b : out.spec.branches) {
    for (int p = 0; p < opts.pair_samples; ++p) {
      const double x = b.domain.lo + unit(rng) * b.domain.length();
      const double y = b.domain.lo + unit(rng) * b.domain.length();
      const double r = distortion_ratio(m, b, x, y);
      log.ratio_min = std::min(log.ratio_min, r);
      log.ratio_max = std::max(log.ratio_max, r);
      ++log.ratio_samples;
    }
  }

  // Explicit finite-m form of the sup-derivative bound
  //   sup-derivative <= H^-2 E^(D log m) m^(D growth_exp log m) 2^m (m+1)
  const double mk = log.m_k;
  const double D = aleo_d_constant(m);
  const double E = kc.C * std::pow(1.0 - a, m.alpha - 1.0) * std::pow(6.0, 1.0 - m.alpha);
  const double growth_exp = 3.0 * (1.0 - m.alpha);
  const double lm = std::log(mk);
  log.log2_lambda_bound = (-2.0 * std::log(log.H) + D * lm * std::log(E) + D * growth_exp * lm * lm + mk * std::log(2.0) +
                           std::log(mk + 1.0)) / std::log(2.0);
  log.epsilon_slack = log.log2_lambda_bound / mk - 1.0;
  for (const auto& b : out.spec.branches) log.log2_lambda_max = std::max(log.log2_lambda_max, std::log2(b.lambda_max));
  log.lambda_bound_holds = log.log2_lambda_max <= log.log2_lambda_bound;

  std::sort(out.spec.branches.begin(), out.spec.branches.end(),
            [](const CantorBranch& x, const CantorBranch& y) { return x.domain.lo < y.domain.lo; });
  return out;
}

TheoremBuild build_theorem_cantor(const MapModel& m, int k, int m_cap) {
  TheoremOptions opts;
  opts.m_cap = m_cap;
  return build_theorem_cantor(m, ulam_measure(m, 1024), k, opts);
}

double distortion_ratio(const MapModel& m, const CantorBranch& b, double x, double y) {
  if (x == y) return 1.0;
  return branch_deriv(m, b, y, b.pre_iterates) / branch_deriv(m, b, x, b.pre_iterates);
}

bool nested_family(const TheoremRunLog& coarse, const TheoremRunLog& fine) {
  if (coarse.k > fine.k || coarse.gaps.empty() || fine.gaps.empty()) return false;
  const auto& outer = coarse.gaps.back();
  const auto& inner = fine.gaps.back();
  for (const auto& g : outer) {
    const bool has = std::any_of(inner.begin(), inner.end(), [&](const IntervalQ& h) {
      return h.lo >= g.lo && h.hi <= g.hi;
    });
    if (!has) return false;
  }
  for (std::size_t level = 0; level < coarse.level_intervals.size(); ++level) {
    if (level >= fine.level_intervals.size()) return false;
    for (const auto& iv : coarse.level_intervals[level]) {
      const auto& pool = fine.level_intervals[level];
      const bool found = std::any_of(pool.begin(), pool.end(), [&](const IntervalQ& h) {
        return h.lo == iv.lo && h.hi == iv.hi;
      });
      if (!found) return false;
    }
  }
  return true;
}

IntervalQ direct_base(const MapModel& m) { return {m.right(0.05), -0.05}; }

CantorSpec build_direct_cantor(const MapModel& m, double delta, int depth) {
  if (!(delta > 0.0 && delta < kHalf)) throw Error(ErrorKind::Configuration, "delta must lie in (0, 1/2)");
  if (depth < 1 || depth > 12) throw Error(ErrorKind::Configuration, "depth must lie in [1, 12]");

  CantorSpec spec;
  spec.mode = "direct";
  spec.base = direct_base(m);
  const IntervalQ left_range{m.left(-kHalf), m.offset_left};
  const IntervalQ right_range{m.offset_right, m.right(kHalf)};

  // Depth-first pullback of the base; `path` holds f^s(domain) for the
  // current itinerary, with the innermost pullback last.
  struct Frame {
    IntervalQ set;
    std::vector<bool> sides;  // sides[0] is the last step
  };
  std::vector<Frame> stack{{spec.base, {}}};
  while (!stack.empty()) {
    Frame fr = std::move(stack.back());
    stack.pop_back();
    if (static_cast<int>(fr.sides.size()) == depth) {
      if (!(fr.set.lo >= spec.base.lo && fr.set.hi <= spec.base.hi)) continue;
      CantorBranch b;
      b.domain = fr.set;
      b.total_iterates = depth;
      b.sides.assign(fr.sides.rbegin(), fr.sides.rend());
      fill_extrema(m, b);
      spec.branches.push_back(std::move(b));
      continue;
    }
    for (bool pos : {false, true}) {
      const IntervalQ& range = pos ? right_range : left_range;
      if (!(fr.set.lo >= range.lo && fr.set.hi <= range.hi)) continue;
      const IntervalQ pre = inverse_image(m, fr.set, pos);
      if (pre.distance_to_zero() < delta) continue;
      Frame nx{pre, fr.sides};
      nx.sides.push_back(pos);
      stack.push_back(std::move(nx));
    }
  }
  if (spec.branches.empty()) {
    throw Error(ErrorKind::EmptySpec, "no cylinder avoids (-delta, delta) at this depth");
  }
  std::sort(spec.branches.begin(), spec.branches.end(),
            [](const CantorBranch& x, const CantorBranch& y) { return x.domain.lo < y.domain.lo; });
  return spec;
}

namespace {

std::string sides_string(const std::vector<bool>& s) {
  std::string out;
  for (bool p : s) out.push_back(p ? 'R' : 'L');
  return out;
}

}  // namespace

std::string to_json(const CantorSpec& spec) {
  nlohmann::json j;
  j["mode"] = spec.mode;
  j["base"] = {spec.base.lo, spec.base.hi};
  j["branches"] = nlohmann::json::array();
  for (const auto& b : spec.branches) {
    j["branches"].push_back({{"domain", {b.domain.lo, b.domain.hi}},
                             {"iterates", b.total_iterates},
                             {"pre_iterates", b.pre_iterates},
                             {"image", {b.image.lo, b.image.hi}},
                             {"lambda_min", b.lambda_min},
                             {"lambda_max", b.lambda_max},
                             {"itinerary", sides_string(b.sides)}});
  }
  return j.dump(2);
}

CantorSpec cantor_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Io, std::string("invalid CantorSpec JSON: ") + e.what());
  }
  try {
    CantorSpec spec;
    spec.mode = j.value("mode", std::string("direct"));
    spec.base = {j.at("base").at(0).get<double>(), j.at("base").at(1).get<double>()};
    for (const auto& jb : j.at("branches")) {
      CantorBranch b;
      b.domain = {jb.at("domain").at(0).get<double>(), jb.at("domain").at(1).get<double>()};
      b.total_iterates = jb.at("iterates").get<int>();
      b.pre_iterates = jb.value("pre_iterates", 0);
      b.lambda_min = jb.at("lambda_min").get<double>();
      b.lambda_max = jb.at("lambda_max").get<double>();
      if (jb.contains("image")) b.image = {jb["image"][0].get<double>(), jb["image"][1].get<double>()};
      for (char ch : jb.value("itinerary", std::string())) b.sides.push_back(ch == 'R');
      spec.branches.push_back(std::move(b));
    }
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Io, std::string("malformed CantorSpec: ") + e.what());
  }
}

std::string to_json(const TheoremRunLog& log) {
  nlohmann::json j;
  j["k"] = log.k;
  j["m_k"] = log.m_k;
  j["m_k_uncapped"] = log.m_k_uncapped;
  j["epsilon_k"] = log.epsilon_k;
  j["density_sup"] = log.density_sup;
  j["density_sup_rigorous"] = false;
  j["cut"] = log.cut;
  j["counts"] = {{"pieces_total", log.counts.pieces_total}, {"sampled", log.counts.sampled},
                 {"witnessed", log.counts.witnessed},             {"short_pieces", log.counts.short_pieces},
                 {"expanded", log.counts.expanded},             {"aleo", log.counts.aleo},
                 {"inside_base", log.counts.inside_base}};
  j["half_have_witness"] = log.half_have_witness;
  j["few_long_pieces"] = log.few_long_pieces;
  j["max_mass_error"] = log.max_mass_error;
  j["distortion"] = {{"H", log.H}, {"ratio_min", log.ratio_min}, {"ratio_max", log.ratio_max},
                     {"samples", log.ratio_samples}};
  j["lambda"] = {{"log2_max", log.log2_lambda_max}, {"log2_bound", log.log2_lambda_bound},
                 {"epsilon_slack", log.epsilon_slack}, {"holds", log.lambda_bound_holds}};
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& lv : log.level_intervals) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& iv : lv) row.push_back({iv.lo, iv.hi});
    levels.push_back(row);
  }
  j["level_intervals"] = levels;
  return j.dump(2);
}

}  // namespace glorenz
