#include "glorenz/spectra_cf.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

#include "glorenz/errors.hpp"
#include "json.hpp"

namespace glorenz {

namespace {

constexpr int kPerronTerms = 200;

std::vector<long> parse_list(const std::string& s) {
  std::vector<long> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stol(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Configuration, "bad continued-fraction entry '" + item + "'");
    }
  }
  return out;
}

std::string join(const std::vector<long>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

bool is_necklace(const std::vector<long>& w) {
  const std::size_t n = w.size();
  for (std::size_t r = 1; r < n; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      const long a = w[(i + r) % n], b = w[i];
      if (a < b) return false;
      if (a > b) break;
    }
  }
  return true;
}

// x = (p + s p_prev) / (q + s q_prev) for tail s.
struct Mobius {
  double p_prev = 1.0, p = 0.0, q_prev = 0.0, q = 1.0;

  Mobius push(long a) const {
    const double da = static_cast<double>(a);
    return {p, da * p + p_prev, q, da * q + q_prev};
  }
  double at(double s) const { return (p + s * p_prev) / (q + s * q_prev); }
  IntervalQ image(const IntervalQ& tail) const {
    const double u = at(tail.lo), v = at(tail.hi);
    return {std::min(u, v), std::max(u, v)};
  }
};

std::vector<IntervalQ> merge(std::vector<IntervalQ> v) {
  std::sort(v.begin(), v.end(), [](const IntervalQ& a, const IntervalQ& b) { return a.lo < b.lo; });
  std::vector<IntervalQ> out;
  for (const auto& iv : v) {
    if (!out.empty() && iv.lo <= out.back().hi) {
      out.back().hi = std::max(out.back().hi, iv.hi);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

}  // namespace

CFWord CFWord::parse(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  }
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') throw Error(ErrorKind::Configuration, "word must be bracketed: " + text);
  s = s.substr(1, s.size() - 2);
  CFWord w;
  const auto semi = s.find(';');
  std::string rest = s;
  if (semi != std::string::npos) {
    const std::string h = s.substr(0, semi);
    if (!h.empty()) {
      const auto v = parse_list(h);
      if (v.size() != 1) throw Error(ErrorKind::Configuration, "bad head in " + text);
      w.head = v[0];
    }
    rest = s.substr(semi + 1);
  }
  const auto open = rest.find('(');
  if (open != std::string::npos) {
    const auto close = rest.find(')', open);
    if (close == std::string::npos || close + 1 != rest.size()) throw Error(ErrorKind::Configuration, "bad period in " + text);
    w.preperiod = parse_list(rest.substr(0, open));
    w.period = parse_list(rest.substr(open + 1, close - open - 1));
    if (w.period.empty()) throw Error(ErrorKind::Configuration, "empty period in " + text);
  } else {
    w.preperiod = parse_list(rest);
  }
  return w;
}

CFWord CFWord::periodic(std::vector<long> period) {
  CFWord w;
  w.period = std::move(period);
  return w;
}

std::string CFWord::to_string() const {
  std::string s = "[";
  if (head) s += std::to_string(*head);
  s += ";" + join(preperiod);
  if (!period.empty()) s += (preperiod.empty() ? "(" : ",(") + join(period) + ")";
  return s + "]";
}

double cf_value(const CFWord& w, int terms) {
  if (terms < 30) throw Error(ErrorKind::Configuration, "at least 30 terms required");
  if (w.head && *w.head < 0) throw Error(ErrorKind::Domain, "negative head");
  for (long a : w.preperiod) {
    if (a < 1) throw Error(ErrorKind::Domain, "entries must be positive");
  }
  for (long a : w.period) {
    if (a < 1) throw Error(ErrorKind::Domain, "entries must be positive");
  }
  std::vector<long> seq(w.preperiod);
  if (w.period.empty()) {
    if (seq.empty()) throw Error(ErrorKind::Domain, "empty continued fraction");
  } else {
    for (std::size_t i = 0; seq.size() < static_cast<std::size_t>(terms); ++i) seq.push_back(w.period[i % w.period.size()]);
  }
  double v = static_cast<double>(seq.back());
  for (std::size_t i = seq.size() - 1; i-- > 0;) v = static_cast<double>(seq[i]) + 1.0 / v;
  if (w.head) v = static_cast<double>(*w.head) + 1.0 / v;
  return v;
}

SpectrumValue perron_k(const CFWord& w) {
  if (w.period.empty()) throw Error(ErrorKind::Unsupported, "k is only computed for eventually periodic words");
  const std::size_t n = w.period.size();
  SpectrumValue best;
  best.value = -1.0;
  best.witness = w;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<long> fwd(n), back(n);
    for (std::size_t j = 0; j < n; ++j) {
      fwd[j] = w.period[(i + j) % n];
      back[j] = w.period[(i + n - 1 - j) % n];
    }
    CFWord beta = CFWord::periodic(back);
    beta.head = 0;
    const double k = cf_value(CFWord::periodic(fwd), kPerronTerms) + cf_value(beta, kPerronTerms);
    if (k > best.value) {
      best.value = k;
      best.shift = static_cast<int>((w.head ? 1 : 0) + w.preperiod.size() + i);
    }
  }
  return best;
}

std::vector<SpectrumValue> enumerate_head(int max_period, int alphabet_max) {
  if (max_period < 1 || max_period > 8) throw Error(ErrorKind::Configuration, "max_period must lie in [1, 8]");
  if (alphabet_max < 1 || alphabet_max > 4) throw Error(ErrorKind::Configuration, "alphabet_max must lie in [1, 4]");

  auto scan = [&](long first) {
    std::vector<SpectrumValue> out;
    for (int len = 1; len <= max_period; ++len) {
      std::vector<long> w(static_cast<std::size_t>(len), 1);
      w[0] = first;
      while (true) {
        if (is_necklace(w)) {
          auto k = perron_k(CFWord::periodic(w));
          if (k.value < 3.0) out.push_back(std::move(k));
        }
        int pos = len - 1;
        while (pos >= 1 && w[static_cast<std::size_t>(pos)] == alphabet_max) w[static_cast<std::size_t>(pos--)] = 1;
        if (pos < 1) break;
        ++w[static_cast<std::size_t>(pos)];
      }
    }
    return out;
  };
  std::vector<std::future<std::vector<SpectrumValue>>> jobs;
  for (long a = 1; a <= alphabet_max; ++a) jobs.push_back(std::async(std::launch::async, scan, a));
  std::vector<SpectrumValue> all;
  for (auto& j : jobs) {
    auto part = j.get();
    all.insert(all.end(), part.begin(), part.end());
  }
  std::sort(all.begin(), all.end(), [](const SpectrumValue& a, const SpectrumValue& b) { return a.value < b.value; });
  // Within a cluster of equal values keep the shortest witness.
  std::vector<SpectrumValue> out;
  for (auto& v : all) {
    if (!out.empty() && v.value - out.back().value <= 1e-9) {
      if (v.witness.period.size() < out.back().witness.period.size()) {
        v.value = out.back().value;
        out.back() = std::move(v);
      }
      continue;
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::string head_csv(const std::vector<SpectrumValue>& values) {
  std::ostringstream os;
  os.precision(17);
  os << "value,witness_word,shift\n";
  for (const auto& v : values) os << v.value << ",\"" << v.witness.to_string() << "\"," << v.shift << '\n';
  return os.str();
}

Rational nearest_rational(double x, long max_den) {
  if (max_den < 1) throw Error(ErrorKind::Configuration, "max_den must be positive");
  // Convergents and semiconvergents of x.
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  Rational best{static_cast<long>(std::lround(x)), 1};
  for (int it = 0; it < 64; ++it) {
    const long a = static_cast<long>(std::floor(r));
    for (long t = std::max(1L, a / 2); t <= a; ++t) {
      const long q = t * q1 + q0;
      if (q > max_den) break;
      const Rational c{t * p1 + p0, q};
      if (std::abs(c.value() - x) < std::abs(best.value() - x)) best = c;
    }
    const long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double frac = r - static_cast<double>(a);
    if (frac < 1e-15) break;
    r = 1.0 / frac;
  }
  return best;
}

IntervalQ bounded_cf_hull(int max_digit) {
  if (max_digit < 1) throw Error(ErrorKind::Configuration, "max_digit must be positive");
  CFWord lo = CFWord::periodic({max_digit, 1});
  CFWord hi = CFWord::periodic({1, max_digit});
  lo.head = hi.head = 0;
  return {cf_value(lo, kPerronTerms), cf_value(hi, kPerronTerms)};
}

IntervalQ bounded_cf_cylinder(const std::vector<long>& word, int max_digit) {
  Mobius m;
  for (long a : word) {
    if (a < 1 || a > max_digit) throw Error(ErrorKind::Domain, "digit outside 1..max_digit");
    m = m.push(a);
  }
  return m.image(bounded_cf_hull(max_digit));
}

std::vector<IntervalQ> bounded_cf_cylinders(int max_digit, double max_width, std::size_t budget) {
  if (max_digit < 2) throw Error(ErrorKind::Configuration, "max_digit must be at least 2");
  if (!(max_width > 0.0)) throw Error(ErrorKind::Configuration, "max_width must be positive");
  const IntervalQ tail = bounded_cf_hull(max_digit);
  std::vector<IntervalQ> out;
  std::vector<Mobius> stack{Mobius{}};
  while (!stack.empty()) {
    const Mobius m = stack.back();
    stack.pop_back();
    for (long a = 1; a <= max_digit; ++a) {
      const Mobius c = m.push(a);
      const IntervalQ iv = c.image(tail);
      if (iv.length() < max_width) {
        out.push_back(iv);
        if (out.size() > budget) throw Error(ErrorKind::Resource, "cylinder budget exceeded");
      } else {
        stack.push_back(c);
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const IntervalQ& a, const IntervalQ& b) { return a.lo < b.lo; });
  return out;
}

bool HallCover::contains(double x) const {
  auto it = std::upper_bound(cover.begin(), cover.end(), x, [](double v, const IntervalQ& iv) { return v < iv.lo; });
  if (it == cover.begin()) return false;
  --it;
  return x <= it->hi;
}

std::string HallCover::to_json() const {
  nlohmann::json j;
  j["resolution"] = resolution;
  j["target"] = {target.lo, target.hi};
  j["cylinders"] = cylinders;
  j["merged_cylinders"] = merged_cylinders;
  j["pairs"] = pairs;
  j["cover_pieces"] = cover.size();
  j["max_gap"] = max_gap;
  j["verified"] = verified;
  j["note"] = "numerical covering by cylinder hulls, not a proof";
  return j.dump(2);
}

HallCover hall_sum_check(double resolution, std::size_t pair_budget) {
  if (!(resolution >= 1e-5 && resolution <= 1e-2)) throw Error(ErrorKind::Configuration, "resolution must lie in [1e-5, 1e-2]");
  HallCover h;
  h.resolution = resolution;
  const double r2 = std::sqrt(2.0) - 1.0;
  h.target = {r2 + resolution, 4.0 * r2 - resolution};

  const auto cyl = bounded_cf_cylinders(4, resolution / 4.0);
  const auto u = merge(cyl);
  h.cylinders = cyl.size();
  h.merged_cylinders = u.size();
  const std::size_t n = u.size();
  h.pairs = n * (n + 1) / 2;
  if (h.pairs > pair_budget) throw Error(ErrorKind::Resource, "pair budget exceeded at this resolution");

  // I_i + U is sorted in j; merge each row on the fly, then merge the rows.
  std::vector<IntervalQ> runs;
  for (std::size_t i = 0; i < n; ++i) {
    IntervalQ cur{u[i].lo + u[i].lo, u[i].hi + u[i].hi};
    for (std::size_t j = i + 1; j < n; ++j) {
      const IntervalQ s{u[i].lo + u[j].lo, u[i].hi + u[j].hi};
      if (s.lo <= cur.hi) {
        cur.hi = std::max(cur.hi, s.hi);
      } else {
        runs.push_back(cur);
        cur = s;
      }
    }
    runs.push_back(cur);
  }
  h.cover = merge(std::move(runs));

  double reach = h.target.lo;
  bool started = false;
  for (const auto& iv : h.cover) {
    if (iv.hi < h.target.lo) continue;
    if (iv.lo > h.target.hi) break;
    if (!started) {
      h.max_gap = std::max(0.0, iv.lo - h.target.lo);
      started = true;
    } else {
      h.max_gap = std::max(h.max_gap, iv.lo - reach);
    }
    reach = std::max(reach, iv.hi);
  }
  if (!started) {
    h.max_gap = h.target.length();
  } else {
    h.max_gap = std::max(h.max_gap, h.target.hi - reach);
  }
  h.verified = started && h.max_gap <= resolution;
  return h;
}

double freiman_constant() { return (2221564096.0 + 283748.0 * std::sqrt(462.0)) / 491993569.0; }

}  // namespace glorenz
