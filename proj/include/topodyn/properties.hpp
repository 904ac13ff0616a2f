#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "topodyn/entropy.hpp"
#include "topodyn/system.hpp"

namespace topodyn {

enum class VerdictStatus { holds_at_scale, fails_with_witness, inconclusive };

inline const char* verdict_name(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::holds_at_scale: return "holds-at-scale";
    case VerdictStatus::fails_with_witness: return "fails-with-witness";
    case VerdictStatus::inconclusive: return "inconclusive";
  }
  return "?";
}

struct Witness {
  std::string description;
  std::vector<double> values;
  std::vector<long> indices;
  std::vector<Point> points;
  std::vector<Word> words;
};

/// Scale-bounded semi-decision result. Every verdict carries the parameters
/// needed to reproduce it; a holds verdict never claims more than the
/// recorded scale.
struct PropertyVerdict {
  std::string property;
  VerdictStatus status = VerdictStatus::inconclusive;
  std::map<std::string, double> parameters;
  Witness witness;
};

struct DisplacementResult {
  double value = 0.0;        // max over the net of d(f^n x, x)
  std::size_t arg_index = 0; // net point achieving it
  double correction = 0.0;   // grid-modulus allowance toward the true sup
};

namespace detail {

/// Lipschitz constant of f^n in the sup metric, used only to report how far
/// the net maximum can sit below the true supremum.
inline double iterate_lipschitz(const DynSystem& sys, long n) {
  switch (sys.kind()) {
    case SystemKind::skew_product: return static_cast<double>(n) + 1.0;
    default: return 1.0;  // rotations and products of rotations; shifts
  }
}

}  // namespace detail

/// Net maximum of d(f^n x, x), a lower bound for D0(f^n, id). For torus
/// systems with known grid spacing the reported correction bounds the gap
/// to the true supremum.
inline DisplacementResult sup_displacement_ex(const DynSystem& sys,
                                              const std::vector<Point>& net,
                                              long n, double net_delta = 0.0) {
  if (net.empty()) throw DomainError("sup_displacement needs a net");
  if (n < 1) throw DomainError("sup_displacement needs n >= 1");
  DisplacementResult r;
  for (std::size_t i = 0; i < net.size(); ++i) {
    double d = sys.distance(sys.iterate(net[i], n), net[i]);
    if (d > r.value) {
      r.value = d;
      r.arg_index = i;
    }
  }
  if (sys.is_torus() && net_delta > 0)
    r.correction = (detail::iterate_lipschitz(sys, n) + 1.0) * net_delta / 2.0;
  return r;
}

inline double sup_displacement(const DynSystem& sys,
                               const std::vector<Point>& net, long n) {
  return sup_displacement_ex(sys, net, n).value;
}

struct RigidityProbe {
  PropertyVerdict verdict;
  double min_displacement = 0.0;
  long argmin_n = 0;
};

/// Scans n <= N for near-identity iterates. holds-at-scale when some
/// displacement drops to the tolerance, fails-with-witness when a positive
/// floor persists across every n.
inline RigidityProbe rigidity_probe(const DynSystem& sys,
                                    const std::vector<Point>& net, long N,
                                    double tol = 1e-2, double net_delta = 0.0) {
  if (N < 1) throw DomainError("rigidity_probe needs N >= 1");
  RigidityProbe probe;
  probe.min_displacement = 2.0;
  for (long n = 1; n <= N; ++n) {
    auto d = sup_displacement_ex(sys, net, n, net_delta);
    if (d.value < probe.min_displacement) {
      probe.min_displacement = d.value;
      probe.argmin_n = n;
    }
  }
  PropertyVerdict& v = probe.verdict;
  v.property = "uniform-rigidity";
  v.parameters = {{"N", static_cast<double>(N)},
                  {"net_size", static_cast<double>(net.size())},
                  {"tolerance", tol},
                  {"min_displacement", probe.min_displacement},
                  {"argmin_n", static_cast<double>(probe.argmin_n)}};
  if (probe.min_displacement <= tol) {
    v.status = VerdictStatus::holds_at_scale;
  } else {
    v.status = VerdictStatus::fails_with_witness;
    v.witness.description =
        sys.kind() == SystemKind::skew_product
            ? "second-coordinate drift keeps every iterate displaced on the net"
            : "every iterate up to N moves some net point by at least the floor";
    v.witness.values = {probe.min_displacement,
                        static_cast<double>(probe.argmin_n)};
  }
  return probe;
}

struct ReturnTimeSet {
  std::string base;  // label: point description or "common"
  double epsilon = 0.0;
  long horizon = 0;
  std::vector<long> times;
};

/// R(x, eps) up to N: times with d(f^n x, x) <= eps.
inline ReturnTimeSet return_times(const DynSystem& sys, const Point& x,
                                  double eps, long N) {
  if (eps < 0 || N < 1) throw DomainError("return_times needs eps >= 0, N >= 1");
  ReturnTimeSet r;
  r.base = "point";
  r.epsilon = eps;
  r.horizon = N;
  for (long n = 1; n <= N; ++n)
    if (sys.distance(sys.iterate(x, n), x) <= eps) r.times.push_back(n);
  return r;
}

/// Common return times over the whole net: n with max_x d(f^n x, x) <= eps,
/// the net version of R(eps).
inline ReturnTimeSet common_return_times(const DynSystem& sys,
                                         const std::vector<Point>& net,
                                         double eps, long N) {
  if (net.empty()) throw DomainError("common_return_times needs a net");
  ReturnTimeSet r;
  r.base = "common";
  r.epsilon = eps;
  r.horizon = N;
  for (long n = 1; n <= N; ++n)
    if (sup_displacement(sys, net, n) <= eps) r.times.push_back(n);
  return r;
}

/// Smallest L such that every window [t, min(t+L-1, horizon)], t = 1..
/// horizon, meets the set. Windows are clipped at the horizon, so a return
/// gap reaching the horizon (nothing after the last return) defeats every L
/// and yields none: syndeticity is only certified inside the observed range.
inline std::optional<long> syndetic_bound(const ReturnTimeSet& set,
                                          long horizon) {
  if (horizon > set.horizon)
    throw DomainError("syndetic horizon exceeds the set's horizon");
  std::vector<long> times;
  for (long t : set.times)
    if (t <= horizon) times.push_back(t);
  if (times.empty()) return std::nullopt;
  if (times.back() < horizon) return std::nullopt;  // empty clipped suffix
  long worst = times.front();  // leading window [1, times[0]]
  for (std::size_t i = 1; i < times.size(); ++i)
    worst = std::max(worst, times[i] - times[i - 1]);
  return worst;
}

struct EquicontinuityResult {
  PropertyVerdict verdict;
  std::optional<double> delta;  // largest grid delta that works
};

/// Largest delta from the grid such that every net pair within delta stays
/// strictly within eps for all iterates up to N. Boundary comparisons carry
/// the numeric tolerance: a pair only counts as violating when it exceeds
/// eps by more than tol, so isometries are not tripped up by rounding at
/// pairs sitting exactly on the threshold.
inline EquicontinuityResult equicontinuity_modulus(
    const DynSystem& sys, double eps, long N, const std::vector<Point>& net,
    const std::vector<double>& delta_grid, double tol = 1e-9) {
  if (delta_grid.empty()) throw DomainError("empty delta grid");
  for (std::size_t i = 1; i < delta_grid.size(); ++i)
    if (delta_grid[i] >= delta_grid[i - 1])
      throw DomainError("delta grid must descend");
  EquicontinuityResult res;
  double min_violating_d = 2.0;
  std::size_t wi = 0, wj = 0;
  long wk = 0;
  double wd = 0;
  for (std::size_t i = 0; i < net.size(); ++i) {
    for (std::size_t j = i + 1; j < net.size(); ++j) {
      double d0 = sys.distance(net[i], net[j]);
      if (d0 >= delta_grid.front() || d0 >= min_violating_d) continue;
      for (long k = 0; k <= N; ++k) {
        double dk = sys.distance(sys.iterate(net[i], k), sys.iterate(net[j], k));
        if (dk >= eps + tol) {
          if (d0 < min_violating_d) {
            min_violating_d = d0;
            wi = i;
            wj = j;
            wk = k;
            wd = dk;
          }
          break;
        }
      }
    }
  }
  PropertyVerdict& v = res.verdict;
  v.property = "equicontinuity";
  v.parameters = {{"epsilon", eps},
                  {"N", static_cast<double>(N)},
                  {"net_size", static_cast<double>(net.size())},
                  {"tolerance", tol}};
  for (double dg : delta_grid) {
    if (dg <= min_violating_d) {
      res.delta = dg;
      break;
    }
  }
  if (res.delta) {
    v.status = VerdictStatus::holds_at_scale;
    v.parameters["delta"] = *res.delta;
  } else {
    v.status = VerdictStatus::fails_with_witness;
    v.witness.description = "close pair separates under iteration";
    v.witness.points = {net[wi], net[wj]};
    v.witness.indices = {static_cast<long>(wi), static_cast<long>(wj), wk};
    v.witness.values = {min_violating_d, wd};
  }
  return res;
}

namespace detail {

/// Minimal W such that every length-W window fully inside the stream
/// contains a complete occurrence from `occ` (starts of a length-l word in
/// a stream of length `len`).
inline std::optional<long> smallest_covering_window(
    const std::vector<long>& occ, long l, long len) {
  if (occ.empty()) return std::nullopt;
  long W = occ.front() + l;  // window starting at 0
  for (std::size_t i = 1; i < occ.size(); ++i)
    W = std::max(W, occ[i] - occ[i - 1] + l - 1);
  W = std::max(W, len - occ.back());  // last full window
  return W;
}

}  // namespace detail

/// Minimality probe. Torus systems: every net point's orbit up to N must be
/// eps-dense in the net. Subshifts: every admissible word of length
/// ceil(log2(1/eps)) must occur in every window of length W of every
/// sampled orbit; the least such W is reported.
inline PropertyVerdict minimality_probe(const DynSystem& sys, double eps,
                                        long N, const std::vector<Point>& net) {
  if (eps <= 0) throw DomainError("minimality_probe needs eps > 0");
  PropertyVerdict v;
  v.property = "minimality";
  v.parameters = {{"epsilon", eps},
                  {"N", static_cast<double>(N)},
                  {"net_size", static_cast<double>(net.size())}};
  if (sys.is_torus()) {
    for (std::size_t s = 0; s < net.size(); ++s) {
      std::vector<Point> orbit;
      orbit.reserve(static_cast<std::size_t>(N));
      for (long k = 0; k <= N; ++k) orbit.push_back(sys.iterate(net[s], k));
      for (std::size_t t = 0; t < net.size(); ++t) {
        double best = 2.0;
        for (const auto& p : orbit) {
          best = std::min(best, sys.distance(p, net[t]));
          if (best <= eps) break;
        }
        if (best > eps) {
          v.status = VerdictStatus::fails_with_witness;
          v.witness.description = "orbit misses a net point";
          v.witness.points = {net[s], net[t]};
          v.witness.values = {best};
          return v;
        }
      }
    }
    v.status = VerdictStatus::holds_at_scale;
    return v;
  }
  // Subshift path: uniform word recurrence over the sampled streams.
  long l = std::max<long>(1, static_cast<long>(
                                 std::ceil(std::log2(1.0 / eps))));
  auto words = sys.language().enumerate_words(static_cast<std::size_t>(l));
  long worst_window = 0;
  for (std::size_t s = 0; s < net.size(); ++s) {
    const auto& sp = net[s].symbolic();
    long len = std::min<long>(N, static_cast<long>(sp.horizon()));
    Word stream = sp.prefix(static_cast<std::size_t>(len));
    for (const auto& w : words) {
      std::vector<long> occ;
      for (long i = 0; i + l <= len; ++i) {
        bool match = true;
        for (long j = 0; j < l; ++j)
          if (stream[static_cast<std::size_t>(i + j)] !=
              w[static_cast<std::size_t>(j)]) {
            match = false;
            break;
          }
        if (match) occ.push_back(i);
      }
      auto W = detail::smallest_covering_window(occ, l, len);
      if (!W) {
        v.status = VerdictStatus::fails_with_witness;
        v.witness.description = "word never recurs in a sampled orbit";
        v.witness.points = {net[s]};
        v.witness.words = {w};
        v.witness.indices = {static_cast<long>(s)};
        return v;
      }
      worst_window = std::max(worst_window, *W);
    }
  }
  v.status = VerdictStatus::holds_at_scale;
  v.parameters["recurrence_window"] = static_cast<double>(worst_window);
  return v;
}

using Observable = std::pair<std::string, std::function<double(const Point&)>>;

inline std::vector<Observable> default_observables(const DynSystem& sys) {
  std::vector<Observable> obs;
  if (sys.is_torus()) {
    for (std::size_t i = 0; i < sys.dimension(); ++i) {
      obs.emplace_back("cos2pi_x" + std::to_string(i), [i](const Point& p) {
        return std::cos(2.0 * M_PI * p.torus().coords[i]);
      });
      obs.emplace_back("sin2pi_x" + std::to_string(i), [i](const Point& p) {
        return std::sin(2.0 * M_PI * p.torus().coords[i]);
      });
    }
  } else {
    for (int s = 1; s <= sys.alphabet_size(); ++s) {
      obs.emplace_back("symbol_is_" + std::to_string(s), [s](const Point& p) {
        return p.symbolic().at(0) == s ? 1.0 : 0.0;
      });
    }
  }
  return obs;
}

/// Heuristic unique-ergodicity probe: the spread max - min over sample
/// points of the Birkhoff average (1/n) sum phi(f^k x), per observable.
inline PropertyVerdict unique_ergodicity_probe(
    const DynSystem& sys, const std::vector<Observable>& observables, long n,
    const std::vector<Point>& samples, double tol = 1e-2) {
  if (samples.empty() || observables.empty())
    throw DomainError("unique_ergodicity_probe needs samples and observables");
  PropertyVerdict v;
  v.property = "unique-ergodicity";
  v.parameters = {{"n", static_cast<double>(n)},
                  {"samples", static_cast<double>(samples.size())},
                  {"tolerance", tol}};
  double worst_spread = 0;
  std::string worst_name;
  std::size_t worst_lo = 0, worst_hi = 0;
  for (const auto& [name, phi] : observables) {
    double lo = 1e300, hi = -1e300;
    std::size_t lo_i = 0, hi_i = 0;
    for (std::size_t s = 0; s < samples.size(); ++s) {
      double sum = 0;
      Point p = samples[s];
      for (long k = 0; k < n; ++k) {
        sum += phi(p);
        p = sys.apply(p);
      }
      double avg = sum / static_cast<double>(n);
      if (avg < lo) {
        lo = avg;
        lo_i = s;
      }
      if (avg > hi) {
        hi = avg;
        hi_i = s;
      }
    }
    if (hi - lo > worst_spread) {
      worst_spread = hi - lo;
      worst_name = name;
      worst_lo = lo_i;
      worst_hi = hi_i;
    }
  }
  v.parameters["max_spread"] = worst_spread;
  if (worst_spread <= tol) {
    v.status = VerdictStatus::holds_at_scale;
  } else {
    v.status = VerdictStatus::fails_with_witness;
    v.witness.description = "Birkhoff averages disagree across samples for " +
                            worst_name;
    v.witness.points = {samples[worst_lo], samples[worst_hi]};
    v.witness.values = {worst_spread};
  }
  return v;
}

}  // namespace topodyn
