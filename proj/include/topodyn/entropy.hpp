#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "topodyn/system.hpp"

namespace topodyn {

/// max over k < n of d(f^k(x), f^k(y)), the separation quantity behind
/// (n,eps)-separated sets. Isometries collapse the max to the plain
/// distance.
inline double dyn_distance(const DynSystem& sys, const Point& x,
                           const Point& y, long n) {
  if (n < 1) throw DomainError("dyn_distance needs n >= 1");
  if (sys.isometry()) return sys.distance(x, y);
  if (sys.symbolic_exact()) {
    auto fd = first_difference(x.symbolic(), y.symbolic());
    if (!fd.index) return 0.0;
    long j = static_cast<long>(*fd.index);
    // d(shift^k x, shift^k y) = 2^{-(j-k)} for k < j; maximal at k = n-1.
    long best = std::max<long>(1, j - (n - 1));
    return std::ldexp(1.0, -static_cast<int>(best));
  }
  double best = 0;
  for (long k = 0; k < n; ++k)
    best = std::max(best, sys.distance(sys.iterate(x, k), sys.iterate(y, k)));
  return best;
}

/// Separation predicate. Torus systems use the literal strict inequality
/// d > eps at some time below n. Symbolic systems quantize eps to the
/// resolution m = sym_resolution(eps): two streams are (n, eps)-separated
/// exactly when they disagree within their first n+m-1 symbols, the
/// complement of "every compared window agrees on m symbols".
inline bool separated_pair(const DynSystem& sys, const Point& x,
                           const Point& y, long n, double eps) {
  if (sys.symbolic_exact()) {
    int m = sym_resolution(eps);
    if (m == 0) return false;
    auto fd = first_difference(x.symbolic(), y.symbolic());
    return fd.index && static_cast<long>(*fd.index) <= n + m - 1;
  }
  return dyn_distance(sys, x, y, n) > eps;
}

struct PairWitness {
  std::size_t first = 0;   // indices into the certificate's point list
  std::size_t second = 0;
  long time = 0;           // k < n achieving the separating distance
  double distance = 0.0;
};

struct SeparationCertificate {
  long n = 1;
  double epsilon = 0.0;
  int resolution = 0;  // symbolic band; 0 on torus systems
  std::vector<Point> points;
  std::vector<PairWitness> witnesses;
  bool spanning_ok = false;    // kept set (n,eps)-spans the candidates
  double max_span_distance = 0.0;
};

namespace detail {

inline PairWitness make_witness(const DynSystem& sys, const Point& x,
                                const Point& y, long n) {
  PairWitness w;
  if (sys.symbolic_exact()) {
    auto fd = first_difference(x.symbolic(), y.symbolic());
    long j = static_cast<long>(fd.index.value());
    w.time = std::min<long>(n - 1, j - 1);
    w.distance = std::ldexp(1.0, -static_cast<int>(j - w.time));
    return w;
  }
  double best = -1;
  for (long k = 0; k < n; ++k) {
    double d = sys.distance(sys.iterate(x, k), sys.iterate(y, k));
    if (d > best) {
      best = d;
      w.time = k;
    }
  }
  w.distance = best;
  return w;
}

}  // namespace detail

/// Greedy inclusion-maximal (n,eps)-separated subset of the candidates,
/// processed in input order, with per-pair witnesses. Inclusion-maximality
/// makes the result (n,eps)-spanning over the candidate set: every dropped
/// candidate is within eps of some kept point, which the certificate
/// records.
inline SeparationCertificate separated_set(const DynSystem& sys,
                                           const std::vector<Point>& candidates,
                                           long n, double eps) {
  if (candidates.empty()) throw DomainError("separated_set needs candidates");
  if (n < 1 || eps <= 0) throw DomainError("separated_set needs n >= 1, eps > 0");
  SeparationCertificate cert;
  cert.n = n;
  cert.epsilon = eps;
  cert.resolution = sys.symbolic_exact() ? sym_resolution(eps) : 0;
  std::vector<std::size_t> kept;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    bool ok = true;
    for (std::size_t k : kept) {
      if (!separated_pair(sys, candidates[k], candidates[c], n, eps)) {
        ok = false;
        double d = dyn_distance(sys, candidates[k], candidates[c], n);
        cert.max_span_distance = std::max(cert.max_span_distance, d);
        break;
      }
    }
    if (ok) kept.push_back(c);
  }
  for (std::size_t i = 0; i < kept.size(); ++i) {
    for (std::size_t j = i + 1; j < kept.size(); ++j) {
      PairWitness w =
          detail::make_witness(sys, candidates[kept[i]], candidates[kept[j]], n);
      w.first = i;
      w.second = j;
      cert.witnesses.push_back(w);
    }
  }
  for (std::size_t k : kept) cert.points.push_back(candidates[k]);
  // Spanning re-check over the full candidate list.
  cert.spanning_ok = true;
  for (const Point& c : candidates) {
    bool covered = false;
    for (const Point& p : cert.points)
      if (!separated_pair(sys, p, c, n, eps)) {
        covered = true;
        break;
      }
    if (!covered) cert.spanning_ok = false;
  }
  return cert;
}

/// Greedy cardinality only, skipping witness and spanning bookkeeping.
inline std::size_t separated_count_greedy(const DynSystem& sys,
                                          const std::vector<Point>& candidates,
                                          long n, double eps) {
  std::vector<std::size_t> kept;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    bool ok = true;
    for (std::size_t k : kept)
      if (!separated_pair(sys, candidates[k], candidates[c], n, eps)) {
        ok = false;
        break;
      }
    if (ok) kept.push_back(c);
  }
  return kept.size();
}

/// Re-verify every stored witness through iterate/distance and the spanning
/// claim. Used by report round-trip checks.
inline bool verify_separation_certificate(const DynSystem& sys,
                                          const SeparationCertificate& cert) {
  for (const auto& w : cert.witnesses) {
    if (w.time < 0 || w.time >= cert.n) return false;
    const Point& a = cert.points[w.first];
    const Point& b = cert.points[w.second];
    double d = sys.distance(sys.iterate(a, w.time), sys.iterate(b, w.time));
    if (std::fabs(d - w.distance) > 1e-12) return false;
    if (sys.symbolic_exact()) {
      if (d < std::ldexp(1.0, -cert.resolution)) return false;
    } else {
      if (!(d > cert.epsilon)) return false;
    }
  }
  return true;
}

/// Exact s(X, n, 2^-m) on a subshift: two points are (n, 2^-m)-separated
/// exactly when their length-(n+m-1) prefixes differ, so the count is the
/// number of admissible words of that length.
inline std::uint64_t separated_count_exact(const DynSystem& sys, long n,
                                           int m) {
  if (!sys.symbolic_exact())
    throw UnsupportedSystemError("separated_count_exact needs a subshift");
  if (n < 1 || m < 1) throw DomainError("separated_count_exact needs n, m >= 1");
  return sys.language().count_words(static_cast<std::size_t>(n + m - 1));
}

struct EntropyEstimate {
  std::string system;
  double epsilon = 0.0;
  std::vector<long> ns;
  std::vector<std::uint64_t> counts;
  double slope = 0.0;     // least squares on ln s vs n, upper half of range
  double endpoint = 0.0;  // ln s(n_max) / n_max
  bool exact = false;     // word-count path used
};

namespace detail {

inline void finish_estimate(EntropyEstimate& e) {
  for (std::size_t i = 1; i < e.counts.size(); ++i)
    if (e.counts[i] < e.counts[i - 1])
      throw ValidationError("separated counts decreased with n");
  const std::size_t k = e.ns.size();
  e.endpoint = std::log(static_cast<double>(e.counts.back())) /
               static_cast<double>(e.ns.back());
  std::size_t from = k / 2;
  if (k - from < 2) from = k >= 2 ? k - 2 : 0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t cnt = k - from;
  if (cnt < 2) {
    e.slope = 0.0;
    return;
  }
  for (std::size_t i = from; i < k; ++i) {
    double x = static_cast<double>(e.ns[i]);
    double y = std::log(static_cast<double>(e.counts[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double denom = cnt * sxx - sx * sx;
  e.slope = denom == 0 ? 0.0 : (cnt * sxy - sx * sy) / denom;
  if (e.slope < -1e-12 || e.endpoint < -1e-12)
    throw ValidationError("entropy estimate went negative beyond tolerance");
}

}  // namespace detail

/// Fills s(K, n, eps) over the given window lengths: exactly by word count
/// on subshifts, greedily over the candidate set otherwise. Reports both
/// limsup stand-ins: the regression slope over the upper half of the range
/// and the endpoint ln s(n_max)/n_max.
inline EntropyEstimate eps_entropy_estimate(const DynSystem& sys,
                                            const std::vector<Point>& candidates,
                                            double eps,
                                            const std::vector<long>& ns) {
  if (ns.empty()) throw DomainError("empty n range");
  for (std::size_t i = 1; i < ns.size(); ++i)
    if (ns[i] <= ns[i - 1]) throw DomainError("n range must ascend");
  EntropyEstimate e;
  e.system = kind_name(sys.kind());
  e.epsilon = eps;
  e.ns = ns;
  if (sys.symbolic_exact()) {
    int m = std::max(1, sym_resolution(eps));
    for (long n : ns)
      e.counts.push_back(separated_count_exact(sys, n, m));
    e.exact = true;
  } else {
    if (candidates.empty())
      throw DomainError("torus entropy estimate needs candidates");
    if (candidates.size() > (1u << 16))
      throw BudgetError(1u << 16, candidates.size(), "entropy candidates");
    for (long n : ns)
      e.counts.push_back(separated_count_greedy(sys, candidates, n, eps));
    e.exact = false;
  }
  detail::finish_estimate(e);
  return e;
}

struct GammaProbe {
  std::vector<Point> members;    // candidates staying strictly eps-close
  EntropyEstimate estimate;      // measured on the members
  bool exact_singleton = false;  // expansiveness short-circuit
};

/// Finite-horizon sample of Gamma_eps(x) = {y : d(f^n x, f^n y) < eps for
/// all n}. The strict inequality follows the definition; finiteness of N
/// makes this an over-approximation of the true set.
inline GammaProbe gamma_set_probe(const DynSystem& sys, const Point& x,
                                  double eps, long horizon,
                                  const std::vector<Point>& candidates,
                                  const std::vector<long>& measure_ns,
                                  std::optional<double> measure_eps = {}) {
  if (horizon < 1) throw DomainError("gamma_set_probe needs horizon >= 1");
  GammaProbe g;
  if (sys.symbolic_exact() && eps <= 0.5 + 1e-15) {
    // Agreement within eps < diameter at every shift forces equality.
    g.members.push_back(x);
    g.exact_singleton = true;
    g.estimate.system = kind_name(sys.kind());
    g.estimate.epsilon = eps;
    g.estimate.ns = measure_ns;
    g.estimate.counts.assign(measure_ns.size(), 1);
    detail::finish_estimate(g.estimate);
    return g;
  }
  for (const Point& y : candidates) {
    bool stays = true;
    if (sys.symbolic_exact()) {
      auto fd = first_difference(x.symbolic(), y.symbolic());
      long j = fd.index ? static_cast<long>(*fd.index) : 0;
      if (fd.index && std::ldexp(1.0, -static_cast<int>(std::max<long>(
                          1, j - (horizon - 1)))) >= eps)
        stays = false;
    } else {
      for (long k = 0; k < horizon && stays; ++k)
        if (sys.distance(sys.iterate(x, k), sys.iterate(y, k)) >= eps)
          stays = false;
    }
    if (stays) g.members.push_back(y);
  }
  double me = measure_eps.value_or(std::min(eps, 0.5));
  g.estimate = eps_entropy_estimate(sys, g.members, me, measure_ns);
  return g;
}

struct HStarProbe {
  double value = 0.0;
  std::string certificate;  // "expansive" when exact, otherwise "sampled"
  std::vector<EntropyEstimate> per_sample;
};

/// Sampled h*(f, eps) = sup over base points of the entropy carried by
/// Gamma_eps(x). On subshifts with eps <= 1/2 the answer is exactly 0.
inline HStarProbe h_star_probe(const DynSystem& sys, double eps,
                               const std::vector<Point>& samples, long horizon,
                               const std::vector<Point>& candidates,
                               const std::vector<long>& measure_ns) {
  if (samples.empty()) throw DomainError("h_star_probe needs samples");
  HStarProbe r;
  if (sys.symbolic_exact() && eps <= 0.5 + 1e-15) {
    r.value = 0.0;
    r.certificate = "expansive";
    return r;
  }
  r.certificate = "sampled";
  for (const Point& x : samples) {
    GammaProbe g = gamma_set_probe(sys, x, eps, horizon, candidates, measure_ns);
    r.per_sample.push_back(g.estimate);
    r.value = std::max(r.value, g.estimate.slope);
  }
  return r;
}

/// Upper bound h(K,f) <= h(K,f,eps) + h*(f,eps).
inline double entropy_bound_combine(double h_k_eps, double h_star) {
  if (h_k_eps < 0 || h_star < 0)
    throw DomainError("entropy bound terms must be nonnegative");
  return h_k_eps + h_star;
}

}  // namespace topodyn
