#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "topodyn/descriptor.hpp"
#include "topodyn/errors.hpp"
#include "topodyn/language.hpp"
#include "topodyn/point.hpp"

namespace topodyn {

/// Number of leading symbols two symbol streams must share to count as
/// "within eps" of each other. This quantizes a real tolerance to the dyadic
/// band (2^-(m+1), 2^-m]: inside the band, being within eps means agreeing
/// on the first m symbols and being beyond eps means disagreeing among them.
/// The two predicates are complements, which keeps separated/spanning
/// arguments exact on subshifts.
inline int sym_resolution(double eps) {
  if (eps >= 1.0) return 0;
  if (eps <= 0.0) throw DomainError("epsilon must be positive");
  int e = 0;
  double f = std::frexp(eps, &e);
  return f == 0.5 ? 1 - e : -e;
}

namespace detail {

/// frac(n * alpha) through the exact rational path when available, long
/// double accumulation otherwise. Closed-form iteration lives on this.
inline double frac_times(std::int64_t n, const AlphaValue& a) {
  if (a.rational) {
    if (a.den == 0) return 0.0;
    __int128 r = (static_cast<__int128>(n % a.den) * (a.num % a.den)) % a.den;
    if (r < 0) r += a.den;
    return static_cast<double>(static_cast<std::int64_t>(r)) /
           static_cast<double>(a.den);
  }
  long double v = static_cast<long double>(n) * static_cast<long double>(a.value);
  long double f = v - std::floor(v);
  double out = static_cast<double>(f);
  return out >= 1.0 ? 0.0 : (out < 0.0 ? out + 1.0 : out);
}

inline double frac_times_pair(std::int64_t n, std::int64_t m,
                              const AlphaValue& a) {
  // frac(n*m/2 * alpha) where n*m may overflow int64 in the rational path.
  if (a.rational) {
    if (a.den == 0) return 0.0;
    __int128 k = static_cast<__int128>(n) * m / 2;
    __int128 r = (k % a.den) * (a.num % a.den) % a.den;
    if (r < 0) r += a.den;
    return static_cast<double>(static_cast<std::int64_t>(r)) /
           static_cast<double>(a.den);
  }
  long double k = static_cast<long double>(n) * static_cast<long double>(m) / 2.0L;
  long double v = k * static_cast<long double>(a.value);
  long double f = v - std::floor(v);
  double out = static_cast<double>(f);
  return out >= 1.0 ? 0.0 : (out < 0.0 ? out + 1.0 : out);
}

}  // namespace detail

class DynSystem;
inline DynSystem make_system(const SystemDescriptor& d);

/// A compact-metric-space map bundle: the map, the metric, finite nets and
/// (for shifts) the word language, behind one value type. Instances are
/// immutable after construction.
class DynSystem {
 public:
  SystemKind kind() const { return desc_.kind; }
  const SystemDescriptor& descriptor() const { return desc_; }

  /// Symbolic-exact systems admit exact word-level computation; torus
  /// systems are numeric with an explicit tolerance policy.
  bool symbolic_exact() const {
    return kind() == SystemKind::full_shift || kind() == SystemKind::sft ||
           kind() == SystemKind::sturmian;
  }

  bool is_torus() const { return !symbolic_exact(); }

  /// All iterates preserve the metric (rotations and their products).
  bool isometry() const {
    if (kind() == SystemKind::circle_rotation ||
        kind() == SystemKind::torus_rotation)
      return true;
    if (kind() == SystemKind::product) {
      for (const auto& f : factors_)
        if (!f.isometry()) return false;
      return true;
    }
    return false;
  }

  std::size_t dimension() const {
    switch (kind()) {
      case SystemKind::circle_rotation: return 1;
      case SystemKind::torus_rotation: return desc_.alphas.size();
      case SystemKind::skew_product: return 2;
      case SystemKind::product: {
        std::size_t d = 0;
        for (const auto& f : factors_) d += f.dimension();
        return d;
      }
      default: return 0;
    }
  }

  int alphabet_size() const {
    if (!symbolic_exact())
      throw UnsupportedSystemError("alphabet_size on a torus system");
    return lang_.alphabet();
  }

  const SubshiftLanguage& language() const {
    if (!symbolic_exact())
      throw UnsupportedSystemError("language() on a torus system");
    return lang_;
  }

  double diameter() const { return 0.5; }

  Point apply(const Point& x) const { return iterate(x, 1); }

  /// n-fold application in closed form: rotations advance by frac(n*alpha),
  /// the skew product by (x + n a, y + n x + n(n-1)/2 a), shifts by an
  /// offset bump. iterate(x, 0) is x.
  Point iterate(const Point& x, std::int64_t n) const {
    if (n < 0) throw DomainError("iterate requires n >= 0");
    switch (kind()) {
      case SystemKind::circle_rotation:
      case SystemKind::torus_rotation: {
        const auto& tp = x.torus();
        check_dim(tp);
        std::vector<double> c(tp.coords);
        for (std::size_t i = 0; i < c.size(); ++i)
          c[i] = wrap_unit(c[i] + detail::frac_times(n, desc_.alphas[i]));
        return Point(TorusPoint(std::move(c)));
      }
      case SystemKind::skew_product: {
        const auto& tp = x.torus();
        check_dim(tp);
        const AlphaValue& a = desc_.alphas[0];
        double xn = wrap_unit(tp.coords[0] + detail::frac_times(n, a));
        long double drift = static_cast<long double>(n) *
                            static_cast<long double>(tp.coords[0]);
        drift -= std::floor(drift);
        double yn = wrap_unit(tp.coords[1] + static_cast<double>(drift) +
                              detail::frac_times_pair(n, n - 1, a));
        return Point(TorusPoint(xn, yn));
      }
      case SystemKind::product: {
        const auto& tp = x.torus();
        check_dim(tp);
        std::vector<double> c;
        c.reserve(tp.coords.size());
        std::size_t at = 0;
        for (const auto& f : factors_) {
          std::size_t d = f.dimension();
          TorusPoint part(std::vector<double>(tp.coords.begin() + at,
                                              tp.coords.begin() + at + d));
          Point moved = f.iterate(Point(part), n);
          for (double v : moved.torus().coords) c.push_back(v);
          at += d;
        }
        return Point(TorusPoint(std::move(c)));
      }
      default: {
        const auto& sp = x.symbolic();
        return Point(sp.shifted(static_cast<std::size_t>(n)));
      }
    }
  }

  DistanceResult distance_ex(const Point& x, const Point& y) const {
    if (symbolic_exact()) {
      if (!x.is_symbolic() || !y.is_symbolic())
        throw TypeError("symbolic system given a torus point");
      return point_distance_ex(x, y);
    }
    if (!x.is_torus() || !y.is_torus())
      throw TypeError("torus system given a symbolic point");
    check_dim(x.torus());
    check_dim(y.torus());
    return point_distance_ex(x, y);
  }

  double distance(const Point& x, const Point& y) const {
    return distance_ex(x, y).value;
  }

  /// A delta-dense finite subset: torus systems get a uniform grid with
  /// spacing <= delta per coordinate, shifts all admissible words of length
  /// ceil(log2(1/delta)) extended to points by the deterministic
  /// continuation rule. min_horizon bounds the certified horizon of the
  /// symbolic points produced.
  std::vector<Point> build_net(double delta,
                               std::size_t min_horizon = 1024) const {
    if (delta <= 0) throw DomainError("delta must be positive");
    if (symbolic_exact()) {
      std::size_t len = static_cast<std::size_t>(
          std::max(1.0, std::ceil(std::log2(1.0 / delta))));
      std::uint64_t count = lang_.count_words(len);
      if (count > desc_.net_cap)
        throw BudgetError(desc_.net_cap, count, "symbolic net size");
      std::vector<Point> net;
      for (const auto& w : lang_.enumerate_words(len, desc_.net_cap))
        net.push_back(point_from_word(w, std::max(min_horizon, len)));
      return net;
    }
    std::size_t per = static_cast<std::size_t>(std::ceil(1.0 / delta));
    if (per == 0) per = 1;
    std::size_t d = dimension();
    double total = std::pow(static_cast<double>(per), static_cast<double>(d));
    if (total > static_cast<double>(desc_.net_cap))
      throw BudgetError(desc_.net_cap, static_cast<std::uint64_t>(total),
                        "torus net size");
    std::vector<Point> net;
    std::vector<std::size_t> idx(d, 0);
    while (true) {
      std::vector<double> c(d);
      for (std::size_t i = 0; i < d; ++i)
        c[i] = static_cast<double>(idx[i]) / static_cast<double>(per);
      net.push_back(Point(TorusPoint(std::move(c))));
      std::size_t i = d;
      while (i > 0 && idx[i - 1] + 1 == per) idx[--i] = 0;
      if (i == 0) break;
      ++idx[i - 1];
    }
    return net;
  }

  /// Symbolic point whose stream starts with w and continues by the
  /// language's deterministic rule, certified to `horizon` symbols.
  Point point_from_word(const Word& w, std::size_t horizon) const {
    if (!symbolic_exact())
      throw UnsupportedSystemError("point_from_word on a torus system");
    if (!lang_.word_admissible(w))
      throw ValidationError("word is not admissible in this subshift");
    return Point(SymbolicPoint(lang_.extend(w, std::max(horizon, w.size()))));
  }

  /// Canonical transitive base point: phase 0 for rotations and the skew
  /// product, the all-words concatenation stream for shifts.
  Point canonical_transitive_point(std::size_t horizon = 4096) const {
    if (symbolic_exact())
      return Point(SymbolicPoint(lang_.transitive_stream(horizon)));
    return Point(TorusPoint(std::vector<double>(dimension(), 0.0)));
  }

  friend DynSystem make_system(const SystemDescriptor& d);

 private:
  DynSystem() = default;

  void check_dim(const TorusPoint& p) const {
    if (p.dimension() != dimension())
      throw TypeError("point dimension " + std::to_string(p.dimension()) +
                      " does not match system dimension " +
                      std::to_string(dimension()));
  }

  SystemDescriptor desc_;
  SubshiftLanguage lang_;
  std::vector<DynSystem> factors_;
};

inline DynSystem make_system(const SystemDescriptor& d) {
  detail::validate_descriptor(d);
  DynSystem s;
  s.desc_ = d;
  switch (d.kind) {
    case SystemKind::full_shift: {
      lang::FullShiftLang l;
      l.alphabet = d.symbols;
      s.lang_ = SubshiftLanguage(l);
      break;
    }
    case SystemKind::sft:
      s.lang_ = SubshiftLanguage(
          lang::SftLang::from_forbidden(d.symbols, d.forbidden_words));
      break;
    case SystemKind::sturmian: {
      lang::SturmianLang l;
      l.alpha = d.alphas[0].value;
      l.alpha_rational = d.alphas[0].rational;
      l.alpha_den = d.alphas[0].rational ? d.alphas[0].den : 0;
      s.lang_ = SubshiftLanguage(l);
      break;
    }
    case SystemKind::product: {
      for (const auto& f : d.factors) {
        DynSystem fs = make_system(f);
        if (!fs.is_torus())
          throw ValidationError(
              "product systems are supported for torus factors only");
        s.factors_.push_back(std::move(fs));
      }
      break;
    }
    default:
      break;
  }
  return s;
}

}  // namespace topodyn
