#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "topodyn/errors.hpp"

namespace topodyn {

using Symbol = std::uint8_t;  // 1-based alphabet symbols 1..M
using Word = std::vector<Symbol>;

/// Reduce a real to [0,1).
inline double wrap_unit(double v) {
  double r = v - std::floor(v);
  if (r >= 1.0) r -= 1.0;
  if (r < 0.0) r += 1.0;
  return r;
}

/// Distance on the circle R/Z between already-reduced values.
inline double circle_dist(double a, double b) {
  double d = std::fabs(a - b);
  return d <= 0.5 ? d : 1.0 - d;
}

/// Circle norm of a value that may be unreduced.
inline double circle_norm(double v) { return circle_dist(wrap_unit(v), 0.0); }

/// Point on the d-torus, coordinates kept in [0,1). The metric is the sup
/// metric over coordinate-wise circle distances.
struct TorusPoint {
  std::vector<double> coords;

  TorusPoint() = default;
  explicit TorusPoint(std::vector<double> c) : coords(std::move(c)) {
    for (double& v : coords) v = wrap_unit(v);
  }
  TorusPoint(double x) : TorusPoint(std::vector<double>{x}) {}
  TorusPoint(double x, double y) : TorusPoint(std::vector<double>{x, y}) {}

  std::size_t dimension() const { return coords.size(); }
};

inline double torus_dist(const TorusPoint& a, const TorusPoint& b) {
  if (a.coords.size() != b.coords.size())
    throw TypeError("torus points of different dimension");
  double d = 0;
  for (std::size_t i = 0; i < a.coords.size(); ++i)
    d = std::max(d, circle_dist(a.coords[i], b.coords[i]));
  return d;
}

/// One-sided symbol stream with a finite certified horizon. The backing
/// word is immutable and shared; shifting is an O(1) offset bump. Queries
/// beyond the horizon throw HorizonError rather than truncating silently.
struct SymbolicPoint {
  std::shared_ptr<const Word> symbols;
  std::size_t offset = 0;

  SymbolicPoint() = default;
  explicit SymbolicPoint(Word w)
      : symbols(std::make_shared<const Word>(std::move(w))) {}

  std::size_t horizon() const {
    return symbols ? symbols->size() - offset : 0;
  }

  /// 0-based symbol access.
  Symbol at(std::size_t i) const {
    if (i >= horizon()) throw HorizonError(i + 1, horizon());
    return (*symbols)[offset + i];
  }

  SymbolicPoint shifted(std::size_t n) const {
    if (n > horizon()) throw HorizonError(n, horizon());
    SymbolicPoint p = *this;
    p.offset += n;
    return p;
  }

  Word prefix(std::size_t len) const {
    if (len > horizon()) throw HorizonError(len, horizon());
    return Word(symbols->begin() + static_cast<std::ptrdiff_t>(offset),
                symbols->begin() + static_cast<std::ptrdiff_t>(offset + len));
  }
};

struct FirstDifference {
  std::optional<std::size_t> index;  // 1-based index of first disagreement
  std::size_t compared = 0;          // symbols compared (min horizon)
};

inline FirstDifference first_difference(const SymbolicPoint& a,
                                        const SymbolicPoint& b) {
  FirstDifference r;
  r.compared = std::min(a.horizon(), b.horizon());
  for (std::size_t i = 0; i < r.compared; ++i) {
    if (a.at(i) != b.at(i)) {
      r.index = i + 1;
      return r;
    }
  }
  return r;
}

/// Metric on symbol streams: 2^{-k} with k the 1-based first disagreement.
inline double symbolic_dist(const SymbolicPoint& a, const SymbolicPoint& b) {
  auto fd = first_difference(a, b);
  if (!fd.index) return 0.0;
  return std::ldexp(1.0, -static_cast<int>(*fd.index));
}

struct Point {
  std::variant<TorusPoint, SymbolicPoint> value;

  Point() : value(TorusPoint{}) {}
  Point(TorusPoint p) : value(std::move(p)) {}
  Point(SymbolicPoint p) : value(std::move(p)) {}

  bool is_torus() const { return std::holds_alternative<TorusPoint>(value); }
  bool is_symbolic() const {
    return std::holds_alternative<SymbolicPoint>(value);
  }

  const TorusPoint& torus() const {
    if (!is_torus()) throw TypeError("expected a torus point");
    return std::get<TorusPoint>(value);
  }
  const SymbolicPoint& symbolic() const {
    if (!is_symbolic()) throw TypeError("expected a symbolic point");
    return std::get<SymbolicPoint>(value);
  }
};

struct DistanceResult {
  double value = 0.0;
  /// True when two symbolic points agreed on every compared symbol, so the
  /// reported 0 means "indistinguishable at horizon", not proven equality.
  bool at_horizon = false;
};

inline DistanceResult point_distance_ex(const Point& a, const Point& b) {
  if (a.is_torus() && b.is_torus())
    return {torus_dist(a.torus(), b.torus()), false};
  if (a.is_symbolic() && b.is_symbolic()) {
    auto fd = first_difference(a.symbolic(), b.symbolic());
    if (!fd.index) return {0.0, true};
    return {std::ldexp(1.0, -static_cast<int>(*fd.index)), false};
  }
  throw TypeError("cannot compare points of different variants");
}

inline double point_distance(const Point& a, const Point& b) {
  return point_distance_ex(a, b).value;
}

}  // namespace topodyn
