#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace topodyn {

/// A finite union of closed arcs on the unit circle [0,1), kept as sorted
/// non-wrapping segments inside [0,1]. Endpoints 0 and 1 are the same circle
/// point; membership queries account for that.
class ArcSet {
 public:
  ArcSet() = default;

  static ArcSet full() {
    ArcSet s;
    s.segs_.emplace_back(0.0, 1.0);
    return s;
  }

  static ArcSet empty_set() { return ArcSet(); }

  /// Closed ball {x : circle_dist(x, center) <= radius}.
  static ArcSet ball(double center, double radius) {
    ArcSet s;
    if (radius < 0) return s;
    if (radius >= 0.5) return full();
    double c = center - std::floor(center);
    s.add_wrapped(c - radius, c + radius);
    s.normalize();
    return s;
  }

  /// {x : circle_dist(l*x, 0) <= radius} for integer l >= 1: the union of
  /// balls of radius/l around the l-th roots j/l.
  static ArcSet scaled_ball(long l, double radius) {
    ArcSet s;
    if (l <= 0 || radius < 0) return s;
    if (radius >= 0.5) return full();
    const double r = radius / static_cast<double>(l);
    for (long j = 0; j < l; ++j) {
      s.add_wrapped(static_cast<double>(j) / l - r,
                    static_cast<double>(j) / l + r);
    }
    s.normalize();
    return s;
  }

  bool empty() const { return segs_.empty(); }

  double measure() const {
    double m = 0;
    for (const auto& [a, b] : segs_) m += b - a;
    return m;
  }

  bool contains(double x) const {
    double v = x - std::floor(x);
    for (const auto& [a, b] : segs_) {
      if (v >= a && v <= b) return true;
      if (v == 0.0 && b == 1.0) return true;
    }
    return false;
  }

  /// Rotate the whole set by t (mod 1).
  ArcSet shifted(double t) const {
    ArcSet out;
    for (const auto& [a, b] : segs_) out.add_wrapped(a + t, b + t);
    out.normalize();
    return out;
  }

  ArcSet intersect(const ArcSet& other) const {
    ArcSet out;
    std::size_t i = 0, j = 0;
    while (i < segs_.size() && j < other.segs_.size()) {
      const auto& [a1, b1] = segs_[i];
      const auto& [a2, b2] = other.segs_[j];
      double lo = std::max(a1, a2);
      double hi = std::min(b1, b2);
      if (lo <= hi) out.segs_.emplace_back(lo, hi);
      if (b1 < b2)
        ++i;
      else
        ++j;
    }
    // A segment touching 1.0 meets one starting at 0.0 circularly; the
    // point 0 is covered either way, so explicit gluing is not needed for
    // emptiness or membership.
    out.normalize();
    return out;
  }

  /// Grow every arc by delta on both sides; a negative delta shrinks arcs
  /// and drops those that vanish. Used to certify robust (non)emptiness
  /// under floating-point endpoint error.
  ArcSet inflated(double delta) const {
    ArcSet out;
    for (const auto& [a, b] : segs_) {
      if ((b - a) + 2 * delta < 0) continue;
      out.add_wrapped(a - delta, b + delta);
    }
    out.normalize();
    return out;
  }

  const std::vector<std::pair<double, double>>& segments() const {
    return segs_;
  }

 private:
  void add_wrapped(double a, double b) {
    if (b - a >= 1.0) {
      segs_.emplace_back(0.0, 1.0);
      return;
    }
    double fa = a - std::floor(a);
    double len = b - a;
    double fb = fa + len;
    if (fb <= 1.0) {
      segs_.emplace_back(fa, fb);
    } else {
      segs_.emplace_back(fa, 1.0);
      segs_.emplace_back(0.0, fb - 1.0);
    }
  }

  void normalize() {
    if (segs_.empty()) return;
    std::sort(segs_.begin(), segs_.end());
    std::vector<std::pair<double, double>> merged;
    merged.push_back(segs_.front());
    for (std::size_t k = 1; k < segs_.size(); ++k) {
      auto& last = merged.back();
      if (segs_[k].first <= last.second) {
        last.second = std::max(last.second, segs_[k].second);
      } else {
        merged.push_back(segs_[k]);
      }
    }
    segs_ = std::move(merged);
  }

  std::vector<std::pair<double, double>> segs_;
};

}  // namespace topodyn
