#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "topodyn/arcs.hpp"
#include "topodyn/descriptor.hpp"
#include "topodyn/errors.hpp"
#include "topodyn/point.hpp"

namespace topodyn {

/// A pattern is a template for a symbol stream: fixed symbols at some
/// positions, free (unconstrained) positions elsewhere.
using Pattern = std::vector<std::optional<Symbol>>;

namespace lang {

struct FullShiftLang {
  int alphabet = 2;

  bool word_admissible(const Word& w) const {
    for (Symbol c : w)
      if (c < 1 || c > alphabet) return false;
    return true;
  }

  std::uint64_t count_words(std::size_t len) const {
    std::uint64_t n = 1;
    for (std::size_t i = 0; i < len; ++i) {
      if (n > UINT64_MAX / static_cast<std::uint64_t>(alphabet))
        throw BudgetError(UINT64_MAX, n, "word count overflow");
      n *= static_cast<std::uint64_t>(alphabet);
    }
    return n;
  }

  void enumerate_words(std::size_t len, std::vector<Word>& out) const {
    Word w(len, 1);
    while (true) {
      out.push_back(w);
      std::size_t i = len;
      while (i > 0 && w[i - 1] == alphabet) w[--i] = 1;
      if (i == 0) break;
      ++w[i - 1];
    }
  }

  bool pattern_admissible(const Pattern& p) const {
    for (const auto& s : p)
      if (s && (*s < 1 || *s > alphabet)) return false;
    return true;
  }

  std::optional<Word> realize_pattern(const Pattern& p) const {
    if (!pattern_admissible(p)) return std::nullopt;
    Word w(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) w[i] = p[i] ? *p[i] : 1;
    return w;
  }

  void extend(Word& w, std::size_t target) const {
    while (w.size() < target) w.push_back(1);
  }
};

struct SftLang {
  int alphabet = 2;
  std::vector<std::vector<bool>> allowed;  // allowed[a-1][b-1]

  static SftLang from_forbidden(int alphabet,
                                const std::vector<Word>& forbidden) {
    SftLang l;
    l.alphabet = alphabet;
    l.allowed.assign(alphabet, std::vector<bool>(alphabet, true));
    for (const auto& w : forbidden) {
      if (w.size() != 2)
        throw ValidationError("sft forbidden words must have length 2");
      l.allowed[w[0] - 1][w[1] - 1] = false;
    }
    for (int a = 0; a < alphabet; ++a) {
      bool any = false;
      for (int b = 0; b < alphabet; ++b) any = any || l.allowed[a][b];
      if (!any)
        throw ValidationError("sft has a dead symbol: " + std::to_string(a + 1) +
                              " allows no successor");
    }
    return l;
  }

  bool word_admissible(const Word& w) const {
    for (Symbol c : w)
      if (c < 1 || c > alphabet) return false;
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
      if (!allowed[w[i] - 1][w[i + 1] - 1]) return false;
    return true;
  }

  std::uint64_t count_words(std::size_t len) const {
    if (len == 0) return 1;
    std::vector<std::uint64_t> cnt(alphabet, 1);
    for (std::size_t step = 1; step < len; ++step) {
      std::vector<std::uint64_t> next(alphabet, 0);
      for (int a = 0; a < alphabet; ++a)
        for (int b = 0; b < alphabet; ++b)
          if (allowed[a][b]) {
            if (next[b] > UINT64_MAX - cnt[a])
              throw BudgetError(UINT64_MAX, next[b], "word count overflow");
            next[b] += cnt[a];
          }
      cnt = std::move(next);
    }
    std::uint64_t total = 0;
    for (auto c : cnt) total += c;
    return total;
  }

  void enumerate_words(std::size_t len, std::vector<Word>& out) const {
    Word w;
    enumerate_rec(len, w, out);
  }

  bool pattern_admissible(const Pattern& p) const {
    return !reachable_sets(p).empty();
  }

  std::optional<Word> realize_pattern(const Pattern& p) const {
    auto reach = reachable_sets(p);
    if (reach.empty()) return std::nullopt;
    if (p.empty()) return Word{};
    // Walk backward choosing the lexicographically smallest admissible word.
    Word w(p.size());
    int cur = -1;
    for (int b = 0; b < alphabet; ++b)
      if (reach.back()[b]) {
        cur = b;
        break;
      }
    w.back() = static_cast<Symbol>(cur + 1);
    for (std::size_t i = p.size() - 1; i > 0; --i) {
      for (int a = 0; a < alphabet; ++a)
        if (reach[i - 1][a] && allowed[a][cur]) {
          cur = a;
          break;
        }
      w[i - 1] = static_cast<Symbol>(cur + 1);
    }
    return w;
  }

  void extend(Word& w, std::size_t target) const {
    if (w.empty() && target > 0) w.push_back(1);
    while (w.size() < target) {
      int a = w.back() - 1;
      for (int b = 0; b < alphabet; ++b)
        if (allowed[a][b]) {
          w.push_back(static_cast<Symbol>(b + 1));
          break;
        }
    }
  }

  /// True when some admissible word of exactly `steps` transitions leads
  /// from symbol a to symbol b.
  bool connector_exists(Symbol a, Symbol b, int steps) const {
    std::vector<bool> cur(alphabet, false);
    cur[a - 1] = true;
    for (int s = 0; s < steps; ++s) {
      std::vector<bool> next(alphabet, false);
      for (int i = 0; i < alphabet; ++i)
        if (cur[i])
          for (int j = 0; j < alphabet; ++j)
            if (allowed[i][j]) next[j] = true;
      cur = std::move(next);
    }
    return cur[b - 1];
  }

 private:
  void enumerate_rec(std::size_t len, Word& w, std::vector<Word>& out) const {
    if (w.size() == len) {
      out.push_back(w);
      return;
    }
    for (int b = 0; b < alphabet; ++b) {
      if (!w.empty() && !allowed[w.back() - 1][b]) continue;
      w.push_back(static_cast<Symbol>(b + 1));
      enumerate_rec(len, w, out);
      w.pop_back();
    }
  }

  // reach[i][b] = symbol b+1 possible at position i given the pattern and
  // the transition constraints on both sides. Empty result means no word.
  std::vector<std::vector<bool>> reachable_sets(const Pattern& p) const {
    std::vector<std::vector<bool>> reach(p.size(),
                                         std::vector<bool>(alphabet, false));
    if (p.empty()) return reach;
    for (int b = 0; b < alphabet; ++b)
      reach[0][b] = !p[0] || *p[0] == b + 1;
    for (std::size_t i = 1; i < p.size(); ++i) {
      for (int b = 0; b < alphabet; ++b) {
        if (p[i] && *p[i] != b + 1) continue;
        for (int a = 0; a < alphabet; ++a)
          if (reach[i - 1][a] && allowed[a][b]) {
            reach[i][b] = true;
            break;
          }
      }
    }
    // Backward prune so every surviving symbol extends to a full word.
    for (std::size_t i = p.size() - 1; i > 0; --i) {
      for (int a = 0; a < alphabet; ++a) {
        if (!reach[i - 1][a]) continue;
        bool ok = false;
        for (int b = 0; b < alphabet; ++b)
          if (reach[i][b] && allowed[a][b]) ok = true;
        reach[i - 1][a] = ok;
      }
    }
    bool any = false;
    for (int b = 0; b < alphabet; ++b) any = any || reach.back()[b];
    if (!any) return {};
    for (int b = 0; b < alphabet; ++b)
      if (reach[0][b]) return reach;
    return {};
  }
};

/// Language of the binary rotation coding: symbol 1 on [0, 1-alpha), symbol
/// 2 on [1-alpha, 1). Factor questions are answered two ways that fortify
/// each other: occurrence scans along the coding of 0 (a found occurrence is
/// a proof) and circle-arc intersections (a robustly empty arc set is a
/// disproof).
struct SturmianLang {
  double alpha = kGoldenAlpha;
  bool alpha_rational = false;
  long alpha_den = 0;  // denominator when rational (coding period divides it)
  static constexpr std::size_t kScanCap = 1u << 20;
  static constexpr double kArcTolerance = 1e-9;

  Symbol symbol_at_phase(double phase, std::size_t n) const {
    long double v = static_cast<long double>(phase) +
                    static_cast<long double>(n) * static_cast<long double>(alpha);
    long double f = v - std::floor(v);
    return f < 1.0L - static_cast<long double>(alpha) ? 1 : 2;
  }

  Word coding(double phase, std::size_t len) const {
    Word w(len);
    for (std::size_t i = 0; i < len; ++i) w[i] = symbol_at_phase(phase, i);
    return w;
  }

  /// Arc of phases whose coding starts with w.
  ArcSet word_arc(const Word& w) const {
    ArcSet acc = ArcSet::full();
    const double split = 1.0 - alpha;
    for (std::size_t i = 0; i < w.size(); ++i) {
      ArcSet letter = w[i] == 1 ? ArcSet::ball(split / 2.0, split / 2.0)
                                : ArcSet::ball(split + alpha / 2.0, alpha / 2.0);
      acc = acc.intersect(letter.shifted(-static_cast<double>(i) * alpha));
      if (acc.empty()) break;
    }
    return acc;
  }

  ArcSet pattern_arc(const Pattern& p) const {
    ArcSet acc = ArcSet::full();
    const double split = 1.0 - alpha;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!p[i]) continue;
      ArcSet letter = *p[i] == 1
                          ? ArcSet::ball(split / 2.0, split / 2.0)
                          : ArcSet::ball(split + alpha / 2.0, alpha / 2.0);
      acc = acc.intersect(letter.shifted(-static_cast<double>(i) * alpha));
      if (acc.empty()) break;
    }
    return acc;
  }

  /// First index i such that the coding of 0 matches the pattern at i.
  std::optional<std::size_t> find_occurrence(const Pattern& p) const {
    if (p.empty()) return 0;
    std::size_t horizon = std::max<std::size_t>(8 * p.size() + 256, 2048);
    while (true) {
      Word c = coding(0.0, horizon);
      for (std::size_t i = 0; i + p.size() <= c.size(); ++i) {
        bool ok = true;
        for (std::size_t j = 0; j < p.size(); ++j)
          if (p[j] && c[i + j] != *p[j]) {
            ok = false;
            break;
          }
        if (ok) return i;
      }
      if (horizon >= kScanCap) return std::nullopt;
      horizon *= 2;
    }
  }

  bool word_admissible(const Word& w) const {
    Pattern p(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) p[i] = w[i];
    return pattern_admissible(p);
  }

  bool pattern_admissible(const Pattern& p) const {
    for (const auto& s : p)
      if (s && (*s < 1 || *s > 2)) return false;
    auto occ = find_occurrence(p);
    if (occ) return true;
    // Nothing found along the orbit; certify emptiness with the phase arcs.
    ArcSet arc = pattern_arc(p);
    if (arc.inflated(kArcTolerance).empty()) return false;
    // Degenerate slivers below the tolerance are rounding residue of a
    // genuinely empty intersection.
    if (arc.inflated(-kArcTolerance).empty()) return false;
    if (alpha_rational) return false;  // periodic coding was scanned fully
    throw ValidationError(
        "sturmian pattern neither realized nor refuted within scan cap");
  }

  std::uint64_t count_words(std::size_t len) const {
    return enumerate_words_internal(len).size();
  }

  void enumerate_words(std::size_t len, std::vector<Word>& out) const {
    auto words = enumerate_words_internal(len);
    out.insert(out.end(), words.begin(), words.end());
  }

  std::optional<Word> realize_pattern(const Pattern& p) const {
    auto occ = find_occurrence(p);
    if (!occ) return std::nullopt;
    Word full = coding(0.0, *occ + p.size());
    return Word(full.begin() + static_cast<std::ptrdiff_t>(*occ), full.end());
  }

  void extend(Word& w, std::size_t target) const {
    if (w.size() >= target) return;
    Pattern p(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) p[i] = w[i];
    auto occ = find_occurrence(p);
    if (!occ)
      throw ValidationError("cannot extend a word that is not a factor");
    Word full = coding(0.0, *occ + target);
    w.assign(full.begin() + static_cast<std::ptrdiff_t>(*occ), full.end());
  }

 private:
  std::set<Word> enumerate_words_internal(std::size_t len) const {
    std::set<Word> words;
    if (len == 0) return words;
    if (alpha_rational) {
      // Periodic coding: one full period plus the window sees every factor.
      std::size_t horizon = static_cast<std::size_t>(alpha_den) + len + 1;
      Word c = coding(0.0, horizon);
      for (std::size_t i = 0; i + len <= c.size(); ++i)
        words.insert(Word(c.begin() + static_cast<std::ptrdiff_t>(i),
                          c.begin() + static_cast<std::ptrdiff_t>(i + len)));
      return words;
    }
    std::size_t horizon = std::max<std::size_t>(8 * len + 256, 2048);
    const std::size_t expected = len + 1;
    while (true) {
      Word c = coding(0.0, horizon);
      words.clear();
      for (std::size_t i = 0; i + len <= c.size(); ++i)
        words.insert(Word(c.begin() + static_cast<std::ptrdiff_t>(i),
                          c.begin() + static_cast<std::ptrdiff_t>(i + len)));
      if (words.size() > expected)
        throw ValidationError("rotation coding produced more than n+1 factors");
      if (words.size() == expected) return words;
      if (horizon >= kScanCap)
        throw ValidationError("factor enumeration horizon exhausted");
      horizon *= 2;
    }
  }
};

}  // namespace lang

/// Value wrapper over the concrete subshift languages.
class SubshiftLanguage {
 public:
  SubshiftLanguage() : impl_(lang::FullShiftLang{}) {}
  SubshiftLanguage(lang::FullShiftLang l) : impl_(std::move(l)) {}
  SubshiftLanguage(lang::SftLang l) : impl_(std::move(l)) {}
  SubshiftLanguage(lang::SturmianLang l) : impl_(std::move(l)) {}

  int alphabet() const {
    if (auto* f = std::get_if<lang::FullShiftLang>(&impl_)) return f->alphabet;
    if (auto* s = std::get_if<lang::SftLang>(&impl_)) return s->alphabet;
    return 2;
  }

  bool word_admissible(const Word& w) const {
    return std::visit([&](const auto& l) { return l.word_admissible(w); },
                      impl_);
  }

  std::uint64_t count_words(std::size_t len) const {
    return std::visit([&](const auto& l) { return l.count_words(len); }, impl_);
  }

  std::vector<Word> enumerate_words(std::size_t len,
                                    std::uint64_t cap = 1u << 22) const {
    std::uint64_t n = count_words(len);
    if (n > cap) throw BudgetError(cap, n, "word enumeration");
    std::vector<Word> out;
    std::visit([&](const auto& l) { l.enumerate_words(len, out); }, impl_);
    return out;
  }

  bool pattern_admissible(const Pattern& p) const {
    return std::visit([&](const auto& l) { return l.pattern_admissible(p); },
                      impl_);
  }

  std::optional<Word> realize_pattern(const Pattern& p) const {
    return std::visit([&](const auto& l) { return l.realize_pattern(p); },
                      impl_);
  }

  /// Deterministic admissible continuation of a word up to target length.
  Word extend(Word w, std::size_t target) const {
    std::visit([&](const auto& l) { l.extend(w, target); }, impl_);
    return w;
  }

  bool is_sturmian() const {
    return std::holds_alternative<lang::SturmianLang>(impl_);
  }

  const lang::SturmianLang* sturmian() const {
    return std::get_if<lang::SturmianLang>(&impl_);
  }
  const lang::SftLang* sft() const { return std::get_if<lang::SftLang>(&impl_); }

  /// A stream whose orbit visits every cylinder: for shifts the standard
  /// concatenation of all admissible words in length-then-lex order (with
  /// admissible connectors for an SFT), for the rotation coding the coding
  /// of phase 0.
  Word transitive_stream(std::size_t horizon) const {
    if (const auto* st = std::get_if<lang::SturmianLang>(&impl_))
      return st->coding(0.0, horizon);
    Word out;
    std::size_t len = 1;
    while (out.size() < horizon) {
      std::vector<Word> words;
      std::visit([&](const auto& l) { l.enumerate_words(len, words); }, impl_);
      for (const auto& w : words) {
        append_with_connector(out, w);
        if (out.size() >= horizon) break;
      }
      ++len;
      if (len > 26)
        throw BudgetError(1u << 26, out.size(), "transitive stream length");
    }
    out.resize(horizon);
    return out;
  }

 private:
  void append_with_connector(Word& out, const Word& w) const {
    if (out.empty()) {
      out.insert(out.end(), w.begin(), w.end());
      return;
    }
    if (const auto* s = std::get_if<lang::SftLang>(&impl_)) {
      // Shortest bridge from the current tail symbol to the head of w.
      for (int steps = 1; steps <= 2 * s->alphabet + 2; ++steps) {
        if (!s->connector_exists(out.back(), w.front(), steps)) continue;
        Pattern p(steps + 1);
        p.front() = out.back();
        p.back() = w.front();
        auto bridge = s->realize_pattern(p);
        out.insert(out.end(), bridge->begin() + 1, bridge->end() - 1);
        break;
      }
    }
    out.insert(out.end(), w.begin(), w.end());
  }

  std::variant<lang::FullShiftLang, lang::SftLang, lang::SturmianLang> impl_;
};

}  // namespace topodyn
