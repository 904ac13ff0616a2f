#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "topodyn/errors.hpp"
#include "topodyn/point.hpp"

namespace topodyn {

enum class SystemKind {
  circle_rotation,
  torus_rotation,
  skew_product,
  full_shift,
  sft,
  sturmian,
  product,
};

inline const char* kind_name(SystemKind k) {
  switch (k) {
    case SystemKind::circle_rotation: return "circle_rotation";
    case SystemKind::torus_rotation: return "torus_rotation";
    case SystemKind::skew_product: return "skew_product";
    case SystemKind::full_shift: return "full_shift";
    case SystemKind::sft: return "sft";
    case SystemKind::sturmian: return "sturmian";
    case SystemKind::product: return "product";
  }
  return "?";
}

inline SystemKind kind_from_name(const std::string& s) {
  for (SystemKind k :
       {SystemKind::circle_rotation, SystemKind::torus_rotation,
        SystemKind::skew_product, SystemKind::full_shift, SystemKind::sft,
        SystemKind::sturmian, SystemKind::product}) {
    if (s == kind_name(k)) return k;
  }
  throw ParseError("unknown system kind '" + s + "'");
}

/// Rotation angle recorded either as an exact rational or as a decimal with
/// a stated precision. The original text is kept so descriptors round-trip
/// losslessly.
struct AlphaValue {
  std::string text;
  bool rational = false;
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value = 0.0;

  static AlphaValue parse(const std::string& s) {
    AlphaValue a;
    a.text = s;
    auto slash = s.find('/');
    if (slash != std::string::npos) {
      a.rational = true;
      try {
        a.num = std::stoll(s.substr(0, slash));
        a.den = std::stoll(s.substr(slash + 1));
      } catch (const std::exception&) {
        throw ParseError("bad rational alpha '" + s + "'");
      }
      if (a.den <= 0) throw ParseError("alpha denominator must be positive");
      a.num %= a.den;
      if (a.num < 0) a.num += a.den;
      a.value = static_cast<double>(a.num) / static_cast<double>(a.den);
    } else {
      try {
        std::size_t pos = 0;
        a.value = std::stod(s, &pos);
        if (pos != s.size()) throw ParseError("trailing junk in alpha");
      } catch (const ParseError&) {
        throw;
      } catch (const std::exception&) {
        throw ParseError("bad alpha '" + s + "'");
      }
      a.value = wrap_unit(a.value);
    }
    return a;
  }

  bool operator==(const AlphaValue& o) const { return text == o.text; }
};

/// The golden rotation angle (sqrt(5)-1)/2 to 30 digits, the workhorse
/// irrational of the examples and the test suite.
inline const char* kGoldenAlphaText = "0.618033988749894848204586834366";
inline constexpr double kGoldenAlpha = 0.61803398874989484820458683436564;

/// Declarative system description, serialized as a flat key = value
/// document. Recognized keys: kind, alpha, precision_digits, symbols,
/// forbidden_words, net_cap, and for kind = product the same keys prefixed
/// left_ / right_. Anything else is rejected.
struct SystemDescriptor {
  SystemKind kind = SystemKind::circle_rotation;
  std::vector<AlphaValue> alphas;        // rotations, skew, sturmian
  int precision_digits = 17;
  int symbols = 2;                       // alphabet size for shifts
  std::vector<Word> forbidden_words;     // sft only, length-2 words
  std::uint64_t net_cap = 4'000'000;
  std::vector<SystemDescriptor> factors; // product only, exactly two

  double alpha() const {
    if (alphas.empty()) throw ValidationError("system has no alpha");
    return alphas.front().value;
  }

  bool operator==(const SystemDescriptor& o) const {
    return kind == o.kind && alphas == o.alphas &&
           precision_digits == o.precision_digits && symbols == o.symbols &&
           forbidden_words == o.forbidden_words && net_cap == o.net_cap &&
           factors == o.factors;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

inline Word word_from_text(const std::string& s) {
  Word w;
  for (char c : s) {
    if (c < '1' || c > '9') throw ParseError("bad symbol '" + std::string(1, c) +
                                             "' in word '" + s + "'");
    w.push_back(static_cast<Symbol>(c - '0'));
  }
  if (w.empty()) throw ParseError("empty word");
  return w;
}

inline std::string word_to_text(const Word& w) {
  std::string s;
  for (Symbol c : w) s.push_back(static_cast<char>('0' + c));
  return s;
}

inline SystemDescriptor descriptor_from_kv(
    const std::map<std::string, std::string>& kv);

inline void apply_key(SystemDescriptor& d, const std::string& key,
                      const std::string& value) {
  if (key == "alpha") {
    for (const auto& part : split(value, ','))
      d.alphas.push_back(AlphaValue::parse(part));
  } else if (key == "precision_digits") {
    d.precision_digits = std::stoi(value);
    if (d.precision_digits <= 0)
      throw ParseError("precision_digits must be positive");
  } else if (key == "symbols") {
    d.symbols = std::stoi(value);
    if (d.symbols < 1 || d.symbols > 9)
      throw ParseError("symbols must be in 1..9");
  } else if (key == "forbidden_words") {
    for (const auto& part : split(value, ','))
      d.forbidden_words.push_back(word_from_text(part));
  } else if (key == "net_cap") {
    d.net_cap = std::stoull(value);
  } else {
    throw ParseError("unknown key '" + key + "'");
  }
}

inline SystemDescriptor descriptor_from_kv(
    const std::map<std::string, std::string>& kv) {
  auto it = kv.find("kind");
  if (it == kv.end()) throw ParseError("missing key 'kind'");
  SystemDescriptor d;
  d.kind = kind_from_name(it->second);

  if (d.kind == SystemKind::product) {
    std::map<std::string, std::string> left, right;
    for (const auto& [k, v] : kv) {
      if (k == "kind") continue;
      if (k.rfind("left_", 0) == 0)
        left[k.substr(5)] = v;
      else if (k.rfind("right_", 0) == 0)
        right[k.substr(6)] = v;
      else if (k == "net_cap")
        d.net_cap = std::stoull(v);
      else
        throw ParseError("unknown key '" + k + "' for product system");
    }
    if (!left.count("kind") || !right.count("kind"))
      throw ParseError("product system needs left_kind and right_kind");
    d.factors.push_back(descriptor_from_kv(left));
    d.factors.push_back(descriptor_from_kv(right));
    if (d.factors[0].kind == SystemKind::product ||
        d.factors[1].kind == SystemKind::product)
      throw ParseError("nested product systems are not expressible in config");
    return d;
  }

  for (const auto& [k, v] : kv) {
    if (k == "kind") continue;
    apply_key(d, k, v);
  }
  return d;
}

inline void validate_descriptor(const SystemDescriptor& d) {
  switch (d.kind) {
    case SystemKind::circle_rotation:
    case SystemKind::sturmian:
      if (d.alphas.size() != 1)
        throw ValidationError("exactly one alpha expected");
      break;
    case SystemKind::torus_rotation:
      if (d.alphas.empty())
        throw ValidationError("torus rotation needs at least one alpha");
      break;
    case SystemKind::skew_product:
      if (d.alphas.size() != 1)
        throw ValidationError("skew product takes a single alpha");
      break;
    case SystemKind::full_shift:
      if (d.symbols < 2) throw ValidationError("full shift needs symbols >= 2");
      break;
    case SystemKind::sft: {
      if (d.symbols < 2) throw ValidationError("sft needs symbols >= 2");
      for (const auto& w : d.forbidden_words) {
        if (w.size() != 2)
          throw ValidationError(
              "sft forbidden words must have length 2 (transition form)");
        for (Symbol c : w)
          if (c < 1 || c > d.symbols)
            throw ValidationError("forbidden word uses a symbol outside 1.." +
                                  std::to_string(d.symbols));
      }
      break;
    }
    case SystemKind::product:
      if (d.factors.size() != 2)
        throw ValidationError("product needs exactly two factors");
      for (const auto& f : d.factors) validate_descriptor(f);
      break;
  }
}

}  // namespace detail

/// Parse the flat key = value config format. Lines starting with '#' are
/// comments; unknown or duplicate keys are rejected.
inline SystemDescriptor parse_descriptor(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = detail::trim(t.substr(0, eq));
    std::string value = detail::trim(t.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ParseError("line " + std::to_string(lineno) + ": empty key or value");
    if (kv.count(key))
      throw ParseError("duplicate key '" + key + "'");
    kv[key] = value;
  }
  SystemDescriptor d = detail::descriptor_from_kv(kv);
  detail::validate_descriptor(d);
  return d;
}

namespace detail {

inline void serialize_into(const SystemDescriptor& d, const std::string& prefix,
                           std::ostringstream& out) {
  out << prefix << "kind = " << kind_name(d.kind) << "\n";
  if (!d.alphas.empty()) {
    out << prefix << "alpha = ";
    for (std::size_t i = 0; i < d.alphas.size(); ++i) {
      if (i) out << ",";
      out << d.alphas[i].text;
    }
    out << "\n";
    out << prefix << "precision_digits = " << d.precision_digits << "\n";
  }
  if (d.kind == SystemKind::full_shift || d.kind == SystemKind::sft)
    out << prefix << "symbols = " << d.symbols << "\n";
  if (!d.forbidden_words.empty()) {
    out << prefix << "forbidden_words = ";
    for (std::size_t i = 0; i < d.forbidden_words.size(); ++i) {
      if (i) out << ",";
      out << word_to_text(d.forbidden_words[i]);
    }
    out << "\n";
  }
}

}  // namespace detail

inline std::string serialize_descriptor(const SystemDescriptor& d) {
  std::ostringstream out;
  if (d.kind == SystemKind::product) {
    out << "kind = product\n";
    detail::serialize_into(d.factors[0], "left_", out);
    detail::serialize_into(d.factors[1], "right_", out);
  } else {
    detail::serialize_into(d, "", out);
  }
  out << "net_cap = " << d.net_cap << "\n";
  return out.str();
}

/// Convenience constructors used throughout tests and the CLI.
inline SystemDescriptor circle_rotation_descriptor(
    const std::string& alpha_text, int precision = 30) {
  SystemDescriptor d;
  d.kind = SystemKind::circle_rotation;
  d.alphas = {AlphaValue::parse(alpha_text)};
  d.precision_digits = precision;
  return d;
}

inline SystemDescriptor skew_product_descriptor(const std::string& alpha_text,
                                                int precision = 30) {
  SystemDescriptor d;
  d.kind = SystemKind::skew_product;
  d.alphas = {AlphaValue::parse(alpha_text)};
  d.precision_digits = precision;
  return d;
}

inline SystemDescriptor full_shift_descriptor(int symbols) {
  SystemDescriptor d;
  d.kind = SystemKind::full_shift;
  d.symbols = symbols;
  return d;
}

inline SystemDescriptor golden_mean_sft_descriptor() {
  SystemDescriptor d;
  d.kind = SystemKind::sft;
  d.symbols = 2;
  d.forbidden_words = {Word{1, 1}};
  return d;
}

inline SystemDescriptor sturmian_descriptor(const std::string& alpha_text,
                                            int precision = 30) {
  SystemDescriptor d;
  d.kind = SystemKind::sturmian;
  d.alphas = {AlphaValue::parse(alpha_text)};
  d.precision_digits = precision;
  return d;
}

}  // namespace topodyn
