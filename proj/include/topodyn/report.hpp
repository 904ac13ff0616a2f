#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "topodyn/constructions.hpp"
#include "topodyn/gluing.hpp"
#include "topodyn/properties.hpp"

namespace topodyn::report {

using json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "1.0";

// ---- points ---------------------------------------------------------------

inline json to_json(const Point& p) {
  json j;
  if (p.is_torus()) {
    j["type"] = "torus";
    j["coords"] = p.torus().coords;
  } else {
    j["type"] = "symbolic";
    const auto& sp = p.symbolic();
    std::vector<int> syms;
    for (std::size_t i = 0; i < sp.horizon(); ++i) syms.push_back(sp.at(i));
    j["symbols"] = syms;
  }
  return j;
}

inline Point point_from_json(const json& j) {
  if (j.at("type") == "torus")
    return Point(TorusPoint(j.at("coords").get<std::vector<double>>()));
  Word w;
  for (int s : j.at("symbols").get<std::vector<int>>())
    w.push_back(static_cast<Symbol>(s));
  return Point(SymbolicPoint(std::move(w)));
}

// ---- entropy --------------------------------------------------------------

inline json to_json(const PairWitness& w) {
  return json{{"first", w.first},
              {"second", w.second},
              {"time", w.time},
              {"distance", w.distance}};
}

inline json to_json(const SeparationCertificate& c) {
  json j;
  j["n"] = c.n;
  j["epsilon"] = c.epsilon;
  j["resolution"] = c.resolution;
  j["points"] = json::array();
  for (const auto& p : c.points) j["points"].push_back(to_json(p));
  j["witnesses"] = json::array();
  for (const auto& w : c.witnesses) j["witnesses"].push_back(to_json(w));
  j["spanning_ok"] = c.spanning_ok;
  j["max_span_distance"] = c.max_span_distance;
  return j;
}

inline SeparationCertificate separation_from_json(const json& j) {
  SeparationCertificate c;
  c.n = j.at("n").get<long>();
  c.epsilon = j.at("epsilon").get<double>();
  c.resolution = j.at("resolution").get<int>();
  for (const auto& p : j.at("points")) c.points.push_back(point_from_json(p));
  for (const auto& w : j.at("witnesses")) {
    PairWitness pw;
    pw.first = w.at("first").get<std::size_t>();
    pw.second = w.at("second").get<std::size_t>();
    pw.time = w.at("time").get<long>();
    pw.distance = w.at("distance").get<double>();
    c.witnesses.push_back(pw);
  }
  c.spanning_ok = j.at("spanning_ok").get<bool>();
  c.max_span_distance = j.at("max_span_distance").get<double>();
  return c;
}

inline json to_json(const EntropyEstimate& e) {
  return json{{"system", e.system},   {"epsilon", e.epsilon},
              {"n", e.ns},            {"counts", e.counts},
              {"slope", e.slope},     {"endpoint", e.endpoint},
              {"exact", e.exact}};
}

inline EntropyEstimate entropy_from_json(const json& j) {
  EntropyEstimate e;
  e.system = j.at("system").get<std::string>();
  e.epsilon = j.at("epsilon").get<double>();
  e.ns = j.at("n").get<std::vector<long>>();
  e.counts = j.at("counts").get<std::vector<std::uint64_t>>();
  e.slope = j.at("slope").get<double>();
  e.endpoint = j.at("endpoint").get<double>();
  e.exact = j.at("exact").get<bool>();
  return e;
}

// ---- property verdicts ----------------------------------------------------

inline json to_json(const Witness& w) {
  json j;
  j["description"] = w.description;
  j["values"] = w.values;
  j["indices"] = w.indices;
  j["points"] = json::array();
  for (const auto& p : w.points) j["points"].push_back(to_json(p));
  j["words"] = json::array();
  for (const auto& word : w.words) {
    std::vector<int> syms(word.begin(), word.end());
    j["words"].push_back(syms);
  }
  return j;
}

inline json to_json(const PropertyVerdict& v) {
  json j;
  j["property"] = v.property;
  j["verdict"] = verdict_name(v.status);
  j["parameters"] = v.parameters;
  j["witness"] = to_json(v.witness);
  return j;
}

inline PropertyVerdict verdict_from_json(const json& j) {
  PropertyVerdict v;
  v.property = j.at("property").get<std::string>();
  std::string s = j.at("verdict").get<std::string>();
  v.status = s == "holds-at-scale"
                 ? VerdictStatus::holds_at_scale
                 : (s == "fails-with-witness" ? VerdictStatus::fails_with_witness
                                              : VerdictStatus::inconclusive);
  v.parameters = j.at("parameters").get<std::map<std::string, double>>();
  const json& w = j.at("witness");
  v.witness.description = w.at("description").get<std::string>();
  v.witness.values = w.at("values").get<std::vector<double>>();
  v.witness.indices = w.at("indices").get<std::vector<long>>();
  for (const auto& p : w.at("points"))
    v.witness.points.push_back(point_from_json(p));
  for (const auto& word : w.at("words")) {
    Word ww;
    for (int s2 : word.get<std::vector<int>>())
      ww.push_back(static_cast<Symbol>(s2));
    v.witness.words.push_back(ww);
  }
  return v;
}

inline json to_json(const ReturnTimeSet& r) {
  return json{{"base", r.base},
              {"epsilon", r.epsilon},
              {"horizon", r.horizon},
              {"times", r.times}};
}

// ---- gluing ---------------------------------------------------------------

inline json to_json(const OrbitSequence& s) {
  json j = json::array();
  for (const auto& seg : s.segments)
    j.push_back(json{{"base", to_json(seg.base)}, {"length", seg.length}});
  return j;
}

inline OrbitSequence sequence_from_json(const json& j) {
  OrbitSequence s;
  for (const auto& seg : j)
    s.segments.push_back(
        {point_from_json(seg.at("base")), seg.at("length").get<long>()});
  return s;
}

inline json to_json(const TraceCertificate& c) {
  json j;
  j["epsilon"] = c.epsilon;
  j["resolution"] = c.resolution;
  j["seg_lengths"] = c.seg_lengths;
  j["window_lengths"] = c.window_lengths;
  j["gaps"] = c.gaps;
  j["start_indices"] = c.start_indices;
  j["tracer"] = to_json(c.tracer);
  j["distances"] = c.distances;
  j["max_distance"] = c.max_distance;
  j["pass"] = c.pass;
  return j;
}

inline TraceCertificate trace_from_json(const json& j) {
  TraceCertificate c;
  c.epsilon = j.at("epsilon").get<double>();
  c.resolution = j.at("resolution").get<int>();
  c.seg_lengths = j.at("seg_lengths").get<std::vector<long>>();
  c.window_lengths = j.at("window_lengths").get<std::vector<long>>();
  c.gaps = j.at("gaps").get<std::vector<long>>();
  c.start_indices = j.at("start_indices").get<std::vector<long>>();
  c.tracer = point_from_json(j.at("tracer"));
  c.distances = j.at("distances").get<std::vector<std::vector<double>>>();
  c.max_distance = j.at("max_distance").get<double>();
  c.pass = j.at("pass").get<bool>();
  return c;
}

inline json to_json(const RefutationCertificate& r) {
  json j;
  j["sequence"] = to_json(r.sequence);
  j["epsilon"] = r.epsilon;
  j["resolution"] = r.resolution;
  j["max_gap"] = r.max_gap;
  j["candidates"] = r.candidates;
  j["net_delta"] = r.net_delta;
  j["failures"] = json::array();
  for (const auto& f : r.failures)
    j["failures"].push_back(json{{"gaps", f.gaps},
                                 {"fail_segment", f.fail_segment},
                                 {"fail_offset", f.fail_offset},
                                 {"fail_position", f.fail_position}});
  j["budget_used"] = r.budget_used;
  j["margin"] = r.margin;
  j["soundness"] = r.soundness;
  return j;
}

inline RefutationCertificate refutation_from_json(const json& j) {
  RefutationCertificate r;
  r.sequence = sequence_from_json(j.at("sequence"));
  r.epsilon = j.at("epsilon").get<double>();
  r.resolution = j.at("resolution").get<int>();
  r.max_gap = j.at("max_gap").get<int>();
  r.candidates = j.at("candidates").get<std::string>();
  r.net_delta = j.at("net_delta").get<double>();
  for (const auto& f : j.at("failures")) {
    GapFailure gf;
    gf.gaps = f.at("gaps").get<std::vector<long>>();
    gf.fail_segment = f.at("fail_segment").get<long>();
    gf.fail_offset = f.at("fail_offset").get<long>();
    gf.fail_position = f.at("fail_position").get<long>();
    r.failures.push_back(gf);
  }
  r.budget_used = j.at("budget_used").get<std::uint64_t>();
  r.margin = j.at("margin").get<double>();
  r.soundness = j.at("soundness").get<std::string>();
  return r;
}

// ---- constructions --------------------------------------------------------

inline json to_json(const RigidityWitnessSet& s) {
  return json{{"base", to_json(s.base)},
              {"gamma", s.gamma},
              {"horizon", s.horizon},
              {"witness_times", s.witness_times}};
}

inline json to_json(const SeparatedFamily& f) {
  json j;
  j["epsilon"] = f.epsilon;
  j["resolution"] = f.resolution;
  j["max_gap"] = f.max_gap;
  j["gamma"] = f.gamma;
  j["span"] = f.span;
  j["long_window"] = f.long_window;
  j["short_window"] = f.short_window;
  j["pattern_bits"] = f.pattern_bits;
  j["window"] = f.window;
  j["entropy_lower_bound"] = f.entropy_lower_bound;
  j["certified"] = f.certified;
  j["violations"] = f.violations;
  j["tracers"] = json::array();
  for (const auto& t : f.tracers) j["tracers"].push_back(to_json(t));
  j["pairs"] = json::array();
  for (const auto& p : f.pairs)
    j["pairs"].push_back(json{{"a", p.pattern_a},
                              {"b", p.pattern_b},
                              {"case", p.case_id},
                              {"bound", p.case_bound},
                              {"observed", p.observed},
                              {"separated", p.separated}});
  return j;
}

inline json to_json(const UapCertificate& c) {
  return json{{"verdict", to_json(c.verdict)},
              {"syndetic_bound", c.syndetic_bound},
              {"shift_table", c.shift_table}};
}

inline json to_json(const InducedShiftApprox& i) {
  json j;
  j["base"] = to_json(i.base);
  j["tau"] = i.tau;
  j["epsilon"] = i.epsilon;
  j["resolution"] = i.resolution;
  j["max_gap"] = i.max_gap;
  j["depth"] = i.depth;
  j["cylinder_counts"] = i.cylinder_counts;
  j["entropy_estimate"] = i.entropy_estimate;
  j["prefixes"] = i.prefixes;
  j["g_candidates_checked"] = i.g_candidates_checked;
  j["g_uniqueness_ok"] = i.g_uniqueness_ok;
  return j;
}

inline json to_json(const LambdaApprox& l) {
  json j;
  j["tau"] = l.tau;
  j["epsilon"] = l.epsilon;
  j["max_gap"] = l.max_gap;
  j["depth"] = l.depth;
  j["anchor_count"] = l.anchor_count;
  j["sample_count"] = l.lambda_samples.size();
  j["n"] = l.ns;
  j["measured"] = l.measured;
  j["count_bounds"] = l.count_bounds;
  j["rate_bound"] = l.rate_bound;
  j["measured_endpoint"] = l.measured_endpoint;
  j["invariance_ok"] = l.invariance_ok;
  j["invariance_worst"] = l.invariance_worst;
  j["induced"] = to_json(l.induced);
  return j;
}

inline json to_json(const ProperSubsystemReport& r) {
  json j;
  j["entropy_evidence"] = r.entropy_evidence;
  j["entropy_slope"] = r.entropy_slope;
  j["eta_prime"] = r.eta_prime;
  j["gluing_constant"] = r.gluing_constant;
  j["tau"] = r.tau;
  j["rate_bound"] = r.rate_bound;
  j["measured_eta_rate"] = r.measured_eta_rate;
  j["rate_below_beta"] = r.rate_below_beta;
  std::vector<int> wit(r.properness_witness.begin(), r.properness_witness.end());
  j["properness_witness"] = wit;
  j["witness_absent"] = r.witness_absent;
  j["pass"] = r.pass;
  j["failure_stage"] = r.failure_stage;
  j["lambda"] = to_json(r.lambda);
  return j;
}

// ---- report assembly ------------------------------------------------------

struct Report {
  std::string command;
  json config;       // config echo incl. seed and system text
  json results;
  std::vector<std::string> notes;  // truncation and scale qualifiers
  double timing_ms = 0.0;
};

inline json assemble(const Report& r) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = r.command;
  j["config"] = r.config;
  j["results"] = r.results;
  j["notes"] = r.notes;
  j["meta"] = json{{"timing_ms", r.timing_ms}};
  return j;
}

/// Deterministic bytes: everything except the meta block, which holds the
/// wall-clock data excluded from the byte-identity contract.
inline std::string body_bytes(json full) {
  full.erase("meta");
  return full.dump(2);
}

/// Flat key,value rows for the csv format; arrays index into the path.
inline void flatten_csv(const json& j, const std::string& path,
                        std::ostringstream& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten_csv(it.value(), path.empty() ? it.key() : path + "." + it.key(),
                  out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      flatten_csv(j[i], path + "[" + std::to_string(i) + "]", out);
  } else {
    out << path << "," << j.dump() << "\n";
  }
}

inline std::string to_csv(const json& j) {
  std::ostringstream out;
  out << "key,value\n";
  flatten_csv(j, "", out);
  return out.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  f << text;
}

}  // namespace topodyn::report
