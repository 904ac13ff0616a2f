// Command-line surface: analyze / glue / construct / demo-theorem over the
// systems of the config format, emitting versioned JSON (or CSV) reports and
// static SVG figures.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "topodyn/demo.hpp"
#include "topodyn/report.hpp"
#include "topodyn/svg.hpp"

using namespace topodyn;
namespace fs = std::filesystem;
using report::json;

namespace {

struct CommonOpts {
  std::string system_file;
  std::string out_dir = "reports";
  std::string format = "json";
  double epsilon = 0.1;
  double delta = 0.0;
  int bigm = 4;
  long horizon = 200;
  long tau = 10;
  long depth = 4;
  std::uint64_t seed = 20240101;
  std::uint64_t budget = 8'000'000'000ULL;
  double rigidity_tol = 1e-2;
  double birkhoff_tol = 1e-2;
  double entropy_tol = 0.05;
};

DynSystem load_system(const CommonOpts& o) {
  if (o.system_file.empty())
    throw ParseError("missing --system <config file>");
  std::ifstream in(o.system_file);
  if (!in) throw ParseError("cannot open " + o.system_file);
  std::stringstream buf;
  buf << in.rdbuf();
  return make_system(parse_descriptor(buf.str()));
}

json config_echo(const CommonOpts& o, const std::string& extra = {}) {
  json j;
  j["system_file"] = o.system_file;
  j["epsilon"] = o.epsilon;
  j["delta"] = o.delta;
  j["bigm"] = o.bigm;
  j["horizon"] = o.horizon;
  j["tau"] = o.tau;
  j["depth"] = o.depth;
  j["seed"] = o.seed;
  j["budget"] = o.budget;
  j["rigidity_tol"] = o.rigidity_tol;
  j["birkhoff_tol"] = o.birkhoff_tol;
  j["entropy_tol"] = o.entropy_tol;
  if (!o.system_file.empty()) {
    std::ifstream in(o.system_file);
    std::stringstream buf;
    buf << in.rdbuf();
    j["system_config"] = buf.str();
  }
  if (!extra.empty()) j["mode"] = extra;
  return j;
}

void emit(const CommonOpts& o, const report::Report& rep,
          const std::vector<std::pair<std::string, std::string>>& files = {}) {
  fs::create_directories(o.out_dir);
  json full = report::assemble(rep);
  report::write_text(o.out_dir + "/report.json", full.dump(2) + "\n");
  if (o.format == "csv")
    report::write_text(o.out_dir + "/report.csv", report::to_csv(full));
  for (const auto& [name, text] : files)
    report::write_text(o.out_dir + "/" + name, text);
  std::cout << "report written to " << o.out_dir << "/report.json\n";
}

// Inline segment grammar: "base:length;base:length;..." where base is a
// comma-separated torus point or a word over digits 1..9.
Point parse_point(const DynSystem& sys, const std::string& text, long horizon) {
  if (text.empty()) throw ParseError("empty point spec");
  if (sys.symbolic_exact()) {
    Word w;
    for (char c : text) {
      if (c < '1' || c > '9') throw ParseError("bad symbol '" + text + "'");
      w.push_back(static_cast<Symbol>(c - '0'));
    }
    return sys.point_from_word(w, static_cast<std::size_t>(horizon));
  }
  std::vector<double> coords;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) coords.push_back(std::stod(part));
  return Point(TorusPoint(std::move(coords)));
}

OrbitSequence parse_segments(const DynSystem& sys, const std::string& text,
                             long horizon) {
  OrbitSequence seq;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    auto colon = part.rfind(':');
    if (colon == std::string::npos)
      throw ParseError("segment needs base:length, got '" + part + "'");
    seq.segments.push_back({parse_point(sys, part.substr(0, colon), horizon),
                            std::stol(part.substr(colon + 1))});
  }
  if (seq.segments.empty()) throw ParseError("no segments given");
  return seq;
}

OrbitSequence load_sequence(const DynSystem& sys, const std::string& segments,
                            const std::string& sequence_file, long horizon) {
  if (!sequence_file.empty()) {
    std::ifstream in(sequence_file);
    if (!in) throw ParseError("cannot open " + sequence_file);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded())
      throw ParseError("bad JSON in " + sequence_file);
    return report::sequence_from_json(j);
  }
  return parse_segments(sys, segments, horizon);
}

std::vector<long> parse_longs(const std::string& text) {
  std::vector<long> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) out.push_back(std::stol(part));
  return out;
}

std::vector<long> range_of(long from, long to, long step) {
  std::vector<long> ns;
  for (long n = from; n <= to; n += step) ns.push_back(n);
  return ns;
}

int cmd_analyze(const CommonOpts& o) {
  auto t0 = std::chrono::steady_clock::now();
  DynSystem sys = load_system(o);
  double eps = o.epsilon;
  report::Report rep;
  rep.command = "analyze";
  rep.config = config_echo(o);

  EntropyEstimate est;
  std::vector<Point> net;
  std::vector<Point> fine_net;  // pairs below the smallest modulus delta
  std::vector<Point> rigidity_net;
  if (sys.symbolic_exact()) {
    est = eps_entropy_estimate(sys, {}, eps, range_of(4, 40, 4));
    std::size_t h = static_cast<std::size_t>(o.horizon) + 600;
    net = sys.build_net(0.125, h);
    fine_net = sys.build_net(eps / 16.0, 96);
    // Orbit samples expose aperiodicity at every power, which a short
    // word-net can miss.
    Point p = sys.canonical_transitive_point(900);
    for (long i = 0; i < 600; ++i) rigidity_net.push_back(sys.iterate(p, i));
  } else {
    double d = o.delta > 0 ? o.delta : 0.05;
    net = sys.build_net(d);
    fine_net = sys.build_net(eps / 8.0);
    rigidity_net = net;
    est = eps_entropy_estimate(sys, net, eps, range_of(25, 200, 25));
  }

  PropertyVerdict v1;
  v1.property = "zero-entropy";
  v1.parameters = {{"epsilon", eps},
                   {"slope", est.slope},
                   {"endpoint", est.endpoint},
                   {"tolerance", o.entropy_tol}};
  v1.status = est.slope <= o.entropy_tol ? VerdictStatus::holds_at_scale
                                         : VerdictStatus::fails_with_witness;

  PropertyVerdict v2 =
      minimality_probe(sys, eps, std::min<long>(o.horizon * 10, 3000), net);
  std::vector<double> grid{eps, eps / 2, eps / 4};
  PropertyVerdict v3 =
      equicontinuity_modulus(sys, eps, std::min<long>(o.horizon, 200),
                             fine_net, grid)
          .verdict;
  PropertyVerdict v4 = rigidity_probe(sys, rigidity_net,
                                      std::min<long>(o.horizon, 200),
                                      o.rigidity_tol)
                           .verdict;
  long birkhoff_n =
      sys.symbolic_exact() ? std::min<long>(o.horizon, 500) : 10000;
  std::vector<Point> samples = net;
  if (sys.symbolic_exact()) {
    // Periodic points carry the extreme symbol frequencies when they exist.
    std::size_t h = static_cast<std::size_t>(birkhoff_n) + 8;
    for (int s = 1; s <= sys.alphabet_size(); ++s) {
      Word w(h, static_cast<Symbol>(s));
      if (sys.language().word_admissible(w))
        samples.push_back(sys.point_from_word(w, h));
      for (int t = 1; t <= sys.alphabet_size(); ++t) {
        if (s == t) continue;
        Word alt(h);
        for (std::size_t i = 0; i < h; ++i)
          alt[i] = static_cast<Symbol>(i % 2 == 0 ? s : t);
        if (sys.language().word_admissible(alt))
          samples.push_back(sys.point_from_word(alt, h));
      }
    }
  }
  PropertyVerdict v5 = unique_ergodicity_probe(
      sys, default_observables(sys), birkhoff_n, samples, o.birkhoff_tol);

  rep.results["entropy"] = report::to_json(est);
  rep.results["conditions"] = json::array();
  for (const PropertyVerdict* v : {&v1, &v2, &v3, &v4, &v5})
    rep.results["conditions"].push_back(report::to_json(*v));
  rep.notes.push_back(
      "verdicts are scale-bounded semi-decisions at the recorded parameters");
  bool zero_entropy = v1.status == VerdictStatus::holds_at_scale;
  bool equicont = v3.status == VerdictStatus::holds_at_scale;
  bool rigid = v4.status == VerdictStatus::holds_at_scale;
  if (zero_entropy && (!equicont || !rigid))
    rep.results["banner"] =
        "zero entropy with equicontinuity or rigidity failing: the gluing "
        "orbit property cannot hold here (it would force minimal + "
        "equicontinuous); run glue --mode refute for a certificate";
  rep.timing_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  emit(o, rep,
       {{"counts.svg", svg::count_table_plot({est}, {kind_name(sys.kind())})}});
  return 0;
}

int cmd_glue(const CommonOpts& o, const std::string& mode,
             const std::string& segments, const std::string& gaps,
             const std::string& tracer, const std::string& sequence_file) {
  auto t0 = std::chrono::steady_clock::now();
  DynSystem sys = load_system(o);
  Budget budget(o.budget);
  report::Report rep;
  rep.command = "glue/" + mode;
  rep.config = config_echo(o, mode);
  long horizon = std::max<long>(o.horizon, 600);

  if (mode == "check") {
    OrbitSequence seq = load_sequence(sys, segments, sequence_file, horizon);
    GapSequence g{parse_longs(gaps)};
    Point z = parse_point(sys, tracer, horizon);
    auto cert = trace_check(sys, seq, g, z, o.epsilon);
    rep.results["certificate"] = report::to_json(cert);
    rep.results["pass"] = cert.pass;
  } else if (mode == "search") {
    OrbitSequence seq = load_sequence(sys, segments, sequence_file, horizon);
    if (sys.symbolic_exact()) {
      int m = std::max(1, sym_resolution(o.epsilon));
      auto r = trace_search_subshift(sys, seq, m, o.bigm, budget);
      if (r.certificate)
        rep.results["certificate"] = report::to_json(*r.certificate);
      if (r.refutation)
        rep.results["refutation"] = report::to_json(*r.refutation);
    } else {
      double d = o.delta > 0 ? o.delta : o.epsilon / 4;
      auto cands = sys.build_net(d);
      auto r = trace_search(sys, seq, o.epsilon, o.bigm, cands, budget);
      if (r.certificate)
        rep.results["certificate"] = report::to_json(*r.certificate);
      else
        rep.results["exhausted"] =
            json{{"explored", r.exhausted->explored},
                 {"dead_prefixes", r.exhausted->dead_prefixes.size()}};
    }
  } else if (mode == "estimate") {
    SequenceSampler sampler;
    sampler.seed = o.seed;
    sampler.count = 50;
    std::vector<Point> net =
        sys.symbolic_exact()
            ? sys.build_net(0.125, static_cast<std::size_t>(horizon))
            : sys.build_net(o.delta > 0 ? o.delta : o.epsilon / 4);
    auto samples = sample_sequences(sampler, net);
    auto est =
        estimate_gluing_constant(sys, o.epsilon, samples, o.bigm, net, budget);
    if (est.constant) {
      rep.results["constant"] = *est.constant;
      json ev = json::array();
      for (const auto& c : est.evidence) ev.push_back(report::to_json(c));
      rep.results["evidence"] = ev;
    } else if (est.counterexample) {
      rep.results["counterexample"] = report::to_json(*est.counterexample);
    }
  } else if (mode == "refute") {
    auto out = refute_gluing(sys, o.epsilon, o.bigm, budget,
                             o.delta > 0 ? o.delta : o.epsilon / 5);
    rep.results["note"] = out.note;
    if (out.refutation) {
      rep.results["refutation"] = report::to_json(*out.refutation);
      rep.results["samples_verified"] =
          verify_refutation_samples(sys, *out.refutation, 10, o.seed);
    } else {
      rep.results["inconclusive"] = true;
    }
  } else {
    throw ParseError("unknown glue mode '" + mode + "'");
  }
  rep.timing_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  emit(o, rep);
  return 0;
}

int cmd_construct(const CommonOpts& o, const std::string& what, int bits,
                  double beta, double eta) {
  auto t0 = std::chrono::steady_clock::now();
  DynSystem sys = load_system(o);
  Budget budget(o.budget);
  report::Report rep;
  rep.command = "construct/" + what;
  rep.config = config_echo(o, what);
  int exit_code = 0;

  Point p = sys.canonical_transitive_point(8192);
  std::vector<Point> cands;
  if (!sys.symbolic_exact())
    cands = sys.build_net(o.delta > 0 ? o.delta : o.epsilon / 4);

  if (what == "family") {
    auto fam =
        build_separated_family(sys, p, o.epsilon, bits, o.bigm, budget, cands);
    rep.results["family"] = report::to_json(fam);
    if (!fam.certified) exit_code = 4;
  } else if (what == "induced-shift") {
    auto ind = induced_shift_approx(sys, p, o.tau, o.epsilon, o.depth, o.bigm,
                                    budget, cands);
    rep.results["induced"] = report::to_json(ind);
  } else if (what == "lambda") {
    auto lam =
        lambda_build(sys, p, o.tau, o.epsilon, o.depth, o.bigm, budget, cands);
    rep.results["lambda"] = report::to_json(lam);
  } else if (what == "proper-subsystem") {
    auto demo = proper_subsystem_demo(sys, beta, eta, budget);
    rep.results["proper_subsystem"] = report::to_json(demo);
    if (!demo.pass) {
      rep.notes.push_back("staged failure: " + demo.failure_stage);
      exit_code = 4;
    }
  } else {
    throw ParseError("unknown construction '" + what + "'");
  }
  rep.timing_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  emit(o, rep);
  return exit_code;
}

int cmd_demo(const CommonOpts& o) {
  auto t0 = std::chrono::steady_clock::now();
  DemoConfig cfg;
  cfg.rigidity_tol = o.rigidity_tol;
  cfg.birkhoff_tol = o.birkhoff_tol;
  cfg.entropy_tol = o.entropy_tol;
  cfg.seed = o.seed;
  cfg.budget = o.budget;

  report::Report rep;
  rep.command = "demo-theorem";
  rep.config = config_echo(o);
  bool budget_hit = false;
  DemoResult demo;
  try {
    demo = run_theorem_demo(cfg);
  } catch (const BudgetError& e) {
    budget_hit = true;
    rep.notes.push_back(std::string("budget exhausted: ") + e.what() +
                        "; remaining rows inconclusive");
  }

  json rows = json::array();
  std::vector<std::string> names;
  std::vector<std::array<VerdictStatus, 5>> table;
  std::vector<EntropyEstimate> tables;
  for (const auto& row : demo.rows) {
    json r;
    r["system"] = row.name;
    r["conditions"] = json::array();
    std::array<VerdictStatus, 5> statuses{};
    for (std::size_t c = 0; c < 5; ++c) {
      r["conditions"].push_back(report::to_json(row.conditions[c]));
      statuses[c] = row.conditions[c].status;
    }
    r["entropy"] = report::to_json(row.entropy);
    if (row.gluing_constant) r["gluing_constant"] = *row.gluing_constant;
    if (row.gluing_refutation)
      r["gluing_refutation"] = report::to_json(*row.gluing_refutation);
    r["gluing_note"] = row.gluing_note;
    rows.push_back(r);
    names.push_back(row.name);
    table.push_back(statuses);
    tables.push_back(row.entropy);
  }
  rep.results["rows"] = rows;
  rep.results["banner"] = demo.banner;
  rep.results["mismatches"] = demo.mismatches;
  rep.results["all_expected"] = demo.all_expected;
  rep.timing_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  std::vector<std::pair<std::string, std::string>> files;
  if (!demo.rows.empty()) {
    files.emplace_back("counts.svg", svg::count_table_plot(tables, names));
    files.emplace_back("diagram.svg", svg::implication_diagram(names, table));
  }
  emit(o, rep, files);
  for (const auto& m : demo.mismatches) std::cerr << "mismatch: " << m << "\n";
  if (budget_hit) return 0;  // warnings only
  return demo.all_expected ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"computational probes for orbit gluing, entropy and rigidity "
               "on symbolic and torus systems"};
  app.require_subcommand(1);
  CommonOpts o;

  auto add_common = [&](CLI::App* cmd, bool needs_system) {
    if (needs_system)
      cmd->add_option("--system", o.system_file, "system config file")
          ->required();
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--format", o.format, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--epsilon", o.epsilon, "tolerance");
    cmd->add_option("--delta", o.delta, "net spacing");
    cmd->add_option("--bigm", o.bigm, "gap bound M");
    cmd->add_option("--horizon", o.horizon, "time horizon N");
    cmd->add_option("--tau", o.tau, "segment span");
    cmd->add_option("--depth", o.depth, "enumeration depth");
    cmd->add_option("--seed", o.seed, "sampler seed");
    cmd->add_option("--budget", o.budget, "work budget");
    cmd->add_option("--rigidity-tol", o.rigidity_tol, "rigidity tolerance");
    cmd->add_option("--birkhoff-tol", o.birkhoff_tol,
                    "average-spread tolerance");
    cmd->add_option("--entropy-tol", o.entropy_tol, "zero-entropy slope bound");
  };

  auto* analyze = app.add_subcommand("analyze", "five-condition verdict table");
  add_common(analyze, true);

  auto* glue = app.add_subcommand("glue", "tracing checks and searches");
  add_common(glue, true);
  std::string mode = "search", segments, gaps, tracer, sequence_file;
  glue->add_option("--mode", mode, "check|search|estimate|refute")
      ->check(CLI::IsMember({"check", "search", "estimate", "refute"}));
  glue->add_option("--segments", segments,
                   "inline orbit sequence base:length;base:length");
  glue->add_option("--gaps", gaps, "comma-separated gaps");
  glue->add_option("--tracer", tracer, "tracing point");
  glue->add_option("--sequence-file", sequence_file,
                   "orbit sequence as JSON (report schema)");

  auto* construct = app.add_subcommand("construct", "proof-machine pipelines");
  add_common(construct, true);
  std::string what = "family";
  int bits = 4;
  double beta = 0.3, eta = 0.5;
  construct->add_option("--what", what,
                        "family|induced-shift|lambda|proper-subsystem")
      ->check(CLI::IsMember(
          {"family", "induced-shift", "lambda", "proper-subsystem"}));
  construct->add_option("--bits", bits, "family pattern bits");
  construct->add_option("--beta", beta, "target entropy rate");
  construct->add_option("--eta", eta, "entropy resolution");

  auto* demo =
      app.add_subcommand("demo-theorem", "packaged four-system demonstration");
  add_common(demo, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) return cmd_analyze(o);
    if (*glue) return cmd_glue(o, mode, segments, gaps, tracer, sequence_file);
    if (*construct) return cmd_construct(o, what, bits, beta, eta);
    if (*demo) return cmd_demo(o);
  } catch (const BudgetError& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return 3;
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
