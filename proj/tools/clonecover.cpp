#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "clonecover/pipeline.hpp"
#include "clonecover/serialize.hpp"

using namespace clonecover;

namespace {

struct Flags {
  std::uint64_t seed = 1;
  Index m = 2;
  Nat horizon = 8;
  Nat theta = 0;
  std::string profile = "mixed";
  Nat surplus = 1;
  std::string out;
  std::string in;
  std::string term;
  bool timing = false;
};

// One JSON object per line on stderr.
void log(const std::string& event, Json fields = Json::object()) {
  fields["event"] = event;
  std::cerr << fields.dump() << "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const Flags& flags, const std::string& text) {
  if (flags.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(flags.out, std::ios::binary);
  if (!out) throw Error("cannot write '" + flags.out + "'");
  out << text;
  log("wrote", {{"path", flags.out}});
}

GenOptions gen_options(const Flags& flags) {
  GenOptions o;
  o.m = flags.m;
  o.horizon = flags.horizon;
  o.theta = flags.theta;
  o.seed = flags.seed;
  o.profile = flags.profile;
  o.surplus = flags.surplus;
  return o;
}

// The instance from --in, or a fresh one from the generator flags.
Instance load_instance(const Flags& flags) {
  if (!flags.in.empty()) {
    log("load_instance", {{"path", flags.in}});
    return deserialize_instance(read_file(flags.in));
  }
  log("generate", {{"seed", flags.seed}, {"m", flags.m}, {"horizon", flags.horizon}, {"profile", flags.profile}});
  return generate_instance(gen_options(flags));
}

Report verification_report(const Instance& inst, const std::string& stage, const VerificationReport& v) {
  Report r;
  r.seed = inst.seed;
  r.m = inst.m;
  r.horizon = inst.horizon;
  r.theta = inst.theta;
  r.domain_size = inst.g.size();
  r.add(stage, v);
  return r;
}

int finish(const Flags& flags, const Report& r) {
  emit(flags, serialize(r));
  log("done", {{"pass", r.pass()}});
  return r.pass() ? 0 : 1;
}

int cmd_gen(const Flags& flags) {
  Instance inst = generate_instance(gen_options(flags));
  emit(flags, serialize(inst));
  log("done", {{"domain_size", inst.g.size()}});
  return 0;
}

int cmd_check(const Flags& flags) {
  Instance inst = load_instance(flags);
  return finish(flags, verification_report(inst, "admissibility", check_admissibility(inst)));
}

int cmd_decompose(const Flags& flags) {
  Instance inst = load_instance(flags);
  if (inst.theta < 1) throw ContractViolation("theta must be at least 1");
  DecompositionTrace trace = hereditary_decompose(inst.g, inst.theta);
  VerificationReport v = verify_decomposition(inst.g, trace);
  Json doc = to_json(trace);
  doc["verification"] = to_json(v);
  emit(flags, dump(doc));
  log("done", {{"pass", v.pass()}, {"stages", trace.stages.size()}});
  return v.pass() ? 0 : 1;
}

int cmd_synth(const Flags& flags) {
  Instance inst = load_instance(flags);
  SynthesisOptions so;
  so.theta = inst.theta;
  so.horizon = inst.horizon;
  so.width_threshold = inst.admissibility.width_threshold;
  SynthesisBundle b = end_to_end_synthesize(inst.g, inst.f, inst.candidates, so);
  VerificationReport v = verify_term(inst, b.term);
  emit(flags, serialize(b.term));
  TermStats s = term_stats(b.term);
  log("done", {{"pass", v.pass()}, {"nodes", s.nodes}, {"depth", s.depth}});
  return v.pass() ? 0 : 1;
}

int cmd_verify(const Flags& flags) {
  if (flags.term.empty()) throw Error("verify needs --term");
  Instance inst = load_instance(flags);
  log("load_term", {{"path", flags.term}});
  TermBundle term = deserialize_term(read_file(flags.term));
  return finish(flags, verification_report(inst, "term", verify_term(inst, term)));
}

int cmd_demo(const Flags& flags) {
  Instance inst = load_instance(flags);
  PipelineOptions po;
  po.timing = flags.timing;
  PipelineResult result = run_pipeline(inst, po);
  if (result.report.error) log("stage_error", {{"message", *result.report.error}});
  return finish(flags, result.report);
}

}  // namespace

int main(int argc, char** argv) {
  Flags flags;
  if (const char* env = std::getenv("CLONECOVER_SEED")) {
    try {
      flags.seed = std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "CLONECOVER_SEED is not a number: " << env << "\n";
      return 2;
    }
  }

  CLI::App app{"Term synthesis workbench for ideal clones on omega x omega"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", flags.seed, "RNG seed (default from CLONECOVER_SEED, else 1)");
    sub->add_option("--m", flags.m, "arity, 1 to 3")->check(CLI::Range(1, 3));
    sub->add_option("--horizon", flags.horizon, "normalization horizon N")->check(CLI::Range(2, 64));
    sub->add_option("--theta", flags.theta, "threshold; 0 picks ceil(N/2)");
    sub->add_option("--out", flags.out, "write the output here instead of stdout");
    sub->add_option("--profile", flags.profile, "generator profile")
        ->check(CLI::IsMember({"mixed", "all-thrifty", "projection", "empty"}));
    sub->add_option("--surplus", flags.surplus, "spare landing tuples per wasteful class");
  };
  auto add_input = [&](CLI::App* sub) {
    sub->add_option("--in", flags.in, "instance file; generated from the flags when absent");
  };

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Flags&);
  };
  const Command commands[] = {
      {"gen", "generate an instance", cmd_gen},
      {"check", "check admissibility of an instance", cmd_check},
      {"decompose", "hereditary decomposition trace with verification", cmd_decompose},
      {"synth", "synthesize a term for g", cmd_synth},
      {"verify", "verify a term against an instance", cmd_verify},
      {"demo", "generate, run the full pipeline and report", cmd_demo},
  };
  std::map<CLI::App*, const Command*> dispatch;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_common(sub);
    if (std::string(c.name) != "gen") add_input(sub);
    if (std::string(c.name) == "verify") sub->add_option("--term", flags.term, "term file")->required();
    if (std::string(c.name) == "demo") sub->add_flag("--timing", flags.timing, "include stage timings");
    dispatch[sub] = &c;
  }

  CLI11_PARSE(app, argc, argv);

  for (auto& [sub, cmd] : dispatch) {
    if (!sub->parsed()) continue;
    try {
      return cmd->run(flags);
    } catch (const std::exception& e) {
      log("error", {{"message", e.what()}});
      return 1;
    }
  }
  return 2;
}
