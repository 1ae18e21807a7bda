#include "clonecover/pipeline.hpp"

#include <algorithm>
#include <chrono>

namespace clonecover {

bool Report::pass() const {
  return !error && std::all_of(checks.begin(), checks.end(), [](const StageCheck& c) { return c.pass; });
}

void Report::add(const std::string& stage, const VerificationReport& r) {
  for (const auto& c : r.checks) checks.push_back(StageCheck{stage, c.name, c.pass, c.detail});
}

void Report::add(std::string stage, std::string name, bool ok, std::string detail) {
  checks.push_back(StageCheck{std::move(stage), std::move(name), ok, std::move(detail)});
}

namespace {

// Width-1 factors grown greedily from shuffled tuples of dom(q): a tuple is
// taken when its coordinates and required slot values fit every factor
// without a second point on any line.
FactorFamily greedy_family(const QFunction& q_fn, Rng& rng, std::size_t limit) {
  const auto& q = q_fn.q();
  FactorFamily family;
  family.coords.resize(q_fn.m());
  family.slots.resize(q_fn.index().pairs.size());
  std::vector<MTuple> dom;
  for (auto& [u, v] : q) dom.push_back(u);
  rng.shuffle(dom);
  std::vector<std::map<Nat, Point>> coord_lines(family.coords.size());
  std::vector<std::map<Nat, Point>> slot_lines(family.slots.size());
  auto fits = [](const std::map<Nat, Point>& lines, const Point& p) {
    auto it = lines.find(p.y);
    return it == lines.end() || it->second == p;
  };
  std::size_t taken = 0;
  for (const auto& u : dom) {
    if (taken == limit) break;
    auto req = q_fn.required(u);
    bool ok = true;
    for (Index i = 1; i <= q_fn.m() && ok; ++i) ok = fits(coord_lines[i - 1], u.at(i));
    for (std::size_t s = 0; s < req.size() && ok; ++s) ok = !req[s] || fits(slot_lines[s], *req[s]);
    if (!ok) continue;
    for (Index i = 1; i <= q_fn.m(); ++i) coord_lines[i - 1].emplace(u.at(i).y, u.at(i));
    for (std::size_t s = 0; s < req.size(); ++s)
      if (req[s]) slot_lines[s].emplace(req[s]->y, *req[s]);
    ++taken;
  }
  for (std::size_t i = 0; i < coord_lines.size(); ++i)
    for (auto& [line, p] : coord_lines[i]) family.coords[i].insert(p);
  for (std::size_t s = 0; s < slot_lines.size(); ++s)
    for (auto& [line, p] : slot_lines[s]) family.slots[s].insert(p);
  // A stray point on an unused line, away from the sampled tuples.
  for (std::size_t i = 0; i < family.coords.size(); ++i) {
    Point p{rng.below(64), 1000 + rng.below(64)};
    if (rng.chance(1, 2) && !coord_lines[i].count(p.y)) family.coords[i].insert(p);
  }
  return family;
}

std::vector<std::vector<Index>> permutations(Index m) {
  std::vector<Index> pi = IndexSet::range(m).elements();
  std::vector<std::vector<Index>> out;
  do out.push_back(pi);
  while (std::next_permutation(pi.begin(), pi.end()));
  return out;
}

std::string describe_mismatch(const MTuple& u, const Point& want, const std::optional<Point>& got) {
  return "at " + u.to_string() + ": expected " + to_string(want) + ", got " +
         (got ? to_string(*got) : std::string("undefined"));
}

VerificationReport check_equality(const PointFn& g, const TermBundle& term) {
  VerificationReport r;
  std::size_t mismatches = 0;
  std::string first;
  for (auto& [u, v] : g) {
    auto got = eval_term(term, u);
    if (got && *got == v) continue;
    if (mismatches++ == 0) first = describe_mismatch(u, v, got);
  }
  r.add("eval_equals_g", mismatches == 0,
        mismatches == 0 ? std::to_string(g.size()) + " tuples"
                        : std::to_string(mismatches) + " mismatches; first " + first);
  return r;
}

class Stopwatch {
 public:
  Stopwatch(Report& report, bool enabled, std::string name)
      : report_(report), enabled_(enabled), name_(std::move(name)),
        start_(std::chrono::steady_clock::now()) {}
  ~Stopwatch() {
    if (!enabled_) return;
    std::chrono::duration<double, std::milli> d = std::chrono::steady_clock::now() - start_;
    report_.timing_ms[name_] += d.count();
  }

 private:
  Report& report_;
  bool enabled_;
  std::string name_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

FactorFamily random_factor_family(const QFunction& q_fn, Rng& rng) {
  const std::size_t limit = 1 + rng.below(std::max<std::size_t>(q_fn.q().size(), 1));
  return complete_factors(greedy_family(q_fn, rng, limit), q_fn);
}

FactorFamily random_width2_family(const QFunction& q_fn, Rng& rng) {
  const std::size_t limit = q_fn.q().size();
  FactorFamily a = greedy_family(q_fn, rng, limit);
  FactorFamily b = greedy_family(q_fn, rng, limit);
  for (std::size_t i = 0; i < a.coords.size(); ++i) a.coords[i].insert(b.coords[i].begin(), b.coords[i].end());
  for (std::size_t i = 0; i < a.slots.size(); ++i) a.slots[i].insert(b.slots[i].begin(), b.slots[i].end());
  // Two width-1 sets can share a line; drop extras so the width stays <= 2.
  auto cap = [](PointSet& s) {
    std::map<Nat, int> seen;
    for (auto it = s.begin(); it != s.end();) it = ++seen[it->y] > 2 ? s.erase(it) : std::next(it);
  };
  for (auto& s : a.coords) cap(s);
  for (auto& s : a.slots) cap(s);
  return a;
}

VerificationReport check_main_lemma(const QFunction& q_fn, const FactorFamily& family) {
  VerificationReport r;
  auto lemma = verify_main_lemma(q_fn, family);
  r.add("width_bound", lemma.pass,
        "width " + std::to_string(lemma.width) + " <= " + std::to_string(lemma.bound) +
            (lemma.width ? " (line " + std::to_string(lemma.witness_line) + ")" : ""));
  std::set<Nat> lines;
  for (const auto& p : lemma.image) lines.insert(p.y);
  std::size_t certified = 0;
  std::string failure;
  for (Nat line : lines) {
    for (const auto& pi : permutations(q_fn.m())) {
      auto cert = main_lemma_certify(q_fn, family, line, pi);
      if (cert.pass) {
        ++certified;
        continue;
      }
      if (failure.empty()) {
        failure = "line " + std::to_string(line) + ", pi";
        for (Index i : pi) failure += " " + std::to_string(i);
        failure += ": " + std::to_string(cert.qualifying.size()) + " qualifying tuples";
      }
    }
  }
  r.add("uniqueness", failure.empty(),
        failure.empty() ? std::to_string(certified) + " (line, pi) pairs" : failure);
  return r;
}

VerificationReport check_h_family(const SynthesisResult& s) {
  VerificationReport r;
  for (std::size_t slot = 0; slot < s.h_family.size(); ++slot) {
    PointSet range;
    bool on_axis = true;
    for (auto& [u, v] : s.h_family[slot]) {
      range.insert(v);
      on_axis = on_axis && v.x == 0;
    }
    Nat w = width(range).width;
    r.add("h[" + s.index.label(slot) + "]", on_axis && w <= 1,
          std::string(on_axis ? "x = 0" : "x != 0") + ", width " + std::to_string(w));
  }
  return r;
}

VerificationReport verify_term(const Instance& inst, const TermBundle& term) {
  VerificationReport r;
  try {
    validate(term);
    r.add("structure", term.arity == inst.m,
          "arity " + std::to_string(term.arity) + ", instance m " + std::to_string(inst.m));
  } catch (const Error& e) {
    r.add("structure", false, e.what());
    return r;
  }

  std::size_t witnesses = 0;
  for (auto& [name, atom] : term.atoms) {
    if (atom.cls == AtomClass::WitnessF) {
      ++witnesses;
      std::string bad;
      for (Nat n = 1; n < inst.horizon && bad.empty(); ++n)
        for (Nat k = 0; k < n && bad.empty(); ++k) {
          auto got = atom.fn(MTuple({Point{0, oplus(n, k)}}));
          if (!got || *got != Point{k, n}) bad = describe_mismatch(MTuple({Point{0, oplus(n, k)}}), Point{k, n}, got);
        }
      r.add("witness." + name, bad.empty(), bad);
      continue;
    }
    bool ok = atom.cert && check_certificate(atom.fn, *atom.cert);
    r.add("certificate." + name, ok, atom.cert ? to_string(atom.cert->kind) : "missing");
  }
  r.add("witness_atoms", witnesses == 1, std::to_string(witnesses) + " witness atoms");

  for (auto& c : check_equality(inst.g, term).checks) r.checks.push_back(c);
  return r;
}

PipelineResult run_pipeline(const Instance& inst, const PipelineOptions& options) {
  PipelineResult out;
  Report& report = out.report;
  report.seed = inst.seed;
  report.m = inst.m;
  report.horizon = inst.horizon;
  report.theta = inst.theta;
  report.domain_size = inst.g.size();

  {
    Stopwatch sw(report, options.timing, "admissibility");
    report.add("admissibility", check_admissibility(inst));
  }

  SynthesisOptions so;
  so.theta = inst.theta;
  so.horizon = inst.horizon;
  so.width_threshold = inst.admissibility.width_threshold;
  try {
    Stopwatch sw(report, options.timing, "synthesis");
    out.bundle = end_to_end_synthesize(inst.g, inst.f, inst.candidates, so);
  } catch (const Error& e) {
    report.error = e.what();
    return out;
  }
  const SynthesisBundle& b = *out.bundle;

  try {
    {
      Stopwatch sw(report, options.timing, "decomposition");
      report.add("decomposition", verify_decomposition(inst.g, b.trace));
    }
    {
      Stopwatch sw(report, options.timing, "synthesis_checks");
      report.add("h_family", check_h_family(b.synthesis));
      const QFunction& q_fn = b.synthesis.q_fn;
      std::string q_bad;
      for (auto& [u, v] : q_fn.q()) {
        auto got = q_fn(u, q_fn.fed_slots(u));
        if (!got || *got != v) {
          q_bad = describe_mismatch(u, v, got);
          break;
        }
      }
      report.add("q", "Q_reproduces_q", q_bad.empty(), q_bad);

      Rng rng(mix_seed(inst.seed, 7));
      for (std::size_t n = 0; n < options.factor_families; ++n) {
        VerificationReport lemma = check_main_lemma(q_fn, random_factor_family(q_fn, rng));
        for (auto& c : lemma.checks) c.name = "family" + std::to_string(n + 1) + "." + c.name;
        report.add("main_lemma", lemma);
      }
      QCiReport ci = verify_Q_in_CI(q_fn, random_width2_family(q_fn, rng), options.q_ci_width);
      report.add("q_ci", "width_bound", ci.pass,
                 "observed " + std::to_string(ci.observed) + " <= " + std::to_string(ci.bound) +
                     (ci.slices_checked ? ", width-1 slices checked" : ""));
    }
    {
      Stopwatch sw(report, options.timing, "term");
      report.add("term", verify_term(inst, b.term));
      report.term_stats = term_stats(b.term);
    }
  } catch (const Error& e) {
    report.error = std::string("[verify] ") + e.what();
  }
  return out;
}

}  // namespace clonecover
