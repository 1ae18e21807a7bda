#include "clonecover/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace clonecover {

Nat oplus(Nat n, Nat k) {
  if (k >= n)
    throw ContractViolation("oplus(" + std::to_string(n) + ", " + std::to_string(k) +
                            ") needs k < n");
  if (n > std::numeric_limits<std::uint32_t>::max()) throw ContractViolation("oplus overflow");
  return n * n + k;
}

std::optional<std::pair<Nat, Nat>> oplus_decode(Nat code) {
  Nat n = static_cast<Nat>(std::sqrt(static_cast<long double>(code)));
  while (n * n > code) --n;
  while ((n + 1) * (n + 1) <= code) ++n;
  Nat k = code - n * n;
  if (k >= n) return std::nullopt;
  return std::pair{n, k};
}

// ---------------------------------------------------------------------------

PointFn unary_composite(const PointFn& f, const std::vector<const PointFn*>& parts) {
  PointFn out(IndexSet{1});
  if (parts.empty()) return out;
  for (auto& [x, first] : *parts.front()) {
    std::vector<Point> args{first};
    bool defined = true;
    for (std::size_t i = 1; i < parts.size() && defined; ++i) {
      auto v = (*parts[i])(x);
      if (v)
        args.push_back(*v);
      else
        defined = false;
    }
    if (!defined) continue;
    if (auto y = f(MTuple(std::move(args)))) out.insert(x, *y);
  }
  return out;
}

namespace {

IdealVerdict unary_ci_check(const PointFn& p, Nat threshold) {
  return ci_fragment_check(p, width1_slices(p.domain()), threshold);
}

}  // namespace

UnaryReduction reduce_to_unary(const PointFn& f, const std::vector<PointFn>& candidates,
                               Nat width_threshold) {
  const IndexSet unary{1};
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].arity() != unary)
      throw ContractViolation("candidate " + std::to_string(i) + " is not unary");
    if (!certify_ci(candidates[i], 1))
      throw ContractViolation("candidate " + std::to_string(i) + " has no C_I certificate");
  }
  if (f.arity() != IndexSet::range(static_cast<Index>(f.arity().size())) || f.arity().empty())
    throw StructuralError("witness arity must be {1..n}");

  if (f.arity() == unary) {
    auto verdict = unary_ci_check(f, width_threshold);
    if (!verdict.pass) return UnaryReduction{f, {}, std::move(verdict)};
  }

  const std::size_t n = f.arity().size();
  if (!candidates.empty()) {
    std::vector<std::size_t> choice(n, 0);
    while (true) {
      std::vector<const PointFn*> parts;
      for (auto c : choice) parts.push_back(&candidates[c]);
      PointFn composite = unary_composite(f, parts);
      if (!composite.empty()) {
        auto verdict = unary_ci_check(composite, width_threshold);
        if (!verdict.pass) return UnaryReduction{std::move(composite), choice, std::move(verdict)};
      }
      std::size_t pos = n;
      while (pos > 0 && ++choice[pos - 1] == candidates.size()) choice[--pos] = 0;
      if (pos == 0) break;
    }
  }
  throw AdmissibilityError("no unary witness in candidate set");
}

// ---------------------------------------------------------------------------

std::optional<Point> apply_l(const NormalizedWitness& w, const Point& p) {
  auto line = w.l_line.find(p.y);
  auto col = w.l_row.find({p.y, p.x});
  if (line == w.l_line.end() || col == w.l_row.end()) return std::nullopt;
  return Point{col->second, line->second};
}

NormalizedWitness normalize_f(const PointFn& f_unary, Nat horizon) {
  if (f_unary.arity() != IndexSet{1}) throw StructuralError("normalize_f needs a unary function");
  if (horizon < 2) throw ContractViolation("horizon must be at least 2");

  // codomain line -> column -> preimage points in (line, column) order
  std::map<Nat, std::map<Nat, std::vector<Point>>> by_line;
  for (auto& [x, v] : f_unary) by_line[v.y][v.x].push_back(x.at(1));
  for (auto& [line, cols] : by_line)
    for (auto& [col, pre] : cols) std::sort(pre.begin(), pre.end(), LineOrder{});

  NormalizedWitness w;
  w.horizon = horizon;
  w.f_star = PointFn(IndexSet{1});
  std::set<Nat> used_domain_lines;
  std::set<Nat> used_lines;

  for (Nat n = horizon - 1; n >= 1; --n) {
    // Line n first, so a witness already in normal form maps to itself.
    std::vector<Nat> order;
    if (by_line.count(n)) order.push_back(n);
    for (auto& [line, cols] : by_line)
      if (line != n) order.push_back(line);
    bool placed = false;
    for (Nat line : order) {
      const auto& cols = by_line.at(line);
      if (used_lines.count(line) || cols.size() < n) continue;
      std::vector<std::pair<Nat, Point>> picked;  // (column, preimage)
      std::set<Nat> tentative;
      for (auto& [col, pre] : cols) {
        for (const auto& p : pre) {
          if (used_domain_lines.count(p.y) || tentative.count(p.y)) continue;
          picked.emplace_back(col, p);
          tentative.insert(p.y);
          break;
        }
        if (picked.size() == n) break;
      }
      if (picked.size() < n) continue;
      used_lines.insert(line);
      used_domain_lines.insert(tentative.begin(), tentative.end());
      w.l_line.emplace(line, n);
      for (Nat k = 0; k < n; ++k) {
        Point normalized{0, oplus(n, k)};
        w.l_row.emplace(std::pair{line, picked[k].first}, k);
        w.r.emplace(normalized, picked[k].second);
        w.f_star.insert(MTuple({normalized}), Point{k, n});
      }
      placed = true;
      break;
    }
    if (!placed)
      throw AdmissibilityError("no codomain line offers " + std::to_string(n) +
                               " points with width-1 preimages (n = " + std::to_string(n) + ")");
  }

  // Default slot (0|0), reached by bar-extended C_I atoms.
  std::optional<Point> spare;
  for (auto& [x, v] : f_unary) {
    const Point& p = x.at(1);
    if (used_domain_lines.count(p.y)) continue;
    if (p == kOrigin) {
      spare = p;
      break;
    }
    if (!spare || LineOrder{}(p, *spare)) spare = p;
  }
  if (!spare) throw AdmissibilityError("no spare preimage for the (0|0) slot");
  Point image = *f_unary(MTuple({*spare}));
  if (!w.l_line.count(image.y)) {
    Nat fresh = horizon;
    std::set<Nat> taken;
    for (auto& [from, to] : w.l_line) taken.insert(to);
    while (taken.count(fresh)) ++fresh;
    w.l_line.emplace(image.y, fresh);
  }
  if (!w.l_row.count({image.y, image.x})) {
    Nat next = 0;
    for (auto& [key, col] : w.l_row)
      if (key.first == image.y) next = std::max(next, col + 1);
    w.l_row.emplace(std::pair{image.y, image.x}, next);
  }
  w.r.emplace(kOrigin, *spare);
  w.f_star.insert(MTuple({kOrigin}), *apply_l(w, image));
  return w;
}

// ---------------------------------------------------------------------------

std::size_t PStarIndex::slot(const IndexSet& s, Index j) const {
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (pairs[i].first == s && pairs[i].second == j) return i;
  throw StructuralError("(" + s.to_string() + "," + std::to_string(j) + ") not in P*(M)");
}

std::string PStarIndex::label(std::size_t slot) const {
  return pairs.at(slot).first.to_string() + "," + std::to_string(pairs.at(slot).second);
}

PStarIndex pstar(const IndexSet& m) {
  PStarIndex out;
  out.m = m;
  for (const auto& s : subsets_by_size(m))
    for (Index j : m.minus(s)) out.pairs.emplace_back(s, j);
  return out;
}

KTables build_k_tables(const PointFn& q, Nat theta) {
  KTables tables;
  for (const auto& s : subsets_by_size(q.arity())) {
    if (s == q.arity()) continue;
    for (const auto& c : fiber_keys(q, s)) tables.emplace(FiberKey{s, c}, k_table(fiber(q, s, c), theta));
  }
  return tables;
}

PointFn build_h(const PointFn& q, const IndexSet& s, Index j, const KTables& k_tables) {
  if (!q.arity().contains(j) || s.contains(j) || !s.subset_of(q.arity()))
    throw ContractViolation("build_h: (" + s.to_string() + "," + std::to_string(j) +
                            ") not in P*(M)");
  PointFn h(q.arity());
  for (auto& [u, value] : q) {
    auto table = k_tables.find(FiberKey{s, u.restricted(s)});
    if (table == k_tables.end())
      throw ContractViolation("no K-table for fiber " + u.restricted(s).to_string());
    auto k = table->second.find(value.y);
    if (k == table->second.end())
      throw ContractViolation("K-table of fiber " + u.restricted(s).to_string() +
                              " misses line " + std::to_string(value.y));
    Nat zy = u.at(j).y;
    if (zy < k->second) h.insert(u, Point{0, oplus(k->second, zy)});
  }
  return h;
}

QFunction::QFunction(PointFn q, PStarIndex index, std::vector<PointFn> h_family, PointFn f_star,
                     KTables k_tables)
    : q_(std::move(q)),
      index_(std::move(index)),
      h_family_(std::move(h_family)),
      f_star_(std::move(f_star)),
      k_tables_(std::move(k_tables)) {
  if (h_family_.size() != index_.pairs.size())
    throw StructuralError("h-family does not cover P*(M)");
}

std::vector<std::optional<Point>> QFunction::required(const MTuple& u) const {
  std::vector<std::optional<Point>> out(h_family_.size());
  for (std::size_t s = 0; s < h_family_.size(); ++s) {
    auto h = h_family_[s](u);
    if (!h) continue;
    auto f = f_star_(MTuple({*h}));
    if (!f) throw ContractViolation("f_star undefined at " + to_string(*h));
    out[s] = *f;
  }
  return out;
}

std::optional<Point> QFunction::operator()(const MTuple& u, const MTuple& v) const {
  auto value = q_(u);
  if (!value) return std::nullopt;
  if (v.size() != h_family_.size()) throw StructuralError("slot tuple has wrong length");
  auto req = required(u);
  for (std::size_t s = 0; s < req.size(); ++s)
    if (req[s] && v.entries()[s] != *req[s]) return std::nullopt;
  return value;
}

MTuple QFunction::fed_slots(const MTuple& u) const {
  std::vector<Point> v;
  v.reserve(h_family_.size());
  for (const auto& h : h_family_) {
    Point arg = h(u).value_or(kOrigin);
    auto f = f_star_(MTuple({arg}));
    if (!f) throw ContractViolation("f_star undefined at " + to_string(arg));
    v.push_back(*f);
  }
  return MTuple(std::move(v));
}

PointFn QFunction::materialize() const {
  const Index arity = m() + static_cast<Index>(h_family_.size());
  PointFn out(IndexSet::range(arity));
  for (auto& [u, value] : q_) {
    std::vector<Point> entries = u.entries();
    const MTuple fed = fed_slots(u);
    const auto& v = fed.entries();
    entries.insert(entries.end(), v.begin(), v.end());
    out.insert(MTuple(std::move(entries)), value);
  }
  return out;
}

PointFn build_Q(const QFunction& q_fn) { return q_fn.materialize(); }

TermBundle assemble_term(const PointFn& q, const PointFn& f_star, const PStarIndex& index,
                         const std::vector<PointFn>& h_family, const PointFn& q_graph) {
  if (h_family.size() != index.pairs.size()) throw StructuralError("h-family does not cover P*(M)");
  TermBundle b;
  b.arity = static_cast<Index>(q.arity().size());
  b.atoms.emplace("f*", AtomEntry{f_star, AtomClass::WitnessF, std::nullopt});

  const TupleSet universe = q.domain();
  std::vector<TermPtr> args;
  for (Index i = 1; i <= b.arity; ++i) args.push_back(Term::projection(i));
  for (std::size_t s = 0; s < h_family.size(); ++s) {
    if (h_family[s].arity() != q.arity()) throw StructuralError("h-family arity mismatch");
    std::string name = "h[" + index.label(s) + "]";
    PointFn h_bar = bar_extend(h_family[s], universe);
    CiCertificate cert{CiCertificate::Kind::Width1Range, 0, "range inside {0} x omega"};
    if (!check_certificate(h_bar, cert))
      throw ContractViolation(name + " does not have a width-1 range");
    b.atoms.emplace(name, AtomEntry{std::move(h_bar), AtomClass::CIAtom, cert});
    args.push_back(Term::compose(Term::atom("f*"), {Term::atom(name)}));
  }
  PointFn q_bar = bar_extend(q_graph, q_graph.domain());
  b.atoms.emplace("Q", AtomEntry{std::move(q_bar), AtomClass::CIAtom,
                                 CiCertificate{CiCertificate::Kind::MainLemma, 0,
                                               "width(Q[A]) <= m! on width-1 products"}});
  b.term = Term::compose(Term::atom("Q"), std::move(args));
  return b;
}

SynthesisResult synthesize_q(const PointFn& q, const NormalizedWitness& witness, Nat theta) {
  SynthesisResult r;
  r.index = pstar(q.arity());
  r.k_tables = build_k_tables(q, theta);
  for (auto& [s, j] : r.index.pairs) r.h_family.push_back(build_h(q, s, j, r.k_tables));
  r.q_fn = QFunction(q, r.index, r.h_family, witness.f_star, r.k_tables);
  r.q_graph = build_Q(r.q_fn);
  r.term = assemble_term(q, witness.f_star, r.index, r.h_family, r.q_graph);
  return r;
}

// ---------------------------------------------------------------------------

PointSet complete_width1(const PointSet& b, const std::set<Nat>& lines_needed) {
  if (width(b).width > 1) throw ContractViolation("complete_width1: factor has width > 1");
  std::set<Nat> met;
  for (const auto& p : b) met.insert(p.y);
  PointSet out = b;
  for (Nat n : lines_needed)
    if (!met.count(n)) out.insert(Point{0, n});
  return out;
}

namespace {

void check_shape(const QFunction& q_fn, const FactorFamily& family) {
  if (family.coords.size() != q_fn.m() || family.slots.size() != q_fn.index().pairs.size())
    throw StructuralError("factor family does not match M and P*(M)");
}

// B<n>: the column of B's unique point on line n.
Nat select(const PointSet& b, Nat line, const std::string& what) {
  for (const auto& p : b)
    if (p.y == line) return p.x;
  throw ContractViolation("selector " + what + "<" + std::to_string(line) +
                          "> is empty; complete the factor with complete_width1");
}

bool member_of_factors(const QFunction& q_fn, const FactorFamily& family, const MTuple& u) {
  for (Index i = 1; i <= q_fn.m(); ++i)
    if (!family.coords[i - 1].count(u.at(i))) return false;
  auto req = q_fn.required(u);
  for (std::size_t s = 0; s < req.size(); ++s) {
    if (req[s] ? !family.slots[s].count(*req[s]) : family.slots[s].empty()) return false;
  }
  return true;
}

}  // namespace

FactorFamily complete_factors(const FactorFamily& family, const QFunction& q_fn) {
  check_shape(q_fn, family);
  FactorFamily out = family;
  const auto& index = q_fn.index();
  for (std::size_t s = 0; s < index.pairs.size(); ++s) {
    std::set<Nat> lines;
    for (auto& [key, table] : q_fn.k_tables())
      if (key.s == index.pairs[s].first)
        for (auto& [line, k] : table) lines.insert(k);
    out.slots[s] = complete_width1(family.slots[s], lines);
  }
  for (Index i = 1; i <= q_fn.m(); ++i) {
    std::set<Nat> lines;
    for (std::size_t s = 0; s < index.pairs.size(); ++s)
      if (index.pairs[s].second == i)
        for (const auto& p : out.slots[s]) lines.insert(p.x);
    out.coords[i - 1] = complete_width1(family.coords[i - 1], lines);
  }
  return out;
}

PointSet q_image(const QFunction& q_fn, const FactorFamily& family) {
  check_shape(q_fn, family);
  PointSet image;
  for (auto& [u, value] : q_fn.q())
    if (member_of_factors(q_fn, family, u)) image.insert(value);
  return image;
}

Nat factorial(Nat m) {
  Nat r = 1;
  for (Nat i = 2; i <= m; ++i) r *= i;
  return r;
}

MainLemmaReport verify_main_lemma(const QFunction& q_fn, const FactorFamily& family) {
  check_shape(q_fn, family);
  for (const auto& b : family.coords)
    if (width(b).width > 1) throw ContractViolation("verify_main_lemma: factor of width > 1");
  for (const auto& b : family.slots)
    if (width(b).width > 1) throw ContractViolation("verify_main_lemma: factor of width > 1");
  MainLemmaReport r;
  r.image = q_image(q_fn, family);
  auto cert = width(r.image);
  r.width = cert.width;
  r.witness_line = cert.witness_line;
  r.bound = factorial(q_fn.m());
  r.pass = r.width <= r.bound;
  return r;
}

UniquenessCertificate main_lemma_certify(const QFunction& q_fn, const FactorFamily& family,
                                         Nat line, const std::vector<Index>& pi) {
  check_shape(q_fn, family);
  const Index m = q_fn.m();
  {
    std::vector<Index> sorted = pi;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != IndexSet::range(m).elements())
      throw StructuralError("pi is not a permutation of M");
  }
  UniquenessCertificate cert;
  cert.line = line;
  cert.pi = pi;

  MTuple c;  // c^0, the empty tuple
  bool complete = true;
  for (Index j = 1; j <= m; ++j) {
    const Index idx = pi[j - 1];
    IndexSet s(std::vector<Index>(pi.begin(), pi.begin() + (j - 1)));
    auto table = q_fn.k_tables().find(FiberKey{s, c});
    if (table == q_fn.k_tables().end() || !table->second.count(line)) {
      complete = false;
      break;
    }
    CertificationStep step;
    step.s = s;
    step.index = idx;
    step.k = table->second.at(line);
    const std::size_t slot = q_fn.index().slot(s, idx);
    step.b = select(family.slots[slot], step.k, "A_{" + q_fn.index().label(slot) + "}");
    step.a = select(family.coords[idx - 1], step.b, "A_" + std::to_string(idx));
    c = c.joined(MTuple(IndexSet{idx}, {Point{step.a, step.b}}));
    cert.steps.push_back(step);
  }
  if (complete) cert.candidate = c;

  for (auto& [u, value] : q_fn.q()) {
    if (value.y != line) continue;
    bool ordered = true;
    for (Index j = 1; j < m && ordered; ++j) ordered = u.at(pi[j - 1]).y <= u.at(pi[j]).y;
    if (!ordered || !member_of_factors(q_fn, family, u)) continue;
    cert.qualifying.push_back(u);
    if (!cert.candidate || u != *cert.candidate) cert.pass = false;
  }
  return cert;
}

QCiReport verify_Q_in_CI(const QFunction& q_fn, const FactorFamily& product, Nat w,
                         std::size_t slice_limit) {
  check_shape(q_fn, product);
  QCiReport r;
  r.w = w;
  r.r_size = q_fn.m() + q_fn.index().pairs.size();
  std::vector<const PointSet*> factors;
  for (const auto& b : product.coords) factors.push_back(&b);
  for (const auto& b : product.slots) factors.push_back(&b);
  for (const auto* b : factors)
    if (width(*b).width > w) throw ContractViolation("verify_Q_in_CI: factor wider than w");

  const Nat m_fact = factorial(q_fn.m());
  r.bound = m_fact;
  for (Nat i = 0; i < r.r_size; ++i) {
    if (r.bound > std::numeric_limits<Nat>::max() / std::max<Nat>(w, 1)) {
      r.bound = std::numeric_limits<Nat>::max();
      break;
    }
    r.bound *= w;
  }
  r.observed = width(q_image(q_fn, product)).width;
  r.pass = r.observed <= r.bound;

  std::vector<std::vector<PointSet>> slices;
  for (const auto* b : factors) slices.push_back(width1_slices(*b));
  std::size_t combos = 1;
  for (const auto& sl : slices) {
    if (sl.empty()) {
      combos = 0;
      break;
    }
    combos = combos > slice_limit / sl.size() ? slice_limit + 1 : combos * sl.size();
  }
  if (combos <= slice_limit) {
    r.slices_checked = true;
    std::vector<std::size_t> pick(factors.size(), 0);
    for (std::size_t n = 0; n < combos; ++n) {
      FactorFamily f;
      for (std::size_t i = 0; i < factors.size(); ++i) {
        auto& dst = i < q_fn.m() ? f.coords : f.slots;
        dst.push_back(slices[i][pick[i]]);
      }
      if (width(q_image(q_fn, f)).width > m_fact) r.pass = false;
      for (std::size_t i = factors.size(); i-- > 0;) {
        if (++pick[i] < slices[i].size()) break;
        pick[i] = 0;
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------

namespace {

template <class Fn>
auto in_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e.what());
  }
}

}  // namespace

SynthesisBundle end_to_end_synthesize(const PointFn& g, const PointFn& f,
                                      const std::vector<PointFn>& candidates,
                                      const SynthesisOptions& options) {
  if (options.theta < 1 || options.theta >= options.horizon)
    throw StageError("options", "theta must satisfy 1 <= theta < horizon");
  const IndexSet m = g.arity();
  if (m.empty() || m != IndexSet::range(static_cast<Index>(m.size())))
    throw StageError("options", "g must have arity {1..m} with m >= 1");

  SynthesisBundle out;
  out.reduction =
      in_stage("reduce", [&] { return reduce_to_unary(f, candidates, options.width_threshold); });
  out.witness = in_stage("normalize", [&] { return normalize_f(out.reduction.unary, options.horizon); });
  out.trace = in_stage("decompose", [&] { return hereditary_decompose(g, options.theta, options.policy); });
  out.synthesis =
      in_stage("synthesize", [&] { return synthesize_q(out.trace.g_prime, out.witness, options.theta); });

  out.term = in_stage("assemble", [&] {
    TermBundle b = out.synthesis.term;
    const Index arity = static_cast<Index>(m.size());
    std::vector<TermPtr> prev;
    for (Index i = 1; i <= arity; ++i) prev.push_back(Term::projection(i));
    auto is_identity = [&](const std::vector<TermPtr>& ts) {
      for (Index i = 1; i <= arity; ++i)
        if (ts[i - 1]->kind() != Term::Kind::Projection || ts[i - 1]->index() != i) return false;
      return true;
    };
    for (std::size_t st = 0; st < out.trace.stages.size(); ++st) {
      const auto& stage = out.trace.stages[st];
      std::vector<TermPtr> next(arity);
      for (Index i = 1; i <= arity; ++i) {
        const auto& cert = stage.h_certificates.at(i);
        if (cert.kind == CiCertificate::Kind::Projection) {
          next[i - 1] = prev[cert.projection - 1];
          continue;
        }
        std::string name = "h" + std::to_string(st + 1) + "." + std::to_string(i);
        b.atoms.emplace(name, AtomEntry{bar_extend(component(stage.h, i), stage.h.domain()),
                                        AtomClass::CIAtom, cert});
        next[i - 1] = is_identity(prev) ? Term::atom(name) : Term::compose(Term::atom(name), prev);
      }
      prev = std::move(next);
    }
    if (!is_identity(prev)) b.term = Term::compose(b.term, prev);
    validate(b);
    return b;
  });
  return out;
}

}  // namespace clonecover
