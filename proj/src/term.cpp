#include "clonecover/term.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace clonecover {

TermPtr Term::projection(Index k) {
  if (k == 0) throw StructuralError("projections are 1-based");
  auto t = std::shared_ptr<Term>(new Term);
  t->kind_ = Kind::Projection;
  t->index_ = k;
  return t;
}

TermPtr Term::atom(std::string name) {
  auto t = std::shared_ptr<Term>(new Term);
  t->kind_ = Kind::Atom;
  t->name_ = std::move(name);
  return t;
}

TermPtr Term::compose(TermPtr head, std::vector<TermPtr> args) {
  if (!head) throw StructuralError("compose without head");
  auto t = std::shared_ptr<Term>(new Term);
  t->kind_ = Kind::Compose;
  t->head_ = std::move(head);
  t->args_ = std::move(args);
  return t;
}

namespace {

const AtomEntry& lookup(const AtomEnv& env, const std::string& name) {
  auto it = env.find(name);
  if (it == env.end()) throw StructuralError("unresolved atom '" + name + "'");
  return it->second;
}

}  // namespace

std::optional<Point> eval_term(const Term& t, const AtomEnv& env, const MTuple& u) {
  switch (t.kind()) {
    case Term::Kind::Projection:
      if (!u.index_set().contains(t.index()))
        throw StructuralError("projection " + std::to_string(t.index()) + " applied to " +
                              u.to_string());
      return u.at(t.index());
    case Term::Kind::Atom: return lookup(env, t.name()).fn(u);
    case Term::Kind::Compose: {
      std::vector<Point> values;
      values.reserve(t.args().size());
      for (const auto& a : t.args()) {
        auto v = eval_term(*a, env, u);
        if (!v) return std::nullopt;
        values.push_back(*v);
      }
      return eval_term(*t.head(), env, MTuple(std::move(values)));
    }
  }
  return std::nullopt;
}

namespace {

// Checks t against the arity n of its input; returns nothing, throws on error.
void validate_at(const Term& t, const AtomEnv& env, std::size_t n) {
  switch (t.kind()) {
    case Term::Kind::Projection:
      if (t.index() > n)
        throw StructuralError("projection " + std::to_string(t.index()) + " in arity " +
                              std::to_string(n));
      return;
    case Term::Kind::Atom: {
      const auto& e = lookup(env, t.name());
      if (e.fn.arity() != IndexSet::range(static_cast<Index>(n)))
        throw StructuralError("atom '" + t.name() + "' of arity " + e.fn.arity().to_string() +
                              " used at arity " + std::to_string(n));
      if (e.cls == AtomClass::CIAtom && !e.cert)
        throw StructuralError("C_I atom '" + t.name() + "' carries no certificate");
      return;
    }
    case Term::Kind::Compose:
      for (const auto& a : t.args()) validate_at(*a, env, n);
      validate_at(*t.head(), env, t.args().size());
      return;
  }
}

}  // namespace

void validate(const TermBundle& b) {
  if (!b.term) throw StructuralError("empty term");
  validate_at(*b.term, b.atoms, b.arity);
}

namespace {

struct StatsWalker {
  const AtomEnv& env;
  TermStats stats;
  std::set<std::string> names;
  std::unordered_map<const Term*, std::pair<Nat, Nat>> memo;  // nodes, depth

  std::pair<Nat, Nat> size_depth(const Term& t) {
    if (auto it = memo.find(&t); it != memo.end()) return it->second;
    std::pair<Nat, Nat> r{1, 1};
    if (t.kind() == Term::Kind::Compose) {
      auto h = size_depth(*t.head());
      r.first += h.first;
      r.second = h.second + 1;
      for (const auto& a : t.args()) {
        auto s = size_depth(*a);
        r.first += s.first;
        r.second = std::max(r.second, s.second + 1);
      }
    }
    memo.emplace(&t, r);
    return r;
  }
};

}  // namespace

TermStats term_stats(const TermBundle& b) {
  StatsWalker w{b.atoms, {}, {}, {}};
  auto [nodes, depth] = w.size_depth(*b.term);
  w.stats.nodes = nodes;
  w.stats.depth = depth;
  // Expanded occurrence counts, propagated top-down over the DAG in an order
  // where every node precedes its children.
  std::vector<const Term*> order;
  std::unordered_map<const Term*, int> state;
  auto visit = [&](auto&& self, const Term* t) -> void {
    if (state[t]) return;
    state[t] = 1;
    if (t->kind() == Term::Kind::Compose) {
      self(self, t->head().get());
      for (const auto& a : t->args()) self(self, a.get());
    }
    order.push_back(t);
  };
  visit(visit, b.term.get());
  std::reverse(order.begin(), order.end());
  std::unordered_map<const Term*, Nat> occ{{b.term.get(), 1}};
  for (const Term* t : order) {
    Nat k = occ[t];
    switch (t->kind()) {
      case Term::Kind::Projection: w.stats.projections += k; break;
      case Term::Kind::Atom: {
        w.names.insert(t->name());
        auto it = b.atoms.find(t->name());
        if (it != b.atoms.end() && it->second.cls == AtomClass::WitnessF)
          w.stats.witness_atoms += k;
        else
          w.stats.ci_atoms += k;
        break;
      }
      case Term::Kind::Compose:
        occ[t->head().get()] += k;
        for (const auto& a : t->args()) occ[a.get()] += k;
        break;
    }
  }
  w.stats.distinct_atoms = w.names.size();
  return w.stats;
}

bool operator==(const Term& a, const Term& b) {
  if (&a == &b) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Term::Kind::Projection: return a.index() == b.index();
    case Term::Kind::Atom: return a.name() == b.name();
    case Term::Kind::Compose:
      if (a.args().size() != b.args().size() || !(*a.head() == *b.head())) return false;
      for (std::size_t i = 0; i < a.args().size(); ++i)
        if (!(*a.args()[i] == *b.args()[i])) return false;
      return true;
  }
  return false;
}

}  // namespace clonecover
