#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "clonecover/ideals.hpp"

namespace clonecover {

class Term;
using TermPtr = std::shared_ptr<const Term>;

// A term over named atoms and projections. Compose(head, args) evaluates
// every argument at the input and feeds the resulting tuple to head.
class Term {
 public:
  enum class Kind { Projection, Atom, Compose };

  static TermPtr projection(Index k);
  static TermPtr atom(std::string name);
  static TermPtr compose(TermPtr head, std::vector<TermPtr> args);

  Kind kind() const { return kind_; }
  Index index() const { return index_; }
  const std::string& name() const { return name_; }
  const TermPtr& head() const { return head_; }
  const std::vector<TermPtr>& args() const { return args_; }

 private:
  Term() = default;
  Kind kind_ = Kind::Projection;
  Index index_ = 0;
  std::string name_;
  TermPtr head_;
  std::vector<TermPtr> args_;
};

enum class AtomClass { WitnessF, CIAtom };

struct AtomEntry {
  PointFn fn;
  AtomClass cls = AtomClass::CIAtom;
  std::optional<CiCertificate> cert;
};

using AtomEnv = std::map<std::string, AtomEntry>;

// A term together with the atoms it refers to.
struct TermBundle {
  TermPtr term;
  AtomEnv atoms;
  Index arity = 0;
};

// Evaluates t at u (a tuple over {1..n}). Undefined propagates.
std::optional<Point> eval_term(const Term& t, const AtomEnv& env, const MTuple& u);

inline std::optional<Point> eval_term(const TermBundle& b, const MTuple& u) {
  return eval_term(*b.term, b.atoms, u);
}

// Throws StructuralError unless every atom resolves, every Compose has as
// many arguments as its head's arity, projections stay within the arity
// and every CIAtom carries a certificate.
void validate(const TermBundle& b);

struct TermStats {
  Nat nodes = 0;  // tree size with shared subterms expanded
  Nat depth = 0;
  Nat projections = 0;
  Nat witness_atoms = 0;
  Nat ci_atoms = 0;
  Nat distinct_atoms = 0;
};

TermStats term_stats(const TermBundle& b);

bool operator==(const Term& a, const Term& b);

}  // namespace clonecover
