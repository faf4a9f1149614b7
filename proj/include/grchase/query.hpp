#pragma once

// Conjunctive queries, canonical structures and homomorphism search.

#include "grchase/core.hpp"

#include <functional>
#include <set>

namespace grchase {

// Q(x̄) = ∃ȳ body. free_vars ⊆ vars(body); the order of free_vars fixes
// tuple positions in evaluation results.
struct ConjunctiveQuery {
    std::string name;
    SignaturePtr sig;
    std::vector<Term> free_vars;
    std::vector<Atom> body;

    std::vector<Term> all_vars() const;
    void validate() const;
};

/// Elements of the canonical structure are the query's variables and
/// constants, kept verbatim; atoms are the body atoms.
Structure canonical_structure(const ConjunctiveQuery& q);

/// Inverse direction: the unique query whose canonical structure is `d`,
/// with `free_elements` as free variables. Null elements are rendered as
/// variables named after their id.
ConjunctiveQuery query_of(const Structure& d, const std::vector<Term>& free_elements,
                          const std::string& name = "Q");

// A term-to-term mapping. Constants are always fixed points.
class Homomorphism {
  public:
    bool bind(const Term& from, const Term& to); // false on conflicting rebind
    std::optional<Term> lookup(const Term& t) const;
    Term apply(const Term& t) const; // identity on unmapped terms
    Atom apply(const Atom& a) const;
    const std::unordered_map<Term, Term, TermHash>& mapping() const { return map_; }
    size_t size() const { return map_.size(); }

    static Homomorphism compose(const Homomorphism& first, const Homomorphism& second);

  private:
    std::unordered_map<Term, Term, TermHash> map_;
};

struct HomOptions {
    bool injective = false;
};

/// Invoked per homomorphism; return false to stop the enumeration.
using HomCallback = std::function<bool(const Homomorphism&)>;

// Backtracking search for homomorphisms source -> target extending `seed`.
//
// Enumeration order is deterministic: source atoms are ordered greedily
// (most already-bound arguments first, ties by fewer candidate target atoms,
// then by atom index); candidate target atoms follow insertion order via the
// positional indexes; leftover isolated elements run over the target domain
// in insertion order. A seed that maps a constant anywhere but itself yields
// an empty enumeration.
void find_homomorphisms(const Structure& source, const Structure& target,
                        const Homomorphism& seed, const HomCallback& cb,
                        const HomOptions& opts = {});

std::optional<Homomorphism> find_one_homomorphism(const Structure& source, const Structure& target,
                                                  const Homomorphism& seed = {},
                                                  const HomOptions& opts = {});

/// { ā : d ⊨ q(ā) }, ordered lexicographically.
std::set<std::vector<Term>> evaluate(const ConjunctiveQuery& q, const Structure& d);

/// d ⊨ q(args)?  Arguments outside d's domain make this false, not an error.
bool check_models(const Structure& d, const ConjunctiveQuery& q, const std::vector<Term>& args);

/// Witness variant of check_models.
std::optional<Homomorphism> models_witness(const Structure& d, const ConjunctiveQuery& q,
                                           const std::vector<Term>& args);

/// Both directions admit an injective homomorphism fixing constants and
/// atom counts agree; enough for the small fixtures we compare.
bool isomorphic(const Structure& a, const Structure& b);

std::string to_string(const ConjunctiveQuery& q);

} // namespace grchase
