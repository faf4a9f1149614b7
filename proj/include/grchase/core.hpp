#pragma once

// Relational substrate: interned names, terms, atoms, signatures and
// structures (instances) with positional atom indexes.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace grchase {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a structure breaks an invariant the rewriting machinery
// guarantees (e.g. two real spiders on one head).
struct StructuralViolation : Error {
    explicit StructuralViolation(const std::string& msg) : Error(msg) {}
};

struct ParseError : Error {
    int line = 0, col = 0;
    ParseError(const std::string& msg, int line, int col)
        : Error(msg + " (line " + std::to_string(line) + ", col " + std::to_string(col) + ")"),
          line(line), col(col) {}
};

/// Process-wide interner for identifiers (variable, constant, predicate names).
class NameTable {
  public:
    static NameTable& instance();
    int32_t intern(std::string_view name);
    const std::string& name(int32_t id) const;

  private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, int32_t> ids_;
};

enum class TermKind : uint8_t { Constant = 0, Variable = 1, Null = 2 };

// A term is a constant, a variable, or a labeled null. Constants and
// variables carry an interned name id; nulls carry a per-run counter id.
struct Term {
    TermKind kind = TermKind::Variable;
    int32_t id = 0;

    static Term var(std::string_view name);
    static Term constant(std::string_view name);
    static Term null(int32_t id) { return Term{TermKind::Null, id}; }

    bool is_var() const { return kind == TermKind::Variable; }
    bool is_constant() const { return kind == TermKind::Constant; }
    bool is_null() const { return kind == TermKind::Null; }

    friend bool operator==(const Term& a, const Term& b) = default;
    friend auto operator<=>(const Term& a, const Term& b) = default;
};

std::string to_string(const Term& t);

struct TermHash {
    size_t operator()(const Term& t) const {
        return std::hash<uint64_t>()((uint64_t(uint8_t(t.kind)) << 32) ^ uint32_t(t.id));
    }
};

using PredId = int32_t;

struct Atom {
    PredId pred = -1;
    std::vector<Term> args;

    friend bool operator==(const Atom& a, const Atom& b) = default;
    friend auto operator<=>(const Atom& a, const Atom& b) = default;
};

struct AtomHash {
    size_t operator()(const Atom& a) const {
        size_t h = std::hash<int32_t>()(a.pred);
        for (const Term& t : a.args) h = h * 1000003u ^ TermHash()(t);
        return h;
    }
};

// Predicate/constant vocabulary. Predicate ids are dense indexes into this
// signature; constants are shared interned names.
class Signature {
  public:
    PredId add_predicate(std::string_view name, int arity);
    void add_constant(std::string_view name);

    std::optional<PredId> predicate(std::string_view name) const;
    const std::string& predicate_name(PredId p) const { return names_[size_t(p)]; }
    int arity(PredId p) const { return arities_[size_t(p)]; }
    size_t predicate_count() const { return names_.size(); }

    bool has_constant(const Term& t) const;
    const std::vector<Term>& constants() const { return constants_; }

  private:
    std::vector<std::string> names_;
    std::vector<int> arities_;
    std::unordered_map<std::string, PredId> by_name_;
    std::vector<Term> constants_;
    std::unordered_set<Term, TermHash> constant_set_;
};

using SignaturePtr = std::shared_ptr<const Signature>;

// A relational instance: a set of atoms plus the derived domain. Atoms are
// append-only and deduplicated; insertion order is the enumeration order,
// which keeps every search in this codebase deterministic.
class Structure {
  public:
    Structure() = default;
    explicit Structure(SignaturePtr sig);

    const SignaturePtr& signature() const { return sig_; }

    /// Returns true when the atom was new.
    bool add_atom(const Atom& a);
    bool contains(const Atom& a) const { return atom_ids_.count(a) > 0; }

    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<Term>& domain() const { return domain_; }
    bool in_domain(const Term& t) const { return domain_set_.count(t) > 0; }
    /// Domain elements that appear in no atom (signature constants mostly).
    void add_domain_element(const Term& t);

    const std::vector<uint32_t>& atoms_with_pred(PredId p) const;
    const std::vector<uint32_t>& atoms_with(PredId p, int pos, const Term& t) const;

  private:
    struct PosKey {
        PredId pred;
        int pos;
        Term term;
        bool operator==(const PosKey&) const = default;
    };
    struct PosKeyHash {
        size_t operator()(const PosKey& k) const {
            return (std::hash<int64_t>()((int64_t(k.pred) << 8) ^ k.pos) * 1000003u) ^ TermHash()(k.term);
        }
    };

    SignaturePtr sig_;
    std::vector<Atom> atoms_;
    std::unordered_map<Atom, uint32_t, AtomHash> atom_ids_;
    std::vector<std::vector<uint32_t>> by_pred_;
    std::unordered_map<PosKey, std::vector<uint32_t>, PosKeyHash> by_pos_;
    std::vector<Term> domain_;
    std::unordered_set<Term, TermHash> domain_set_;
};

std::string to_string(const Atom& a, const Signature& sig);
std::string to_string(const Structure& s);

} // namespace grchase
