#include "grchase/core.hpp"

#include <mutex>
#include <sstream>

namespace grchase {

namespace {
std::mutex g_name_mutex;
}

NameTable& NameTable::instance() {
    static NameTable table;
    return table;
}

int32_t NameTable::intern(std::string_view name) {
    std::lock_guard<std::mutex> lock(g_name_mutex);
    auto it = ids_.find(std::string(name));
    if (it != ids_.end()) return it->second;
    int32_t id = int32_t(names_.size());
    names_.emplace_back(name);
    ids_.emplace(names_.back(), id);
    return id;
}

const std::string& NameTable::name(int32_t id) const {
    std::lock_guard<std::mutex> lock(g_name_mutex);
    return names_.at(size_t(id));
}

Term Term::var(std::string_view name) {
    return Term{TermKind::Variable, NameTable::instance().intern(name)};
}

Term Term::constant(std::string_view name) {
    return Term{TermKind::Constant, NameTable::instance().intern(name)};
}

std::string to_string(const Term& t) {
    switch (t.kind) {
        case TermKind::Constant:
        case TermKind::Variable: return NameTable::instance().name(t.id);
        case TermKind::Null: return "_:n" + std::to_string(t.id);
    }
    return "?";
}

PredId Signature::add_predicate(std::string_view name, int arity) {
    if (arity < 1) throw Error("predicate arity must be >= 1: " + std::string(name));
    std::string key(name);
    auto it = by_name_.find(key);
    if (it != by_name_.end()) {
        if (arities_[size_t(it->second)] != arity)
            throw Error("predicate " + key + " redeclared with different arity");
        return it->second;
    }
    if (constant_set_.count(Term::constant(name)) > 0)
        throw Error("name used for both predicate and constant: " + key);
    PredId id = PredId(names_.size());
    names_.push_back(key);
    arities_.push_back(arity);
    by_name_.emplace(std::move(key), id);
    return id;
}

void Signature::add_constant(std::string_view name) {
    if (by_name_.count(std::string(name)) > 0)
        throw Error("name used for both predicate and constant: " + std::string(name));
    Term c = Term::constant(name);
    if (constant_set_.insert(c).second) constants_.push_back(c);
}

std::optional<PredId> Signature::predicate(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

bool Signature::has_constant(const Term& t) const {
    return t.is_constant() && constant_set_.count(t) > 0;
}

Structure::Structure(SignaturePtr sig) : sig_(std::move(sig)) {
    if (sig_) {
        by_pred_.resize(sig_->predicate_count());
        for (const Term& c : sig_->constants()) add_domain_element(c);
    }
}

void Structure::add_domain_element(const Term& t) {
    if (domain_set_.insert(t).second) domain_.push_back(t);
}

bool Structure::add_atom(const Atom& a) {
    if (!sig_) throw Error("structure has no signature");
    if (a.pred < 0 || size_t(a.pred) >= sig_->predicate_count())
        throw Error("atom predicate outside signature");
    if (int(a.args.size()) != sig_->arity(a.pred))
        throw Error("arity mismatch for " + sig_->predicate_name(a.pred));
    if (atom_ids_.count(a) > 0) return false;
    uint32_t id = uint32_t(atoms_.size());
    atoms_.push_back(a);
    atom_ids_.emplace(a, id);
    by_pred_[size_t(a.pred)].push_back(id);
    for (int i = 0; i < int(a.args.size()); ++i) {
        by_pos_[PosKey{a.pred, i, a.args[size_t(i)]}].push_back(id);
        add_domain_element(a.args[size_t(i)]);
    }
    return true;
}

const std::vector<uint32_t>& Structure::atoms_with_pred(PredId p) const {
    static const std::vector<uint32_t> empty;
    if (p < 0 || size_t(p) >= by_pred_.size()) return empty;
    return by_pred_[size_t(p)];
}

const std::vector<uint32_t>& Structure::atoms_with(PredId p, int pos, const Term& t) const {
    static const std::vector<uint32_t> empty;
    auto it = by_pos_.find(PosKey{p, pos, t});
    if (it == by_pos_.end()) return empty;
    return it->second;
}

std::string to_string(const Atom& a, const Signature& sig) {
    std::ostringstream out;
    out << sig.predicate_name(a.pred) << "(";
    for (size_t i = 0; i < a.args.size(); ++i) {
        if (i) out << ",";
        out << to_string(a.args[i]);
    }
    out << ")";
    return out.str();
}

std::string to_string(const Structure& s) {
    std::ostringstream out;
    for (const Atom& a : s.atoms()) out << to_string(a, *s.signature()) << ". ";
    return out.str();
}

} // namespace grchase
