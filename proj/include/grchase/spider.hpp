#pragma once

// The s-pider world: the parametric signature, the body Phi_s, ideal spiders,
// spider queries, wedge/vee combinators, the abstract spider algebra, and
// classification of real spiders inside chase structures.

#include "grchase/greenred.hpp"

namespace grchase {

// Leg indexes run over 1..s; 0 encodes "no lame leg" on that side.
struct IdealSpider {
    Color color = Color::Green;
    int upper = 0;
    int lower = 0;

    bool is_upper() const { return upper != 0; }
    bool is_lower() const { return lower != 0; }
    bool is_full() const { return upper == 0 && lower == 0; }
    bool two_lame() const { return is_upper() && is_lower(); }

    friend bool operator==(const IdealSpider&, const IdealSpider&) = default;
    friend auto operator<=>(const IdealSpider&, const IdealSpider&) = default;
};

std::string to_string(const IdealSpider& s);

struct IdealSpiderHash {
    size_t operator()(const IdealSpider& s) const {
        return size_t(((int(s.color) * 1024 + s.upper) * 1024) + s.lower);
    }
};

// f^I_J with I = upper, J = lower; not both empty.
struct SpiderQuery {
    int upper = 0;
    int lower = 0;

    friend bool operator==(const SpiderQuery&, const SpiderQuery&) = default;
    friend auto operator<=>(const SpiderQuery&, const SpiderQuery&) = default;
};

std::string to_string(const SpiderQuery& f);

enum class CombineMode : uint8_t { Wedge, Vee }; // antennas identified / tails identified

// f wedge f' or f vee f'; `assoc` names the associated rule of a pair.
struct BinaryQuery {
    std::string name;
    SpiderQuery left;
    SpiderQuery right;
    CombineMode mode = CombineMode::Wedge;
    std::optional<std::string> assoc;
};

std::string to_string(const BinaryQuery& q);

// Signature with constants cl1!..cls!, cu1!..cus!, binary calves Cl_i/Cu_i,
// binary thighs Tl_i/Tu_i and the ternary H, plus the assembled Phi_s body:
//   H(z,z1,z2) ∧ ⋀_i Tl_i(z,x_i) ∧ Tu_i(z,y_i) ∧ Cl_i(x_i,cl_i) ∧ Cu_i(y_i,cu_i)
class SpiderWorld {
  public:
    explicit SpiderWorld(int s);

    int s() const { return s_; }
    const SignaturePtr& base() const { return colors_.base(); }
    const ColoredSignature& colors() const { return colors_; }
    const SignaturePtr& colored() const { return colors_.colored(); }

    const std::vector<Atom>& phi() const { return phi_; }

    PredId h() const { return h_; }
    PredId lower_thigh(int i) const { return tl_.at(size_t(i - 1)); }
    PredId upper_thigh(int i) const { return tu_.at(size_t(i - 1)); }
    PredId lower_calf(int i) const { return cl_.at(size_t(i - 1)); }
    PredId upper_calf(int i) const { return cu_.at(size_t(i - 1)); }

    Term head_var() const { return z_; }
    Term tail_var() const { return z1_; }
    Term antenna_var() const { return z2_; }
    Term lower_knee_var(int i) const { return x_.at(size_t(i - 1)); }
    Term upper_knee_var(int i) const { return y_.at(size_t(i - 1)); }
    Term lower_const(int i) const { return cl_const_.at(size_t(i - 1)); }
    Term upper_const(int i) const { return cu_const_.at(size_t(i - 1)); }

    std::vector<IdealSpider> all_spiders() const;  // 2 + 4s + 2s^2 of them
    std::vector<SpiderQuery> all_queries() const;  // s^2 + 2s of them

  private:
    int s_;
    ColoredSignature colors_;
    std::vector<Atom> phi_;
    PredId h_ = -1;
    std::vector<PredId> tl_, tu_, cl_, cu_;
    Term z_, z1_, z2_;
    std::vector<Term> x_, y_;
    std::vector<Term> cl_const_, cu_const_;
};

/// Canonical structure of the colored Phi_s with the lame calves painted the
/// opposite color. Elements are the body variables plus the constants.
Structure ideal_spider(const SpiderWorld& w, const IdealSpider& sp);

/// The unique query whose canonical structure is Phi_s minus the removed
/// calves; free variables are the knees of the removed calves, lower first.
ConjunctiveQuery spider_query(const SpiderWorld& w, const SpiderQuery& f);

/// Disjoint union of the two bodies with antennas (wedge) or tails (vee)
/// identified. Free variables: both knee sets plus the two non-identified
/// head-adjacent variables, in the order [left knees, right knees, pair].
ConjunctiveQuery combine(const SpiderWorld& w, const SpiderQuery& f, const SpiderQuery& g,
                         CombineMode mode, const std::string& name = "");

ConjunctiveQuery to_query(const SpiderWorld& w, const BinaryQuery& q);

/// The abstract algebra: f^I_J(S^{I'}_{J'}) is defined iff I' ⊆ I and
/// J' ⊆ J, giving the opposite color with indexes (I\I', J\J'). No chase
/// involved; the chase path is the independent test oracle.
std::optional<IdealSpider> spider_apply(const SpiderQuery& f, const IdealSpider& s);

struct SpiderMatch {
    IdealSpider spider;
    Homomorphism embedding; // ideal_spider(spider) -> d
    Term head, tail, antenna;
    std::vector<Term> lower_knees, upper_knees; // indexed 1..s
};

/// Finds the unique real spider headed at `head` and classifies it against
/// the ideal taxonomy by fingerprint (head color, per-leg calf colors).
/// Returns nullopt when `head` heads no H atom; throws StructuralViolation
/// when the structure breaks the one-spider-per-head or taxonomy laws.
std::optional<SpiderMatch> classify_real_spider(const SpiderWorld& w, const Structure& d,
                                                const Term& head);

/// Knee/head out-degree laws and the at-most-two-heads law; returns human
/// readable violations (empty = clean).
std::vector<std::string> audit_spider_structure(const SpiderWorld& w, const Structure& d);

/// Parses "f", "f^3", "f_2", "f^3_2".
SpiderQuery parse_spider_query(const std::string& text);
/// Parses "G", "R^3_1", "G_2" (optionally spaced).
IdealSpider parse_spider_label(const std::string& text);

} // namespace grchase
