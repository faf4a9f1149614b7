#pragma once

// Signature doubling, color transforms, TGD generation from views, and the
// green-red chase determinacy semi-decision.

#include "grchase/chase.hpp"

namespace grchase {

enum class Color : uint8_t { Green = 0, Red = 1 };

inline Color opposite(Color c) { return c == Color::Green ? Color::Red : Color::Green; }
inline const char* color_name(Color c) { return c == Color::Green ? "G" : "R"; }

// Two colored copies of each base predicate ("G_p" / "R_p"); constants are
// never colored and are shared between the base and colored signatures.
class ColoredSignature {
  public:
    explicit ColoredSignature(SignaturePtr base);
    ColoredSignature() = default;

    const SignaturePtr& base() const { return base_; }
    const SignaturePtr& colored() const { return colored_; }

    PredId paint(PredId base_pred, Color c) const;
    /// (color, base predicate) of a colored predicate.
    std::pair<Color, PredId> unpaint(PredId colored_pred) const;

    Atom paint(const Atom& a, Color c) const;
    Atom unpaint(const Atom& a) const;
    std::optional<Color> color_of(PredId colored_pred) const;

  private:
    SignaturePtr base_;
    SignaturePtr colored_;
    std::vector<PredId> green_, red_;         // base -> colored
    std::vector<std::pair<Color, PredId>> back_; // colored -> (color, base)
};

/// Paints every predicate of a base-signature query; rejects inputs already
/// over the colored signature.
ConjunctiveQuery colorize(const ColoredSignature& cs, const ConjunctiveQuery& q, Color c);
Structure colorize(const ColoredSignature& cs, const Structure& d, Color c);

/// Daltonisation: erases colors. dalt(G(x)) = dalt(R(x)) = x.
ConjunctiveQuery dalt(const ColoredSignature& cs, const ConjunctiveQuery& q);
Structure dalt(const ColoredSignature& cs, const Structure& d);

/// Swaps the two colors everywhere.
Structure swap_colors(const ColoredSignature& cs, const Structure& d);

struct GeneratedTgds {
    std::vector<Tgd> tgds;
    std::vector<std::optional<uint32_t>> paired; // G->R twin <-> R->G twin
};

// For each view Q = ∃x̄ Φ(x̄,ȳ): the two TGDs G(Φ)(x̄,ȳ) ⇒ ∃z̄ R(Φ)(z̄,ȳ)
// and its color mirror. Frontier = Q's free variables; head existentials are
// fresh primed copies of Q's bound variables.
GeneratedTgds generate_tgds(const ColoredSignature& cs, const std::vector<ConjunctiveQuery>& views);

struct DeterminacyInstance {
    SignaturePtr sig;
    std::vector<ConjunctiveQuery> views;
    ConjunctiveQuery query; // Q0, possibly Boolean
};

struct DeterminacyVerdict {
    enum Kind { Determined, NotDetermined, Unknown } kind = Unknown;
    std::optional<uint64_t> step;
    uint64_t budget_used = 0;
    std::optional<Homomorphism> witness;
    std::vector<std::string> idempotence_violations;
};

struct DeterminacyOptions {
    SchedulerKind scheduler = SchedulerKind::Fifo;
    uint64_t seed = 0;
    bool check_idempotence = true;
    // Base predicates whose colored twins are the only delta pins needed;
    // see ChaseOptions::delta_pin_predicates.
    std::optional<std::vector<PredId>> delta_pin_base;
    std::function<void(const AppliedStep&, const Structure&)> observer;
    // Filled in for callers that want the run's artifacts.
    std::shared_ptr<ChaseTrace> trace_out;
    std::shared_ptr<std::vector<Tgd>> tgds_out;
};

/// Chases the generated TGDs from A[G(Q0)(ā)] (ā fresh constants) and asks
/// whether R(Q0)(ā) is ever entailed.
DeterminacyVerdict decide_determinacy(const DeterminacyInstance& inst, uint64_t budget,
                                      const DeterminacyOptions& opts = {});

} // namespace grchase
