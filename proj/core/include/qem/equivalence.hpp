#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qem/embeddings.hpp"
#include "qem/poly.hpp"

namespace qem {

// ---------------------------------------------------------------------------
// Words in the tame generators of the plane automorphism group
// ---------------------------------------------------------------------------

enum class FactorKind { Swap, Triangular, Diagonal, Translation, AffineLinear };

// One generator, acting on the two variables (v1, v2) of a fixed ring:
//   Swap          (v1, v2) -> (v2, v1)
//   Triangular    (v1, v2) -> (v1, v2 + p(v1))        p univariate in v1
//   Diagonal      (v1, v2) -> (xi v1, xi^-1 v2)       xi != 0
//   Translation   (v1, v2) -> (v1 + c1, v2 + c2)
//   AffineLinear  (v1, v2) -> (a v1 + b v2, c v1 + d v2)   ad - bc != 0
struct AutoFactor {
    FactorKind kind;
    std::optional<Poly> p;
    FieldValue xi;
    FieldValue c1, c2;
    FieldValue a, b, c, d;

    static AutoFactor swap();
    static AutoFactor triangular(Poly p);
    static AutoFactor diagonal(FieldValue xi);
    static AutoFactor translation(FieldValue c1, FieldValue c2);
    static AutoFactor affine_linear(FieldValue a, FieldValue b, FieldValue c,
                                    FieldValue d);
};

// A composite of generators.  Factors are applied in list order: the word
// [w1, .., wn] is the map wn o ... o w1, so factors.front() acts first.
struct AutomorphismWord {
    RingPtr ring; // two-variable polynomial ring k[v1, v2]
    std::vector<AutoFactor> factors;
};

// The pair of coordinate images (of v1 and v2) describing a plane map.
struct PlanePair {
    Poly first, second;
};

// Images of a single factor, or of a whole word (identity for an empty one).
PlanePair factor_images(const RingPtr& ring, const AutoFactor& f);
PlanePair word_images(const AutomorphismWord& w);

// Determinant of one factor: Swap -> -1, AffineLinear -> ad - bc, the rest 1.
FieldValue factor_determinant(const FieldPtr& k, const AutoFactor& f);

// Product of the factor determinants; equals the Jacobian determinant of the
// composed map.
FieldValue word_jacobian(const AutomorphismWord& w);

// Rewrites every Diagonal, Translation, and AffineLinear factor into Swap and
// Triangular factors only.  AffineLinear parts must have determinant +-1
// (throws Error otherwise); the rewritten word is verified to recompose to
// the same coordinate images before it is returned.
AutomorphismWord rewrite_to_elementary(const AutomorphismWord& w);

// Peels a claimed plane automorphism (f, g) into generators by iterated
// degree reduction: while a component has degree > 1, subtract a univariate
// polynomial in the other component chosen by leading-form matching (the
// higher-degree component is reduced first; ties go to f), and finish with an
// affine factor.  The word always recomposes to (f, g) exactly (hard
// postcondition, re-checked before return).  Throws DecompositionFailed,
// reporting the stuck pair, when no reduction exists; by the tame-generation
// theorem for the plane this happens exactly when (f, g) is not an
// automorphism.
AutomorphismWord tame_decompose(const Poly& f, const Poly& g);

// ---------------------------------------------------------------------------
// Equivalence verdicts
// ---------------------------------------------------------------------------

enum class Outcome { Equivalent, NotEquivalent, Inconclusive };

// Exact witness data for one solution of a decider's functional equation.
struct EquivWitness {
    std::map<std::string, FieldValue> values;
    std::map<std::string, Poly> polys;
};

struct EquivalenceVerdict {
    Outcome outcome = Outcome::Inconclusive;
    // Every witness found; each one re-verified by expansion before being
    // recorded.  For exhaustive searches this is the complete solution set.
    std::vector<EquivWitness> witnesses;
    // Structured obstruction for NotEquivalent: a stable kind tag plus
    // machine-readable data lines.
    std::string obstruction_kind;
    std::vector<std::string> obstruction_data;
    std::string reason; // Inconclusive explanation
    std::vector<std::string> flags;

    bool equivalent() const { return outcome == Outcome::Equivalent; }
};

// Decides whether p(t) = lambda * q(lambda t + mu) has a solution with
// lambda in k^*, mu in k, for univariate p, q over the same field.
//
// Over Q the candidates are extracted exactly: lambda from the rational
// solutions of lambda^(d+1) = lc(p)/lc(q) (d the common degree), mu per
// candidate from the t^(d-1) coefficient (whose linear coefficient d*lc(q)
// never vanishes in characteristic zero), each candidate verified by full
// expansion, so the witness list is the complete solution set.  Over a prime
// field all (lambda, mu) pairs are enumerated (throws BudgetExceeded for
// p > 4096).  Other coefficient fields throw UnsupportedField.
//
// Witness names: "lambda", "mu".  Degrees below 3 are answered but flagged:
// the rigidity statement backing curve-level conclusions needs degree >= 3.
EquivalenceVerdict nu_equiv(const Poly& p, const Poly& q);

// Explicit extension of a verified nu-curve witness (lambda, mu) to an
// automorphism of the quadric xy = z(z+1):
//   alpha(x,y,z) = (lambda x + (mu^2/lambda) y + 2 mu z + mu,
//                   y / lambda,
//                   z + (mu/lambda) y)
//   beta(t)      = lambda t + mu.
// The functional equation p(t) = lambda q(lambda t + mu) is checked first
// (throws WitnessInvalid), then two identities are verified by expansion and
// their residuals recorded: alpha preserves the quadric relation exactly,
// and alpha o nu_p = nu_q o beta componentwise, where nu_p sends t to
// (t(1 + t p(t)), p(t), t p(t)).
struct NuExtension {
    std::vector<Poly> alpha; // images of x, y, z in k[x,y,z]
    Poly beta;               // image of t in the ring of p
    Poly relation_residual;  // alpha applied to the relation, minus it; zero
    std::vector<Poly> naturality_residuals; // per coordinate; all zero
};

NuExtension nu_extension(const Poly& p, const Poly& q, const FieldValue& lambda,
                         const FieldValue& mu);

// Decides equivalence inside the family ty - (x - t)(x - 1 - t^2 r(t)) by
// replaying the two-case matching of
//   S_r(a t, x) = mu^2 S_s(t, mu^-1 x + tau(t)),   S_r(t,x) = (x-t)(x-1-t^2 r)
// against factor pairings: case I forces (a, mu, tau) = (1, 1, 0), case II
// forces (a, mu, tau) = (1, -1, 1 + t + t^2 r), and each case reduces to
// r = s, which is cross-checked against the syntactic comparison (the two
// must agree).  Witness names: "a", "mu"; witness polynomial: "tau".
EquivalenceVerdict pr_equiv(const Poly& r, const Poly& s);

// ---------------------------------------------------------------------------
// Lifting plane automorphisms to the group variety xy - tu = 1
// ---------------------------------------------------------------------------

// An automorphism of the surface xy - tu = 1 given by images of t, u, x, y,
// with the substituted relation certified to reduce to zero in the quotient.
struct SL2AutoSpec {
    RingPtr ring;                       // k[t,u,x,y]
    std::map<std::string, Poly> images; // one per ambient variable
    Poly relation_residual;             // normal form of the mapped relation
    std::string label;
};

// Builds the spec and verifies relation preservation; throws IdentityFails
// with the offending residual.
SL2AutoSpec make_sl2_auto(std::map<std::string, Poly> images, std::string label);

enum class ExtensionOutcome { Extends, DoesNotExtend, NotAnAutomorphism };

// Decision for extending the plane map (f, g) along the embedding
// nu(x, y) = (x, 1; xy - 1, y) to an automorphism of xy - tu = 1.
struct ExtensionDecision {
    ExtensionOutcome outcome;
    Poly jacobian; // determinant of the Jacobian matrix of (f, g)
    std::optional<AutomorphismWord> word; // tame factorization, when Extends
    std::optional<SL2AutoSpec> lift;      // composed lift, when Extends
    std::string reason;                   // NotAnAutomorphism explanation
};

// Computes J = jacobian_det(f, g).  J outside k^* is reported as
// NotAnAutomorphism (a necessary condition only; nothing is decided from J
// alone).  J in k^* but different from +-1 cannot extend: the restriction of
// any such automorphism to the plane would have Jacobian +-1.  For J = +-1
// the pair is decomposed into tame factors, every factor is rewritten into
// Swap/Triangular form and lifted through the dictionary
//   Swap           (x t; u y) -> (y t; u x)
//   Triangular(p)  left multiplication by (1 0; p(x) 1)
// and the composed lift is verified twice: it preserves the relation, and
// lift o nu = nu o (f, g) holds componentwise.  Throws DecompositionFailed
// when the degree reduction stalls.
ExtensionDecision jac_extension_decide(const Poly& f, const Poly& g);

// ---------------------------------------------------------------------------
// Fibred normalization and the small-degree classification
// ---------------------------------------------------------------------------

// Normal form of an embedding row (a, b, c) in k[s,t] with a b - t c = 1
// (checked; throws NotUnimodular).  Replays three relation-preserving moves:
// a diagonal scaling making a(s,0) = b(s,0) = 1, a column operation with d(t)
// making a(0,t) = 1, and a row operation with e(t) making b(0,t) = 1.  The
// result has a = 1 + s t p and b = 1 + s t q; the shape identity
// c = s (p + q + s t p q) and the unit condition p(s,0) + q(s,0) in k^* are
// verified (NormalizationFails when a(s,0) is not a unit or the unit
// condition fails: the row does not come from an embedding).
struct FibredNormalization {
    Poly p, q;
    Poly a, b, c;                  // the normalized row
    std::vector<SL2AutoSpec> word; // moves applied, in order
};

FibredNormalization normalize_fibred(const Poly& a, const Poly& b, const Poly& c);

// Classification of an embedding spec into xy - tu = 1 whose four components
// have total degree <= 2 (throws DegreeTooHigh otherwise).  The case split:
// a constant entry is moved to the (1,1) slot and scaled to 1; a degree-1
// entry is moved to the t slot and normalized via normalize_fibred; four
// degree-2 entries either lose a degree by a column operation (collinear top
// forms) or are rejected because, after normalizing the first row to
// (v1^2, v1 v2 + 1), all four components minus their constant terms lie in
// the ideal (v1, v2)^2, so the components generate a proper subring.  The
// degree-1 branch rejects rows whose normalized (p, q) are both nonzero
// units: the would-be coordinate triple (t, st, s(st + xi)) misses the line
// x = y + xi = 0 of the surface xz = y(y + xi) it lies on.
//
// When equivalent, lambda is the Jacobian of the residual plane map divided
// by the Jacobian of the source moves, reported as 1 whenever it is +-1
// (those embeddings are mutually equivalent).  residual_word is empty when
// the residual is already (lambda v1, v2); inputs that fail to normalize or
// decompose are Rejected with the failure recorded in `reason`.
struct RhoClassification {
    bool equivalent = false;
    FieldValue lambda;
    std::vector<SL2AutoSpec> ambient_word; // target moves, applied in order
    AutomorphismWord source_word;          // reparametrizations of the source
    AutomorphismWord residual_word;        // factors of the residual plane map
    std::optional<PlanePair> residual;     // the residual map itself
    std::vector<Poly> normalized_components; // after all moves; t,u,x,y order
    std::string reason;
    std::vector<Poly> obstruction_members; // shifted components in (v1,v2)^2
    std::vector<std::string> flags;
};

RhoClassification small_degree_classify(const EmbeddingSpec& spec);

// Sufficient variable criterion over the fraction field k(t): when
// P in k[t,x,y] has the form c(t) y + d(t, x) with c != 0 (or the same with
// x and y exchanged), returns the automorphism of k(t)[x,y] carrying the
// distinguished coordinate to P, together with its inverse, both verified by
// composition, and with substitute(P, inverse) equal to that coordinate.
// Anything else is Inconclusive: no general decision procedure is claimed.
struct VariableWitness {
    bool is_variable = false;
    std::string axis; // "y" or "x": the coordinate carried to P
    RingPtr kt_ring;  // k(t)[x, y]
    std::map<std::string, Poly> forward;
    std::map<std::string, Poly> inverse;
    std::string reason; // when inconclusive
};

VariableWitness certify_variable_kt(const Poly& P);

} // namespace qem
