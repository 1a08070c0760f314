#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qem/poly.hpp"

namespace qem {

// The explicit embedding families handled by this module.  Each family has
// a stable string tag for command-line use (family_tag / family_from_tag).
enum class Family {
    NuP,               // t -> (t(1+tp(t)), p(t), tp(t)) into the quadric xy = z(z+1)
    RhoLambda,         // (s,t) -> matrix (1, t; lambda*s, 1+lambda*s*t) in SL2
    FibredGeneral,     // hypersurface t^n*y + mu*x^m*(x-1) + t*q(t,x) in A^3
    PrFamily,          // hypersurface t*y - (x-t)*(x-1-t^2*r(t)) in A^3
    NonEquivPair,      // the pair t^2*y - x(x+1) and t^2*y - x(x+1-t^2)
    CharPLine,         // u -> (u^(p^2), (a*u^(pq)+u)/b) into A^2, char k = p
    CharPHypersurface, // (x1..xn) -> (x1^(p^2), a*x1^(pq)+x1, x2..xn) into A^(n+1)
    ExampleNotVarKt,   // (s,t) -> (t, t^p*s^(p^2)+1, t^q*s^(pq)+s) into A^3
    SurfaceE,          // (x,t) -> SL2 with image xy-tu=1, ty=x(x-1)
    ShastriA3,         // t -> (t^3-3t, t^4-4t^2-1, t^5-10t) into A^3
    ShastriSL2,        // t -> unipotent * section matrix in SL2, char k != 2
};

std::string family_tag(Family family);
// Throws Error on an unknown tag.
Family family_from_tag(const std::string& tag);

// Family-specific exact parameters.  Each constructor documents which keys
// it reads; unknown keys are ignored.
struct Parameters {
    std::map<std::string, Poly> polys;
    std::map<std::string, FieldValue> values;
    std::map<std::string, long> integers;
};

// A constructed embedding (or hypersurface datum).  For morphism families,
// components[i] is the image of the i-th ambient variable, expressed in the
// source ring; hypersurface families carry no components and instead list
// their defining polynomials in image_equations.
struct EmbeddingSpec {
    Family family;
    Parameters parameters;
    RingPtr source;  // null for hypersurface-only families
    RingPtr ambient;
    // The quadric relation cut out of the ambient affine space, when the
    // target is Q2 or SL2; empty for plain affine targets.
    std::optional<Poly> ambient_relation;
    std::vector<Poly> components;
    // Further polynomials in the ambient variables that vanish on the image
    // (verified by substitution at construction when components exist).
    std::vector<Poly> image_equations;
};

// Builds the family member with the given exact parameters over k.
// Throws ParameterConstraintViolated when a stated constraint fails, and
// IdentityFails if a construction-time vanishing check does not hold.
EmbeddingSpec construct(const FieldPtr& k, Family family, const Parameters& params);

struct ZeroCheckReport {
    Poly residual;
    bool passed() const { return residual.is_zero(); }
};

// Substitutes the components into the ambient quadric relation and reports
// the resulting polynomial (zero iff the spec lies on the quadric).
// Throws NotAQuadricAmbient when the spec has no quadric relation or no
// component morphism.
ZeroCheckReport verify_on_quadric(const EmbeddingSpec& spec);

// Shape of P(0,x,y) for a hypersurface P in k[t,x,y]: either
// mu * axis^m * (axis - lambda) with mu, lambda nonzero, or not of that form
// (with a witness explaining why).
struct FibreProfile {
    std::optional<std::string> axis; // "x" or "y"; empty means not of the form
    long m = 0;
    std::optional<FieldValue> mu;
    std::optional<FieldValue> lambda;
    std::string witness; // obstruction description when not of the form
    bool of_required_form() const { return axis.has_value(); }
};

FibreProfile degenerate_fibre_profile(const Poly& P);

// Sufficient criterion for every fibre of Z_P -> A^1, (t,x,y) -> t over
// t0 != 0 to be a line: P = c(t)*y + d(t,x) (or with x and y swapped) where
// c is a nonzero scalar times t^n.
struct FibreTriviality {
    bool all_fibres_off_zero_are_lines = false;
    std::string axis; // the graph coordinate ("y" or "x") when conclusive
    long n = 0;       // c = unit * t^n
    std::string reason; // why the criterion does not apply, when inconclusive
};

FibreTriviality fibre_triviality_check(const Poly& P);

// Homogenization p(v/u) * u^degree of a univariate polynomial p in t, as an
// element of the two-variable ring uv (variables "u" and "v"); `degree` must
// be at least deg p.
Poly homogenize(const Poly& p, const RingPtr& uv, std::uint32_t degree);

// A list of identity labels that were verified to reduce to zero.
struct IdentityReport {
    std::vector<std::string> verified;
};

// Verifies, over k, that the two chart formulas
//   (x,y,z) -> ([y:z],[z:x])        on z != 0
//   (x,y,z) -> ([z+1:x],[y:z+1])    on z != -1
// and the inverse
//   ([u0:u1],[v0:v1]) -> (u1*v1, u0*v0, u1*v0) / (u0*v1 - u1*v0)
// compose to the identity in both directions, as cleared polynomial
// identities modulo the quadric ideal (xy - z(z+1)); also checks that the
// curve ([u:v], [u*P : u^(d+1)+v*P]) meets the diagonal of P^1 x P^1 exactly
// where u^(d+2) vanishes, for sample degrees d in {1,2,3}.
// Throws IdentityFails with the offending residual.
IdentityReport q2_chart_isomorphism_check(const FieldPtr& k);

// Witness isomorphism for the plane curve x + a^(p^2)*x^(pq) - b^(p^2)*y^(p^2) = t
// after the ground field k (of characteristic p) is extended to k(T) with
// t = T^p:  u -> (u^(p^2) + t, (a*(u^p+T)^q + u)/b).  The report carries the
// two components and the substituted relation, which must vanish.
struct FormOfA1Report {
    Poly x_component;
    Poly y_component;
    Poly residual;
};

// Requires q >= 2 not a multiple of p, b != 0, and char(k) = p; throws
// ParameterConstraintViolated otherwise.
FormOfA1Report formof_a1_witness(long p, long q, const FieldValue& a,
                                 const FieldValue& b);

} // namespace qem
