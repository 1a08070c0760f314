#pragma once

#include <string>
#include <vector>

#include "qem/embeddings.hpp"
#include "qem/poly.hpp"

namespace qem {

enum class CertificateKind {
    // witnesses[i], a polynomial in the ambient variables, recovers the i-th
    // source variable exactly when the components are substituted in.
    LeftInverse,
    // An ordered list of membership identities, each checked against its own
    // ideal (exact zero when the ideal is empty).
    GeneratorChain,
    // A recorded non-equivalence reason with no machine-checkable content.
    DegreeObstruction,
};

struct ChainLink {
    std::string label;
    // Must lie in the ideal generated by `modulo` (exactly zero when
    // `modulo` is empty).
    Poly value;
    std::vector<Poly> modulo;
};

struct Certificate {
    CertificateKind kind;
    std::vector<Poly> witnesses; // LeftInverse payload
    std::vector<ChainLink> chain; // GeneratorChain payload
    std::string reason;          // DegreeObstruction payload
    bool verified = false;
};

// Re-checks every identity in the witness against the spec: left-inverse
// witnesses by substitution of the components, chain links by ideal
// membership.  Returns the certificate with verified = true, or throws
// WitnessFails naming the failing identity and its residual.
Certificate certify_closed(const EmbeddingSpec& spec, Certificate witness);

// The stored closedness witness for the spec's family (unverified; feed it
// to certify_closed).  Throws Error for the hypersurface families, whose
// closedness is established by the fibred analysis rather than a finite
// witness.
Certificate builtin_certificate(const EmbeddingSpec& spec);

// The affine coordinate ring k[t,x,y,u] receiving the simplified A^2 -> A^4
// embedding, with variables ordered as the tuple (t, x, y, u).
RingPtr a4_tuple_ring(const FieldPtr& k);

// Components of the conjugated SL2 embedding read as a map into A^4:
// (x,t) -> (t, 1+t^2x, 1+tx+2t^2x+t^3x^2, x+3tx+2t^2x^2+2t^3x^2+t^4x^3).
std::vector<Poly> conjugated_a4_components(const FieldPtr& k);

// Components of the simplified embedding
// (x,t) -> (t, t^2x, tx(1+t^2x), x+t^2x^2(2-t+t^2x)).
std::vector<Poly> simplified_a4_components(const FieldPtr& k);

// Derives a left inverse for the given A^4 components (in the source ring
// k[x,t]) by replaying the recorded elementary-automorphism chain and the
// cleared inverse of the surface-E parametrization, then verifies it by
// substitution.  Throws DerivationFailed with the residual when the replayed
// witness does not recover the source variables (e.g. corrupted components).
Certificate derive_a4_left_inverse(const std::vector<Poly>& components);

// derive_a4_left_inverse applied to simplified_a4_components(k): a verified
// LeftInverse certificate with witnesses (e_x, e_t); e_t is the first
// ambient variable and e_x has total degree 5.
Certificate final_a4_left_inverse(const FieldPtr& k);

} // namespace qem
