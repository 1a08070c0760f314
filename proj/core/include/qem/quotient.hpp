#pragma once

#include <map>
#include <string>
#include <vector>

#include "qem/poly.hpp"

namespace qem {

// Unique representative of f modulo (xy - tu - 1) with no monomial divisible
// by xy, obtained by rewriting xy -> tu + 1 to a fixed point.  The ring must
// contain the variables t, u, x, y.
Poly sl2_normal_form(const Poly& f);

// Canonical form of f modulo (t^n u - h): base + sum tail[i-1] * u^i with
// every u-coefficient of t-degree below n.
struct KeyNormalForm {
    Poly base;              // the u-free part, an element of k[t,x,y]
    std::vector<Poly> tail; // tail[i-1] multiplies u^i; last entry nonzero
    // Set unless h is the whitelisted instance x*y - 1, the one shape whose
    // "h(0,x,y) lies in no k[w]" hypothesis this module records as justified.
    bool hypothesis_warning;

    Poly recompose(const std::string& u_name = "u") const;
};

// Rewrites t^n u -> h until every u-coefficient has t-degree below n, then
// verifies the result equals f modulo (t^n u - h) by ideal membership.
// f lives in a ring containing t, u, x, y; h must not involve u.
KeyNormalForm key_normal_form(const Poly& f, unsigned n, const Poly& h);

struct SubringReport {
    bool images_in_subring; // images of t, x, y have empty key tails
    bool ideal_preserved;   // images of t^n and h lie in (t^n, h)
    bool preserved() const { return images_in_subring && ideal_preserved; }
};

// For a k[t]-endomorphism of k[t,u,x,y]/(t^n u - h) given by images of
// t, u, x, y (with t fixed and the relation mapping into its own ideal,
// both enforced), reports whether the subring k[t,x,y] and the ideal
// (t^n, h) are carried into themselves.
SubringReport preserved_subring_check(const std::map<std::string, Poly>& images, unsigned n,
                                      const Poly& h);

} // namespace qem
