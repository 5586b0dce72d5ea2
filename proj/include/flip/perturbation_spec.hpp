#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "flip/linalg.hpp"

namespace flip {

/// One real Fourier mode c*cos(k theta) + s*sin(k theta).
struct FourierMode {
    int k = 0;
    double cos = 0.0;
    double sin = 0.0;
};

inline double eval_fourier(const std::vector<FourierMode>& modes, double theta)
{
    double acc = 0.0;
    for (const auto& m : modes) {
        if (m.k == 0)
            acc += m.cos;
        else
            acc += m.cos * std::cos(m.k * theta) + m.sin * std::sin(m.k * theta);
    }
    return acc;
}

/// Monomial in the S^1-invariant generators
///   |u'|^2, |u''|^2, |h'(u', a_j)|^2 (one per reference section a_j), |u'|^2 |u''|^2
/// with a theta-dependent real coefficient.
struct PerturbationTerm {
    int norm_prime = 0;
    int norm_second = 0;
    int mixed = 0;
    std::vector<int> reference; ///< exponent per reference section; missing entries are 0
    std::vector<FourierMode> coeff;

    /// Total homogeneity degree in u.
    [[nodiscard]] int degree() const
    {
        int d = 2 * norm_prime + 2 * norm_second + 4 * mixed;
        for (int e : reference) d += 2 * e;
        return d;
    }

    [[nodiscard]] bool has_negative_exponent() const
    {
        if (norm_prime < 0 || norm_second < 0 || mixed < 0) return true;
        for (int e : reference)
            if (e < 0) return true;
        return false;
    }
};

/// Higher-order part of the graph function chi = chi_f + sum(terms).
/// An empty term list gives chi = chi_f.
struct PerturbationSpec {
    std::vector<CVector> reference_sections; ///< constant sections of F', length r'
    std::vector<PerturbationTerm> terms;

    [[nodiscard]] bool empty() const { return terms.empty(); }

    /// Minimum degree over terms; 0 when there are no terms.
    [[nodiscard]] int min_degree() const
    {
        if (terms.empty()) return 0;
        int d = terms.front().degree();
        for (const auto& t : terms) d = std::min(d, t.degree());
        return d;
    }

    PerturbationSpec& add(PerturbationTerm t)
    {
        terms.push_back(std::move(t));
        return *this;
    }
};

inline PerturbationTerm constant_term(double c, int norm_prime, int norm_second, int mixed = 0)
{
    PerturbationTerm t;
    t.norm_prime = norm_prime;
    t.norm_second = norm_second;
    t.mixed = mixed;
    t.coeff = {FourierMode{0, c, 0.0}};
    return t;
}

} // namespace flip
