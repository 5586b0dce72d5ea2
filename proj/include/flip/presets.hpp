#pragma once

#include <string>
#include <utility>
#include <vector>

#include "flip/hermitian_core.hpp"
#include "flip/perturbation_matching.hpp"
#include "flip/sampling.hpp"

namespace flip::presets {

/// r' = r'' = 1, identity metrics, no perturbation: phi = m^f.
inline ModelConfig default_config(int r_prime = 1, int r_second = 1)
{
    ModelConfig cfg;
    cfg.r_prime = r_prime;
    cfg.r_second = r_second;
    cfg.epsilon = 0.5;
    cfg.domain_radius = 1.0;
    cfg.metric_field = MetricFieldSpec::identity(r_prime, r_second);
    return cfg;
}

/// chi = chi_f + c |u'|^2 |u''|^2
inline ModelConfig quartic_config(double c = 0.1, int r_prime = 1, int r_second = 1)
{
    ModelConfig cfg = default_config(r_prime, r_second);
    cfg.perturbation.add(constant_term(c, 0, 0, 1));
    return cfg;
}

/// phi = t + 1/2 (|y'|^2 + |y''|^2): the y'' block of the fiber Hessian has the wrong sign.
inline PhiSpec wrong_sign_phi()
{
    PhiSpec p;
    p.quad_second = +1.0;
    return p;
}

/// Hermitian positive definite Fourier metric field G(theta) = A0 + A1 cos(theta) + B1 sin(theta)
/// with |A1| + |B1| at most half the smallest eigenvalue of A0.
inline std::vector<MatrixFourierMode> random_fourier_block(int n, Sampler& s)
{
    CMatrix B(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) B(i, j) = Complex(s.normal(), s.normal()) * 0.3;
    const CMatrix A0 = B * B.adjoint() + CMatrix::Identity(n, n);
    auto random_hermitian = [&] {
        CMatrix H(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) H(i, j) = Complex(s.normal(), s.normal());
        return CMatrix(0.5 * (H + H.adjoint()));
    };
    auto spectral = [](const CMatrix& H) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(H, Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().maxCoeff();
    };
    CMatrix A1 = random_hermitian();
    CMatrix B1 = random_hermitian();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(A0, Eigen::EigenvaluesOnly);
    const double budget = 0.25 * es.eigenvalues().minCoeff();
    A1 *= budget / spectral(A1);
    B1 *= budget / spectral(B1);
    // Exact hermiticity so evaluations pass the 1e-14 check bit-for-bit.
    auto symmetrize = [](CMatrix& M) {
        for (Eigen::Index i = 0; i < M.rows(); ++i) {
            M(i, i) = Complex(M(i, i).real(), 0.0);
            for (Eigen::Index j = i + 1; j < M.cols(); ++j) M(j, i) = std::conj(M(i, j));
        }
    };
    CMatrix A0s = A0;
    symmetrize(A0s);
    symmetrize(A1);
    symmetrize(B1);
    return {MatrixFourierMode{0, A0s, CMatrix()}, MatrixFourierMode{1, A1, B1}};
}

inline ModelConfig fourier_config(int r_prime, int r_second, std::uint64_t seed)
{
    Sampler s(seed, 0xf0);
    ModelConfig cfg = default_config(r_prime, r_second);
    auto prime = random_fourier_block(r_prime, s);
    auto second = random_fourier_block(r_second, s);
    cfg.metric_field = MetricFieldSpec::fourier(std::move(prime), std::move(second));
    return cfg;
}

/// Built-in perturbations of degree >= 4, each small enough for the estimates margin on the unit ball.
inline std::vector<std::pair<std::string, PerturbationSpec>> builtin_perturbations(int r_prime)
{
    std::vector<std::pair<std::string, PerturbationSpec>> out;

    PerturbationSpec mixed;
    mixed.add(constant_term(0.1, 0, 0, 1));
    out.emplace_back("mixed_quartic", mixed);

    PerturbationSpec split;
    split.add(constant_term(0.05, 2, 0)).add(constant_term(-0.05, 0, 2));
    out.emplace_back("block_quartics", split);

    PerturbationSpec reference;
    CVector a = CVector::Zero(r_prime);
    a[0] = Complex(1.0, 0.0);
    reference.reference_sections.push_back(a);
    PerturbationTerm rt;
    rt.reference = {2};
    rt.coeff = {FourierMode{0, 0.08, 0.0}};
    reference.add(rt);
    out.emplace_back("reference_section_quartic", reference);

    PerturbationSpec sextic;
    sextic.add(constant_term(0.02, 1, 2)).add(constant_term(-0.03, 3, 0));
    out.emplace_back("sextic", sextic);

    PerturbationSpec varying;
    PerturbationTerm vt = constant_term(0.05, 0, 0, 1);
    vt.coeff.push_back(FourierMode{1, 0.03, -0.02});
    varying.add(vt);
    out.emplace_back("theta_dependent_quartic", varying);

    return out;
}

} // namespace flip::presets
