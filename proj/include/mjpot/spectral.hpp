#pragma once

#include "mjpot/graph.hpp"

namespace mjpot::spectral {

/// Stationary distribution of an irreducible generator, computed by
/// state-reduction elimination (subtraction-free, entrywise stable).
Vector stationary_distribution(const GeneratorMatrix& gen, ValidationReport* report = nullptr,
                               const Tolerances& tol = {});

/// (I - alpha L)^{-1} for alpha >= 0; rows are probability vectors.
Matrix resolvent(const GeneratorMatrix& gen, double alpha);

/// Group inverse of the generator: the unique X with LXL = L, XLX = X and
/// LX = XL, constructed from one factorization of L plus the stationary
/// projector.
Matrix group_inverse(const GeneratorMatrix& gen, ValidationReport* report = nullptr,
                     const Tolerances& tol = {});

ValidationReport verify_group_axioms(const GeneratorMatrix& gen, const Matrix& candidate,
                                     const Tolerances& tol = {});

/// Smallest decay rate among nonzero eigenvalues: min -Re(mu) over the
/// spectrum away from zero. NaN when the eigensolver fails.
double spectral_gap(const GeneratorMatrix& gen);

/// e^{tL}, a stochastic matrix for t >= 0.
Matrix semigroup(const GeneratorMatrix& gen, double t);

/// Integral of e^{sL} f over [0, T], evaluated panel by panel with the block
/// matrix exponential so there is no quadrature error.
Vector integrate_semigroup(const GeneratorMatrix& gen, const Vector& f, double T);

}  // namespace mjpot::spectral
