#pragma once

#include <functional>

#include "nilmax/loop.hpp"

namespace nilmax {

struct FactorOptions {
    int degree = 16;     // working truncation degree and Toeplitz depth
    int samples = 64;    // circle samples
    double tol = 1e-8;   // residual tolerance
    bool polish = true;  // second pass on the unitary factor
};

struct IwasawaResult {
    TwistedLoop F;
    TwistedLoop Bplus;
    double residual = 0.0;    // max over samples of |Phi - F Bplus|
    double unitarity = 0.0;   // max over samples of |F^* F - I|
    double tail_fraction = 0.0;
};

struct BirkhoffResult {
    TwistedLoop Cminus;
    TwistedLoop Cplus;
    double residual = 0.0;
    double rcond = 0.0;
};

IwasawaResult iwasawa(const TwistedLoop& phi, const FactorOptions& opt = {});
// Same factorization starting from circle samples of Phi.
IwasawaResult iwasawa(const UnitCircleSampling& phi, const FactorOptions& opt = {});

BirkhoffResult birkhoff(const TwistedLoop& c, const FactorOptions& opt = {});
BirkhoffResult birkhoff(const UnitCircleSampling& c, const FactorOptions& opt = {});

struct NormalizedPotentialAt {
    cplx a;  // (xi_{-1})_{12}
    cplx b;  // (xi_{-1})_{21}
    Mat2 xi_minus1;
    double diagonal_defect = 0.0;  // diagonal part of the extracted lambda^{-1} term
    double higher_defect = 0.0;    // lambda^{-2}, lambda^{-3} terms of C_-^{-1} dC_-
    cplx B() const { return -a * b; }
};

// Extracts C_-^{-1} dC_- at z from minus factors on a 1-D stencil z + k h, k = -2..2.
NormalizedPotentialAt normalized_potential_from(const std::function<TwistedLoop(cplx)>& cminus_field, cplx z,
                                                double h = 1e-3);

}  // namespace nilmax
