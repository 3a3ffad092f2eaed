#pragma once

#include <random>
#include <string>
#include <vector>

#include "nilmax/cauchy.hpp"
#include "nilmax/potentials.hpp"
#include "nilmax/singular.hpp"

namespace nilmax::fixtures {

struct SingFixture {
    std::string name;
    std::string B;  // closed form in z
    SingularKind expected;
};

// The three generic singularities at z = 0, identity-type initial condition C0(0).
const std::vector<SingFixture>& singexample();
Potential sing_potential(const std::string& B);

// Deformed sphere with eps = 0.04, whose upper-hemisphere preimage is a disc.
Potential disc_potential(double eps = 0.04);
// Symmetric potential with k = 1 and identity initial condition.
Potential example1();

using Rng = std::mt19937_64;

// Random SL(2) twisted loop of degree <= max_degree as a product of elementary factors.
TwistedLoop random_sl2_loop(Rng& rng, int max_degree);
// Plus loop with positive constant diagonal and unit determinant.
TwistedLoop random_plus_loop(Rng& rng, int max_degree);

// Polynomial equator data of degree <= 2 whose type at 0 is `kind`, with clause margins >= margin.
EquatorData random_equator_data(Rng& rng, SingularKind kind, double margin = 0.1);

// z_lambda = lambda^{2/(k+2)} z carries singular points of member 1 to member lambda
// for the symmetric potential.
cplx symmetric_correspondence(cplx z, double lambda_angle, int k);

}  // namespace nilmax::fixtures
