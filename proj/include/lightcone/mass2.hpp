#pragma once

#include "lightcone/expansion.hpp"

namespace lce {

// Order m^2 contributions (coefficients exclude the factor m^2) for
// configurations without dynamical gauge potentials.
ExpansionResult mass2_expansion(const ChiralConfig& cfg, const FourVector& x, const FourVector& y,
                                Side side, KernelFamily family, const QuadratureSpec& spec,
                                BoxMethod box_method = BoxMethod::automatic);

// Same contributions for Xi = Phi = 0 (Y^2 in place of Y_L Y_R), written out
// directly with analytic derivatives of U and the nested integral in its
// sub-chord form.
ExpansionResult satz25_reference(const ChiralConfig& cfg, const FourVector& x, const FourVector& y,
                                 Side side, KernelFamily family, const QuadratureSpec& spec);

}  // namespace lce
