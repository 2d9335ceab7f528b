#pragma once

#include <array>
#include <vector>

#include "epmdi/fock.hpp"

namespace epmdi {

/// 2x2 mode map, m[out][in]: creation operator of input mode j goes to
/// m[0][j] * (output mode 0) + m[1][j] * (output mode 1).
using ModeMatrix = std::array<std::array<Complex, 2>, 2>;

/// Scatters the two-mode Fock state |n1, n2> through a linear map of the mode
/// operators. Returns the output amplitudes indexed by z = photons in output
/// mode 0 (output mode 1 holds n1+n2-z). The map must be unitary for the
/// result to be normalized; this is not checked here.
std::vector<Complex> two_mode_transform(int n1, int n2, const ModeMatrix& m);

/// Polarization rotation by theta with the sign convention used throughout:
/// H -> cos H - sin V, V -> sin H + cos V.
ModeMatrix rotation_matrix(double theta_rad);

/// Frame change between the rectilinear and the diagonal polarization pair.
ModeMatrix diagonal_frame_matrix();

/// sqrt(n!) for n up to 34, exact in double precision for the factorial part.
double sqrt_factorial(int n);
double binomial(int n, int k);

}  // namespace epmdi
