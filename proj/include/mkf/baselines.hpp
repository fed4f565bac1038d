#pragma once

#include "mkf/filter.hpp"
#include "mkf/raster.hpp"

#include <array>
#include <iosfwd>
#include <vector>

namespace mkf {

/// ROF model solved by explicit gradient descent on
///   E(u) = sum sqrt(ux^2 + uy^2 + eps^2) + lambda / 2 * sum (u - f)^2
/// with forward differences and mirrored (Neumann) boundaries. Larger lambda means stronger fidelity.
struct TvParams {
    double lambda = 1.25;
    int iters = 100;
    double step = 0.1;
    double epsilon = 1e-6;

    void validate() const;
};

struct TvResult {
    Raster output;
    /// energy[0] is the energy of the input; energy[k] after iteration k.
    std::vector<double> energy;
    /// Iterations whose step had to be shortened to keep the energy from rising.
    int backtracked = 0;
};

double tv_energy(const Raster& u, const Raster& observed, double lambda, double epsilon);

TvResult tv_denoise(const Raster& image, const TvParams& params = {});

/// CSV `iter,energy`.
void write_energy_csv(std::ostream& out, const std::vector<double>& energy);

enum class CurvatureMode { gaussian };

struct CfParams {
    int iters = 10;
    CurvatureMode mode = CurvatureMode::gaussian;

    void validate() const;
};

/// The eight tangent-plane projection distances of the Gaussian-curvature filter at (x, y), with mirrored
/// boundaries. Distances d1..d4 are to the midpoints of opposite neighbors, d5..d8 to the planes through
/// three neighbors of a 2x2 corner.
std::array<double, 8> gc_projection_distances(const Raster& u, int x, int y);

/// Gaussian-curvature filter: four interleaved pixel sets updated in turn, each pixel moving by the
/// smallest-magnitude projection distance.
Raster cf_gaussian_denoise(const Raster& image, const CfParams& params = {});

Raster bf_denoise(const Raster& image, const BfParams& params = {});

}  // namespace mkf
