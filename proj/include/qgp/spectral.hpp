#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "qgp/graph.hpp"

namespace qgp {

struct SpectralOptions {
    double scan_points_per_gap = 16;  // grid step = pi / (this * |G|)
    double root_tol = 1e-12;          // |dk| <= root_tol * max(1,k)
    double tol_root_scale = 1e-8;     // sigma_min acceptance, relative to ||A||
    double tol_mult_scale = 1e-6;     // multiplicity threshold, relative to ||A||
    double fem_h = 0.0;               // 0: |G|/200
    int fem_max_unknowns = 6000;
    int max_rescans = 3;
    bool multiplicities = true;  // mu2/lambda1 skip the kernel-dimension SVD
};

/// Ordered eigenvalues with multiplicities resolved as repeats.
struct SpectralResult {
    std::vector<double> values;
    std::vector<int> kernel_dim;  // multiplicity of the root each entry belongs to
    std::vector<double> error;
    std::string method;
};

/// Wave data of one eigenfunction: f_m(x) = A_m cos(kx) + B_m sin(kx) on each
/// edge; for eigenvalue 0 the affine form f_m(x) = A_m + B_m x.
struct EdgeWave {
    double k = 0.0;
    std::vector<std::array<double, 2>> coeff;  // per edge (A,B)
};

enum class EigMethod { secular, fem, cross_check };

/// Rows: per natural vertex, (deg-1) continuity rows and one Kirchhoff row;
/// per Dirichlet vertex, one value row per slot.  Columns: (A_m, B_m).
/// k^2 is an eigenvalue iff the matrix is singular.
Eigen::MatrixXd assemble_secular(const MetricGraph& g, double k);

SpectralResult eigenvalues(const MetricGraph& g, int count, EigMethod method = EigMethod::secular,
                           const SpectralOptions& opts = {});

double mu2(const MetricGraph& g, const SpectralOptions& opts = {});
double lambda1(const MetricGraph& g, const SpectralOptions& opts = {});

/// Orthonormal (L2) kernel basis at a computed eigenvalue.
std::vector<EdgeWave> eigenfunction(const MetricGraph& g, double eigenvalue, const SpectralOptions& opts = {});

/// Value of a wave at a slot and the inward derivative there.
double wave_value_at_slot(const MetricGraph& g, const EdgeWave& w, int slot);
double wave_inward_derivative(const MetricGraph& g, const EdgeWave& w, int slot);
/// L2 inner product of two waves with the same wavenumber.
double wave_inner_product(const MetricGraph& g, const EdgeWave& a, const EdgeWave& b);
/// Max relative violation of continuity/Kirchhoff/Dirichlet conditions.
double wave_residual(const MetricGraph& g, const EdgeWave& w);

/// Smallest omega in (0, pi/2) with 2 tan(a*omega) = cot(omega).
double solve_fork(double a);

/// Spectrum of an equilateral graph from the eigenvalues of the discrete
/// transition matrix; independent oracle for the secular solver.
SpectralResult von_below_equilateral(const MetricGraph& g, int count);

}  // namespace qgp
