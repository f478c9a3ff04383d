#pragma once

#include <string>
#include <utility>
#include <vector>

#include "psep/common.hpp"
#include "psep/grid.hpp"

// Weighted norms of the a-priori estimate for fields given as angular-mode sums
// phi(rho, angle) = sum_m phi_m(rho) Y_m(angle).
namespace psep::lin {

struct ModalField {
    num::Grid grid;
    std::vector<Field2> modes;   // index = angular mode

    static ModalField single(const num::Grid& g, int m, const Field2& f);
};

// How the sum over tangential directions of d_sigma(grad_Gamma phi) is realized per mode:
// frame-summed uses lambda/rho^2, sup-over-direction lambda/((dim-1) rho^2).
enum class SigmaConvention { FrameSum, SupDirection };

struct NormBlock {
    std::string name;
    double value = 0.0;       // +inf when the block overflows a double
    double log_value = 0.0;   // natural log; -inf for an identically zero block
};

struct WeightedNormReport {
    std::vector<NormBlock> blocks;
    double eps = 0.0;
    double d = 0.0;
    double alpha = 0.0;            // norm1 only
    double log_total_sup_direction = 0.0;

    double log_total() const;       // log-sum-exp of the blocks
    double total() const;           // plain sum of values, may be +inf
    bool overflow() const;          // some block above 1e300
    const NormBlock& block(const std::string& name) const;
};

// Decimal (mantissa, exponent) of exp(log_value) without overflow: mantissa in [1, 10).
std::pair<double, long> decimal_parts(double log_value);

// Polynomial branch 1 + (r/eps)^(1+alpha) for r >= 0, exponential e^(2|r|/eps) for r < 0.
double weight(double r, double eps, double alpha);
double log_weight(double r, double eps, double alpha);

// Radial derivatives on a nonuniform grid (three-point; one-sided at the ends).
void radial_derivatives(const num::Grid& g, const std::vector<double>& u, std::vector<double>& d1,
                        std::vector<double>& d2);

// Solution-side norm. The collar is |rho - r0| < d. Component contributions are added.
WeightedNormReport norm0(const ModalField& phi, double eps, double d,
                         SigmaConvention conv = SigmaConvention::FrameSum);

// Data-side norm with polynomial/exponential collar weights and outer penalties,
// evaluated in log space.
WeightedNormReport norm1(const ModalField& g, double eps, double d, double alpha,
                         SigmaConvention conv = SigmaConvention::FrameSum);

}  // namespace psep::lin
