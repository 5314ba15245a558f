#pragma once

#include <cstdint>
#include <variant>

#include "varboot/rng.hpp"

namespace varboot {

// --- standard normal ---

double normal_pdf(double x);
double normal_cdf(double x);
/// Inverse standard normal cdf, |error| ~ 1e-15 (rational approximation
/// refined by one Halley step).
double normal_quantile(double p);

// --- Student-t with nu degrees of freedom (unnormalized) ---

double student_t_pdf(double x, int nu);
double student_t_cdf(double x, int nu);
double student_t_quantile(double p, int nu);

/// Innovation laws with unit second moment.
struct StandardNormal {};

/// Student-t draws divided by sqrt(nu/(nu-2)); nu > 4 keeps the fourth
/// moment finite.
struct NormalizedStudentT {
  int nu;
};

using InnovationDist = std::variant<StandardNormal, NormalizedStudentT>;

void validate(const InnovationDist& dist);

/// Density of the normalized law.
double innovation_pdf(const InnovationDist& dist, double x);
double innovation_cdf(const InnovationDist& dist, double x);
double innovation_quantile(const InnovationDist& dist, double p);
/// E[eta^4]; 3 for the normal, 3(nu-2)/(nu-4) for normalized Student-t.
double innovation_kurtosis(const InnovationDist& dist);

/// One draw. Student-t uses nu+1 inverse-cdf normals (Z / sqrt(chi2_nu/nu)),
/// exact for integer nu and deterministic given the stream.
double draw_innovation(const InnovationDist& dist, SplitMix64& rng);

}  // namespace varboot
