#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mgprof/spectral.hpp"

namespace mgp {

struct PopulationProfile {
    std::string state_label;
    Timescales timescales;
    std::vector<double> mean_values;
    std::vector<HeatTraceProfile> per_subject;
};

/// Separation of two populations at the profile tail.
struct MarginReport {
    double alpha = 0.0;
    double delta = 0.0;
    double tail_s1 = 0.0;
    double tail_s2 = 0.0;
};

/// Elementwise arithmetic mean over subjects.
PopulationProfile population_profile(std::vector<HeatTraceProfile> profiles, const std::string& label);

/// Resolves an optional tail index (negative counts from the end; default
/// is the last timescale) against a profile length.
std::size_t resolve_tail_index(std::optional<int> tail_index, std::size_t length);

/// delta = |tail_1 - tail_2| where tail is the mean profile value at
/// `tail_index` (last timescale by default).
MarginReport state_margin(const PopulationProfile& p1, const PopulationProfile& p2,
                          double alpha = 0.0, std::optional<int> tail_index = std::nullopt);

/// Least-squares polynomial coefficients in ascending powers, solved by
/// column-pivoted Householder QR on the column-scaled Vandermonde matrix.
std::vector<double> polyfit(std::span<const double> xs, std::span<const double> ys, int degree);

double polyval(std::span<const double> coeffs, double x);

}  // namespace mgp
