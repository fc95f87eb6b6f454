#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "roadrough/core/types.hpp"

namespace roadrough {

inline constexpr double kLowUpperIri = 0.9;    // m/km
inline constexpr double kMediumUpperIri = 2.5; // m/km, Medium spans (0.9, 2.5]

/// Severity class of an IRI value (m/km).
inline IriLevel to_iri_level(double iri)
{
    if (!(iri >= 0.0)) throw InvalidInput("to_iri_level: IRI must be a non-negative number");
    if (iri <= kLowUpperIri) return IriLevel::Low;
    if (iri <= kMediumUpperIri) return IriLevel::Medium;
    return IriLevel::High;
}

inline std::vector<IriLevel> to_iri_levels(std::span<const double> iri)
{
    std::vector<IriLevel> out;
    out.reserve(iri.size());
    for (double v : iri) out.push_back(to_iri_level(v));
    return out;
}

} // namespace roadrough
