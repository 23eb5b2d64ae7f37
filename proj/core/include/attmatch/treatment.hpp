#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace attmatch {

enum class Tail { Low, High };

std::string_view to_string(Tail tail);
Tail tail_from_string(std::string_view name);

/// One treatment definition: events in the given quantile tail of the
/// attribute's distribution are treated, the rest are control.
struct TreatmentSpec {
    std::string attribute;
    Tail tail = Tail::High;
    double quantile = 0.2;
};

/// The eight default treatments: each contextual attribute paired with the
/// tail of its distribution that marks the unusual condition.
std::vector<TreatmentSpec> default_specs();

struct TreatmentAssignment {
    std::vector<std::uint8_t> treated;       // flag per input position
    std::vector<std::size_t> treated_rows;   // ascending input positions
    std::vector<std::size_t> control_rows;   // ascending input positions
    std::size_t n_treated = 0;
    double threshold = 0;  // attribute value of the last unit pulled into the tail
};

/// Marks exactly floor(quantile * n) units as treated: those with the
/// smallest values for Tail::Low, the largest for Tail::High. Boundary ties
/// are broken by ascending event_id, so the assignment is a deterministic
/// function of (values, ids, spec). The quantile product is evaluated in
/// extended precision, making the count exact for any representable quantile.
TreatmentAssignment assign(std::span<const double> values, std::span<const std::int64_t> event_ids,
                           const TreatmentSpec& spec);

/// floor(quantile * n) as used by assign.
std::size_t treated_count(double quantile, std::size_t n);

}  // namespace attmatch
