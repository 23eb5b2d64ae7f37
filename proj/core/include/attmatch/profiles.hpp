#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "attmatch/events.hpp"
#include "attmatch/matrix.hpp"

namespace attmatch {

enum class ProfileKind { GenreFrequency, Latent };

std::string_view to_string(ProfileKind kind);
ProfileKind profile_kind_from_string(std::string_view name);

/// Binary user x program matrix: entry (u, p) is 1 iff user u watched
/// program p at least once. Row and column order follow first appearance in
/// the joined table, which is already sorted by event_id.
struct InteractionMatrix {
    Matrix entries;  // n_users x n_programs, values in {0, 1}
    std::vector<std::string> users;     // row -> user_id
    std::vector<std::string> programs;  // column -> program_id
    std::unordered_map<std::string, std::size_t> user_index;
    std::unordered_map<std::string, std::size_t> program_index;
};

/// Share of the user's events per genre; entries sum to 1.
std::vector<double> genre_frequency_profile(const JoinedTable& table, std::string_view user_id);

InteractionMatrix build_interaction_matrix(const JoinedTable& table);

/// Cyclic encoding of the event time in local clock terms:
/// (sin, cos) of the hour-of-day phase and (sin, cos) of the day-of-week
/// phase, fractional and anchored at Monday midnight. Always has norm sqrt(2).
std::array<double, 4> time_features(std::int64_t timestamp, std::int64_t utc_offset_seconds);

/// Per-event covariate vectors: user profile concatenated with time features,
/// then standardized per dimension (constant dimensions are left at zero).
class CovariateTable {
public:
    std::vector<double> data;  // n x dim, row major
    std::size_t dim = 0;
    std::vector<std::string> schema;       // feature names, length dim
    std::vector<std::int64_t> event_ids;   // parallel to rows

    std::size_t size() const { return dim == 0 ? 0 : data.size() / dim; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * dim, dim}; }
};

CovariateTable assemble_covariates(const JoinedTable& table, ProfileKind kind,
                                   std::size_t svd_rank, std::int64_t utc_offset_seconds);

}  // namespace attmatch
