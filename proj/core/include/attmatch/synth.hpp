#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "attmatch/events.hpp"
#include "attmatch/treatment.hpp"

namespace attmatch {

/// A treatment effect planted on one (attribute, genre) cell: watching the
/// genre becomes `tau` more probable for events in the attribute's treated
/// tail (the Table-style tail side at the 20% quantile, decided on the
/// realized sample with the same rule the analysis uses).
struct PlantedEffect {
    std::string attribute;
    std::string genre;
    double tau = 0;
};

struct SynthConfig {
    std::size_t n_users = 200;
    std::size_t n_programs = 100;
    std::size_t n_events = 10000;
    std::size_t n_genres = 14;
    std::size_t n_locations = 4;
    std::vector<PlantedEffect> planted_effects;
    /// Degree to which a user's latent preference tilts both the attribute
    /// values the user is exposed to and the user's genre choices. Zero means
    /// treatment assignment is independent of preference.
    double confounding_strength = 0;
    std::uint64_t seed = 0;
};

/// The exact planted ATT per cell, defined on the treated subpopulation.
/// Exact as long as planted attributes do not overlap; effects on several
/// genres of the same attribute are applied jointly and stay exact while
/// their adjusted probabilities remain feasible.
struct GroundTruth {
    std::vector<PlantedEffect> true_att;
};

struct SynthDataset {
    EventTable events;
    AttributeTable attributes;
    GroundTruth truth;
};

/// Validates feasibility (planted probabilities must stay inside [0, 1] for
/// every reachable preference vector) and throws Error on violation.
void validate(const SynthConfig& config);

/// Generates a synthetic observational dataset. Bit-reproducible for a fixed
/// seed and config; emits exactly the tables the ingest module parses, with
/// one attribute record per event so a join at any window recovers every
/// generated value.
SynthDataset generate(const SynthConfig& config);

/// Difference of mean outcomes, treated minus control, for one genre: the
/// biased-under-confounding estimator matching is supposed to beat.
double naive_difference(const JoinedTable& table, const TreatmentAssignment& assignment,
                        std::uint32_t genre);

/// Writes events.csv, attributes.csv and ground_truth.csv under `directory`.
struct SynthPaths {
    std::filesystem::path events;
    std::filesystem::path attributes;
    std::filesystem::path ground_truth;
};
SynthPaths write_dataset(const SynthDataset& dataset, const std::filesystem::path& directory,
                         char delimiter = ',');

}  // namespace attmatch
