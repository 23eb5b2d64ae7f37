#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "attmatch/events.hpp"
#include "attmatch/profiles.hpp"
#include "attmatch/stats.hpp"
#include "attmatch/treatment.hpp"

namespace attmatch {

/// One CLI-level override of a default treatment spec.
struct TreatmentOverride {
    std::string attribute;
    std::optional<Tail> tail;
    std::optional<double> quantile;
};

/// Every knob of an analyze run. The defaults here are the reference
/// configuration: rank-16 latent profiles, 20% tails, |z| >= 2 significance,
/// one-hour join window.
struct RunConfig {
    std::filesystem::path events_path;
    std::filesystem::path attributes_path;
    std::filesystem::path output_dir;
    ProfileKind profile_kind = ProfileKind::GenreFrequency;
    std::size_t svd_rank = 16;
    double quantile = 0.2;
    std::vector<TreatmentOverride> treatment_overrides;
    double significance_threshold = 2.0;
    std::int64_t join_window_seconds = 3600;
    std::int64_t utc_offset_seconds = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> genre_vocabulary = default_genre_vocabulary();
    std::vector<std::string> attribute_names = default_attribute_names();
    bool export_covariates = false;
    bool export_pairs = false;  // matched-pair audit dump per treatment
    char delimiter = ',';
    std::size_t n_threads = 0;  // 0 = hardware default; never affects results
};

/// default_specs() with the run's quantile and overrides applied.
std::vector<TreatmentSpec> effective_specs(const RunConfig& config);

struct TreatmentSummary {
    TreatmentSpec spec;
    std::size_t n_treated = 0;
    double threshold = 0;
    BalanceDiagnostic balance;
};

struct AnalyzeResult {
    Heatmap heatmap;
    std::vector<TreatmentSummary> treatments;
    std::size_t events_parsed = 0;
    std::size_t attribute_records = 0;
    std::size_t joined_rows = 0;
    std::size_t dropped_events = 0;
    std::size_t covariate_dimension = 0;
    std::filesystem::path heatmap_path;
    std::filesystem::path long_path;
    std::filesystem::path balance_path;
    std::filesystem::path manifest_path;
};

/// The full pipeline: parse, join, profile, assign, match, estimate. Writes
/// heatmap.csv, heatmap_long.csv, balance.csv and manifest.json (plus
/// covariates.csv when requested) atomically under output_dir. Identical
/// config and inputs produce byte-identical files.
AnalyzeResult run_analyze(const RunConfig& config);

/// Balance diagnostic only, for one treatment attribute.
struct DiagnoseResult {
    TreatmentSummary summary;
    std::size_t joined_rows = 0;
};
DiagnoseResult run_diagnose(const RunConfig& config, const std::string& attribute);

void write_heatmap_csv(const Heatmap& heatmap, const std::filesystem::path& path, char delimiter = ',');
Heatmap read_heatmap_csv(const std::filesystem::path& path, char delimiter = ',');

struct CompareReport {
    double correlation = 0;
    std::size_t cells = 0;
    std::size_t both_significant_same_sign = 0;
    std::size_t both_significant_opposite_sign = 0;
    std::size_t only_a_significant = 0;
    std::size_t only_b_significant = 0;
    std::size_t neither_significant = 0;
};

/// Correlation and per-cell significance agreement of two heatmap files.
CompareReport compare_heatmaps(const std::filesystem::path& a, const std::filesystem::path& b,
                               char delimiter = ',');
void print_compare_report(const CompareReport& report, std::ostream& out);

}  // namespace attmatch
