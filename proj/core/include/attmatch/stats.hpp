#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "attmatch/events.hpp"
#include "attmatch/matching.hpp"
#include "attmatch/profiles.hpp"
#include "attmatch/treatment.hpp"

namespace attmatch {

/// Mean of the paired outcome differences: the matched estimate of the
/// average treatment effect on treated.
double att(std::span<const double> diffs);

/// Sample standard deviation of the paired differences (n-1 denominator)
/// divided by sqrt(n): the matched-pairs standard error.
double std_error(std::span<const double> diffs);

/// ATT divided by the genre's overall frequency, for comparability across
/// genres of different popularity.
double normalized_att(double att_value, double genre_frequency);

/// ATT divided by its standard error.
double z_score(double att_value, double std_error_value);

/// One heatmap cell.
struct AttReport {
    std::string treatment;
    std::string genre;
    double att = 0;
    double std_error = 0;
    double genre_frequency = 0;
    double normalized_att = 0;
    double z = 0;
    bool significant = false;
};

struct Heatmap {
    std::string profile_kind;
    std::vector<std::string> treatments;
    std::vector<std::string> genres;
    std::vector<AttReport> cells;  // treatment-major order

    const AttReport& cell(std::size_t treatment, std::size_t genre) const {
        return cells[treatment * genres.size() + genre];
    }
};

/// Everything computed for one treatment: the assignment, the gathered
/// covariate points and the matched pairs. Matching runs once per treatment
/// and is shared by every genre's cell.
struct TreatmentRun {
    TreatmentSpec spec;
    TreatmentAssignment assignment;
    PointSet treated_points;
    PointSet control_points;
    MatchResult matches;
};

TreatmentRun run_treatment(const JoinedTable& table, const CovariateTable& covariates,
                           const TreatmentSpec& spec, std::size_t n_threads = 0);

/// Paired outcome differences for one genre: indicator(treated watched g)
/// minus indicator(matched control watched g), one entry per pair.
std::vector<double> paired_differences(const JoinedTable& table, const TreatmentRun& run,
                                       std::uint32_t genre);

/// Cells for every genre of one treatment run. Degenerate cells (a genre
/// never watched, or zero-variance differences) report att 0, z 0 and are
/// never significant.
std::vector<AttReport> att_reports(const JoinedTable& table, const TreatmentRun& run,
                                   double significance_threshold);

struct HeatmapOptions {
    double significance_threshold = 2.0;
    std::size_t n_threads = 0;
};

/// The full grid: every treatment spec crossed with every genre of the
/// table's vocabulary.
Heatmap build_heatmap(const JoinedTable& table, const CovariateTable& covariates,
                      std::span<const TreatmentSpec> specs, const HeatmapOptions& options = {});

/// Pearson correlation between the z-values of two heatmaps over the same
/// grid. Throws on grid mismatch or when either side is constant.
double heatmap_correlation(const Heatmap& a, const Heatmap& b);

struct BalanceDiagnostic {
    double mean_matched_distance = 0;
    double mean_random_distance = 0;
    double improvement = 0;  // 1 - matched/random, 0 when random is 0
};

/// Covariate-balance check: mean matched-pair distance against the mean
/// distance of a seeded uniformly random treated->control pairing of equal
/// size.
BalanceDiagnostic balance_diagnostic(const MatchResult& matches, const PointSet& treated,
                                     const PointSet& controls, std::uint64_t seed);

}  // namespace attmatch
