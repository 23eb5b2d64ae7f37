#include "attmatch/stats.hpp"

#include <cmath>
#include <random>

#include "attmatch/error.hpp"

namespace attmatch {

double att(std::span<const double> diffs) {
    if (diffs.empty()) throw Error("att: no paired differences");
    double sum = 0;
    for (double d : diffs) sum += d;
    return sum / static_cast<double>(diffs.size());
}

double std_error(std::span<const double> diffs) {
    const std::size_t n = diffs.size();
    if (n < 2) throw Error("std_error: needs at least 2 paired differences");
    const double mean = att(diffs);
    double ss = 0;
    for (double d : diffs) {
        const double centered = d - mean;
        ss += centered * centered;
    }
    const double sample_sd = std::sqrt(ss / static_cast<double>(n - 1));
    return sample_sd / std::sqrt(static_cast<double>(n));
}

double normalized_att(double att_value, double genre_frequency) {
    if (!(genre_frequency > 0)) throw Error("normalized_att: genre frequency must be positive");
    return att_value / genre_frequency;
}

double z_score(double att_value, double std_error_value) {
    if (!(std_error_value > 0)) throw Error("z_score: standard error must be positive");
    return att_value / std_error_value;
}

TreatmentRun run_treatment(const JoinedTable& table, const CovariateTable& covariates,
                           const TreatmentSpec& spec, std::size_t n_threads) {
    if (table.size() != covariates.size()) {
        throw Error("run_treatment: table and covariates disagree on row count");
    }
    std::size_t attribute = table.attribute_names.size();
    for (std::size_t a = 0; a < table.attribute_names.size(); ++a) {
        if (table.attribute_names[a] == spec.attribute) {
            attribute = a;
            break;
        }
    }
    if (attribute == table.attribute_names.size()) {
        throw Error("unknown treatment attribute '" + spec.attribute + "'");
    }

    TreatmentRun run;
    run.spec = spec;
    const std::vector<double> values = table.attribute_column(attribute);
    const std::vector<std::int64_t> ids = table.event_ids();
    run.assignment = assign(values, ids, spec);
    run.treated_points = gather_points(covariates, run.assignment.treated_rows);
    run.control_points = gather_points(covariates, run.assignment.control_rows);

    NeighborIndex index(run.control_points);
    run.matches = match_treated(index, run.treated_points, n_threads);
    return run;
}

std::vector<double> paired_differences(const JoinedTable& table, const TreatmentRun& run,
                                       std::uint32_t genre) {
    std::vector<double> diffs;
    diffs.reserve(run.matches.pairs.size());
    for (const MatchPair& pair : run.matches.pairs) {
        const std::uint32_t treated_genre =
            table.events[run.treated_points.rows[pair.treated_ordinal]].genre;
        const std::uint32_t control_genre =
            table.events[run.control_points.rows[pair.control_ordinal]].genre;
        diffs.push_back(static_cast<double>(treated_genre == genre) -
                        static_cast<double>(control_genre == genre));
    }
    return diffs;
}

std::vector<AttReport> att_reports(const JoinedTable& table, const TreatmentRun& run,
                                   double significance_threshold) {
    const std::size_t n_genres = table.genre_vocabulary.size();
    std::vector<double> genre_frequency(n_genres, 0.0);
    for (const Event& event : table.events) genre_frequency[event.genre] += 1.0;
    for (double& f : genre_frequency) f /= static_cast<double>(table.size());

    std::vector<AttReport> reports;
    reports.reserve(n_genres);
    for (std::uint32_t g = 0; g < n_genres; ++g) {
        const std::vector<double> diffs = paired_differences(table, run, g);
        AttReport report;
        report.treatment = run.spec.attribute;
        report.genre = table.genre_vocabulary[g];
        report.att = att(diffs);
        report.std_error = diffs.size() >= 2 ? std_error(diffs) : 0.0;
        report.genre_frequency = genre_frequency[g];
        if (report.genre_frequency > 0) {
            report.normalized_att = normalized_att(report.att, report.genre_frequency);
        }
        if (report.std_error > 0) {
            report.z = z_score(report.att, report.std_error);
            report.significant = std::abs(report.z) >= significance_threshold;
        }
        reports.push_back(std::move(report));
    }
    return reports;
}

Heatmap build_heatmap(const JoinedTable& table, const CovariateTable& covariates,
                      std::span<const TreatmentSpec> specs, const HeatmapOptions& options) {
    Heatmap heatmap;
    heatmap.genres = table.genre_vocabulary;
    heatmap.treatments.reserve(specs.size());
    heatmap.cells.reserve(specs.size() * table.genre_vocabulary.size());
    for (const TreatmentSpec& spec : specs) {
        heatmap.treatments.push_back(spec.attribute);
        const TreatmentRun run = run_treatment(table, covariates, spec, options.n_threads);
        std::vector<AttReport> reports = att_reports(table, run, options.significance_threshold);
        for (auto& report : reports) heatmap.cells.push_back(std::move(report));
    }
    return heatmap;
}

double heatmap_correlation(const Heatmap& a, const Heatmap& b) {
    if (a.treatments != b.treatments || a.genres != b.genres) {
        throw Error("heatmap_correlation: grids do not match");
    }
    const std::size_t n = a.cells.size();
    if (n < 2) throw Error("heatmap_correlation: grid too small");

    double mean_a = 0, mean_b = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_a += a.cells[i].z;
        mean_b += b.cells[i].z;
    }
    mean_a /= static_cast<double>(n);
    mean_b /= static_cast<double>(n);

    double cov = 0, var_a = 0, var_b = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a.cells[i].z - mean_a;
        const double db = b.cells[i].z - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (var_a == 0 || var_b == 0) {
        throw Error("heatmap_correlation: correlation undefined for a constant heatmap");
    }
    return cov / std::sqrt(var_a * var_b);
}

BalanceDiagnostic balance_diagnostic(const MatchResult& matches, const PointSet& treated,
                                     const PointSet& controls, std::uint64_t seed) {
    if (matches.pairs.empty()) throw Error("balance_diagnostic: empty match result");
    if (controls.size() == 0) throw Error("balance_diagnostic: empty control set");

    double matched_sum = 0;
    for (const MatchPair& pair : matches.pairs) matched_sum += pair.distance;
    const double mean_matched = matched_sum / static_cast<double>(matches.pairs.size());

    std::mt19937_64 rng(seed);
    double random_sum = 0;
    for (const MatchPair& pair : matches.pairs) {
        const std::size_t pick = static_cast<std::size_t>(rng() % controls.size());
        random_sum += std::sqrt(squared_distance(treated.point(pair.treated_ordinal), controls.point(pick)));
    }
    const double mean_random = random_sum / static_cast<double>(matches.pairs.size());

    BalanceDiagnostic diagnostic;
    diagnostic.mean_matched_distance = mean_matched;
    diagnostic.mean_random_distance = mean_random;
    diagnostic.improvement = mean_random > 0 ? 1.0 - mean_matched / mean_random : 0.0;
    return diagnostic;
}

}  // namespace attmatch
