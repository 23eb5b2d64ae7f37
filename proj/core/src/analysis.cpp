#include "attmatch/analysis.hpp"

#include <algorithm>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "attmatch/csv.hpp"
#include "attmatch/error.hpp"
#include "attmatch/ingest.hpp"
#include "attmatch/io.hpp"
#include "attmatch/matching.hpp"
#include "attmatch/version.hpp"

namespace attmatch {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string bool_name(bool value) { return value ? "true" : "false"; }

void append_fields(std::string& out, std::initializer_list<std::string> fields, char delimiter) {
    bool first = true;
    for (const auto& field : fields) {
        if (!first) out += delimiter;
        out += field;
        first = false;
    }
    out += '\n';
}

}  // namespace

std::vector<TreatmentSpec> effective_specs(const RunConfig& config) {
    std::vector<TreatmentSpec> specs;
    for (TreatmentSpec spec : default_specs()) {
        spec.quantile = config.quantile;
        specs.push_back(std::move(spec));
    }
    for (const TreatmentOverride& override_spec : config.treatment_overrides) {
        auto it = std::find_if(specs.begin(), specs.end(), [&](const TreatmentSpec& s) {
            return s.attribute == override_spec.attribute;
        });
        if (it == specs.end()) {
            throw Error("treatment override names unknown attribute '" + override_spec.attribute + "'");
        }
        if (override_spec.tail) it->tail = *override_spec.tail;
        if (override_spec.quantile) it->quantile = *override_spec.quantile;
    }
    return specs;
}

namespace {

struct LoadedInputs {
    JoinedTable joined;
    std::size_t events_parsed = 0;
    std::size_t attribute_records = 0;
};

LoadedInputs load_inputs(const RunConfig& config) {
    ParseOptions options{config.delimiter};
    EventTable events = parse_events_file(config.events_path, config.genre_vocabulary, options);
    AttributeTable attributes =
        parse_attributes_file(config.attributes_path, config.attribute_names, options);
    LoadedInputs inputs;
    inputs.events_parsed = events.events.size();
    inputs.attribute_records = attributes.records.size();
    inputs.joined = join_nearest(events, attributes, config.join_window_seconds);
    if (inputs.joined.size() == 0) {
        throw Error("no events survived the attribute join; check locations and the join window");
    }
    return inputs;
}

std::string covariates_csv(const CovariateTable& covariates, char delimiter) {
    std::string out = "event_id";
    for (const auto& name : covariates.schema) {
        out += delimiter;
        out += name;
    }
    out += '\n';
    for (std::size_t i = 0; i < covariates.size(); ++i) {
        out += std::to_string(covariates.event_ids[i]);
        for (double x : covariates.row(i)) {
            out += delimiter;
            out += csv::format_double(x);
        }
        out += '\n';
    }
    return out;
}

std::string long_format_csv(const Heatmap& heatmap, char delimiter) {
    std::string out;
    append_fields(out, {"profile_kind", "treatment", "genre", "metric", "value"}, delimiter);
    static constexpr const char* kMetrics[] = {"att", "std_error", "normalized_att", "z"};
    for (const AttReport& cell : heatmap.cells) {
        const double values[] = {cell.att, cell.std_error, cell.normalized_att, cell.z};
        for (std::size_t m = 0; m < 4; ++m) {
            append_fields(out,
                          {heatmap.profile_kind, cell.treatment, cell.genre, kMetrics[m],
                           csv::format_double(values[m])},
                          delimiter);
        }
    }
    return out;
}

std::string pairs_csv(const MatchResult& matches, char delimiter) {
    std::string out;
    append_fields(out, {"treated_id", "control_id", "distance"}, delimiter);
    for (const MatchPair& pair : matches.pairs) {
        append_fields(out,
                      {std::to_string(pair.treated_id), std::to_string(pair.control_id),
                       csv::format_double(pair.distance)},
                      delimiter);
    }
    return out;
}

std::string balance_csv(const std::vector<TreatmentSummary>& summaries, char delimiter) {
    std::string out;
    append_fields(out,
                  {"treatment", "tail", "quantile", "n_treated", "threshold",
                   "mean_matched_distance", "mean_random_distance", "improvement"},
                  delimiter);
    for (const TreatmentSummary& s : summaries) {
        append_fields(out,
                      {s.spec.attribute, std::string(to_string(s.spec.tail)),
                       csv::format_double(s.spec.quantile), std::to_string(s.n_treated),
                       csv::format_double(s.threshold),
                       csv::format_double(s.balance.mean_matched_distance),
                       csv::format_double(s.balance.mean_random_distance),
                       csv::format_double(s.balance.improvement)},
                      delimiter);
    }
    return out;
}

ordered_json config_json(const RunConfig& config) {
    ordered_json overrides = ordered_json::array();
    for (const TreatmentOverride& o : config.treatment_overrides) {
        ordered_json entry;
        entry["attribute"] = o.attribute;
        if (o.tail) entry["tail"] = std::string(to_string(*o.tail));
        if (o.quantile) entry["quantile"] = *o.quantile;
        overrides.push_back(std::move(entry));
    }
    return ordered_json{
        {"events", config.events_path.string()},
        {"attributes", config.attributes_path.string()},
        {"output_dir", config.output_dir.string()},
        {"profile", std::string(to_string(config.profile_kind))},
        {"svd_rank", config.svd_rank},
        {"quantile", config.quantile},
        {"treatment_overrides", std::move(overrides)},
        {"significance_threshold", config.significance_threshold},
        {"join_window_seconds", config.join_window_seconds},
        {"utc_offset_seconds", config.utc_offset_seconds},
        {"seed", config.seed},
        {"genres", config.genre_vocabulary},
        {"attribute_names", config.attribute_names},
        {"export_covariates", config.export_covariates},
        {"export_pairs", config.export_pairs},
        {"delimiter", std::string(1, config.delimiter)},
        {"threads", config.n_threads},
    };
}

}  // namespace

AnalyzeResult run_analyze(const RunConfig& config) {
    LoadedInputs inputs = load_inputs(config);
    const JoinedTable& joined = inputs.joined;

    const CovariateTable covariates = assemble_covariates(
        joined, config.profile_kind, config.svd_rank, config.utc_offset_seconds);
    const std::vector<TreatmentSpec> specs = effective_specs(config);

    AnalyzeResult result;
    result.events_parsed = inputs.events_parsed;
    result.attribute_records = inputs.attribute_records;
    result.joined_rows = joined.size();
    result.dropped_events = joined.dropped;
    result.covariate_dimension = covariates.dim;

    std::filesystem::create_directories(config.output_dir);

    result.heatmap.profile_kind = std::string(to_string(config.profile_kind));
    result.heatmap.genres = joined.genre_vocabulary;
    for (std::size_t t = 0; t < specs.size(); ++t) {
        const TreatmentRun run = run_treatment(joined, covariates, specs[t], config.n_threads);
        std::vector<AttReport> reports = att_reports(joined, run, config.significance_threshold);
        result.heatmap.treatments.push_back(specs[t].attribute);
        for (auto& report : reports) result.heatmap.cells.push_back(std::move(report));

        if (config.export_pairs) {
            write_text_atomic(config.output_dir / ("pairs_" + specs[t].attribute + ".csv"),
                              pairs_csv(run.matches, config.delimiter));
        }

        TreatmentSummary summary;
        summary.spec = specs[t];
        summary.n_treated = run.assignment.n_treated;
        summary.threshold = run.assignment.threshold;
        // Each treatment gets its own derived stream so adding or removing
        // treatments never silently changes another one's baseline.
        summary.balance = balance_diagnostic(run.matches, run.treated_points, run.control_points,
                                             config.seed + t);
        result.treatments.push_back(std::move(summary));
    }

    result.heatmap_path = config.output_dir / "heatmap.csv";
    result.long_path = config.output_dir / "heatmap_long.csv";
    result.balance_path = config.output_dir / "balance.csv";
    result.manifest_path = config.output_dir / "manifest.json";

    write_heatmap_csv(result.heatmap, result.heatmap_path, config.delimiter);
    write_text_atomic(result.long_path, long_format_csv(result.heatmap, config.delimiter));
    write_text_atomic(result.balance_path, balance_csv(result.treatments, config.delimiter));
    if (config.export_covariates) {
        write_text_atomic(config.output_dir / "covariates.csv",
                          covariates_csv(covariates, config.delimiter));
    }

    std::set<std::string> distinct_users;
    for (const Event& event : joined.events) distinct_users.insert(event.user_id);

    ordered_json manifest;
    manifest["tool"] = "attmatch";
    manifest["version"] = kVersion;
    manifest["command"] = "analyze";
    manifest["config"] = config_json(config);
    manifest["data"] = ordered_json{
        {"events_parsed", result.events_parsed},
        {"attribute_records", result.attribute_records},
        {"joined_rows", result.joined_rows},
        {"dropped_events", result.dropped_events},
        {"distinct_users", distinct_users.size()},
        {"covariate_dimension", result.covariate_dimension},
        {"genre_count", joined.genre_vocabulary.size()},
    };
    ordered_json treatments = ordered_json::array();
    for (const TreatmentSummary& s : result.treatments) {
        treatments.push_back(ordered_json{
            {"attribute", s.spec.attribute},
            {"tail", std::string(to_string(s.spec.tail))},
            {"quantile", s.spec.quantile},
            {"n_treated", s.n_treated},
            {"threshold", s.threshold},
            {"mean_matched_distance", s.balance.mean_matched_distance},
            {"mean_random_distance", s.balance.mean_random_distance},
            {"improvement", s.balance.improvement},
        });
    }
    manifest["treatments"] = std::move(treatments);
    manifest["outputs"] = ordered_json{
        {"heatmap", result.heatmap_path.filename().string()},
        {"heatmap_long", result.long_path.filename().string()},
        {"balance", result.balance_path.filename().string()},
    };
    write_text_atomic(result.manifest_path, manifest.dump(2) + "\n");
    return result;
}

DiagnoseResult run_diagnose(const RunConfig& config, const std::string& attribute) {
    LoadedInputs inputs = load_inputs(config);
    const CovariateTable covariates = assemble_covariates(
        inputs.joined, config.profile_kind, config.svd_rank, config.utc_offset_seconds);

    const std::vector<TreatmentSpec> specs = effective_specs(config);
    auto it = std::find_if(specs.begin(), specs.end(),
                           [&](const TreatmentSpec& s) { return s.attribute == attribute; });
    if (it == specs.end()) throw Error("unknown treatment attribute '" + attribute + "'");

    const TreatmentRun run = run_treatment(inputs.joined, covariates, *it, config.n_threads);
    DiagnoseResult result;
    result.joined_rows = inputs.joined.size();
    result.summary.spec = *it;
    result.summary.n_treated = run.assignment.n_treated;
    result.summary.threshold = run.assignment.threshold;
    result.summary.balance =
        balance_diagnostic(run.matches, run.treated_points, run.control_points, config.seed);
    return result;
}

void write_heatmap_csv(const Heatmap& heatmap, const std::filesystem::path& path, char delimiter) {
    std::string out;
    append_fields(out, {"treatment", "genre", "att", "std_error", "normalized_att", "z", "significant"},
                  delimiter);
    for (const AttReport& cell : heatmap.cells) {
        append_fields(out,
                      {cell.treatment, cell.genre, csv::format_double(cell.att),
                       csv::format_double(cell.std_error), csv::format_double(cell.normalized_att),
                       csv::format_double(cell.z), bool_name(cell.significant)},
                      delimiter);
    }
    write_text_atomic(path, out);
}

Heatmap read_heatmap_csv(const std::filesystem::path& path, char delimiter) {
    std::istringstream in(read_text(path));
    Heatmap heatmap;
    bool have_header = false;
    std::size_t col_treatment = 0, col_genre = 0, col_att = 0, col_se = 0, col_norm = 0, col_z = 0,
                col_significant = 0;

    csv::for_each_row(in, delimiter, [&](std::size_t line, const std::vector<std::string>& fields) {
        if (!have_header) {
            auto find = [&](const std::string& name) {
                for (std::size_t i = 0; i < fields.size(); ++i) {
                    if (fields[i] == name) return i;
                }
                throw Error(path.string() + ": missing column '" + name + "'");
            };
            col_treatment = find("treatment");
            col_genre = find("genre");
            col_att = find("att");
            col_se = find("std_error");
            col_norm = find("normalized_att");
            col_z = find("z");
            col_significant = find("significant");
            have_header = true;
            return;
        }
        if (fields.size() < 7) {
            throw Error(path.string() + ": line " + std::to_string(line) + ": expected 7 fields");
        }
        AttReport cell;
        const std::string context = path.string() + ": line " + std::to_string(line);
        cell.treatment = fields[col_treatment];
        cell.genre = fields[col_genre];
        cell.att = csv::parse_double(fields[col_att], context);
        cell.std_error = csv::parse_double(fields[col_se], context);
        cell.normalized_att = csv::parse_double(fields[col_norm], context);
        cell.z = csv::parse_double(fields[col_z], context);
        cell.significant = fields[col_significant] == "true";
        if (heatmap.treatments.empty() || heatmap.treatments.back() != cell.treatment) {
            heatmap.treatments.push_back(cell.treatment);
        }
        if (heatmap.treatments.size() == 1) heatmap.genres.push_back(cell.genre);
        heatmap.cells.push_back(std::move(cell));
    });

    if (!have_header) throw Error(path.string() + ": empty heatmap file");
    if (heatmap.cells.size() != heatmap.treatments.size() * heatmap.genres.size()) {
        throw Error(path.string() + ": incomplete heatmap grid");
    }
    return heatmap;
}

CompareReport compare_heatmaps(const std::filesystem::path& a, const std::filesystem::path& b,
                               char delimiter) {
    const Heatmap heatmap_a = read_heatmap_csv(a, delimiter);
    const Heatmap heatmap_b = read_heatmap_csv(b, delimiter);

    CompareReport report;
    report.correlation = heatmap_correlation(heatmap_a, heatmap_b);
    report.cells = heatmap_a.cells.size();
    for (std::size_t i = 0; i < heatmap_a.cells.size(); ++i) {
        const AttReport& cell_a = heatmap_a.cells[i];
        const AttReport& cell_b = heatmap_b.cells[i];
        if (cell_a.significant && cell_b.significant) {
            if ((cell_a.att >= 0) == (cell_b.att >= 0)) {
                ++report.both_significant_same_sign;
            } else {
                ++report.both_significant_opposite_sign;
            }
        } else if (cell_a.significant) {
            ++report.only_a_significant;
        } else if (cell_b.significant) {
            ++report.only_b_significant;
        } else {
            ++report.neither_significant;
        }
    }
    return report;
}

void print_compare_report(const CompareReport& report, std::ostream& out) {
    out << "cells: " << report.cells << "\n"
        << "pearson_z: " << csv::format_double(report.correlation) << "\n"
        << "both_significant_same_sign: " << report.both_significant_same_sign << "\n"
        << "both_significant_opposite_sign: " << report.both_significant_opposite_sign << "\n"
        << "only_first_significant: " << report.only_a_significant << "\n"
        << "only_second_significant: " << report.only_b_significant << "\n"
        << "neither_significant: " << report.neither_significant << "\n";
}

}  // namespace attmatch
