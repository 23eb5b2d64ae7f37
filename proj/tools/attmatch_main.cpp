#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "attmatch/analysis.hpp"
#include "attmatch/csv.hpp"
#include "attmatch/error.hpp"
#include "attmatch/io.hpp"
#include "attmatch/synth.hpp"
#include "attmatch/version.hpp"

namespace {

using attmatch::Error;
using attmatch::RunConfig;

/// Flat key=value config file: one `key = value` per line, '#' comments.
/// Repeated keys repeat the flag. Flags given on the command line win.
class FlatConfig {
public:
    static FlatConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error("cannot open config file '" + path + "'");
        FlatConfig config;
        config.path_ = path;
        std::string line;
        std::size_t line_number = 0;
        while (std::getline(in, line)) {
            ++line_number;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const auto first = line.find_first_not_of(" \t");
            if (first == std::string::npos || line[first] == '#') continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw Error(path + ": line " + std::to_string(line_number) + ": expected key=value");
            }
            auto trim = [](std::string s) {
                const auto b = s.find_first_not_of(" \t");
                const auto e = s.find_last_not_of(" \t");
                return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
            };
            config.entries_.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
        return config;
    }

    /// Applies every entry to `cmd` unless the flag already appeared on the
    /// command line; unknown keys are an error so config files stay auditable.
    void apply(CLI::App& cmd) const {
        std::set<CLI::Option*> cli_given;
        for (CLI::Option* option : cmd.get_options()) {
            if (option->count() > 0) cli_given.insert(option);
        }
        std::vector<CLI::Option*> touched;
        for (const auto& [key, value] : entries_) {
            CLI::Option* option = cmd.get_option_no_throw("--" + key);
            if (option == nullptr) {
                throw Error(path_ + ": unknown config key '" + key + "'");
            }
            if (cli_given.count(option) > 0) continue;  // command line wins
            option->add_result(value);
            if (std::find(touched.begin(), touched.end(), option) == touched.end()) {
                touched.push_back(option);
            }
        }
        // run_callback parses the queued strings into the bound variables
        // exactly as command-line input would.
        for (CLI::Option* option : touched) option->run_callback();
    }

private:
    std::string path_;
    std::vector<std::pair<std::string, std::string>> entries_;
};

struct CliRun {
    RunConfig config;
    std::string profile = "genre-frequency";
    std::string treatment;
    std::string tail;
    std::string genres;
    std::string delimiter = ",";
    std::string config_path;
    CLI::App* cmd = nullptr;
};

void add_run_options(CLI::App& cmd, CliRun& run) {
    cmd.add_option("--events", run.config.events_path, "Event log file");
    cmd.add_option("--attributes", run.config.attributes_path, "Attribute records file");
    cmd.add_option("--profile", run.profile, "User profile kind: genre-frequency or latent")
        ->check(CLI::IsMember({"genre-frequency", "latent"}));
    cmd.add_option("--svd-rank", run.config.svd_rank, "Rank of the latent profile factorization");
    cmd.add_option("--quantile", run.config.quantile, "Treated tail fraction, in (0, 0.5]");
    cmd.add_option("--treatment", run.treatment, "Attribute whose spec the --tail flag overrides");
    cmd.add_option("--tail", run.tail, "Override tail for --treatment: low or high")
        ->check(CLI::IsMember({"low", "high"}));
    cmd.add_option("--threshold", run.config.significance_threshold, "|z| significance threshold");
    cmd.add_option("--window", run.config.join_window_seconds, "Attribute join window in seconds");
    cmd.add_option("--utc-offset", run.config.utc_offset_seconds, "Local time offset in seconds");
    cmd.add_option("--seed", run.config.seed, "Seed for the balance diagnostic baseline");
    cmd.add_option("--genres", run.genres, "Comma-separated genre vocabulary override");
    cmd.add_option("--delimiter", run.delimiter, "Field delimiter for input and output files")
        ->check(CLI::Validator(
            [](std::string& value) {
                return value.size() == 1 ? std::string() : std::string("expected a single character");
            },
            "CHAR"));
    cmd.add_option("--threads", run.config.n_threads, "Worker threads for matching (0 = auto)");
    cmd.add_option("--config", run.config_path,
                   "Flat key=value config file; command-line flags take precedence");
    run.cmd = &cmd;
}

void finalize_run(CliRun& run) {
    if (!run.config_path.empty()) {
        FlatConfig::load(run.config_path).apply(*run.cmd);
    }
    if (run.config.events_path.empty()) throw Error("--events is required (flag or config key)");
    if (run.config.attributes_path.empty()) {
        throw Error("--attributes is required (flag or config key)");
    }
    run.config.profile_kind = attmatch::profile_kind_from_string(run.profile);
    run.config.delimiter = run.delimiter.at(0);
    if (!run.treatment.empty() || !run.tail.empty()) {
        if (run.treatment.empty() || run.tail.empty()) {
            throw Error("--treatment and --tail must be given together");
        }
        attmatch::TreatmentOverride override_spec;
        override_spec.attribute = run.treatment;
        override_spec.tail = attmatch::tail_from_string(run.tail);
        run.config.treatment_overrides.push_back(std::move(override_spec));
    }
    if (!run.genres.empty()) {
        run.config.genre_vocabulary = attmatch::csv::split_line(run.genres, ',');
    }
}

int cmd_analyze(CliRun& run) {
    finalize_run(run);
    if (run.config.output_dir.empty()) throw Error("--out is required (flag or config key)");
    const attmatch::AnalyzeResult result = attmatch::run_analyze(run.config);
    std::size_t significant = 0;
    for (const auto& cell : result.heatmap.cells) significant += cell.significant;
    std::cout << "analyzed " << result.joined_rows << " events (" << result.dropped_events
              << " dropped in join) across " << result.treatments.size() << " treatments x "
              << result.heatmap.genres.size() << " genres\n"
              << "significant cells: " << significant << " of " << result.heatmap.cells.size() << "\n"
              << "wrote " << result.heatmap_path.string() << "\n"
              << "wrote " << result.long_path.string() << "\n"
              << "wrote " << result.balance_path.string() << "\n"
              << "wrote " << result.manifest_path.string() << "\n";
    return 0;
}

int cmd_diagnose(CliRun& run, const std::string& attribute) {
    finalize_run(run);
    const attmatch::DiagnoseResult result = attmatch::run_diagnose(run.config, attribute);
    const attmatch::TreatmentSummary& s = result.summary;
    std::cout << "treatment: " << s.spec.attribute << " (tail " << attmatch::to_string(s.spec.tail)
              << ", quantile " << attmatch::csv::format_double(s.spec.quantile) << ")\n"
              << "events: " << result.joined_rows << ", treated: " << s.n_treated << "\n"
              << "mean matched distance: "
              << attmatch::csv::format_double(s.balance.mean_matched_distance) << "\n"
              << "mean random distance: "
              << attmatch::csv::format_double(s.balance.mean_random_distance) << "\n"
              << "improvement: " << attmatch::csv::format_double(100.0 * s.balance.improvement)
              << "%\n";
    return 0;
}

int cmd_synth(CLI::App& cmd, attmatch::SynthConfig& config, std::string& out,
              std::vector<std::string>& effect_flags, const std::string& config_path,
              const std::string& delimiter) {
    if (!config_path.empty()) FlatConfig::load(config_path).apply(cmd);
    if (out.empty()) throw Error("--out is required (flag or config key)");
    if (delimiter.size() != 1) throw Error("--delimiter expects a single character");
    for (const std::string& flag : effect_flags) {
        const auto parts = attmatch::csv::split_line(flag, ':');
        if (parts.size() != 3) {
            throw Error("--effect expects attribute:genre:tau, got '" + flag + "'");
        }
        config.planted_effects.push_back(
            {parts[0], parts[1], attmatch::csv::parse_double(parts[2], "--effect tau")});
    }
    const attmatch::SynthDataset dataset = attmatch::generate(config);
    const attmatch::SynthPaths paths = attmatch::write_dataset(dataset, out, delimiter[0]);

    nlohmann::ordered_json effects = nlohmann::ordered_json::array();
    for (const auto& effect : config.planted_effects) {
        effects.push_back({{"attribute", effect.attribute},
                           {"genre", effect.genre},
                           {"tau", effect.tau}});
    }
    nlohmann::ordered_json manifest;
    manifest["tool"] = "attmatch";
    manifest["version"] = attmatch::kVersion;
    manifest["command"] = "synth";
    manifest["config"] = {
        {"users", config.n_users},       {"programs", config.n_programs},
        {"events", config.n_events},     {"genres_count", config.n_genres},
        {"locations", config.n_locations}, {"confounding", config.confounding_strength},
        {"seed", config.seed},           {"effects", std::move(effects)},
    };
    manifest["outputs"] = {{"events", paths.events.filename().string()},
                           {"attributes", paths.attributes.filename().string()},
                           {"ground_truth", paths.ground_truth.filename().string()}};
    attmatch::write_text_atomic(std::filesystem::path(out) / "manifest.json",
                                manifest.dump(2) + "\n");

    std::cout << "wrote " << paths.events.string() << " (" << dataset.events.events.size()
              << " events)\n"
              << "wrote " << paths.attributes.string() << "\n"
              << "wrote " << paths.ground_truth.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"attmatch: treatment-effect estimation for event logs via nearest-neighbor matching"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("attmatch ") + attmatch::kVersion);

    // analyze
    CliRun analyze_run;
    CLI::App* analyze = app.add_subcommand("analyze", "Run the full estimation pipeline");
    add_run_options(*analyze, analyze_run);
    analyze->add_option("--out", analyze_run.config.output_dir, "Output directory");
    analyze->add_flag("--export-covariates", analyze_run.config.export_covariates,
                      "Also write the standardized covariates for audit");
    analyze->add_flag("--export-pairs", analyze_run.config.export_pairs,
                      "Also write treated/control match pairs per treatment");

    // compare
    std::string compare_a, compare_b;
    CLI::App* compare = app.add_subcommand("compare", "Correlate the z-values of two heatmap files");
    compare->add_option("first", compare_a, "First heatmap.csv")->required();
    compare->add_option("second", compare_b, "Second heatmap.csv")->required();

    // synth
    attmatch::SynthConfig synth_config;
    std::string synth_out;
    std::string synth_config_path;
    std::string synth_delimiter = ",";
    std::vector<std::string> effect_flags;
    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic dataset with known effects");
    synth->add_option("--out", synth_out, "Output directory");
    synth->add_option("--users", synth_config.n_users, "Number of users");
    synth->add_option("--programs", synth_config.n_programs, "Number of programs");
    synth->add_option("--events", synth_config.n_events, "Number of events");
    synth->add_option("--genres-count", synth_config.n_genres, "Number of genres");
    synth->add_option("--locations", synth_config.n_locations, "Number of locations");
    synth->add_option("--confounding", synth_config.confounding_strength,
                      "Strength of the preference -> exposure confounding");
    synth->add_option("--seed", synth_config.seed, "Generator seed");
    synth->add_option("--effect", effect_flags, "Planted effect attribute:genre:tau (repeatable)");
    synth->add_option("--delimiter", synth_delimiter, "Field delimiter for the emitted files");
    synth->add_option("--config", synth_config_path,
                      "Flat key=value config file; command-line flags take precedence");

    // diagnose
    CliRun diagnose_run;
    std::string diagnose_attribute = "temperature";
    CLI::App* diagnose = app.add_subcommand("diagnose", "Covariate-balance diagnostic for one treatment");
    add_run_options(*diagnose, diagnose_run);
    diagnose->add_option("--for", diagnose_attribute, "Treatment attribute to diagnose");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return cmd_analyze(analyze_run);
        if (compare->parsed()) {
            const attmatch::CompareReport report = attmatch::compare_heatmaps(compare_a, compare_b);
            attmatch::print_compare_report(report, std::cout);
            return 0;
        }
        if (synth->parsed()) {
            return cmd_synth(*synth, synth_config, synth_out, effect_flags, synth_config_path,
                             synth_delimiter);
        }
        if (diagnose->parsed()) return cmd_diagnose(diagnose_run, diagnose_attribute);
    } catch (const Error& error) {
        std::cerr << "attmatch: " << error.what() << "\n";
        return 2;
    } catch (const std::exception& error) {
        std::cerr << "attmatch: unexpected error: " << error.what() << "\n";
        return 3;
    }
    return 0;
}
