#include "attmatch/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <unordered_set>

#include "attmatch/csv.hpp"
#include "attmatch/error.hpp"
#include "attmatch/io.hpp"
#include "attmatch/rng.hpp"

namespace attmatch {

namespace {

// 2012-02-01 00:00:00 UTC, start of a 26-week window.
constexpr std::int64_t kEpochStart = 1328054400;
constexpr std::int64_t kDurationSeconds = 26LL * 7 * 86400;
constexpr std::size_t kTasteRank = 4;       // latent preference dimensions
constexpr double kProgramAffinity = 1.5;    // sharpness of program choice
constexpr double kGenreWeightScale = 0.4;   // taste -> genre logit loading
constexpr double kConfoundAttributeScale = 0.8;  // in units of attribute sd
constexpr double kPlantedQuantile = 0.2;

struct AttributeModel {
    double base;
    double sd;
    double diurnal_amplitude;
    double min = -1e30;
    double max = 1e30;
};

const AttributeModel& attribute_model(std::size_t a) {
    static const AttributeModel models[8] = {
        {18.0, 7.0, 3.0},                 // temperature
        {17.0, 7.5, 3.0},                 // feels_like
        {14.0, 6.0, 1.0, 0.0},            // wind_speed
        {50.0, 25.0, 5.0, 0.0, 100.0},    // cloud_cover
        {1015.0, 7.0, 1.0},               // pressure
        {60.0, 18.0, 4.0, 0.0, 100.0},    // humidity
        {10.0, 3.0, 0.5, 0.0},            // visibility
        {2.0, 2.5, 0.5, 0.0},             // precipitation
    };
    return models[a];
}

double base_genre_logit(std::size_t g, std::size_t n_genres) {
    if (n_genres == 1) return 0;
    return 0.9 - 1.8 * static_cast<double>(g) / static_cast<double>(n_genres - 1);
}

// Fixed taste -> genre loading pattern; bounded by kGenreWeightScale.
double genre_weight(std::size_t k, std::size_t g, std::size_t n_genres) {
    return kGenreWeightScale *
           std::cos(2.0 * std::numbers::pi * static_cast<double>((k + 1) * (g + 1)) /
                        static_cast<double>(n_genres) +
                    static_cast<double>(k));
}

// Confounder -> genre loading: +1 for the first genre down to -1 for the last.
double confound_genre_loading(std::size_t g, std::size_t n_genres) {
    if (n_genres == 1) return 0;
    return 1.0 - 2.0 * static_cast<double>(g) / static_cast<double>(n_genres - 1);
}

std::vector<std::string> synth_genre_names(std::size_t n_genres) {
    std::vector<std::string> names;
    names.reserve(n_genres);
    const auto& defaults = default_genre_vocabulary();
    for (std::size_t g = 0; g < n_genres; ++g) {
        if (g < defaults.size()) {
            names.push_back(defaults[g]);
        } else {
            names.push_back("Genre" + std::to_string(g + 1));
        }
    }
    return names;
}

std::string padded_id(const char* prefix, std::size_t value, std::size_t width) {
    std::string digits = std::to_string(value);
    std::string id = prefix;
    if (digits.size() < width) id.append(width - digits.size(), '0');
    id += digits;
    return id;
}

/// Worst-case genre probability bounds over every reachable preference
/// vector, used to validate planted effects before anything is drawn.
struct GenreBounds {
    std::vector<double> q_min;
    std::vector<double> q_max;
};

GenreBounds genre_probability_bounds(const SynthConfig& config) {
    const std::size_t n = config.n_genres;
    std::vector<double> logit_min(n), logit_max(n);
    for (std::size_t g = 0; g < n; ++g) {
        double spread = 0;
        for (std::size_t k = 0; k < kTasteRank; ++k) spread += std::abs(genre_weight(k, g, n));
        spread += config.confounding_strength * std::abs(confound_genre_loading(g, n));
        const double base = base_genre_logit(g, n);
        logit_min[g] = base - spread;
        logit_max[g] = base + spread;
    }
    GenreBounds bounds;
    bounds.q_min.resize(n);
    bounds.q_max.resize(n);
    for (std::size_t g = 0; g < n; ++g) {
        double rivals_max = 0, rivals_min = 0;
        for (std::size_t h = 0; h < n; ++h) {
            if (h == g) continue;
            rivals_max += std::exp(logit_max[h]);
            rivals_min += std::exp(logit_min[h]);
        }
        bounds.q_max[g] = std::exp(logit_max[g]) / (std::exp(logit_max[g]) + rivals_min);
        bounds.q_min[g] = std::exp(logit_min[g]) / (std::exp(logit_min[g]) + rivals_max);
    }
    return bounds;
}

struct EffectGroup {
    std::size_t attribute = 0;
    std::vector<std::size_t> genres;
    std::vector<double> taus;
};

std::vector<EffectGroup> group_effects(const SynthConfig& config,
                                       const std::vector<std::string>& genre_names) {
    const auto& attribute_names = default_attribute_names();
    std::vector<EffectGroup> groups;
    for (const PlantedEffect& effect : config.planted_effects) {
        const auto attr_it = std::find(attribute_names.begin(), attribute_names.end(), effect.attribute);
        if (attr_it == attribute_names.end()) {
            throw Error("planted effect names unknown attribute '" + effect.attribute + "'");
        }
        const auto genre_it = std::find(genre_names.begin(), genre_names.end(), effect.genre);
        if (genre_it == genre_names.end()) {
            throw Error("planted effect names unknown genre '" + effect.genre + "'");
        }
        const std::size_t attribute = static_cast<std::size_t>(attr_it - attribute_names.begin());
        auto group = std::find_if(groups.begin(), groups.end(),
                                  [&](const EffectGroup& g) { return g.attribute == attribute; });
        if (group == groups.end()) {
            groups.push_back({attribute, {}, {}});
            group = groups.end() - 1;
        }
        const std::size_t genre = static_cast<std::size_t>(genre_it - genre_names.begin());
        if (std::find(group->genres.begin(), group->genres.end(), genre) != group->genres.end()) {
            throw Error("duplicate planted effect on (" + effect.attribute + ", " + effect.genre + ")");
        }
        group->genres.push_back(genre);
        group->taus.push_back(effect.tau);
    }
    return groups;
}

}  // namespace

void validate(const SynthConfig& config) {
    if (config.n_users < 2) throw Error("synth: n_users must be at least 2");
    if (config.n_genres < 2) throw Error("synth: n_genres must be at least 2");
    if (config.n_programs < config.n_genres) {
        throw Error("synth: n_programs must be at least n_genres so every genre has a program");
    }
    if (config.n_locations < 1) throw Error("synth: n_locations must be positive");
    if (config.n_events < 1) throw Error("synth: n_events must be positive");
    if (config.n_events > static_cast<std::size_t>(kDurationSeconds / 2)) {
        throw Error("synth: n_events exceeds the distinct timestamps available");
    }
    if (config.confounding_strength < 0) throw Error("synth: confounding_strength must be >= 0");

    const std::vector<std::string> genre_names = synth_genre_names(config.n_genres);
    const std::vector<EffectGroup> groups = group_effects(config, genre_names);
    if (!groups.empty() && config.n_events < 5) {
        throw Error("synth: planted effects need at least 5 events for a 20% tail");
    }

    const GenreBounds bounds = genre_probability_bounds(config);

    // Headroom: the adjusted probability mass of each attribute's planted
    // genres must stay below 1 for every reachable preference.
    std::vector<double> group_mass(groups.size(), 0.0);
    for (std::size_t i = 0; i < groups.size(); ++i) {
        double mass = 0;
        for (std::size_t j = 0; j < groups[i].genres.size(); ++j) {
            mass += bounds.q_max[groups[i].genres[j]] + groups[i].taus[j];
        }
        group_mass[i] = mass;
        if (mass > 1.0 - 1e-9) {
            throw Error("synth: planted effects on attribute '" +
                        default_attribute_names()[groups[i].attribute] +
                        "' can push genre probabilities past 1 (infeasible config)");
        }
    }

    // Floor: a negative tau must not push a genre below 0 even after other
    // attribute groups have rescaled it down.
    for (std::size_t i = 0; i < groups.size(); ++i) {
        double shrink = 1.0;
        for (std::size_t other = 0; other < groups.size(); ++other) {
            if (other != i) shrink *= std::max(0.0, 1.0 - group_mass[other]);
        }
        for (std::size_t j = 0; j < groups[i].genres.size(); ++j) {
            const double tau = groups[i].taus[j];
            if (tau < 0 && bounds.q_min[groups[i].genres[j]] * shrink + tau < 1e-9) {
                throw Error("synth: negative effect on genre '" + genre_names[groups[i].genres[j]] +
                            "' can push its probability below 0 (infeasible config)");
            }
        }
    }
}

SynthDataset generate(const SynthConfig& config) {
    validate(config);
    Rng rng(config.seed);

    const std::size_t n_genres = config.n_genres;
    const std::vector<std::string> genre_names = synth_genre_names(n_genres);
    const std::vector<EffectGroup> effect_groups = group_effects(config, genre_names);
    const auto& attribute_names = default_attribute_names();
    const std::size_t n_attributes = attribute_names.size();

    // Users: latent taste, genre probabilities and a home location. The first
    // taste dimension doubles as the confounder.
    std::vector<std::array<double, kTasteRank>> taste(config.n_users);
    std::vector<std::vector<double>> genre_probs(config.n_users);
    std::vector<std::size_t> home_location(config.n_users);
    for (std::size_t u = 0; u < config.n_users; ++u) {
        for (std::size_t k = 0; k < kTasteRank; ++k) taste[u][k] = rng.uniform(-1.0, 1.0);
        home_location[u] = static_cast<std::size_t>(rng.below(config.n_locations));
        std::vector<double> logits(n_genres);
        double max_logit = -1e300;
        for (std::size_t g = 0; g < n_genres; ++g) {
            double logit = base_genre_logit(g, n_genres);
            for (std::size_t k = 0; k < kTasteRank; ++k) logit += taste[u][k] * genre_weight(k, g, n_genres);
            logit += config.confounding_strength * taste[u][0] * confound_genre_loading(g, n_genres);
            logits[g] = logit;
            max_logit = std::max(max_logit, logit);
        }
        double total = 0;
        for (double& l : logits) {
            l = std::exp(l - max_logit);
            total += l;
        }
        for (double& l : logits) l /= total;
        genre_probs[u] = std::move(logits);
    }

    // Programs: a latent position and a fixed genre.
    std::vector<std::array<double, kTasteRank>> program_position(config.n_programs);
    std::vector<std::vector<std::size_t>> programs_by_genre(n_genres);
    for (std::size_t p = 0; p < config.n_programs; ++p) {
        for (std::size_t k = 0; k < kTasteRank; ++k) program_position[p][k] = rng.uniform(-1.0, 1.0);
        programs_by_genre[p % n_genres].push_back(p);
    }

    // Events: user and a globally unique timestamp.
    std::vector<std::size_t> event_user(config.n_events);
    std::vector<std::int64_t> event_ts(config.n_events);
    std::unordered_set<std::int64_t> used_ts;
    used_ts.reserve(config.n_events * 2);
    for (std::size_t i = 0; i < config.n_events; ++i) {
        event_user[i] = static_cast<std::size_t>(rng.below(config.n_users));
        std::int64_t ts = kEpochStart + static_cast<std::int64_t>(rng.below(kDurationSeconds));
        while (!used_ts.insert(ts).second) {
            ts = kEpochStart + static_cast<std::int64_t>(rng.below(kDurationSeconds));
        }
        event_ts[i] = ts;
    }

    // event_id = rank in time order.
    std::vector<std::size_t> order(config.n_events);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return event_ts[a] < event_ts[b]; });
    std::vector<std::size_t> user_of(config.n_events);
    std::vector<std::int64_t> ts_of(config.n_events);
    for (std::size_t id = 0; id < config.n_events; ++id) {
        user_of[id] = event_user[order[id]];
        ts_of[id] = event_ts[order[id]];
    }

    // Attribute values per event, confounded by the user's first taste
    // dimension when configured.
    std::vector<double> values(config.n_events * n_attributes);
    for (std::size_t id = 0; id < config.n_events; ++id) {
        const double confounder = taste[user_of[id]][0];
        const double hour_phase =
            2.0 * std::numbers::pi * static_cast<double>(ts_of[id] % 86400) / 86400.0;
        const std::size_t location = home_location[user_of[id]];
        for (std::size_t a = 0; a < n_attributes; ++a) {
            const AttributeModel& model = attribute_model(a);
            double value = model.base;
            value += model.diurnal_amplitude * std::sin(hour_phase + 0.7 * static_cast<double>(a));
            value += 0.2 * model.sd *
                     (static_cast<double>(location) - 0.5 * static_cast<double>(config.n_locations - 1));
            value += config.confounding_strength * confounder * kConfoundAttributeScale * model.sd;
            value += model.sd * rng.normal();
            values[id * n_attributes + a] = std::clamp(value, model.min, model.max);
        }
    }

    // Treated tails for planted attributes, decided with the same quantile
    // rule the analysis applies. tail_mask[group][id] = event is in the tail.
    std::vector<std::int64_t> ids(config.n_events);
    std::iota(ids.begin(), ids.end(), 0);
    std::vector<std::vector<std::uint8_t>> tail_mask;
    const std::vector<TreatmentSpec> specs = default_specs();
    for (const EffectGroup& group : effect_groups) {
        std::vector<double> column(config.n_events);
        for (std::size_t id = 0; id < config.n_events; ++id) {
            column[id] = values[id * n_attributes + group.attribute];
        }
        TreatmentSpec spec = specs[group.attribute];
        spec.quantile = kPlantedQuantile;
        const TreatmentAssignment assignment = assign(column, ids, spec);
        tail_mask.push_back(assignment.treated);
    }

    // Genre and program choices.
    SynthDataset dataset;
    dataset.events.genre_vocabulary = genre_names;
    dataset.events.events.resize(config.n_events);
    dataset.attributes.attribute_names = attribute_names;
    dataset.attributes.records.resize(config.n_events);

    std::vector<double> adjusted;
    std::vector<double> originals;
    std::vector<double> program_weights;
    const std::size_t location_width = std::to_string(config.n_locations).size();
    const std::size_t user_width = std::to_string(config.n_users).size();
    const std::size_t program_width = std::to_string(config.n_programs).size();

    for (std::size_t id = 0; id < config.n_events; ++id) {
        const std::size_t u = user_of[id];
        adjusted = genre_probs[u];
        for (std::size_t gi = 0; gi < effect_groups.size(); ++gi) {
            if (!tail_mask[gi][id]) continue;
            const EffectGroup& group = effect_groups[gi];
            double planted_before = 0, planted_after = 0;
            originals.resize(group.genres.size());
            for (std::size_t j = 0; j < group.genres.size(); ++j) {
                originals[j] = adjusted[group.genres[j]];
                planted_before += originals[j];
                planted_after += originals[j] + group.taus[j];
            }
            // Planted genres get exactly q + tau; the rest share the leftover
            // mass in their original proportions.
            const double scale = (1.0 - planted_after) / (1.0 - planted_before);
            if (!(scale > 0) || planted_after >= 1.0) {
                throw Error("synth: planted effect made a genre distribution infeasible");
            }
            for (std::size_t g = 0; g < n_genres; ++g) adjusted[g] *= scale;
            for (std::size_t j = 0; j < group.genres.size(); ++j) {
                adjusted[group.genres[j]] = originals[j] + group.taus[j];
            }
        }
        const std::size_t genre = rng.categorical(adjusted);

        const auto& candidates = programs_by_genre[genre];
        program_weights.resize(candidates.size());
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            double affinity = 0;
            for (std::size_t k = 0; k < kTasteRank; ++k) {
                affinity += taste[u][k] * program_position[candidates[c]][k];
            }
            program_weights[c] = std::exp(kProgramAffinity * affinity);
        }
        const std::size_t program = candidates[rng.categorical(program_weights)];

        Event& event = dataset.events.events[id];
        event.event_id = static_cast<std::int64_t>(id);
        event.user_id = padded_id("u", u + 1, user_width);
        event.timestamp = ts_of[id];
        event.program_id = padded_id("p", program + 1, program_width);
        event.genre = static_cast<std::uint32_t>(genre);
        event.location_id = padded_id("loc", home_location[u] + 1, location_width);

        AttributeRecord& record = dataset.attributes.records[id];
        record.location_id = event.location_id;
        record.timestamp = event.timestamp;
        record.values.assign(values.begin() + static_cast<std::ptrdiff_t>(id * n_attributes),
                             values.begin() + static_cast<std::ptrdiff_t>((id + 1) * n_attributes));
    }

    dataset.truth.true_att = config.planted_effects;
    return dataset;
}

double naive_difference(const JoinedTable& table, const TreatmentAssignment& assignment,
                        std::uint32_t genre) {
    if (assignment.treated_rows.empty() || assignment.control_rows.empty()) {
        throw Error("naive_difference: both groups must be nonempty");
    }
    double treated_mean = 0;
    for (std::size_t row : assignment.treated_rows) {
        treated_mean += static_cast<double>(table.events[row].genre == genre);
    }
    treated_mean /= static_cast<double>(assignment.treated_rows.size());
    double control_mean = 0;
    for (std::size_t row : assignment.control_rows) {
        control_mean += static_cast<double>(table.events[row].genre == genre);
    }
    control_mean /= static_cast<double>(assignment.control_rows.size());
    return treated_mean - control_mean;
}

SynthPaths write_dataset(const SynthDataset& dataset, const std::filesystem::path& directory,
                         char delimiter) {
    std::filesystem::create_directories(directory);
    const std::string d(1, delimiter);

    std::string events = "event_id" + d + "user_id" + d + "timestamp" + d + "program_id" + d +
                         "genre" + d + "location_id\n";
    for (const Event& event : dataset.events.events) {
        events += std::to_string(event.event_id) + d + event.user_id + d +
                  std::to_string(event.timestamp) + d + event.program_id + d +
                  dataset.events.genre_vocabulary[event.genre] + d + event.location_id + "\n";
    }

    std::string attributes = "location_id" + d + "timestamp";
    for (const auto& name : dataset.attributes.attribute_names) attributes += d + name;
    attributes += "\n";
    for (const AttributeRecord& record : dataset.attributes.records) {
        attributes += record.location_id + d + std::to_string(record.timestamp);
        for (double value : record.values) attributes += d + csv::format_double(value);
        attributes += "\n";
    }

    std::string truth = "attribute" + d + "genre" + d + "true_att\n";
    for (const PlantedEffect& effect : dataset.truth.true_att) {
        truth += effect.attribute + d + effect.genre + d + csv::format_double(effect.tau) + "\n";
    }

    SynthPaths paths{directory / "events.csv", directory / "attributes.csv",
                     directory / "ground_truth.csv"};
    write_text_atomic(paths.events, events);
    write_text_atomic(paths.attributes, attributes);
    write_text_atomic(paths.ground_truth, truth);
    return paths;
}

}  // namespace attmatch
