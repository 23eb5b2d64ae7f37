#include "attmatch/profiles.hpp"

#include <cmath>
#include <numbers>

#include "attmatch/error.hpp"
#include "attmatch/svd.hpp"

namespace attmatch {

std::string_view to_string(ProfileKind kind) {
    return kind == ProfileKind::GenreFrequency ? "genre-frequency" : "latent";
}

ProfileKind profile_kind_from_string(std::string_view name) {
    if (name == "genre-frequency") return ProfileKind::GenreFrequency;
    if (name == "latent") return ProfileKind::Latent;
    throw Error("unknown profile kind '" + std::string(name) +
                "' (expected 'genre-frequency' or 'latent')");
}

std::vector<double> genre_frequency_profile(const JoinedTable& table, std::string_view user_id) {
    std::vector<double> counts(table.genre_vocabulary.size(), 0.0);
    std::size_t total = 0;
    for (const Event& event : table.events) {
        if (event.user_id == user_id) {
            counts[event.genre] += 1.0;
            ++total;
        }
    }
    if (total == 0) throw Error("user '" + std::string(user_id) + "' has no events");
    for (double& c : counts) c /= static_cast<double>(total);
    return counts;
}

InteractionMatrix build_interaction_matrix(const JoinedTable& table) {
    if (table.events.empty()) throw Error("cannot build interaction matrix from an empty table");

    InteractionMatrix m;
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    cells.reserve(table.events.size());
    for (const Event& event : table.events) {
        auto [user_it, user_new] = m.user_index.try_emplace(event.user_id, m.users.size());
        if (user_new) m.users.push_back(event.user_id);
        auto [prog_it, prog_new] = m.program_index.try_emplace(event.program_id, m.programs.size());
        if (prog_new) m.programs.push_back(event.program_id);
        cells.emplace_back(user_it->second, prog_it->second);
    }
    m.entries = Matrix(m.users.size(), m.programs.size());
    for (auto [u, p] : cells) m.entries(u, p) = 1.0;
    return m;
}

std::array<double, 4> time_features(std::int64_t timestamp, std::int64_t utc_offset_seconds) {
    constexpr std::int64_t kDay = 86400;
    const std::int64_t local = timestamp + utc_offset_seconds;
    // Floor division so pre-epoch timestamps keep a well-defined phase.
    std::int64_t days = local / kDay;
    std::int64_t second_of_day = local % kDay;
    if (second_of_day < 0) {
        second_of_day += kDay;
        --days;
    }
    // 1970-01-01 was a Thursday; anchor the week phase at Monday midnight.
    const std::int64_t day_of_week = ((days + 3) % 7 + 7) % 7;

    const double hour_phase = 2.0 * std::numbers::pi * static_cast<double>(second_of_day) / kDay;
    const double week_phase = 2.0 * std::numbers::pi *
                              (static_cast<double>(day_of_week) + static_cast<double>(second_of_day) / kDay) / 7.0;
    return {std::sin(hour_phase), std::cos(hour_phase), std::sin(week_phase), std::cos(week_phase)};
}

namespace {

void standardize_columns(CovariateTable& table) {
    const std::size_t n = table.size();
    if (n == 0) return;
    for (std::size_t d = 0; d < table.dim; ++d) {
        double mean = 0;
        for (std::size_t i = 0; i < n; ++i) mean += table.data[i * table.dim + d];
        mean /= static_cast<double>(n);
        double variance = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double centered = table.data[i * table.dim + d] - mean;
            variance += centered * centered;
        }
        variance /= static_cast<double>(n);
        if (variance > 0) {
            const double inv_sd = 1.0 / std::sqrt(variance);
            for (std::size_t i = 0; i < n; ++i) {
                double& x = table.data[i * table.dim + d];
                x = (x - mean) * inv_sd;
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) table.data[i * table.dim + d] = 0.0;
        }
    }
}

}  // namespace

CovariateTable assemble_covariates(const JoinedTable& table, ProfileKind kind,
                                   std::size_t svd_rank, std::int64_t utc_offset_seconds) {
    if (table.events.empty()) throw Error("cannot assemble covariates from an empty table");

    // Per-user profile rows, indexed by first appearance.
    std::unordered_map<std::string, std::size_t> user_rows;
    Matrix profiles;

    if (kind == ProfileKind::GenreFrequency) {
        const std::size_t n_genres = table.genre_vocabulary.size();
        std::vector<std::size_t> totals;
        std::vector<std::size_t> event_user(table.events.size());
        for (std::size_t i = 0; i < table.events.size(); ++i) {
            auto [it, inserted] = user_rows.try_emplace(table.events[i].user_id, user_rows.size());
            if (inserted) totals.push_back(0);
            event_user[i] = it->second;
        }
        profiles = Matrix(user_rows.size(), n_genres);
        for (std::size_t i = 0; i < table.events.size(); ++i) {
            profiles(event_user[i], table.events[i].genre) += 1.0;
            ++totals[event_user[i]];
        }
        for (std::size_t u = 0; u < profiles.rows(); ++u) {
            for (std::size_t g = 0; g < n_genres; ++g) profiles(u, g) /= static_cast<double>(totals[u]);
        }
    } else {
        InteractionMatrix m = build_interaction_matrix(table);
        TruncatedSvd svd = truncated_svd(m.entries, svd_rank);
        profiles = svd.scaled_factors();
        user_rows = std::move(m.user_index);
    }

    CovariateTable covariates;
    covariates.dim = profiles.cols() + 4;
    covariates.data.resize(table.events.size() * covariates.dim);
    covariates.event_ids = table.event_ids();

    covariates.schema.reserve(covariates.dim);
    if (kind == ProfileKind::GenreFrequency) {
        for (const auto& genre : table.genre_vocabulary) covariates.schema.push_back("genre_freq:" + genre);
    } else {
        for (std::size_t k = 0; k < profiles.cols(); ++k)
            covariates.schema.push_back("latent:" + std::to_string(k));
    }
    covariates.schema.insert(covariates.schema.end(),
                             {"time:hour_sin", "time:hour_cos", "time:dow_sin", "time:dow_cos"});

    for (std::size_t i = 0; i < table.events.size(); ++i) {
        const Event& event = table.events[i];
        double* out = covariates.data.data() + i * covariates.dim;
        const auto profile = profiles.row(user_rows.at(event.user_id));
        std::copy(profile.begin(), profile.end(), out);
        const auto time = time_features(event.timestamp, utc_offset_seconds);
        std::copy(time.begin(), time.end(), out + profile.size());
    }

    standardize_columns(covariates);
    return covariates;
}

}  // namespace attmatch
