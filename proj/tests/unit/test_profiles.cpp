#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "attmatch/error.hpp"
#include "attmatch/ingest.hpp"
#include "attmatch/profiles.hpp"
#include "attmatch/synth.hpp"

using namespace attmatch;

namespace {

JoinedTable table_from_genres(const std::vector<std::pair<std::string, std::uint32_t>>& rows,
                              std::vector<std::string> vocabulary) {
    JoinedTable table;
    table.genre_vocabulary = std::move(vocabulary);
    table.attribute_names = {"temperature"};
    std::int64_t id = 0;
    for (const auto& [user, genre] : rows) {
        table.events.push_back({id, user, 1000 + id * 60, "p" + std::to_string(id % 5), genre, "x"});
        table.values.push_back(20.0);
        ++id;
    }
    return table;
}

JoinedTable synth_joined(const SynthConfig& config) {
    const SynthDataset dataset = generate(config);
    return join_nearest(dataset.events, dataset.attributes, 3600);
}

}  // namespace

TEST_CASE("genre_frequency_profile: counts divided by the user's total") {
    const JoinedTable table = table_from_genres(
        {{"u1", 0}, {"u1", 0}, {"u1", 1}, {"u1", 2}, {"u2", 3}},
        {"Dramas", "News", "Kids", "Sports"});
    const std::vector<double> profile = genre_frequency_profile(table, "u1");
    CHECK(profile == std::vector<double>{0.5, 0.25, 0.25, 0.0});

    const std::vector<double> single = genre_frequency_profile(table, "u2");
    CHECK(single == std::vector<double>{0.0, 0.0, 0.0, 1.0});

    CHECK_THROWS_AS(genre_frequency_profile(table, "nobody"), Error);
}

TEST_CASE("genre_frequency_profile matches a direct counting oracle on a random history") {
    std::mt19937 rng(11);
    const std::vector<std::string> vocabulary = {"a", "b", "c", "d", "e", "f"};
    std::vector<std::pair<std::string, std::uint32_t>> rows;
    std::map<std::uint32_t, std::size_t> counts;
    for (int i = 0; i < 1000; ++i) {
        const auto genre = static_cast<std::uint32_t>(rng() % vocabulary.size());
        rows.emplace_back("user", genre);
        ++counts[genre];
    }
    const JoinedTable table = table_from_genres(rows, vocabulary);
    const std::vector<double> profile = genre_frequency_profile(table, "user");

    double sum = 0;
    for (std::size_t g = 0; g < vocabulary.size(); ++g) {
        const double expected = static_cast<double>(counts[static_cast<std::uint32_t>(g)]) / 1000.0;
        CHECK(profile[g] == expected);
        CHECK(profile[g] >= 0);
        sum += profile[g];
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
}

TEST_CASE("build_interaction_matrix binarizes repeat views") {
    JoinedTable table;
    table.genre_vocabulary = {"Dramas"};
    table.attribute_names = {"temperature"};
    for (std::int64_t i = 0; i < 5; ++i) {
        table.events.push_back({i, "solo", 100 + i, "same_show", 0, "x"});
        table.values.push_back(1.0);
    }
    const InteractionMatrix m = build_interaction_matrix(table);
    CHECK(m.entries.rows() == 1);
    CHECK(m.entries.cols() == 1);
    CHECK(m.entries(0, 0) == 1.0);
}

TEST_CASE("build_interaction_matrix: disjoint users give an identity pattern") {
    const JoinedTable table = table_from_genres({{"u1", 0}, {"u2", 1}}, {"a", "b"});
    // table_from_genres assigns distinct programs p0, p1 here.
    const InteractionMatrix m = build_interaction_matrix(table);
    REQUIRE(m.entries.rows() == 2);
    REQUIRE(m.entries.cols() == 2);
    CHECK(m.entries(0, 0) == 1.0);
    CHECK(m.entries(1, 1) == 1.0);
    CHECK(m.entries(0, 1) == 0.0);
    CHECK(m.entries(1, 0) == 0.0);
}

TEST_CASE("build_interaction_matrix equals a set-of-pairs oracle on a random log") {
    std::mt19937 rng(23);
    JoinedTable table;
    table.genre_vocabulary = {"g"};
    table.attribute_names = {"temperature"};
    std::set<std::pair<std::string, std::string>> watched;
    for (std::int64_t i = 0; i < 500; ++i) {
        const std::string user = "u" + std::to_string(rng() % 17);
        const std::string program = "p" + std::to_string(rng() % 29);
        table.events.push_back({i, user, 1000 + i, program, 0, "x"});
        table.values.push_back(0.0);
        watched.emplace(user, program);
    }
    const InteractionMatrix m = build_interaction_matrix(table);
    std::size_t ones = 0;
    for (std::size_t u = 0; u < m.entries.rows(); ++u) {
        for (std::size_t p = 0; p < m.entries.cols(); ++p) {
            const bool expected = watched.count({m.users[u], m.programs[p]}) > 0;
            CHECK(m.entries(u, p) == (expected ? 1.0 : 0.0));
            ones += m.entries(u, p) == 1.0;
        }
    }
    CHECK(ones == watched.size());
}

TEST_CASE("time_features: local midnight Monday is phase zero on both circles") {
    // 1970-01-05 was a Monday.
    const std::int64_t monday = 4 * 86400;
    const auto f = time_features(monday, 0);
    CHECK(f[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(f[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f[2] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(f[3] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("time_features: 06:00 local is a quarter hour-phase") {
    const auto f = time_features(6 * 3600, 0);
    CHECK(f[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(f[1]) < 1e-12);

    // The utc offset moves local time: 06:00 UTC at +6h offset is local noon.
    const auto shifted = time_features(6 * 3600, 6 * 3600);
    CHECK(std::abs(shifted[0]) < 1e-12);
    CHECK(shifted[1] == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("time_features always lands on two unit circles") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        const auto ts = static_cast<std::int64_t>(rng() % 4000000000LL) - 1000000000;
        const auto offset = static_cast<std::int64_t>(rng() % 100000) - 50000;
        const auto f = time_features(ts, offset);
        const double norm = std::sqrt(f[0] * f[0] + f[1] * f[1] + f[2] * f[2] + f[3] * f[3]);
        CHECK(norm == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
        const double hour_norm = f[0] * f[0] + f[1] * f[1];
        CHECK(hour_norm == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("assemble_covariates: genre-frequency dimension is genres + 4") {
    SynthConfig config;
    config.n_users = 20;
    config.n_programs = 30;
    config.n_events = 400;
    config.n_genres = 14;
    config.seed = 3;
    const JoinedTable joined = synth_joined(config);
    const CovariateTable covariates =
        assemble_covariates(joined, ProfileKind::GenreFrequency, 16, 0);
    CHECK(covariates.dim == 18);
    CHECK(covariates.schema.size() == 18);
    CHECK(covariates.schema.front() == "genre_freq:Dramas");
    CHECK(covariates.schema.back() == "time:dow_cos");
    CHECK(covariates.size() == joined.size());
}

TEST_CASE("assemble_covariates: latent profile with rank 16 gives dimension 20") {
    SynthConfig config;
    config.n_users = 40;
    config.n_programs = 30;
    config.n_events = 1200;
    config.n_genres = 14;
    config.seed = 4;
    const JoinedTable joined = synth_joined(config);
    const CovariateTable covariates = assemble_covariates(joined, ProfileKind::Latent, 16, 0);
    CHECK(covariates.dim == 20);
    CHECK(covariates.schema.front() == "latent:0");
}

TEST_CASE("assemble_covariates standardizes every non-constant dimension") {
    SynthConfig config;
    config.n_users = 25;
    config.n_programs = 30;
    config.n_events = 600;
    config.n_genres = 8;
    config.seed = 9;
    const JoinedTable joined = synth_joined(config);
    for (ProfileKind kind : {ProfileKind::GenreFrequency, ProfileKind::Latent}) {
        const CovariateTable covariates = assemble_covariates(joined, kind, 8, 0);
        const std::size_t n = covariates.size();
        for (std::size_t d = 0; d < covariates.dim; ++d) {
            double mean = 0;
            for (std::size_t i = 0; i < n; ++i) mean += covariates.data[i * covariates.dim + d];
            mean /= static_cast<double>(n);
            double variance = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const double c = covariates.data[i * covariates.dim + d] - mean;
                variance += c * c;
            }
            variance /= static_cast<double>(n);
            CHECK(std::abs(mean) < 1e-9);
            if (variance > 0) CHECK(std::abs(variance - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("assemble_covariates is deterministic") {
    SynthConfig config;
    config.n_users = 15;
    config.n_programs = 20;
    config.n_events = 300;
    config.n_genres = 6;
    config.seed = 12;
    const JoinedTable joined = synth_joined(config);
    const CovariateTable a = assemble_covariates(joined, ProfileKind::Latent, 6, 36000);
    const CovariateTable b = assemble_covariates(joined, ProfileKind::Latent, 6, 36000);
    CHECK(a.data == b.data);
    CHECK(a.schema == b.schema);
}
