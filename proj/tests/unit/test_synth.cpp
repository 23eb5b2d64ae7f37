#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "attmatch/error.hpp"
#include "attmatch/ingest.hpp"
#include "attmatch/io.hpp"
#include "attmatch/stats.hpp"
#include "attmatch/synth.hpp"

using namespace attmatch;

namespace {

bool same_events(const EventTable& a, const EventTable& b) {
    if (a.events.size() != b.events.size()) return false;
    for (std::size_t i = 0; i < a.events.size(); ++i) {
        const Event& x = a.events[i];
        const Event& y = b.events[i];
        if (x.event_id != y.event_id || x.user_id != y.user_id || x.timestamp != y.timestamp ||
            x.program_id != y.program_id || x.genre != y.genre || x.location_id != y.location_id) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("generate is bit-reproducible for a fixed seed") {
    SynthConfig config;
    config.n_users = 40;
    config.n_programs = 30;
    config.n_events = 2000;
    config.n_genres = 8;
    config.confounding_strength = 0.7;
    config.planted_effects = {{"pressure", "Dramas", 0.04}};
    config.seed = 123;

    const SynthDataset a = generate(config);
    const SynthDataset b = generate(config);
    CHECK(same_events(a.events, b.events));
    REQUIRE(a.attributes.records.size() == b.attributes.records.size());
    for (std::size_t i = 0; i < a.attributes.records.size(); ++i) {
        CHECK(a.attributes.records[i].values == b.attributes.records[i].values);
    }

    config.seed = 124;
    const SynthDataset c = generate(config);
    CHECK_FALSE(same_events(a.events, c.events));
}

TEST_CASE("generated files round-trip through ingest with zero drops") {
    SynthConfig config;
    config.n_users = 30;
    config.n_programs = 25;
    config.n_events = 1500;
    config.n_genres = 6;
    config.seed = 9;
    const SynthDataset dataset = generate(config);

    const auto dir = std::filesystem::temp_directory_path() / "attmatch_synth_roundtrip";
    std::filesystem::remove_all(dir);
    const SynthPaths paths = write_dataset(dataset, dir);

    const EventTable events = parse_events_file(paths.events, dataset.events.genre_vocabulary);
    const AttributeTable attributes =
        parse_attributes_file(paths.attributes, dataset.attributes.attribute_names);
    CHECK(events.events.size() == config.n_events);
    CHECK(attributes.records.size() == config.n_events);

    const JoinedTable joined = join_nearest(events, attributes, 7 * 86400);
    CHECK(joined.dropped == 0);
    REQUIRE(joined.size() == config.n_events);

    // The join must recover each event's own generated record exactly; the
    // formatter guarantees the values survive the text round trip bit for bit.
    for (std::size_t i = 0; i < joined.size(); ++i) {
        const auto row = joined.row_values(i);
        const auto& original = dataset.attributes.records[i].values;
        for (std::size_t a = 0; a < row.size(); ++a) CHECK(row[a] == original[a]);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("empty planted_effects means an all-zero ground truth") {
    SynthConfig config;
    config.n_users = 10;
    config.n_programs = 12;
    config.n_events = 200;
    config.n_genres = 4;
    config.seed = 2;
    const SynthDataset dataset = generate(config);
    CHECK(dataset.truth.true_att.empty());
}

TEST_CASE("ground truth keys mirror the planted effects") {
    SynthConfig config;
    config.n_users = 20;
    config.n_programs = 16;
    config.n_events = 800;
    config.n_genres = 8;
    config.planted_effects = {{"pressure", "Dramas", 0.05}, {"temperature", "News", 0.03}};
    config.seed = 5;
    const SynthDataset dataset = generate(config);
    REQUIRE(dataset.truth.true_att.size() == 2);
    CHECK(dataset.truth.true_att[0].attribute == "pressure");
    CHECK(dataset.truth.true_att[0].genre == "Dramas");
    CHECK(dataset.truth.true_att[0].tau == 0.05);
    CHECK(dataset.truth.true_att[1].attribute == "temperature");
}

TEST_CASE("naive_difference agrees with a direct two-group oracle") {
    SynthConfig config;
    config.n_users = 25;
    config.n_programs = 20;
    config.n_events = 3000;
    config.n_genres = 5;
    config.confounding_strength = 0.8;
    config.seed = 31;
    const SynthDataset dataset = generate(config);
    const JoinedTable joined = join_nearest(dataset.events, dataset.attributes, 3600);

    const std::vector<double> values = joined.attribute_column(0);
    const TreatmentAssignment assignment = assign(values, joined.event_ids(), default_specs()[0]);

    for (std::uint32_t genre = 0; genre < 5; ++genre) {
        double treated_hits = 0, control_hits = 0;
        for (std::size_t row : assignment.treated_rows) {
            treated_hits += joined.events[row].genre == genre;
        }
        for (std::size_t row : assignment.control_rows) {
            control_hits += joined.events[row].genre == genre;
        }
        const double expected = treated_hits / double(assignment.treated_rows.size()) -
                                control_hits / double(assignment.control_rows.size());
        CHECK(naive_difference(joined, assignment, genre) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("naive_difference under extreme separation reaches 1") {
    JoinedTable joined;
    joined.genre_vocabulary = {"a", "b"};
    joined.attribute_names = {"temperature"};
    TreatmentAssignment assignment;
    for (std::int64_t i = 0; i < 10; ++i) {
        const bool treated = i < 2;
        joined.events.push_back({i, "u", 100 + i, "p", treated ? 0u : 1u, "x"});
        joined.values.push_back(0.0);
        (treated ? assignment.treated_rows : assignment.control_rows).push_back(i);
    }
    assignment.n_treated = 2;
    CHECK(naive_difference(joined, assignment, 0) == 1.0);
    CHECK(naive_difference(joined, assignment, 1) == -1.0);
}

TEST_CASE("validate rejects infeasible planted probabilities") {
    SynthConfig config;
    config.n_users = 10;
    config.n_programs = 12;
    config.n_events = 500;
    config.n_genres = 4;

    config.planted_effects = {{"pressure", "Dramas", 0.95}};
    CHECK_THROWS_WITH_AS(validate(config), doctest::Contains("infeasible"), Error);

    config.planted_effects = {{"pressure", "Dramas", -0.9}};
    CHECK_THROWS_WITH_AS(validate(config), doctest::Contains("infeasible"), Error);

    config.planted_effects = {{"sunbeam", "Dramas", 0.01}};
    CHECK_THROWS_AS(validate(config), Error);
    config.planted_effects = {{"pressure", "NoSuchGenre", 0.01}};
    CHECK_THROWS_AS(validate(config), Error);

    config.planted_effects = {{"pressure", "Dramas", 0.05}};
    CHECK_NOTHROW(validate(config));
}

TEST_CASE("validate guards the counts") {
    SynthConfig config;
    config.n_users = 1;
    CHECK_THROWS_AS(validate(config), Error);
    config.n_users = 10;
    config.n_programs = 3;
    config.n_genres = 8;
    CHECK_THROWS_AS(validate(config), Error);
    config.n_programs = 30;
    config.n_events = 0;
    CHECK_THROWS_AS(validate(config), Error);
    config.n_events = 100000000;  // more than the distinct timestamps available
    CHECK_THROWS_AS(validate(config), Error);
}

TEST_CASE("with no confounding the matched and naive estimates agree on a planted cell") {
    SynthConfig config;
    config.n_users = 80;
    config.n_programs = 40;
    config.n_events = 12000;
    config.n_genres = 6;
    config.n_locations = 3;
    config.planted_effects = {{"pressure", "News", 0.08}};
    config.seed = 71;
    const SynthDataset dataset = generate(config);
    const JoinedTable joined = join_nearest(dataset.events, dataset.attributes, 3600);
    const CovariateTable covariates = assemble_covariates(joined, ProfileKind::GenreFrequency, 16, 0);

    const TreatmentSpec spec = default_specs()[4];  // pressure, low tail
    REQUIRE(spec.attribute == "pressure");
    const TreatmentRun run = run_treatment(joined, covariates, spec, 2);
    const std::vector<double> diffs = paired_differences(joined, run, 1);  // News
    const double matched = att(diffs);
    const double se = std_error(diffs);
    const double naive = naive_difference(joined, run.assignment, 1);

    CHECK(std::abs(matched - 0.08) <= 3 * se);
    CHECK(std::abs(naive - matched) <= 4 * se);  // both unbiased without confounding

    // The planted cell stands out of the heatmap with the right sign.
    const Heatmap heatmap = build_heatmap(joined, covariates, default_specs(), {2.0, 2});
    const AttReport& cell = heatmap.cell(4, 1);
    REQUIRE(cell.treatment == "pressure");
    REQUIRE(cell.genre == "News");
    CHECK(cell.significant);
    CHECK(cell.att > 0);
    CHECK(cell.z >= 2.0);
}
