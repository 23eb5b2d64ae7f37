#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "attmatch/error.hpp"
#include "attmatch/ingest.hpp"

using namespace attmatch;

namespace {

const std::vector<std::string> kGenres = {"Dramas", "News", "Kids", "Sports"};
const std::vector<std::string> kAttrs = {"temperature", "pressure"};

EventTable events_from(const std::string& body) {
    std::istringstream in(body);
    return parse_events(in, kGenres);
}

AttributeTable attributes_from(const std::string& body) {
    std::istringstream in(body);
    return parse_attributes(in, kAttrs);
}

}  // namespace

TEST_CASE("parse_events: empty body with a valid header gives an empty table") {
    const EventTable table = events_from("event_id,user_id,timestamp,program_id,genre,location_id\n");
    CHECK(table.events.empty());
    CHECK(table.genre_vocabulary == kGenres);
}

TEST_CASE("parse_events: rows come back in input order with parsed fields") {
    const EventTable table = events_from(
        "event_id,user_id,timestamp,program_id,genre,location_id\n"
        "10,u1,1000,p1,Dramas,syd\n"
        "11,u2,2000,p2,News,mel\n"
        "12,u1,1500,p1,Kids,syd\n");
    REQUIRE(table.events.size() == 3);
    CHECK(table.events[0].event_id == 10);
    CHECK(table.events[1].user_id == "u2");
    CHECK(table.events[2].timestamp == 1500);
    CHECK(table.events[0].genre == 0);
    CHECK(table.events[1].genre == 1);
    CHECK(table.events[2].location_id == "syd");
}

TEST_CASE("parse_events: unknown genre is an error naming the genre and line") {
    try {
        events_from(
            "event_id,user_id,timestamp,program_id,genre,location_id\n"
            "1,u1,1000,p1,Dramas,syd\n"
            "2,u1,1100,p2,Sportsz,syd\n");
        FAIL("expected Error");
    } catch (const Error& e) {
        const std::string message = e.what();
        CHECK(message.find("Sportsz") != std::string::npos);
        CHECK(message.find("line 3") != std::string::npos);
    }
}

TEST_CASE("parse_events: malformed rows carry their line number") {
    CHECK_THROWS_WITH_AS(events_from("event_id,user_id,timestamp,program_id,genre,location_id\n"
                                     "1,u1,1000,p1,Dramas\n"),
                         doctest::Contains("line 2"), Error);
    CHECK_THROWS_WITH_AS(events_from("event_id,user_id,timestamp,program_id,genre,location_id\n"
                                     "1,u1,not_a_time,p1,Dramas,syd\n"),
                         doctest::Contains("timestamp"), Error);
}

TEST_CASE("parse_events: missing required column is named") {
    CHECK_THROWS_WITH_AS(events_from("event_id,user_id,timestamp,program_id,genre\n"),
                         doctest::Contains("location_id"), Error);
}

TEST_CASE("parse_events: header columns may come in any order, extras ignored") {
    const EventTable table = events_from(
        "location_id,genre,user_id,comment,timestamp,program_id,event_id\n"
        "syd,News,u9,hello world,777,p3,5\n");
    REQUIRE(table.events.size() == 1);
    CHECK(table.events[0].event_id == 5);
    CHECK(table.events[0].user_id == "u9");
    CHECK(table.events[0].timestamp == 777);
    CHECK(table.events[0].genre == 1);
    CHECK(table.events[0].location_id == "syd");
}

TEST_CASE("parse_events: event_id column is optional and assigned sequentially") {
    const EventTable table = events_from(
        "user_id,timestamp,program_id,genre,location_id\n"
        "u1,1000,p1,Dramas,syd\n"
        "u2,2000,p2,News,syd\n");
    REQUIRE(table.events.size() == 2);
    CHECK(table.events[0].event_id == 0);
    CHECK(table.events[1].event_id == 1);
}

TEST_CASE("parse_events: duplicate event_id rejected") {
    CHECK_THROWS_WITH_AS(events_from("event_id,user_id,timestamp,program_id,genre,location_id\n"
                                     "7,u1,1000,p1,Dramas,syd\n"
                                     "7,u2,1100,p2,News,syd\n"),
                         doctest::Contains("duplicate event_id 7"), Error);
}

TEST_CASE("parse_attributes: two valid rows") {
    const AttributeTable table = attributes_from(
        "location_id,timestamp,temperature,pressure\n"
        "syd,1000,21.5,1013.2\n"
        "syd,2000,22.0,1012.8\n");
    REQUIRE(table.records.size() == 2);
    CHECK(table.records[0].values == std::vector<double>{21.5, 1013.2});
    CHECK(table.records[1].timestamp == 2000);
}

TEST_CASE("parse_attributes: missing attribute column is named") {
    CHECK_THROWS_WITH_AS(attributes_from("location_id,timestamp,temperature\n"),
                         doctest::Contains("pressure"), Error);
}

TEST_CASE("parse_attributes: non-finite values rejected") {
    CHECK_THROWS_AS(attributes_from("location_id,timestamp,temperature,pressure\n"
                                    "syd,1000,NaN,1013\n"),
                    Error);
    CHECK_THROWS_WITH_AS(attributes_from("location_id,timestamp,temperature,pressure\n"
                                         "syd,1000,21.0,oops\n"),
                         doctest::Contains("line 2"), Error);
}

namespace {

EventTable three_events(std::int64_t t0, std::int64_t t1, std::int64_t t2) {
    EventTable events;
    events.genre_vocabulary = kGenres;
    events.events = {
        {0, "u1", t0, "p1", 0, "syd"},
        {1, "u1", t1, "p1", 1, "syd"},
        {2, "u2", t2, "p2", 2, "mel"},
    };
    return events;
}

AttributeTable records_at(std::initializer_list<std::pair<const char*, std::int64_t>> where) {
    AttributeTable attrs;
    attrs.attribute_names = kAttrs;
    double v = 1.0;
    for (const auto& [location, ts] : where) {
        attrs.records.push_back({location, ts, {v, 100.0 + v}});
        v += 1.0;
    }
    return attrs;
}

}  // namespace

TEST_CASE("join_nearest picks the record with minimal time gap") {
    EventTable events = three_events(605, 605, 605);
    events.events.resize(1);
    const AttributeTable attrs = records_at({{"syd", 600}, {"syd", 660}});
    const JoinedTable joined = join_nearest(events, attrs, 3600);
    REQUIRE(joined.size() == 1);
    CHECK(joined.value(0, 0) == 1.0);  // the t=600 record
    CHECK(joined.dropped == 0);
}

TEST_CASE("join_nearest breaks exact |dt| ties toward the earlier record") {
    EventTable events = three_events(630, 630, 630);
    events.events.resize(1);
    const AttributeTable attrs = records_at({{"syd", 660}, {"syd", 600}});
    const JoinedTable joined = join_nearest(events, attrs, 3600);
    REQUIRE(joined.size() == 1);
    CHECK(joined.value(0, 0) == 2.0);  // the t=600 record was listed second
}

TEST_CASE("join_nearest drops events with no record inside the window") {
    EventTable events = three_events(1000, 2000, 500000);
    const AttributeTable attrs = records_at({{"syd", 900}, {"syd", 2100}});
    const JoinedTable joined = join_nearest(events, attrs, 3600);
    CHECK(joined.size() == 2);
    CHECK(joined.dropped == 1);  // the mel event has no same-location record
    CHECK(joined.size() + joined.dropped == events.events.size());
    for (std::size_t i = 0; i < joined.size(); ++i) {
        CHECK(joined.events[i].location_id == "syd");
    }
}

TEST_CASE("join_nearest: window boundary is inclusive") {
    EventTable events = three_events(1000, 1000, 1000);
    events.events.resize(1);
    const AttributeTable attrs = records_at({{"syd", 1000 + 3600}});
    CHECK(join_nearest(events, attrs, 3600).size() == 1);
    CHECK(join_nearest(events, attrs, 3599).dropped == 1);
}

TEST_CASE("join_nearest output is sorted by event_id and independent of input order") {
    std::mt19937 rng(99);
    EventTable events;
    events.genre_vocabulary = kGenres;
    AttributeTable attrs;
    attrs.attribute_names = kAttrs;
    const char* locations[] = {"a", "b", "c"};
    for (std::int64_t i = 0; i < 200; ++i) {
        events.events.push_back({i, "u" + std::to_string(i % 7),
                                 static_cast<std::int64_t>(rng() % 100000), "p", 0,
                                 locations[i % 3]});
    }
    for (int i = 0; i < 60; ++i) {
        attrs.records.push_back({locations[i % 3], static_cast<std::int64_t>(rng() % 100000),
                                 {double(rng() % 50), double(rng() % 50)}});
    }

    const JoinedTable reference = join_nearest(events, attrs, 5000);
    CHECK(std::is_sorted(reference.events.begin(), reference.events.end(),
                         [](const Event& a, const Event& b) { return a.event_id < b.event_id; }));
    CHECK(reference.size() + reference.dropped == events.events.size());

    for (int shuffle = 0; shuffle < 5; ++shuffle) {
        std::shuffle(attrs.records.begin(), attrs.records.end(), rng);
        std::shuffle(events.events.begin(), events.events.end(), rng);
        const JoinedTable shuffled = join_nearest(events, attrs, 5000);
        REQUIRE(shuffled.size() == reference.size());
        CHECK(shuffled.values == reference.values);
        CHECK(shuffled.dropped == reference.dropped);
    }
}

TEST_CASE("join_nearest rejects a non-positive window") {
    const EventTable events = three_events(1, 2, 3);
    const AttributeTable attrs = records_at({{"syd", 1}});
    CHECK_THROWS_AS(join_nearest(events, attrs, 0), Error);
    CHECK_THROWS_AS(join_nearest(events, attrs, -5), Error);
}

TEST_CASE("parsing honors a configured delimiter") {
    std::istringstream in(
        "event_id;user_id;timestamp;program_id;genre;location_id\n"
        "1;u1;100;p1;Dramas;syd\n");
    const EventTable table = parse_events(in, kGenres, {.delimiter = ';'});
    REQUIRE(table.events.size() == 1);
    CHECK(table.events[0].user_id == "u1");
}

TEST_CASE("join_nearest honors the window bound for every row") {
    std::mt19937 rng(7);
    EventTable events;
    events.genre_vocabulary = kGenres;
    AttributeTable attrs;
    attrs.attribute_names = kAttrs;
    for (std::int64_t i = 0; i < 300; ++i) {
        events.events.push_back({i, "u", static_cast<std::int64_t>(rng() % 50000), "p", 0, "x"});
    }
    for (int i = 0; i < 40; ++i) {
        attrs.records.push_back({"x", static_cast<std::int64_t>(rng() % 50000), {1.0, double(i)}});
    }
    const std::int64_t window = 700;
    const JoinedTable joined = join_nearest(events, attrs, window);
    for (std::size_t i = 0; i < joined.size(); ++i) {
        const double record_id = joined.value(i, 1);
        const std::int64_t record_ts = attrs.records[static_cast<std::size_t>(record_id)].timestamp;
        CHECK(std::abs(joined.events[i].timestamp - record_ts) <= window);
    }
}
