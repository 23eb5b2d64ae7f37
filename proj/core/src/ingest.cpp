#include "attmatch/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "attmatch/csv.hpp"
#include "attmatch/error.hpp"

namespace attmatch {

namespace {

std::unordered_map<std::string, std::size_t> index_header(const std::vector<std::string>& header) {
    std::unordered_map<std::string, std::size_t> columns;
    for (std::size_t i = 0; i < header.size(); ++i) columns.emplace(header[i], i);
    return columns;
}

std::size_t require_column(const std::unordered_map<std::string, std::size_t>& columns,
                           const std::string& name) {
    auto it = columns.find(name);
    if (it == columns.end()) throw Error("header is missing required column '" + name + "'");
    return it->second;
}

std::ifstream open_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file '" + path.string() + "'");
    return in;
}

}  // namespace

EventTable parse_events(std::istream& in, std::vector<std::string> genre_vocabulary,
                        const ParseOptions& options) {
    EventTable table;
    table.genre_vocabulary = std::move(genre_vocabulary);

    std::unordered_map<std::string, std::uint32_t> genre_index;
    for (std::uint32_t g = 0; g < table.genre_vocabulary.size(); ++g) {
        genre_index.emplace(table.genre_vocabulary[g], g);
    }

    bool have_header = false;
    bool have_event_id = false;
    std::size_t header_arity = 0;
    std::size_t col_event_id = 0, col_user = 0, col_ts = 0, col_program = 0, col_genre = 0,
                col_location = 0;
    std::int64_t next_id = 0;
    std::unordered_set<std::int64_t> seen_ids;

    csv::for_each_row(in, options.delimiter, [&](std::size_t line, const std::vector<std::string>& fields) {
        if (!have_header) {
            auto columns = index_header(fields);
            col_user = require_column(columns, "user_id");
            col_ts = require_column(columns, "timestamp");
            col_program = require_column(columns, "program_id");
            col_genre = require_column(columns, "genre");
            col_location = require_column(columns, "location_id");
            if (auto it = columns.find("event_id"); it != columns.end()) {
                have_event_id = true;
                col_event_id = it->second;
            }
            header_arity = fields.size();
            have_header = true;
            return;
        }
        if (fields.size() != header_arity) {
            throw Error("line " + std::to_string(line) + ": expected " + std::to_string(header_arity) +
                        " fields, got " + std::to_string(fields.size()));
        }
        Event event;
        const std::string context = "line " + std::to_string(line);
        event.event_id = have_event_id ? csv::parse_int(fields[col_event_id], context + ", event_id")
                                       : next_id++;
        event.user_id = fields[col_user];
        event.timestamp = csv::parse_int(fields[col_ts], context + ", timestamp");
        event.program_id = fields[col_program];
        auto genre_it = genre_index.find(fields[col_genre]);
        if (genre_it == genre_index.end()) {
            throw Error(context + ": genre '" + fields[col_genre] + "' is not in the configured vocabulary");
        }
        event.genre = genre_it->second;
        event.location_id = fields[col_location];
        if (!seen_ids.insert(event.event_id).second) {
            throw Error(context + ": duplicate event_id " + std::to_string(event.event_id));
        }
        table.events.push_back(std::move(event));
    });

    if (!have_header) throw Error("event input is empty: missing header row");
    return table;
}

EventTable parse_events_file(const std::filesystem::path& path,
                             std::vector<std::string> genre_vocabulary,
                             const ParseOptions& options) {
    auto in = open_file(path);
    try {
        return parse_events(in, std::move(genre_vocabulary), options);
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

AttributeTable parse_attributes(std::istream& in, std::vector<std::string> attribute_names,
                                const ParseOptions& options) {
    AttributeTable table;
    table.attribute_names = std::move(attribute_names);

    bool have_header = false;
    std::size_t header_arity = 0;
    std::size_t col_location = 0, col_ts = 0;
    std::vector<std::size_t> value_columns;

    csv::for_each_row(in, options.delimiter, [&](std::size_t line, const std::vector<std::string>& fields) {
        if (!have_header) {
            auto columns = index_header(fields);
            col_location = require_column(columns, "location_id");
            col_ts = require_column(columns, "timestamp");
            value_columns.reserve(table.attribute_names.size());
            for (const auto& name : table.attribute_names) {
                value_columns.push_back(require_column(columns, name));
            }
            header_arity = fields.size();
            have_header = true;
            return;
        }
        if (fields.size() != header_arity) {
            throw Error("line " + std::to_string(line) + ": expected " + std::to_string(header_arity) +
                        " fields, got " + std::to_string(fields.size()));
        }
        AttributeRecord record;
        const std::string context = "line " + std::to_string(line);
        record.location_id = fields[col_location];
        record.timestamp = csv::parse_int(fields[col_ts], context + ", timestamp");
        record.values.reserve(value_columns.size());
        for (std::size_t a = 0; a < value_columns.size(); ++a) {
            record.values.push_back(
                csv::parse_finite(fields[value_columns[a]], context + ", " + table.attribute_names[a]));
        }
        table.records.push_back(std::move(record));
    });

    if (!have_header) throw Error("attribute input is empty: missing header row");
    return table;
}

AttributeTable parse_attributes_file(const std::filesystem::path& path,
                                     std::vector<std::string> attribute_names,
                                     const ParseOptions& options) {
    auto in = open_file(path);
    try {
        return parse_attributes(in, std::move(attribute_names), options);
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

JoinedTable join_nearest(const EventTable& events, const AttributeTable& attributes,
                         std::int64_t window_seconds) {
    if (window_seconds <= 0) throw Error("join window must be positive");

    // Records per location, ordered by timestamp. Records that share a
    // timestamp are ordered by their values so the join never depends on the
    // input row order.
    std::unordered_map<std::string, std::vector<std::size_t>> by_location;
    for (std::size_t r = 0; r < attributes.records.size(); ++r) {
        by_location[attributes.records[r].location_id].push_back(r);
    }
    for (auto& [location, rows] : by_location) {
        std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
            const auto& ra = attributes.records[a];
            const auto& rb = attributes.records[b];
            if (ra.timestamp != rb.timestamp) return ra.timestamp < rb.timestamp;
            return ra.values < rb.values;
        });
    }

    std::vector<std::size_t> order(events.events.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return events.events[a].event_id < events.events[b].event_id;
    });

    JoinedTable joined;
    joined.genre_vocabulary = events.genre_vocabulary;
    joined.attribute_names = attributes.attribute_names;
    joined.events.reserve(events.events.size());
    joined.values.reserve(events.events.size() * attributes.attribute_names.size());

    for (std::size_t idx : order) {
        const Event& event = events.events[idx];
        auto location_it = by_location.find(event.location_id);
        if (location_it == by_location.end()) {
            ++joined.dropped;
            continue;
        }
        const auto& rows = location_it->second;
        auto lower = std::lower_bound(rows.begin(), rows.end(), event.timestamp,
                                      [&](std::size_t r, std::int64_t ts) {
                                          return attributes.records[r].timestamp < ts;
                                      });
        const AttributeRecord* best = nullptr;
        std::int64_t best_gap = std::numeric_limits<std::int64_t>::max();
        if (lower != rows.begin()) {
            const auto& earlier = attributes.records[*(lower - 1)];
            best_gap = event.timestamp - earlier.timestamp;
            best = &earlier;
        }
        if (lower != rows.end()) {
            const auto& later = attributes.records[*lower];
            std::int64_t gap = later.timestamp - event.timestamp;
            // Strict comparison keeps the earlier record on |dt| ties.
            if (gap < best_gap) {
                best_gap = gap;
                best = &later;
            }
        }
        if (best == nullptr || best_gap > window_seconds) {
            ++joined.dropped;
            continue;
        }
        joined.events.push_back(event);
        joined.values.insert(joined.values.end(), best->values.begin(), best->values.end());
    }
    return joined;
}

}  // namespace attmatch
