#pragma once

#include <cstdint>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace attmatch {

/// One watching event, the unit of the causal analysis.
struct Event {
    std::int64_t event_id = 0;
    std::string user_id;
    std::int64_t timestamp = 0;  // UTC seconds since epoch
    std::string program_id;
    std::uint32_t genre = 0;  // index into the table's genre vocabulary
    std::string location_id;
};

struct EventTable {
    std::vector<Event> events;
    std::vector<std::string> genre_vocabulary;
};

/// One contextual-attribute observation at a location and time.
struct AttributeRecord {
    std::string location_id;
    std::int64_t timestamp = 0;
    std::vector<double> values;  // parallel to the table's attribute_names
};

struct AttributeTable {
    std::vector<AttributeRecord> records;
    std::vector<std::string> attribute_names;
};

/// Analysis-ready table: every event paired with the attribute values of its
/// nearest-in-time record at the same location. Rows are sorted by event_id.
class JoinedTable {
public:
    std::vector<Event> events;
    std::vector<double> values;  // n_rows x n_attributes, row major
    std::vector<std::string> genre_vocabulary;
    std::vector<std::string> attribute_names;
    std::size_t dropped = 0;  // events with no record inside the join window

    std::size_t size() const { return events.size(); }

    double value(std::size_t row, std::size_t attribute) const {
        return values[row * attribute_names.size() + attribute];
    }

    std::span<const double> row_values(std::size_t row) const {
        return {values.data() + row * attribute_names.size(), attribute_names.size()};
    }

    /// Column of one attribute across all rows, in row (event_id) order.
    std::vector<double> attribute_column(std::size_t attribute) const {
        std::vector<double> column(events.size());
        for (std::size_t i = 0; i < events.size(); ++i) column[i] = value(i, attribute);
        return column;
    }

    std::vector<std::int64_t> event_ids() const {
        std::vector<std::int64_t> ids(events.size());
        for (std::size_t i = 0; i < events.size(); ++i) ids[i] = events[i].event_id;
        return ids;
    }
};

/// Reference genre vocabulary: fourteen genres, the count used throughout the
/// default configuration. Override via config when logs use a different set.
const std::vector<std::string>& default_genre_vocabulary();

/// The eight contextual attributes of the default configuration.
const std::vector<std::string>& default_attribute_names();

}  // namespace attmatch
