#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "attmatch/events.hpp"

namespace attmatch {

struct ParseOptions {
    char delimiter = ',';
};

/// Parses an event log. The header must name user_id, timestamp, program_id,
/// genre and location_id; event_id is optional and assigned sequentially from
/// zero when absent. Unknown columns are ignored. Rows with the wrong arity,
/// an unparseable field or a genre outside the vocabulary raise Error with
/// the line number.
EventTable parse_events(std::istream& in, std::vector<std::string> genre_vocabulary,
                        const ParseOptions& options = {});
EventTable parse_events_file(const std::filesystem::path& path,
                             std::vector<std::string> genre_vocabulary,
                             const ParseOptions& options = {});

/// Parses contextual-attribute records. The header must name location_id,
/// timestamp and every configured attribute; non-finite values are rejected.
AttributeTable parse_attributes(std::istream& in, std::vector<std::string> attribute_names,
                                const ParseOptions& options = {});
AttributeTable parse_attributes_file(const std::filesystem::path& path,
                                     std::vector<std::string> attribute_names,
                                     const ParseOptions& options = {});

/// Joins each event to the attribute record at the same location with minimal
/// |timestamp difference|, ties going to the earlier record. Events with no
/// record within `window_seconds` are dropped and counted, not imputed.
/// Output rows are sorted by event_id; the result does not depend on the
/// order of either input table.
JoinedTable join_nearest(const EventTable& events, const AttributeTable& attributes,
                         std::int64_t window_seconds);

}  // namespace attmatch
