#include "attmatch/events.hpp"

namespace attmatch {

const std::vector<std::string>& default_genre_vocabulary() {
    static const std::vector<std::string> genres = {
        "Dramas",  "News",    "Kids",      "Sports",  "Comedy",   "Movies",  "Documentaries",
        "Panels",  "Reality", "Lifestyle", "Music",   "Crime",    "SciFi",   "Soaps",
    };
    return genres;
}

const std::vector<std::string>& default_attribute_names() {
    static const std::vector<std::string> names = {
        "temperature", "feels_like", "wind_speed", "cloud_cover",
        "pressure",    "humidity",   "visibility", "precipitation",
    };
    return names;
}

}  // namespace attmatch
