#include "attmatch/treatment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "attmatch/error.hpp"

namespace attmatch {

std::string_view to_string(Tail tail) { return tail == Tail::Low ? "low" : "high"; }

Tail tail_from_string(std::string_view name) {
    if (name == "low" || name == "Low" || name == "L") return Tail::Low;
    if (name == "high" || name == "High" || name == "H") return Tail::High;
    throw Error("unknown tail '" + std::string(name) + "' (expected 'low' or 'high')");
}

std::vector<TreatmentSpec> default_specs() {
    return {
        {"temperature", Tail::High, 0.2},   {"feels_like", Tail::High, 0.2},
        {"wind_speed", Tail::High, 0.2},    {"cloud_cover", Tail::High, 0.2},
        {"pressure", Tail::Low, 0.2},       {"humidity", Tail::Low, 0.2},
        {"visibility", Tail::Low, 0.2},     {"precipitation", Tail::High, 0.2},
    };
}

std::size_t treated_count(double quantile, std::size_t n) {
    // Long-double product: exact floor for every double quantile at any
    // realistic n, including quantiles that are not exactly representable.
    return static_cast<std::size_t>(
        std::floor(static_cast<long double>(quantile) * static_cast<long double>(n)));
}

TreatmentAssignment assign(std::span<const double> values, std::span<const std::int64_t> event_ids,
                           const TreatmentSpec& spec) {
    if (values.size() != event_ids.size()) {
        throw Error("assign: values and event_ids differ in length");
    }
    if (!(spec.quantile > 0.0 && spec.quantile <= 0.5)) {
        throw Error("quantile must be in (0, 0.5], got " + std::to_string(spec.quantile));
    }
    const std::size_t n = values.size();
    const std::size_t k = treated_count(spec.quantile, n);
    if (k == 0 || k >= n) {
        throw Error("assign: " + std::to_string(n) + " events are too few for quantile " +
                    std::to_string(spec.quantile));
    }
    for (double v : values) {
        if (!std::isfinite(v)) throw Error("assign: non-finite attribute value");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    if (spec.tail == Tail::Low) {
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (values[a] != values[b]) return values[a] < values[b];
            return event_ids[a] < event_ids[b];
        });
    } else {
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (values[a] != values[b]) return values[a] > values[b];
            return event_ids[a] < event_ids[b];
        });
    }

    TreatmentAssignment assignment;
    assignment.treated.assign(n, 0);
    assignment.n_treated = k;
    assignment.threshold = values[order[k - 1]];
    for (std::size_t i = 0; i < k; ++i) assignment.treated[order[i]] = 1;

    assignment.treated_rows.reserve(k);
    assignment.control_rows.reserve(n - k);
    for (std::size_t i = 0; i < n; ++i) {
        (assignment.treated[i] ? assignment.treated_rows : assignment.control_rows).push_back(i);
    }
    return assignment;
}

}  // namespace attmatch
