#pragma once

// Decimal-string number fields in input JSON. A complex entry is either a
// string (real) or a [re, im] pair of strings.

#include <json.hpp>

#include "germlin/scalar.hpp"

namespace germlin {

using json = nlohmann::json;

inline std::string number_text(const json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    throw std::invalid_argument("numbers must be decimal strings: " + j.dump());
}

inline double json_real(const json& j) { return parse_double(number_text(j)); }

template <class C>
C json_scalar(const json& j) {
    if (j.is_array()) {
        if (j.size() != 2) throw std::invalid_argument("complex entry needs [re, im]: " + j.dump());
        return scalar_traits<C>::parse(number_text(j[0]), number_text(j[1]));
    }
    return scalar_traits<C>::parse(number_text(j), "0");
}

template <class C>
std::vector<std::vector<C>> json_matrix(const json& j, size_t rows, size_t cols, const char* name) {
    if (!j.is_array() || j.size() != rows)
        throw std::invalid_argument(std::string(name) + ": expected " + std::to_string(rows) + " rows");
    std::vector<std::vector<C>> m;
    for (const auto& row : j) {
        if (!row.is_array() || row.size() != cols)
            throw std::invalid_argument(std::string(name) + ": expected " + std::to_string(cols) + " columns");
        std::vector<C> r;
        for (const auto& e : row) r.push_back(json_scalar<C>(e));
        m.push_back(std::move(r));
    }
    return m;
}

template <class C>
json scalar_json(const C& z) {
    return json::array({scalar_traits<C>::re_str(z), scalar_traits<C>::im_str(z)});
}

}  // namespace germlin
