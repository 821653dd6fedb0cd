#pragma once

// JSON interchange for series: {header:{n_h,n_v,N_h,N_v,mode}, terms:[{P,Q,re,im}]}.

#include <json.hpp>

#include "germlin/series.hpp"

namespace germlin {

using json = nlohmann::json;

template <class C>
json series_to_json(const Series<C>& f) {
    json terms = json::array();
    for (const auto& [k, c] : f.terms)
        terms.push_back({{"P", k.P}, {"Q", k.Q}, {"re", scalar_traits<C>::re_str(c)}, {"im", scalar_traits<C>::im_str(c)}});
    return {{"header",
             {{"n_h", f.n_h}, {"n_v", f.n_v}, {"N_h", f.trunc.N_h}, {"N_v", f.trunc.N_v},
              {"mode", scalar_traits<C>::mode_name()}}},
            {"terms", terms}};
}

template <class C>
Series<C> series_from_json(const json& j) {
    const auto& h = j.at("header");
    std::string mode = h.at("mode").get<std::string>();
    if (mode != scalar_traits<C>::mode_name()) throw std::invalid_argument("series mode mismatch: " + mode);
    Series<C> f(h.at("n_h").get<int>(), h.at("n_v").get<int>(), Trunc{h.at("N_h").get<int>(), h.at("N_v").get<int>()});
    for (const auto& t : j.at("terms")) {
        Key k{t.at("P").get<std::vector<int>>(), t.at("Q").get<std::vector<int>>()};
        if (static_cast<int>(k.P.size()) != f.n_h || static_cast<int>(k.Q.size()) != f.n_v)
            throw std::invalid_argument("series term has wrong dimension");
        for (int q : k.Q)
            if (q < 0) throw std::invalid_argument("negative Taylor exponent");
        if (k.qdeg() > f.trunc.N_v) throw std::invalid_argument("series term beyond N_v");
        f.add_term(k, scalar_traits<C>::parse(t.at("re").get<std::string>(), t.at("im").get<std::string>()));
    }
    return f;
}

template <class C>
json vseries_to_json(const VSeries<C>& fs) {
    json a = json::array();
    for (const auto& f : fs) a.push_back(series_to_json(f));
    return a;
}

}  // namespace germlin
