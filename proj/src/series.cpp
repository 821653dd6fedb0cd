#include "germlin/series.hpp"

namespace germlin {

namespace {
std::string tuple_string(const std::vector<int>& xs) {
    std::string s = "(";
    for (size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(xs[i]);
    }
    return s + ")";
}
}  // namespace

std::string key_string(const Key& k) { return "P=" + tuple_string(k.P) + ", Q=" + tuple_string(k.Q); }

}  // namespace germlin
