#include "germlin/small_divisors.hpp"

#include <algorithm>
#include <map>

namespace germlin {

namespace {

// All integer vectors of length n with |x|_1 == s.
void lattice_shell(int n, int s, bool nonneg, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == n - 1 || n == 0) {
        if (n == 0) {
            if (s == 0) out.push_back({});
            return;
        }
        cur.push_back(s);
        out.push_back(cur);
        cur.pop_back();
        if (!nonneg && s != 0) {
            cur.push_back(-s);
            out.push_back(cur);
            cur.pop_back();
        }
        return;
    }
    for (int a = nonneg ? 0 : -s; a <= s; ++a) {
        cur.push_back(a);
        lattice_shell(n, s - std::abs(a), nonneg, cur, out);
        cur.pop_back();
    }
}

std::vector<std::vector<int>> shell(int n, int s, bool nonneg) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    lattice_shell(n, s, nonneg, cur, out);
    return out;
}

}  // namespace

std::vector<Key> scan_keys(int n_h, int d, int N) {
    std::vector<Key> keys;
    for (int s = 2; s <= N; ++s)
        for (int qd = 2; qd <= s; ++qd) {
            auto Qs = shell(d, qd, true);
            auto Ps = shell(n_h, s - qd, false);
            std::sort(Qs.begin(), Qs.end());
            std::sort(Ps.begin(), Ps.end());
            for (const auto& Q : Qs)
                for (const auto& P : Ps) keys.push_back(Key{P, Q});
        }
    return keys;
}

FitResult fit_diophantine(const std::vector<std::pair<int, double>>& points) {
    FitResult r;
    std::map<int, double> per_s;
    for (const auto& [s, v] : points) {
        auto it = per_s.find(s);
        if (it == per_s.end() || v < it->second) per_s[s] = v;
    }
    double minv = INFINITY;
    for (const auto& [s, v] : per_s) minv = std::min(minv, v);
    if (per_s.empty() || !(minv > 0)) return r;

    if (per_s.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
        for (const auto& [s, v] : per_s) {
            double x = std::log(static_cast<double>(s)), y = std::log(v);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            n += 1;
        }
        r.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    r.tau = 10.0;
    for (int t = 1; t <= 10; ++t)
        if (static_cast<double>(t) >= -r.slope) {
            r.tau = t;
            break;
        }
    double D = INFINITY;
    for (const auto& [s, v] : points) D = std::min(D, v * std::pow(static_cast<double>(s), r.tau));
    r.D = D * (1.0 - 1e-6);
    r.valid = r.D > 0 && std::isfinite(r.D);
    return r;
}

json witness_json(const DivisorWitness& w) {
    return json{{"P", w.P}, {"Q", w.Q}, {"target", json{target_name(w.target), w.idx + 1}}, {"l", w.l + 1},
                {"value", format_double(w.value)}};
}

json diophantine_report_json(const DiophantineReport& rep) {
    json j;
    j["mode"] = scan_mode_name(rep.mode);
    j["N"] = rep.N;
    j["scanned"] = rep.scanned;
    j["min_divisor"] = format_double(rep.min_divisor);
    j["argmin"] = witness_json(rep.argmin);
    if (rep.resonant()) {
        j["D"] = nullptr;
        j["tau"] = nullptr;
    } else {
        j["D"] = format_double(rep.D);
        j["tau"] = format_double(rep.tau);
    }
    j["fit_valid"] = rep.fit_valid;
    json res = json::array();
    for (const auto& w : rep.resonances) res.push_back(witness_json(w));
    j["resonances"] = res;
    json vio = json::array();
    for (const auto& w : rep.violations) vio.push_back(witness_json(w));
    j["violations"] = vio;
    return j;
}

GridSpec shrink_grid(const GridSpec& g, double keep, double rho) {
    if (!(keep > 0) || keep > 1) throw std::invalid_argument("shrink factor must lie in (0, 1]");
    GridSpec out = g;
    for (auto& r : out.v_radius) r *= std::exp(-rho);
    for (auto& rs : out.h_radii) {
        if (rs.empty()) continue;
        double c = 0;
        for (double r : rs) c += std::log(r);
        c /= static_cast<double>(rs.size());
        for (auto& r : rs) r = std::exp(c + (std::log(r) - c) * keep);
    }
    return out;
}

}  // namespace germlin
