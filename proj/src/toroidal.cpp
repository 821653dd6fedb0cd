#include "germlin/toroidal.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "germlin/parallel.hpp"
#include "germlin/simplex.hpp"

namespace germlin {

namespace {

constexpr double kLinTol = 1e-9;

int json_int(const json& j, const char* name) {
    if (j.is_number_integer()) return j.get<int>();
    if (j.is_string()) return std::stoi(j.get<std::string>());
    throw std::invalid_argument(std::string("bad integer field ") + name);
}

// Gaussian elimination with partial pivoting on a copy normalized to unit max entry.
// Returns the solution, or nothing when a pivot falls below the tolerance.
std::optional<std::vector<double>> solve_real(RMat A, std::vector<double> b) {
    const size_t n = A.size();
    double scale = 0;
    for (const auto& row : A)
        for (double x : row) scale = std::max(scale, std::abs(x));
    if (scale == 0) return std::nullopt;
    for (auto& row : A)
        for (double& x : row) x /= scale;
    for (double& x : b) x /= scale;
    for (size_t c = 0; c < n; ++c) {
        size_t piv = c;
        for (size_t r = c + 1; r < n; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        if (std::abs(A[piv][c]) < kLinTol) return std::nullopt;
        std::swap(A[c], A[piv]);
        std::swap(b[c], b[piv]);
        for (size_t r = c + 1; r < n; ++r) {
            double f = A[r][c] / A[c][c];
            if (f == 0) continue;
            for (size_t k = c; k < n; ++k) A[r][k] -= f * A[c][k];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (size_t i = n; i-- > 0;) {
        double s = b[i];
        for (size_t k = i + 1; k < n; ++k) s -= A[i][k] * x[k];
        x[i] = s / A[i][i];
    }
    return x;
}

bool independent(const RMat& A) { return solve_real(A, std::vector<double>(A.size(), 0.0)).has_value(); }

// 2m x 2m real matrix whose columns are the complex columns split into (Re, Im).
RMat realify(const CMat& cols) {
    const size_t m = cols.empty() ? 0 : cols[0].size();
    RMat A(2 * m, std::vector<double>(cols.size()));
    for (size_t c = 0; c < cols.size(); ++c)
        for (size_t r = 0; r < m; ++r) {
            A[r][c] = cols[c][r].real();
            A[m + r][c] = cols[c][r].imag();
        }
    return A;
}

void check_dims(const char* name, size_t rows, size_t cols, size_t want_r, size_t want_c) {
    if (rows != want_r || cols != want_c)
        throw std::invalid_argument(std::string(name) + " has shape " + std::to_string(rows) + "x" +
                                    std::to_string(cols) + ", expected " + std::to_string(want_r) + "x" +
                                    std::to_string(want_c));
}

template <class M>
size_t ncols(const M& mat) {
    return mat.empty() ? 0 : mat[0].size();
}

}  // namespace

void ToroidalSpec::validate_shape() const {
    if (a < 0 || b < 0 || q < 1 || n - a - b < q)
        throw std::invalid_argument("toroidal spec needs n-a-b >= q >= 1");
    const size_t kk = static_cast<size_t>(k()), qq = static_cast<size_t>(q);
    // an empty matrix with zero rows has no column count; only check when rows exist
    auto chk = [&](const char* nm, size_t r, size_t c, size_t wr, size_t wc) {
        if (wr == 0 && r == 0) return;
        check_dims(nm, r, c, wr, wc);
    };
    chk("R1", R1.size(), ncols(R1), kk, qq);
    chk("R2", R2.size(), ncols(R2), kk, qq);
    chk("R3", R3.size(), ncols(R3), kk, kk);
    chk("P0", P0.size(), ncols(P0), qq, qq);
    if (kk > 0) chk("P1", P1.size(), ncols(P1), qq, kk);
}

ToroidalSpec toroidal_spec_from_json(const json& j) {
    ToroidalSpec s;
    s.n = json_int(j.at("n"), "n");
    s.a = json_int(j.value("a", json(0)), "a");
    s.b = json_int(j.value("b", json(0)), "b");
    s.q = json_int(j.at("q"), "q");
    if (s.q < 1) throw std::invalid_argument("q = 0 has no toroidal part");
    if (s.n - s.a - s.b < s.q) throw std::invalid_argument("toroidal spec needs n-a-b >= q");
    const size_t k = static_cast<size_t>(s.k()), q = static_cast<size_t>(s.q);
    auto real_mat = [&](const char* name) {
        RMat out;
        if (k == 0) return out;
        for (const auto& row : json_matrix<CD>(j.at(name), k, q, name)) {
            std::vector<double> r;
            for (const auto& z : row) {
                if (z.imag() != 0) throw std::invalid_argument(std::string(name) + " must be real");
                r.push_back(z.real());
            }
            out.push_back(r);
        }
        return out;
    };
    s.R1 = real_mat("R1");
    s.R2 = real_mat("R2");
    if (k > 0) {
        s.R3 = json_matrix<CD>(j.at("R3"), k, k, "R3");
        s.P1 = json_matrix<CD>(j.at("P1"), q, k, "P1");
    }
    s.P0 = json_matrix<CD>(j.at("P0"), q, q, "P0");
    s.validate_shape();
    return s;
}

void DomainSpec::validate() const {
    if (!(epsilon > 0) || !(Rcap > 0)) throw std::invalid_argument("domain needs epsilon > 0 and R > 0");
    double prev = std::numeric_limits<double>::infinity();
    double prevR = -std::numeric_limits<double>::infinity();
    for (const auto& [R, r] : r_table) {
        if (!(r > 0)) throw std::invalid_argument("r table entries must be positive");
        if (r > prev) throw std::invalid_argument("r table must be nonincreasing in R");
        if (!(R > prevR)) throw std::invalid_argument("r table R values must increase");
        prev = r;
        prevR = R;
    }
}

double DomainSpec::r_of(double R) const {
    if (r_table.empty()) throw std::invalid_argument("empty r table");
    for (const auto& [Rt, r] : r_table)
        if (R <= Rt) return r;
    return r_table.back().second;
}

IrrationalityResult validate_irrationality(const ToroidalSpec& spec, int height_bound) {
    if (height_bound < 1) throw std::invalid_argument("height bound must be >= 1");
    spec.validate_shape();
    IrrationalityResult res;
    res.bound = height_bound;
    const int k = spec.k(), q = spec.q;
    if (k == 0) return res;
    auto integral = [&](const std::vector<int>& s) {
        for (int c = 0; c < 2 * q; ++c) {
            double acc = 0;
            for (int i = 0; i < k; ++i) acc += s[i] * (c < q ? spec.R1[i][c] : spec.R2[i][c - q]);
            if (std::abs(acc - std::round(acc)) > 1e-9) return false;
        }
        return true;
    };
    // Shells of growing sup norm; inside a shell by |s|_1, then descending lex.
    // Only s with positive leading entry are tried (s and -s are equivalent).
    for (int h = 1; h <= height_bound; ++h) {
        std::vector<std::vector<int>> shell;
        std::vector<int> s(k, -h);
        while (true) {
            int sup = 0, lead = 0;
            for (int x : s) {
                sup = std::max(sup, std::abs(x));
                if (lead == 0) lead = x;
            }
            if (sup == h && lead > 0) shell.push_back(s);
            int i = k - 1;
            while (i >= 0 && s[i] == h) s[i--] = -h;
            if (i < 0) break;
            ++s[i];
        }
        std::sort(shell.begin(), shell.end(), [](const std::vector<int>& x, const std::vector<int>& y) {
            int ax = 0, ay = 0;
            for (int v : x) ax += std::abs(v);
            for (int v : y) ay += std::abs(v);
            if (ax != ay) return ax < ay;
            return x > y;
        });
        for (const auto& cand : shell)
            if (integral(cand)) {
                res.pass = false;
                res.witness = cand;
                return res;
            }
    }
    return res;
}

CMat toroidal_columns(const ToroidalSpec& spec) {
    spec.validate_shape();
    const int m = spec.m(), k = spec.k(), q = spec.q;
    CMat cols(static_cast<size_t>(2 * m), std::vector<CD>(static_cast<size_t>(m)));
    for (int c = 0; c < 2 * m; ++c)
        for (int r = 0; r < m; ++r) {
            CD v = 0;
            bool top = r < k;
            if (c < k) {
                v = (top && r == c) ? 1.0 : 0.0;
            } else if (c < k + q) {
                int j = c - k;
                v = top ? CD(spec.R1[r][j]) : CD(r - k == j ? 1.0 : 0.0);
            } else if (c < k + 2 * q) {
                int j = c - k - q;
                v = top ? CD(spec.R2[r][j]) : spec.P0[r - k][j];
            } else {
                int j = c - k - 2 * q;
                v = top ? spec.R3[r][j] : spec.P1[r - k][j];
            }
            cols[c][r] = v;
        }
    return cols;
}

namespace {
// Rows < k get -R1 times the bottom block added (sign = -1), or +R1 (sign = +1).
CMat shear(const ToroidalSpec& spec, const CMat& cols, double sign) {
    const int k = spec.k(), q = spec.q;
    CMat out = cols;
    for (size_t c = 0; c < cols.size(); ++c)
        for (int r = 0; r < k; ++r)
            for (int j = 0; j < q; ++j) out[c][r] += sign * spec.R1[r][j] * cols[c][k + j];
    return out;
}
}  // namespace

LatticeBasis shear_to_standard(const ToroidalSpec& spec) {
    LatticeBasis lb;
    lb.gamma = toroidal_columns(spec);
    if (!independent(realify(lb.gamma)))
        throw std::invalid_argument("lattice columns are not real-linearly independent");
    lb.gamma_std = shear(spec, lb.gamma, -1.0);
    const int k = spec.k(), q = spec.q;
    for (int j = 0; j < q; ++j) lb.gamma_prime.push_back(lb.gamma_std[static_cast<size_t>(k + q + j)]);
    return lb;
}

CMat unshear(const ToroidalSpec& spec, const CMat& cols) { return shear(spec, cols, 1.0); }

DeckLinearData deck_linear_parts(const LatticeBasis& basis, const CMat& mu) {
    const size_t q = basis.gamma_prime.size();
    if (mu.size() != q) throw std::invalid_argument("mu must have q rows");
    DeckLinearData d;
    d.mu = mu;
    const double two_pi = 2.0 * std::numbers::pi;
    for (size_t j = 0; j < q; ++j) {
        std::vector<CD> row;
        for (const CD& t : basis.gamma_prime[j]) row.push_back(std::exp(CD(0, two_pi) * t));
        d.lambda.push_back(row);
    }
    return d;
}

std::vector<double> real_coordinates(const std::vector<CD>& point, const LatticeBasis& basis, int q) {
    const size_t m = point.size();
    if (basis.gamma_std.size() != 2 * m) throw std::invalid_argument("point dimension mismatch");
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> rhs(2 * m);
    for (size_t k = 0; k < m; ++k) {
        if (point[k] == CD(0, 0)) throw std::invalid_argument("point coordinates must be nonzero");
        rhs[k] = std::arg(point[k]) / two_pi;
        rhs[m + k] = -std::log(std::abs(point[k])) / two_pi;
    }
    auto w = solve_real(realify(basis.gamma_std), rhs);
    if (!w) throw std::invalid_argument("singular real basis");
    for (size_t i = 0; i < m; ++i) (*w)[i] -= std::floor((*w)[i]);
    (void)q;
    return *w;
}

bool domain_membership(const std::vector<CD>& point, const ToroidalSpec& spec, const LatticeBasis& basis,
                       const DomainSpec& dom) {
    const auto w = real_coordinates(point, basis, spec.q);
    const size_t m = static_cast<size_t>(spec.m()), q = static_cast<size_t>(spec.q);
    for (size_t j = m; j < m + q; ++j)
        if (!(w[j] > -dom.epsilon && w[j] < 1 + dom.epsilon)) return false;
    for (size_t h = m + q; h < 2 * m; ++h)
        if (!(w[h] > -dom.Rcap && w[h] < dom.Rcap)) return false;
    return true;
}

std::vector<CD> point_from_coordinates(const std::vector<double>& w, const LatticeBasis& basis) {
    const size_t m = basis.gamma_std.empty() ? 0 : basis.gamma_std[0].size();
    std::vector<CD> z(m, 0.0);
    for (size_t c = 0; c < w.size(); ++c)
        for (size_t r = 0; r < m; ++r) z[r] += w[c] * basis.gamma_std[c][r];
    std::vector<CD> p;
    for (const CD& x : z) p.push_back(std::exp(CD(0, 2.0 * std::numbers::pi) * x));
    return p;
}

RMat kappa0_grid(const RMat& gamma_im, int q, double epsilon_prime, double Rcap, int grid_points) {
    const size_t m = gamma_im.size();
    int per = std::max(2, static_cast<int>(std::ceil(std::pow(static_cast<double>(grid_points), 1.0 / m) - 1e-9)));
    long total = 1;
    for (size_t i = 0; i < m; ++i) total *= per;
    RMat out;
    out.reserve(static_cast<size_t>(total));
    std::vector<int> idx(m, 0);
    for (long p = 0; p < total; ++p) {
        long rest = p;
        std::vector<double> Q(m, 0.0);
        for (size_t j = 0; j < m; ++j) {
            int t = static_cast<int>(rest % per);
            rest /= per;
            double lo = static_cast<int>(j) < q ? -epsilon_prime : -Rcap;
            double hi = static_cast<int>(j) < q ? 1 + epsilon_prime : Rcap;
            double s = lo + (hi - lo) * t / (per - 1);
            for (size_t r = 0; r < m; ++r) Q[r] += s * gamma_im[j][r];
        }
        out.push_back(std::move(Q));
    }
    return out;
}

Kappa0Result kappa0_estimate(const RMat& gamma_im, int q, double epsilon, double epsilon_prime,
                             const std::vector<int>& P, double Rcap, int grid_points) {
    const size_t m = gamma_im.size();
    if (m == 0 || q < 1 || static_cast<size_t>(q) > m) throw std::invalid_argument("kappa0: bad slab dimensions");
    for (const auto& g : gamma_im)
        if (g.size() != m) throw std::invalid_argument("kappa0: direction vectors must have length m");
    if (P.size() != m) throw std::invalid_argument("kappa0: P has wrong length");
    if (epsilon < epsilon_prime || epsilon_prime < 0) throw std::invalid_argument("kappa0 needs eps >= eps' >= 0");
    long p1 = 0;
    for (int p : P) p1 += std::abs(p);
    if (p1 == 0) throw std::invalid_argument("kappa0 needs P != 0");
    // columns are the directions; independence via the transposed system
    RMat A(m, std::vector<double>(m));
    for (size_t j = 0; j < m; ++j)
        for (size_t r = 0; r < m; ++r) A[r][j] = gamma_im[j][r];
    if (!independent(A)) throw std::invalid_argument("degenerate slab: Im gamma vectors are dependent");

    Kappa0Result res;
    res.Q1.assign(m, 0.0);
    res.Q2.assign(m, 0.0);
    for (size_t j = 0; j < m; ++j) {
        double ap = 0;
        for (size_t r = 0; r < m; ++r) ap += gamma_im[j][r] * P[r];
        const bool slab = static_cast<int>(j) < q;
        double coef;
        if (slab)
            coef = ap > 0 ? 1 + epsilon : -epsilon;
        else
            coef = ap > 0 ? Rcap : (ap < 0 ? -Rcap : 0.0);
        auto& target = slab ? res.Q1 : res.Q2;
        for (size_t r = 0; r < m; ++r) target[r] += coef * gamma_im[j][r];
    }
    res.Q.resize(m);
    for (size_t r = 0; r < m; ++r) res.Q[r] = res.Q1[r] + res.Q2[r];

    const RMat grid = kappa0_grid(gamma_im, q, epsilon_prime, Rcap, grid_points);
    res.grid_points = static_cast<long>(grid.size());
    if (epsilon == epsilon_prime) return res;
    const double denom = (epsilon - epsilon_prime) * static_cast<double>(p1);
    double kmin = std::numeric_limits<double>::infinity();
    const long ng = res.grid_points;
#pragma omp parallel for reduction(min : kmin) num_threads(thread_count())
    for (long g = 0; g < ng; ++g) {
        double dot = 0;
        for (size_t r = 0; r < m; ++r) dot += (grid[g][r] - res.Q[r]) * P[r];
        kmin = std::min(kmin, -dot / denom);
    }
    res.kappa0 = std::max(0.0, kmin) * (1 - 1e-9);
    return res;
}

namespace {
void box_vertices(int q, double lo, double hi, const std::vector<double>& shift, RMat& out) {
    for (int mask = 0; mask < (1 << q); ++mask) {
        std::vector<double> v(q);
        for (int i = 0; i < q; ++i) v[i] = ((mask >> i) & 1 ? hi : lo) + shift[i];
        out.push_back(std::move(v));
    }
}
}  // namespace

double eta_for_translates(int q, double epsilon, const RMat& translates, int depth) {
    if (q < 1) throw std::invalid_argument("eta needs q >= 1");
    if (!(epsilon > 0)) throw std::invalid_argument("hull degenerate: epsilon must be positive");
    RMat hull;
    box_vertices(q, -epsilon, 1 + epsilon, std::vector<double>(q, 0.0), hull);
    for (const auto& t : translates) {
        if (static_cast<int>(t.size()) != q) throw std::invalid_argument("translate has wrong dimension");
        for (double k : {-2.0, -1.0, 1.0, 2.0}) {
            std::vector<double> s(q);
            for (int i = 0; i < q; ++i) s[i] = k * t[i];
            box_vertices(q, -epsilon, 1 + epsilon, s, hull);
        }
    }
    auto feasible = [&](double eta) {
        RMat probes;
        for (const auto& t : translates)
            for (double k : {-1.0, 1.0}) {
                std::vector<double> s(q);
                for (int i = 0; i < q; ++i) s[i] = k * t[i];
                box_vertices(q, -epsilon - eta, 1 + epsilon + eta, s, probes);
            }
        for (const auto& p : probes)
            if (!in_convex_hull(hull, p, 1e-12)) return false;
        return true;
    };
    if (feasible(epsilon)) return epsilon;
    // dyadic bracket so that nearby eps share one bisection grid
    double lo = 0, hi = std::exp2(std::ceil(std::log2(epsilon)));
    for (int it = 0; it < depth; ++it) {
        double mid = 0.5 * (lo + hi);
        if (feasible(mid))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

double convex_extension_eta(const ToroidalSpec& spec, const DomainSpec& dom, int depth) {
    shear_to_standard(spec);  // validates the basis
    dom.validate();
    // In slab coordinates each deck acts as translation by a unit vector.
    RMat units;
    for (int i = 0; i < spec.q; ++i) {
        std::vector<double> e(spec.q, 0.0);
        e[i] = 1.0;
        units.push_back(e);
    }
    return eta_for_translates(spec.q, dom.epsilon, units, depth);
}

}  // namespace germlin
