#include "lowlying/cubic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "lowlying/errors.hpp"
#include "lowlying/parallel.hpp"
#include "lowlying/primes.hpp"

namespace lowlying {

namespace {

using i128 = __int128;

i128 gcd128(i128 a, i128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b) { i128 t = a % b; a = b; b = t; }
    return a;
}

// exact rational with 128-bit numerator/denominator; plenty for 3x3
// maximal-order bases at desk scale
struct Rat {
    i128 n = 0, d = 1;
    Rat() = default;
    Rat(i128 num) : n(num), d(1) {}
    Rat(i128 num, i128 den) : n(num), d(den) { reduce(); }
    void reduce() {
        if (d < 0) { n = -n; d = -d; }
        i128 g = gcd128(n, d);
        if (g > 1) { n /= g; d /= g; }
    }
    bool is_int() const { return d == 1; }
};

Rat operator+(const Rat& a, const Rat& b) { return Rat(a.n * b.d + b.n * a.d, a.d * b.d); }
Rat operator-(const Rat& a, const Rat& b) { return Rat(a.n * b.d - b.n * a.d, a.d * b.d); }
Rat operator*(const Rat& a, const Rat& b) { return Rat(a.n * b.n, a.d * b.d); }
Rat operator/(const Rat& a, const Rat& b) { return Rat(a.n * b.d, a.d * b.n); }

using Mat3 = std::array<std::array<Rat, 3>, 3>;
using Vec3 = std::array<Rat, 3>;

Rat det3(const Mat3& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Mat3 inv3(const Mat3& m) {
    Rat det = det3(m);
    if (det.n == 0) throw Error("singular basis matrix");
    Mat3 adj;
    adj[0][0] = m[1][1] * m[2][2] - m[1][2] * m[2][1];
    adj[1][0] = Rat(0) - (m[1][0] * m[2][2] - m[1][2] * m[2][0]);
    adj[2][0] = m[1][0] * m[2][1] - m[1][1] * m[2][0];
    adj[0][1] = Rat(0) - (m[0][1] * m[2][2] - m[0][2] * m[2][1]);
    adj[1][1] = m[0][0] * m[2][2] - m[0][2] * m[2][0];
    adj[2][1] = Rat(0) - (m[0][0] * m[2][1] - m[0][1] * m[2][0]);
    adj[0][2] = m[0][1] * m[1][2] - m[0][2] * m[1][1];
    adj[1][2] = Rat(0) - (m[0][0] * m[1][2] - m[0][2] * m[1][0]);
    adj[2][2] = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    Mat3 out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out[i][j] = adj[i][j] / det;
    return out;
}

// product in Q(theta), theta^3 = -a theta^2 - b theta - c
struct PowerBasisMul {
    i128 a, b, c;
    Vec3 operator()(const Vec3& u, const Vec3& v) const {
        Rat w[5];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) w[i + j] = w[i + j] + u[i] * v[j];
        // theta^3 = (-c, -b, -a), theta^4 = (ac, ab-c, a^2-b)
        Rat r0 = w[0] + w[3] * Rat(-c) + w[4] * Rat(a * c);
        Rat r1 = w[1] + w[3] * Rat(-b) + w[4] * Rat(a * b - c);
        Rat r2 = w[2] + w[3] * Rat(-a) + w[4] * Rat(a * a - b);
        return {r0, r1, r2};
    }
};

// row-style HNF of the lattice spanned by `rows` (full rank expected),
// result upper triangular with positive diagonal
std::array<std::array<int64_t, 3>, 3> hnf3(std::vector<std::array<int64_t, 3>> rows) {
    std::array<std::array<int64_t, 3>, 3> res{};
    std::erase_if(rows, [](const auto& r) { return r[0] == 0 && r[1] == 0 && r[2] == 0; });
    for (int col = 0; col < 3; ++col) {
        // reduce every row with zeros left of `col` against a pivot
        for (;;) {
            int piv = -1;
            for (size_t i = 0; i < rows.size(); ++i) {
                bool leftz = true;
                for (int k = 0; k < col; ++k) leftz &= rows[i][k] == 0;
                if (!leftz || rows[i][col] == 0) continue;
                if (piv < 0 || std::abs(rows[i][col]) < std::abs(rows[piv][col]))
                    piv = static_cast<int>(i);
            }
            if (piv < 0) throw Error("hnf3: rank deficient lattice");
            bool done = true;
            for (size_t i = 0; i < rows.size(); ++i) {
                if (static_cast<int>(i) == piv) continue;
                bool leftz = true;
                for (int k = 0; k < col; ++k) leftz &= rows[i][k] == 0;
                if (!leftz || rows[i][col] == 0) continue;
                int64_t q = rows[i][col] / rows[piv][col];
                for (int k = 0; k < 3; ++k) rows[i][k] -= q * rows[piv][k];
                if (rows[i][col] != 0) done = false;
            }
            if (done) {
                res[col] = rows[piv][col] > 0 ? rows[piv]
                                              : std::array<int64_t, 3>{-rows[piv][0], -rows[piv][1],
                                                                       -rows[piv][2]};
                rows.erase(rows.begin() + piv);
                break;
            }
        }
    }
    for (int i = 2; i >= 0; --i)
        for (int j = i + 1; j < 3; ++j) {
            int64_t q = res[i][j] / res[j][j];
            if (res[i][j] < 0 && res[i][j] % res[j][j] != 0) --q;  // floor
            for (int k = 0; k < 3; ++k) res[i][k] -= q * res[j][k];
        }
    return res;
}

// z with z*U = w for upper-triangular U; entries must divide exactly
std::array<int64_t, 3> solve_upper(const std::array<std::array<int64_t, 3>, 3>& U,
                                   std::array<int64_t, 3> w) {
    std::array<int64_t, 3> z{};
    for (int k = 0; k < 3; ++k) {
        int64_t acc = w[k];
        for (int j = 0; j < k; ++j) acc -= z[j] * U[j][k];
        if (acc % U[k][k] != 0) throw Error("solve_upper: lattice membership violated");
        z[k] = acc / U[k][k];
    }
    return z;
}

// all x in F_p^3 with M x = 0, where the input holds the rows of M
std::vector<std::array<int64_t, 3>> kernel_modp(const std::vector<std::array<int64_t, 3>>& rows_in,
                                                int64_t p) {
    auto M = rows_in;
    std::map<int, int> pivot_row;
    int r = 0;
    for (int c = 0; c < 3 && r < static_cast<int>(M.size()); ++c) {
        int sel = -1;
        for (int i = r; i < static_cast<int>(M.size()); ++i)
            if (M[i][c] % p != 0) { sel = i; break; }
        if (sel < 0) continue;
        std::swap(M[r], M[sel]);
        int64_t inv = pow_mod(((M[r][c] % p) + p) % p, static_cast<uint64_t>(p - 2), p);
        for (auto& x : M[r]) x = ((x % p) * inv % p + p) % p;
        for (int i = 0; i < static_cast<int>(M.size()); ++i) {
            if (i == r) continue;
            int64_t f = ((M[i][c] % p) + p) % p;
            if (f == 0) continue;
            for (int k = 0; k < 3; ++k) M[i][k] = ((M[i][k] - f * M[r][k]) % p + p) % p;
        }
        pivot_row[c] = r;
        ++r;
    }
    std::vector<std::array<int64_t, 3>> out;
    for (int c = 0; c < 3; ++c) {
        if (pivot_row.count(c)) continue;
        std::array<int64_t, 3> v{};
        v[c] = 1;
        for (auto [pc, pr] : pivot_row) v[pc] = ((-M[pr][c]) % p + p) % p;
        out.push_back(v);
    }
    return out;
}

struct OrderBasis {
    std::array<std::array<int64_t, 3>, 3> M;  // rows over the power basis
    int64_t d;                                // common denominator
};

// enlarge the order until it is p-maximal
void p_maximalize(int64_t a, int64_t b, int64_t c, int64_t p, OrderBasis& ob) {
    PowerBasisMul mul{a, b, c};
    int m = (p == 2) ? 2 : 1;   // p^m >= 3 so x -> x^(p^m) kills exactly the radical
    int64_t q = 1;
    for (int i = 0; i < m; ++i) q *= p;

    for (int guard = 0; guard < 64; ++guard) {
        Mat3 B;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) B[i][j] = Rat(ob.M[i][j], ob.d);
        Mat3 Binv = inv3(B);

        // structure constants n_ijk: e_i e_j = sum_k n_ijk e_k
        int64_t prod[3][3][3];
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) {
                Vec3 w = mul(B[i], B[j]);
                for (int k = 0; k < 3; ++k) {
                    Rat o = w[0] * Binv[0][k] + w[1] * Binv[1][k] + w[2] * Binv[2][k];
                    if (!o.is_int()) throw Error("non-integral structure constants");
                    if (o.n > INT64_MAX || o.n < INT64_MIN)
                        throw Error("structure constants overflow");
                    prod[i][j][k] = static_cast<int64_t>(o.n);
                    prod[j][i][k] = prod[i][j][k];
                }
            }
        auto mulO = [&](const std::array<int64_t, 3>& u, const std::array<int64_t, 3>& v) {
            std::array<int64_t, 3> r{};
            for (int i = 0; i < 3; ++i) {
                if (u[i] % p == 0) continue;
                for (int j = 0; j < 3; ++j) {
                    if (v[j] % p == 0) continue;
                    i128 uv = (i128)u[i] * v[j];
                    for (int k = 0; k < 3; ++k)
                        r[k] = static_cast<int64_t>(((r[k] + uv % p * prod[i][j][k]) % p + p) % p);
                }
            }
            return r;
        };

        // radical of O/p = left kernel of the q-power map (rows = images of e_i)
        std::vector<std::array<int64_t, 3>> frob;
        for (int i = 0; i < 3; ++i) {
            std::array<int64_t, 3> base{};
            base[i] = 1;
            std::array<int64_t, 3> acc{};
            bool started = false;
            int64_t e = q;
            while (e) {
                if (e & 1) { acc = started ? mulO(acc, base) : base; started = true; }
                base = mulO(base, base);
                e >>= 1;
            }
            frob.push_back(acc);
        }
        std::vector<std::array<int64_t, 3>> frob_t(3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) frob_t[static_cast<size_t>(j)][i] = frob[static_cast<size_t>(i)][j];
        auto rad = kernel_modp(frob_t, p);

        // I_p = pO + lift(radical), as an HNF basis in O-coordinates
        std::vector<std::array<int64_t, 3>> gens = {{p, 0, 0}, {0, p, 0}, {0, 0, p}};
        for (auto& v : rad) gens.push_back(v);
        auto U = hnf3(gens);

        // multiplier test: y e_j-image expressed in I_p coordinates mod p
        std::vector<std::array<int64_t, 3>> cond;  // rows indexed (jj,k), entries over i
        for (int jj = 0; jj < 3; ++jj) {
            std::array<std::array<int64_t, 3>, 3> z;  // z[i] = coords of e_i * u_jj
            for (int i = 0; i < 3; ++i) {
                std::array<int64_t, 3> w{};
                for (int t = 0; t < 3; ++t) {
                    if (U[jj][t] == 0) continue;
                    for (int k = 0; k < 3; ++k) w[k] += U[jj][t] * prod[i][t][k];
                }
                z[i] = solve_upper(U, w);
            }
            for (int k = 0; k < 3; ++k) {
                std::array<int64_t, 3> row{};
                for (int i = 0; i < 3; ++i) row[i] = ((z[i][k] % p) + p) % p;
                cond.push_back(row);
            }
        }
        auto V = kernel_modp(cond, p);

        std::vector<std::array<int64_t, 3>> ygens = {{p, 0, 0}, {0, p, 0}, {0, 0, p}};
        for (auto& v : V) ygens.push_back(v);
        auto Y = hnf3(ygens);
        if ((i128)Y[0][0] * Y[1][1] * Y[2][2] == (i128)p * p * p)
            return;  // p-maximal

        // O' = (Y/p) O
        Mat3 newB;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                Rat s(0);
                for (int t = 0; t < 3; ++t) s = s + Rat(Y[i][t]) * B[t][j];
                newB[i][j] = s / Rat(p);
            }
        i128 den = 1;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) den = den / gcd128(den, newB[i][j].d) * newB[i][j].d;
        if (den > INT64_MAX) throw Error("order basis denominator overflow");
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                i128 v = newB[i][j].n * (den / newB[i][j].d);
                if (v > INT64_MAX || v < INT64_MIN) throw Error("order basis overflow");
                ob.M[i][j] = static_cast<int64_t>(v);
            }
        ob.d = static_cast<int64_t>(den);
    }
    throw Error("p_maximalize failed to stabilize");
}

} // namespace

int64_t cubic_poly_disc(int64_t a, int64_t b, int64_t c) {
    i128 A = a, B = b, C = c;
    i128 d = 18 * A * B * C - 4 * A * A * A * C + A * A * B * B - 4 * B * B * B - 27 * C * C;
    if (d > INT64_MAX || d < INT64_MIN) throw Error("polynomial discriminant overflow");
    return static_cast<int64_t>(d);
}

std::pair<int64_t, int64_t> cubic_field_disc(int64_t a, int64_t b, int64_t c) {
    int64_t D = cubic_poly_disc(a, b, c);
    if (D == 0) throw Error("cubic_field_disc: repeated root");
    OrderBasis ob{{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}, 1};
    for (auto [p, e] : factorize(std::abs(D)))
        if (e >= 2) p_maximalize(a, b, c, p, ob);

    Mat3 B;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) B[i][j] = Rat(ob.M[i][j], ob.d);
    Rat det = det3(B);
    Rat DF = det * det * Rat(D);
    if (!DF.is_int()) throw Error("field discriminant not integral");
    Rat idx = Rat(D) / DF;
    if (!idx.is_int()) throw Error("index square not integral");
    return {static_cast<int64_t>(DF.n), static_cast<int64_t>(idx.n)};
}

namespace {

int zp_roots_rec(std::array<i128, 4> co, int64_t p, int depth) {
    if (depth > 48)
        throw IndexPrime("p-adic root counting did not separate roots");
    int cnt = 0;
    auto eval_mod = [&](const std::array<i128, 4>& f, int64_t r) {
        i128 v = 0;
        for (int i = 3; i >= 0; --i) v = ((v * r + f[i]) % p + p) % p;
        return static_cast<int64_t>(v);
    };
    std::array<i128, 4> dco{co[1], 2 * co[2], 3 * co[3], 0};
    for (int64_t r = 0; r < p; ++r) {
        if (eval_mod(co, r) != 0) continue;
        if (eval_mod(dco, r) != 0) {
            ++cnt;  // simple root lifts uniquely
            continue;
        }
        // branch: g(y) = f(r + p y) / p^v
        std::array<i128, 4> g{};
        for (int i = 0; i <= 3; ++i) {
            i128 bin = 1, rp = 1;
            for (int j = i; j >= 0; --j) {
                g[j] += co[i] * bin * rp;
                bin = bin * j / (i - j + 1);
                rp *= r;
            }
        }
        i128 scale = 1;
        for (int j = 0; j <= 3; ++j) { g[j] *= scale; scale *= p; }
        int v = -1;
        for (int j = 0; j <= 3; ++j) {
            if (g[j] == 0) continue;
            int vj = 0;
            i128 x = g[j] < 0 ? -g[j] : g[j];
            while (x % p == 0) { x /= p; ++vj; }
            if (v < 0 || vj < v) v = vj;
        }
        for (int j = 0; j <= 3; ++j) {
            for (int k = 0; k < v; ++k) g[j] /= p;
        }
        cnt += zp_roots_rec(g, p, depth + 1);
    }
    return cnt;
}

} // namespace

int zp_root_count(int64_t a, int64_t b, int64_t c, int64_t p) {
    return zp_roots_rec({c, b, a, 1}, p, 0);
}

std::vector<std::pair<int64_t, int>> splitting_fingerprint(int64_t a, int64_t b, int64_t c,
                                                           std::size_t count) {
    int64_t D = cubic_poly_disc(a, b, c);
    std::vector<std::pair<int64_t, int>> fp;
    for (int64_t p = 2; fp.size() < count; p = (p == 2) ? 3 : p + 2) {
        if (!is_prime(p) || D % p == 0) continue;
        int roots = 0;
        for (int64_t r = 0; r < p; ++r)
            if ((((r + a) % p * r + b) % p * r + c) % p == 0) ++roots;
        fp.emplace_back(p, roots);
    }
    return fp;
}

namespace {

// shared-prime agreement; lists long enough that >= 25 primes overlap
bool fingerprints_match(const std::vector<std::pair<int64_t, int>>& x,
                        const std::vector<std::pair<int64_t, int>>& y) {
    size_t i = 0, j = 0, common = 0;
    while (i < x.size() && j < y.size() && common < 25) {
        if (x[i].first < y[j].first) { ++i; continue; }
        if (y[j].first < x[i].first) { ++j; continue; }
        if (x[i].second != y[j].second) return false;
        ++common; ++i; ++j;
    }
    return true;
}

struct Candidate {
    int64_t a, b, c, index_sq, disc_field;
    std::vector<std::pair<int64_t, int>> fp;
};

// largest s with s^2 | n
int64_t square_part(int64_t n) {
    int64_t s = 1;
    for (auto [p, e] : factorize(n)) {
        for (int k = 0; k < e / 2; ++k) s *= p;
    }
    return s;
}

std::vector<CubicField> enumerate_core(double X, int64_t Q_E,
                                       const std::vector<int64_t>& a_values, double t2_pad,
                                       unsigned threads) {
    if (X < 1.0) throw ConfigError("enumerate_cubic_fields: X must be >= 1");
    if (Q_E <= 0) throw ConfigError("enumerate_cubic_fields: Q_E must be positive");
    // Hunter: some generator has trace in {0,1} and T2 <= 1/3 + (2/3) sqrt(|D_F|)
    double T2 = 1.0 / 3.0 + (2.0 / 3.0) * std::sqrt(X) + t2_pad;
    int64_t bb = static_cast<int64_t>((1.0 + T2) / 2.0) + 1;
    int64_t cb = static_cast<int64_t>(std::pow(T2 / 3.0, 1.5)) + 1;
    double volume = static_cast<double>(a_values.size()) * (2.0 * bb + 1) * (2.0 * cb + 1);
    if (volume > 4e9)
        throw EnumerationBoundTooSmall("coefficient box of " + std::to_string(volume) +
                                       " polynomials is beyond the enumerable range");

    auto scan_ab = [&](int64_t a, int64_t b) {
        std::vector<Candidate> out;
        for (int64_t c = -cb; c <= cb; ++c) {
            if (c == 0) continue;  // root at 0
            int64_t D = cubic_poly_disc(a, b, c);
            if (D == 0) continue;
            int64_t s = square_part(std::abs(D));
            if (static_cast<double>(std::abs(D) / (s * s)) > X) continue;  // |D_F| >= |D|/s^2
            // rational root => reducible
            bool reducible = false;
            for (int64_t d = 1; d * d <= std::abs(c) && !reducible; ++d) {
                if (c % d != 0) continue;
                for (int64_t r : {d, -d, c / d, -(c / d)})
                    if (((r + a) * r + b) * r + c == 0) { reducible = true; break; }
            }
            if (reducible) continue;
            auto [DF, idx2] = cubic_field_disc(a, b, c);
            if (std::abs(DF) > static_cast<int64_t>(X)) continue;
            if (DF > 0) {
                auto r = static_cast<int64_t>(std::sqrt(static_cast<double>(DF)));
                bool square = false;
                for (int64_t t = std::max<int64_t>(0, r - 2); t <= r + 2; ++t)
                    if (t * t == DF) { square = true; break; }
                if (square) continue;  // cyclic cubic
            }
            if (gcd64(std::abs(DF), Q_E) != 1) continue;
            out.push_back(Candidate{a, b, c, idx2, DF, splitting_fingerprint(a, b, c)});
        }
        return out;
    };

    // deterministic merge in (a, b) task order
    std::vector<std::pair<int64_t, int64_t>> tasks;
    for (int64_t a : a_values)
        for (int64_t b = -bb; b <= bb; ++b) tasks.emplace_back(a, b);
    auto chunks = parallel_map<std::vector<Candidate>>(
        tasks.size(), threads,
        [&](std::size_t i) { return scan_ab(tasks[i].first, tasks[i].second); });

    std::map<int64_t, std::vector<Candidate>> by_disc;
    for (auto& ch : chunks)
        for (auto& cand : ch) by_disc[cand.disc_field].push_back(std::move(cand));

    std::vector<CubicField> fields;
    for (auto& [DF, cands] : by_disc) {
        std::vector<std::vector<Candidate*>> classes;
        for (auto& cand : cands) {
            bool placed = false;
            for (auto& cl : classes)
                if (fingerprints_match(cl.front()->fp, cand.fp)) {
                    cl.push_back(&cand);
                    placed = true;
                    break;
                }
            if (!placed) classes.push_back({&cand});
        }
        for (auto& cl : classes) {
            Candidate* best = cl.front();
            for (Candidate* cand : cl) {
                auto key = std::tuple(cand->index_sq, cand->a, cand->b, cand->c);
                if (key < std::tuple(best->index_sq, best->a, best->b, best->c)) best = cand;
            }
            CubicField F;
            F.a = best->a;
            F.b = best->b;
            F.c = best->c;
            F.disc_field = DF;
            F.index_sq = best->index_sq;
            F.signature = DF > 0 ? Signature::TotallyReal : Signature::Complex;
            F.fingerprint = std::move(best->fp);
            fields.push_back(std::move(F));
        }
    }
    std::sort(fields.begin(), fields.end(), [](const CubicField& x, const CubicField& y) {
        auto kx = std::tuple(std::abs(x.disc_field), x.disc_field);
        auto ky = std::tuple(std::abs(y.disc_field), y.disc_field);
        if (kx != ky) return kx < ky;
        return x.fingerprint < y.fingerprint;
    });
    return fields;
}

} // namespace

std::vector<CubicField> enumerate_cubic_fields(double X, int64_t Q_E, unsigned threads) {
    return enumerate_core(X, Q_E, {-1, 0}, 0.0, threads);
}

std::vector<CubicField> enumerate_cubic_fields_boxed(double X, int64_t Q_E, int64_t a_abs,
                                                     double t2_pad, unsigned threads) {
    std::vector<int64_t> av;
    for (int64_t a = -a_abs; a <= a_abs; ++a) av.push_back(a);
    return enumerate_core(X, Q_E, av, t2_pad, threads);
}

std::string split_kind_name(SplitKind k) {
    switch (k) {
        case SplitKind::C1: return "C1";
        case SplitKind::C12: return "C12";
        case SplitKind::C123: return "C123";
        case SplitKind::PartialRam: return "PartialRam";
        case SplitKind::TotalRam: return "TotalRam";
    }
    throw Error("unreachable splitting kind");
}

SplittingDatum splitting_type(const CubicField& F, int64_t p) {
    SplittingDatum d;
    d.p = p;
    int roots = zp_root_count(F.a, F.b, F.c, p);
    if (F.disc_field % p == 0) {
        // p2q leaves one unramified linear place; p3 leaves none
        if (roots == 1) d.kind = SplitKind::PartialRam;
        else if (roots == 0) d.kind = SplitKind::TotalRam;
        else throw Error("impossible ramified root count");
    } else {
        if (roots == 3) d.kind = SplitKind::C1;
        else if (roots == 1) d.kind = SplitKind::C12;
        else if (roots == 0) d.kind = SplitKind::C123;
        else throw Error("impossible unramified root count");
    }
    switch (d.kind) {
        case SplitKind::C1: d.a_rho_p = 2; d.a_rho_p2 = 2; break;
        case SplitKind::C12: d.a_rho_p = 0; d.a_rho_p2 = 2; break;
        case SplitKind::C123: d.a_rho_p = -1; d.a_rho_p2 = -1; break;
        case SplitKind::PartialRam: d.a_rho_p = 1; d.a_rho_p2 = 1; break;
        case SplitKind::TotalRam: d.a_rho_p = 0; d.a_rho_p2 = 0; break;
    }
    return d;
}

LocalDensityReport local_density_report(const std::vector<CubicField>& fields, int64_t p) {
    LocalDensityReport rep;
    rep.p = p;
    double dp = static_cast<double>(p);
    rep.c1 = 1.0 / dp;
    rep.c2 = 1.0 / (dp * dp);
    rep.f_p = rep.c1 + rep.c2;
    const SplitKind kinds[5] = {SplitKind::C1, SplitKind::C12, SplitKind::C123,
                                SplitKind::PartialRam, SplitKind::TotalRam};
    const double class_size[5] = {1.0 / 6, 3.0 / 6, 2.0 / 6, rep.c1, rep.c2};
    std::array<int64_t, 5> observed{};
    for (const auto& F : fields) {
        SplittingDatum d = splitting_type(F, p);
        for (int i = 0; i < 5; ++i)
            if (kinds[i] == d.kind) ++observed[static_cast<size_t>(i)];
        ++rep.known;
    }
    for (int i = 0; i < 5; ++i) {
        LocalDensityRow row;
        row.kind = kinds[i];
        row.observed = observed[static_cast<size_t>(i)];
        row.empirical = rep.known ? static_cast<double>(row.observed) / rep.known : 0.0;
        row.predicted = class_size[i] / (1.0 + rep.f_p);
        row.gap = row.empirical - row.predicted;
        rep.rows[static_cast<size_t>(i)] = row;
    }
    return rep;
}

namespace {

struct RhoTerms {
    double logL = 0.0;
    std::vector<std::pair<int64_t, double>> c1, c2;  // shared prime factors
};

RhoTerms build_rho_terms(const EllipticCurve& E, double X, const TestFunction& phi,
                         const LocalProvider& provider) {
    RhoTerms t;
    double L = X * X;
    t.logL = std::log(L);
    auto p1 = static_cast<int64_t>(std::exp(phi.sigma() * t.logL) + 1e-9);
    auto p2 = static_cast<int64_t>(std::exp(phi.sigma() / 2.0 * t.logL) + 1e-9);
    for (int64_t p : primes_up_to(p1)) {
        LocalData d = provider ? provider(p) : reduction_type(E, p);
        double lp = std::log(static_cast<double>(p));
        t.c1.emplace_back(p, lp / std::sqrt(static_cast<double>(p)) * a_f(d) *
                                 phi.phi_hat(lp / t.logL));
        if (p <= p2)
            t.c2.emplace_back(p, lp / static_cast<double>(p) * a_f_sq(d) *
                                     phi.phi_hat(2.0 * lp / t.logL));
    }
    return t;
}

DensityReport cubic_report(const EllipticCurve& E, const CubicField& F, const RhoTerms& t,
                           const TestFunction& phi) {
    double df = static_cast<double>(F.disc_field);
    double ct = phi.phihat0() *
                (2.0 * std::log(std::abs(df)) + std::log(static_cast<double>(E.conductor()))) /
                t.logL;
    double s1 = 0.0, s2 = 0.0;
    for (auto [p, c] : t.c1) s1 += c * splitting_type(F, p).a_rho_p;
    for (auto [p, c] : t.c2) s2 += c * splitting_type(F, p).a_rho_p2;
    s1 *= -2.0 / t.logL;
    s2 *= -2.0 / t.logL;
    DensityReport r;
    r.conductor_term = ct;
    r.s1 = s1;
    r.s2 = s2;
    r.total = ct + s1 + s2;
    r.predicted = phi.phihat0() + phi.phi0() / 2.0;
    r.family_size = 1.0;
    r.L_param = t.logL;  // overwritten by callers with L itself
    r.error_budget = kErrorBudgetC / t.logL;
    r.symmetry = "O";
    return r;
}

} // namespace

DensityReport one_level_density_cubic(const EllipticCurve& E, const CubicField& F, double X,
                                      const TestFunction& phi, const LocalProvider& provider) {
    if (gcd64(std::abs(F.disc_field), E.conductor()) != 1)
        throw ConductorClash("field discriminant shares a factor with the curve conductor");
    RhoTerms t = build_rho_terms(E, X, phi, provider);
    DensityReport r = cubic_report(E, F, t, phi);
    r.L_param = X * X;
    return r;
}

DensityReport family_average_cubic(const EllipticCurve& E, double X, const TestFunction& phi,
                                   const LocalProvider& provider, unsigned threads) {
    auto fields = enumerate_cubic_fields(X, E.conductor(), threads);
    if (fields.empty()) throw EmptyFamily("no cubic fields with |D_F| <= X");
    RhoTerms t = build_rho_terms(E, X, phi, provider);

    struct Row { double ct, s1, s2; };
    auto rows = parallel_map<Row>(fields.size(), threads, [&](std::size_t i) {
        DensityReport r = cubic_report(E, fields[i], t, phi);
        return Row{r.conductor_term, r.s1, r.s2};
    });
    double n = static_cast<double>(rows.size());
    DensityReport out;
    for (const Row& r : rows) {
        out.conductor_term += r.ct / n;
        out.s1 += r.s1 / n;
        out.s2 += r.s2 / n;
    }
    out.total = out.conductor_term + out.s1 + out.s2;
    out.predicted = phi.phihat0() + phi.phi0() / 2.0;
    out.family_size = n;
    out.L_param = X * X;
    out.error_budget = kErrorBudgetC / t.logL;
    out.symmetry = "O";
    return out;
}

} // namespace lowlying
