// Integer and field linear algebra on sparse boundary matrices.
#include "nodaltop/cohomology.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace nodaltop {

namespace {

struct Overflow {};

// int64 that refuses to wrap.
struct Checked {
    std::int64_t v = 0;

    Checked() = default;
    Checked(std::int64_t x) : v(x) {}

    friend Checked operator+(Checked a, Checked b)
    {
        std::int64_t r;
        if (__builtin_add_overflow(a.v, b.v, &r)) throw Overflow{};
        return r;
    }
    friend Checked operator-(Checked a, Checked b)
    {
        std::int64_t r;
        if (__builtin_sub_overflow(a.v, b.v, &r)) throw Overflow{};
        return r;
    }
    friend Checked operator*(Checked a, Checked b)
    {
        std::int64_t r;
        if (__builtin_mul_overflow(a.v, b.v, &r)) throw Overflow{};
        return r;
    }
    friend Checked operator/(Checked a, Checked b)
    {
        if (a.v == INT64_MIN && b.v == -1) throw Overflow{};
        return a.v / b.v;
    }
    Checked operator-() const
    {
        if (v == INT64_MIN) throw Overflow{};
        return -v;
    }
    friend bool operator==(Checked a, Checked b) { return a.v == b.v; }
    friend bool operator<(Checked a, Checked b) { return a.v < b.v; }
};

Checked abs_value(Checked a) { return a.v < 0 ? -a : a; }
BigInt abs_value(const BigInt& a) { return a < 0 ? BigInt(-a) : a; }
Checked gcd_value(Checked a, Checked b) { return std::gcd(abs_value(a).v, abs_value(b).v); }
BigInt gcd_value(const BigInt& a, const BigInt& b) { return boost::multiprecision::gcd(a, b); }
BigInt to_big(Checked a) { return BigInt(a.v); }
BigInt to_big(const BigInt& a) { return a; }

template <class T>
using Column = std::vector<std::pair<int, T>>;

template <class T>
std::vector<Column<T>> convert_columns(const SparseMatrix& m)
{
    std::vector<Column<T>> cols(m.columns.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (const auto& [r, v] : m.columns[j]) cols[j].emplace_back(r, T(v));
    return cols;
}

// a <- a - f * b on sorted sparse columns
template <class T>
Column<T> axpy(const Column<T>& a, const T& f, const Column<T>& b)
{
    Column<T> out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, k = 0;
    while (i < a.size() || k < b.size()) {
        if (k == b.size() || (i < a.size() && a[i].first < b[k].first)) {
            out.push_back(a[i++]);
        } else if (i == a.size() || b[k].first < a[i].first) {
            out.emplace_back(b[k].first, T(0) - f * b[k].second);
            ++k;
        } else {
            T v = a[i].second - f * b[k].second;
            if (!(v == T(0))) out.emplace_back(a[i].first, v);
            ++i;
            ++k;
        }
    }
    return out;
}

template <class T>
bool is_unit(const T& x)
{
    return x == T(1) || x == T(-1);
}

// Dense Smith reduction in place; optional unimodular bookkeeping.
void dense_smith(std::vector<std::vector<BigInt>>& a, std::vector<std::vector<BigInt>>* u,
                 std::vector<std::vector<BigInt>>* v)
{
    const std::size_t m = a.size();
    const std::size_t n = m ? a[0].size() : 0;
    auto swap_rows = [&](std::size_t i, std::size_t k) {
        std::swap(a[i], a[k]);
        if (u) std::swap((*u)[i], (*u)[k]);
    };
    auto swap_cols = [&](std::size_t j, std::size_t k) {
        for (auto& row : a) std::swap(row[j], row[k]);
        if (v)
            for (auto& row : *v) std::swap(row[j], row[k]);
    };
    auto add_row = [&](std::size_t dst, const BigInt& f, std::size_t src) {  // row dst += f row src
        for (std::size_t j = 0; j < n; ++j) a[dst][j] += f * a[src][j];
        if (u)
            for (std::size_t j = 0; j < m; ++j) (*u)[dst][j] += f * (*u)[src][j];
    };
    auto add_col = [&](std::size_t dst, const BigInt& f, std::size_t src) {
        for (std::size_t i = 0; i < m; ++i) a[i][dst] += f * a[i][src];
        if (v)
            for (std::size_t i = 0; i < n; ++i) (*v)[i][dst] += f * (*v)[i][src];
    };

    for (std::size_t t = 0; t < std::min(m, n); ++t) {
        // smallest nonzero entry of the trailing block becomes the pivot
        bool found = false;
        BigInt best;
        std::size_t bi = t, bj = t;
        for (std::size_t i = t; i < m; ++i)
            for (std::size_t j = t; j < n; ++j)
                if (a[i][j] != 0 && (!found || abs_value(a[i][j]) < best)) {
                    found = true;
                    best = abs_value(a[i][j]);
                    bi = i;
                    bj = j;
                }
        if (!found) break;
        swap_rows(t, bi);
        swap_cols(t, bj);
        for (;;) {
            bool dirty = false;
            for (std::size_t i = t + 1; i < m; ++i)
                if (a[i][t] != 0) {
                    add_row(i, -BigInt(a[i][t] / a[t][t]), t);
                    if (a[i][t] != 0) dirty = true;
                }
            for (std::size_t j = t + 1; j < n; ++j)
                if (a[t][j] != 0) {
                    add_col(j, -BigInt(a[t][j] / a[t][t]), t);
                    if (a[t][j] != 0) dirty = true;
                }
            if (dirty) {
                // a remainder survived: move the smallest one to the pivot
                std::size_t ri = t, cj = t;
                BigInt small = abs_value(a[t][t]);
                for (std::size_t i = t + 1; i < m; ++i)
                    if (a[i][t] != 0 && abs_value(a[i][t]) < small) small = abs_value(a[i][t]), ri = i, cj = t;
                for (std::size_t j = t + 1; j < n; ++j)
                    if (a[t][j] != 0 && abs_value(a[t][j]) < small) small = abs_value(a[t][j]), ri = t, cj = j;
                swap_rows(t, ri);
                swap_cols(t, cj);
                continue;
            }
            bool divisible = true;
            for (std::size_t i = t + 1; i < m && divisible; ++i)
                for (std::size_t j = t + 1; j < n; ++j)
                    if (a[i][j] % a[t][t] != 0) {
                        add_row(t, 1, i);
                        divisible = false;
                        break;
                    }
            if (divisible) break;
        }
        if (a[t][t] < 0) {
            for (std::size_t j = 0; j < n; ++j) a[t][j] = -a[t][j];
            if (u)
                for (std::size_t j = 0; j < m; ++j) (*u)[t][j] = -(*u)[t][j];
        }
    }
}

template <class T>
SmithForm sparse_smith(const SparseMatrix& m)
{
    std::vector<Column<T>> cols = convert_columns<T>(m);
    std::vector<std::vector<int>> rows(static_cast<std::size_t>(m.rows));
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (const auto& e : cols[j]) rows[e.first].push_back(static_cast<int>(j));
    // row lists may hold stale column ids; membership is re-checked on use
    std::vector<char> active(cols.size(), 1);
    std::size_t units = 0;

    auto entry = [&](std::size_t j, int r) -> const T* {
        auto it = std::lower_bound(cols[j].begin(), cols[j].end(), r,
                                   [](const std::pair<int, T>& e, int row) { return e.first < row; });
        return (it != cols[j].end() && it->first == r) ? &it->second : nullptr;
    };
    auto live_row_size = [&](int r) {
        auto& list = rows[r];
        list.erase(std::remove_if(list.begin(), list.end(),
                                  [&](int j) { return !active[j] || !entry(j, r); }),
                   list.end());
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
        return list.size();
    };

    bool progress = true;
    while (progress) {
        progress = false;
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (!active[c]) continue;
            if (cols[c].empty()) {
                active[c] = 0;
                continue;
            }
            int pr = -1;
            std::size_t best = SIZE_MAX;
            for (const auto& [r, val] : cols[c])
                if (is_unit(val)) {
                    const std::size_t s = live_row_size(r);
                    if (s < best) best = s, pr = r;
                }
            if (pr < 0) continue;
            const T a = *entry(c, pr);
            const std::vector<int> others = rows[pr];
            for (int j : others) {
                if (static_cast<std::size_t>(j) == c) continue;
                const T* e = entry(j, pr);
                if (!e) continue;
                const T f = *e * a;
                Column<T> next = axpy(cols[j], f, cols[c]);
                for (const auto& [r, val] : next) rows[r].push_back(j);
                cols[j] = std::move(next);
            }
            active[c] = 0;
            cols[c].clear();
            ++units;
            progress = true;
        }
    }

    // dense Smith form of whatever has no unit entries left
    std::vector<std::size_t> rest_cols;
    std::map<int, std::size_t> rest_rows;
    for (std::size_t j = 0; j < cols.size(); ++j)
        if (active[j] && !cols[j].empty()) {
            rest_cols.push_back(j);
            for (const auto& e : cols[j]) rest_rows.emplace(e.first, 0);
        }
    std::size_t idx = 0;
    for (auto& [r, i] : rest_rows) i = idx++;
    std::vector<std::vector<BigInt>> dense(rest_rows.size(), std::vector<BigInt>(rest_cols.size()));
    for (std::size_t k = 0; k < rest_cols.size(); ++k)
        for (const auto& [r, val] : cols[rest_cols[k]]) dense[rest_rows[r]][k] = to_big(val);
    dense_smith(dense, nullptr, nullptr);

    SmithForm f;
    f.factors.assign(units, BigInt(1));
    for (std::size_t t = 0; t < std::min(dense.size(), rest_cols.size()); ++t)
        if (dense[t][t] != 0) f.factors.push_back(dense[t][t]);
    return f;
}

template <class T>
void normalize_content(Column<T>& col)
{
    T g(0);
    for (const auto& e : col) g = gcd_value(g, e.second);
    if (col.empty()) return;
    if (col.back().second < T(0)) g = T(0) - g;
    if (!(g == T(1)))
        for (auto& e : col) e.second = e.second / g;
}

template <class T>
std::size_t rational_rank(const SparseMatrix& m)
{
    std::vector<Column<T>> cols = convert_columns<T>(m);
    std::vector<int> pivot_of_row(static_cast<std::size_t>(m.rows), -1);
    std::size_t rank = 0;
    for (std::size_t j = 0; j < cols.size(); ++j) {
        Column<T>& c = cols[j];
        normalize_content(c);
        while (!c.empty()) {
            const int low = c.back().first;
            const int p = pivot_of_row[low];
            if (p < 0) break;
            const Column<T>& pc = cols[p];
            const T pv = pc.back().second;  // positive after normalization
            const T cv = c.back().second;
            Column<T> scaled;
            scaled.reserve(c.size());
            for (const auto& e : c) scaled.emplace_back(e.first, e.second * pv);
            c = axpy(scaled, cv, pc);
            normalize_content(c);
        }
        if (!c.empty()) {
            pivot_of_row[c.back().first] = static_cast<int>(j);
            ++rank;
        }
    }
    return rank;
}

}  // namespace

std::vector<BigInt> SmithForm::torsion() const
{
    std::vector<BigInt> t;
    for (const auto& f : factors)
        if (f > 1) t.push_back(f);
    return t;
}

SparseMatrix SparseMatrix::from_dense(const std::vector<std::vector<std::int64_t>>& d)
{
    const int r = static_cast<int>(d.size());
    const int c = r ? static_cast<int>(d[0].size()) : 0;
    SparseMatrix m(r, c);
    for (int j = 0; j < c; ++j)
        for (int i = 0; i < r; ++i)
            if (d[i][j] != 0) m.columns[j].emplace_back(i, d[i][j]);
    return m;
}

std::vector<std::vector<std::int64_t>> SparseMatrix::to_dense() const
{
    std::vector<std::vector<std::int64_t>> d(rows, std::vector<std::int64_t>(cols, 0));
    for (int j = 0; j < cols; ++j)
        for (const auto& [i, v] : columns[j]) d[i][j] = v;
    return d;
}

std::size_t SparseMatrix::nonzeros() const
{
    std::size_t n = 0;
    for (const auto& c : columns) n += c.size();
    return n;
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b)
{
    if (a.cols != b.rows) throw std::invalid_argument("matrix shapes do not match");
    SparseMatrix out(a.rows, b.cols);
    try {
        for (int j = 0; j < b.cols; ++j) {
            std::map<int, Checked> acc;
            for (const auto& [k, bv] : b.columns[j])
                for (const auto& [i, av] : a.columns[k]) acc[i] = acc[i] + Checked(av) * Checked(bv);
            for (const auto& [i, v] : acc)
                if (v.v != 0) out.columns[j].emplace_back(i, v.v);
        }
    } catch (const Overflow&) {
        throw std::overflow_error("matrix product leaves int64");
    }
    return out;
}

SmithForm smith_normal_form(const SparseMatrix& m)
{
    try {
        SmithForm f = sparse_smith<Checked>(m);
        const BigInt limit = std::numeric_limits<std::int64_t>::max();
        for (const auto& d : f.factors) f.used_big_integers = f.used_big_integers || d > limit;
        return f;
    } catch (const Overflow&) {
        SmithForm f = sparse_smith<BigInt>(m);
        f.used_big_integers = true;
        return f;
    }
}

SmithDecomposition smith_decomposition(const std::vector<std::vector<BigInt>>& a)
{
    const std::size_t m = a.size();
    const std::size_t n = m ? a[0].size() : 0;
    SmithDecomposition s;
    s.d = a;
    s.u.assign(m, std::vector<BigInt>(m, 0));
    s.v.assign(n, std::vector<BigInt>(n, 0));
    for (std::size_t i = 0; i < m; ++i) s.u[i][i] = 1;
    for (std::size_t i = 0; i < n; ++i) s.v[i][i] = 1;
    dense_smith(s.d, &s.u, &s.v);
    return s;
}

std::size_t rank_mod2(const SparseMatrix& m)
{
    std::vector<std::vector<int>> cols(m.columns.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (const auto& [r, v] : m.columns[j])
            if (v % 2 != 0) cols[j].push_back(r);
    std::vector<int> pivot_of_row(static_cast<std::size_t>(m.rows), -1);
    std::size_t rank = 0;
    std::vector<int> tmp;
    for (std::size_t j = 0; j < cols.size(); ++j) {
        auto& c = cols[j];
        while (!c.empty() && pivot_of_row[c.back()] >= 0) {
            const auto& p = cols[pivot_of_row[c.back()]];
            tmp.clear();
            std::set_symmetric_difference(c.begin(), c.end(), p.begin(), p.end(), std::back_inserter(tmp));
            c.swap(tmp);
        }
        if (!c.empty()) {
            pivot_of_row[c.back()] = static_cast<int>(j);
            ++rank;
        }
    }
    return rank;
}

std::size_t rank_rational(const SparseMatrix& m)
{
    try {
        return rational_rank<Checked>(m);
    } catch (const Overflow&) {
        return rational_rank<BigInt>(m);
    }
}

}  // namespace nodaltop
