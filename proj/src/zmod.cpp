#include "starklab/zmod.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace starklab {

i64 ipow(i64 b, int e) {
    i64 r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

int vp(i64 x, int p) {
    int v = 0;
    if (x == 0) return 1 << 20;
    while (x % p == 0) {
        x /= p;
        ++v;
    }
    return v;
}

Zmod::Zmod(int p_, int m_) : p(p_), m(m_) {
    if (p < 2 || m < 1) throw std::invalid_argument("bad modulus p^m");
    q = 1;
    for (int i = 0; i < m; ++i) {
        if (q > (i64(1) << 40) / p) throw std::invalid_argument("modulus too large");
        q *= p;
    }
}

int Zmod::val(i64 a) const {
    if (a == 0) return m;
    int v = 0;
    while (a % p == 0) {
        a /= p;
        ++v;
    }
    return v;
}

i64 Zmod::inv(i64 a) const {
    a = red(a);
    i64 g0 = q, g1 = a, x0 = 0, x1 = 1;
    while (g1 != 0) {
        i64 t = g0 / g1;
        i64 g2 = g0 - t * g1;
        g0 = g1;
        g1 = g2;
        i64 x2 = x0 - t * x1;
        x0 = x1;
        x1 = x2;
    }
    if (g0 != 1) throw std::domain_error("not a unit mod p^m");
    return red(x0);
}

i64 Zmod::ppow(int k) const { return k >= m ? 0 : ipow(p, k); }

void Mat::push_row(const Vec& v) {
    if (rows == 0 && cols == 0) cols = static_cast<int>(v.size());
    if (static_cast<int>(v.size()) != cols) throw std::invalid_argument("row length mismatch");
    a.insert(a.end(), v.begin(), v.end());
    ++rows;
}

bool is_zero(const Vec& v) {
    for (i64 x : v)
        if (x) return false;
    return true;
}

namespace {

void axpy(const Zmod& z, Vec& y, i64 t, const Vec& x, int from) {
    // y -= t x
    const int n = static_cast<int>(y.size());
    for (int i = from; i < n; ++i)
        if (x[i]) y[i] = z.sub(y[i], z.mul(t, x[i]));
}

}  // namespace

std::vector<Vec> howell_rows(const Zmod& z, int n, std::vector<Vec> pool, std::vector<std::pair<int, int>>* piv) {
    std::vector<Vec> H;
    std::vector<std::pair<int, int>> pv;
    {
        std::vector<Vec> keep;
        keep.reserve(pool.size());
        for (auto& r : pool) {
            if (static_cast<int>(r.size()) != n) throw std::invalid_argument("howell: row length mismatch");
            for (auto& x : r) x = z.red(x);
            if (!is_zero(r)) keep.push_back(std::move(r));
        }
        pool.swap(keep);
    }
    for (int c = 0; c < n && !pool.empty(); ++c) {
        int best = -1, bv = z.m;
        for (size_t i = 0; i < pool.size(); ++i) {
            int v = z.val(pool[i][c]);
            if (v < bv) {
                bv = v;
                best = static_cast<int>(i);
                if (v == 0) break;
            }
        }
        if (best < 0) continue;
        Vec r = std::move(pool[best]);
        pool[best] = std::move(pool.back());
        pool.pop_back();
        const i64 pk = ipow(z.p, bv);
        const i64 ui = z.inv(r[c] / pk);
        if (ui != 1)
            for (int i = c; i < n; ++i) r[i] = z.mul(r[i], ui);
        std::vector<Vec> next;
        next.reserve(pool.size() + 1);
        for (auto& s : pool) {
            if (s[c]) axpy(z, s, s[c] / pk, r, c);
            if (!is_zero(s)) next.push_back(std::move(s));
        }
        if (bv > 0) {
            Vec a(r);
            const i64 f = ipow(z.p, z.m - bv);
            for (int i = c; i < n; ++i) a[i] = z.mul(a[i], f);
            if (!is_zero(a)) next.push_back(std::move(a));
        }
        pool.swap(next);
        H.push_back(std::move(r));
        pv.emplace_back(c, bv);
    }
    for (size_t j = 0; j < H.size(); ++j) {
        const int c = pv[j].first;
        const i64 pk = ipow(z.p, pv[j].second);
        for (size_t i = 0; i < j; ++i) {
            i64 t = H[i][c] / pk;
            if (t) axpy(z, H[i], t, H[j], c);
        }
    }
    if (piv) *piv = std::move(pv);
    return H;
}

ZSpan ZSpan::from_rows(const Zmod& z, int n, std::vector<Vec> rows) {
    ZSpan s(z, n);
    s.rows_ = howell_rows(z, n, std::move(rows), &s.piv_);
    return s;
}

ZSpan ZSpan::from_mat(const Zmod& z, const Mat& m) {
    std::vector<Vec> rows;
    rows.reserve(m.rows);
    for (int i = 0; i < m.rows; ++i) rows.push_back(m.row(i));
    return from_rows(z, m.cols, std::move(rows));
}

ZSpan ZSpan::whole(const Zmod& z, int n) {
    std::vector<Vec> rows;
    for (int i = 0; i < n; ++i) {
        Vec e(n, 0);
        e[i] = 1;
        rows.push_back(std::move(e));
    }
    return from_rows(z, n, std::move(rows));
}

Vec ZSpan::reduce(Vec v) const {
    if (static_cast<int>(v.size()) != n_) throw std::invalid_argument("reduce: length mismatch");
    for (auto& x : v) x = z_.red(x);
    for (size_t j = 0; j < rows_.size(); ++j) {
        const int c = piv_[j].first;
        const i64 t = v[c] / ipow(z_.p, piv_[j].second);
        if (t) axpy(z_, v, t, rows_[j], c);
    }
    return v;
}

bool ZSpan::contains(const Vec& v) const { return starklab::is_zero(reduce(v)); }

bool ZSpan::contains(const ZSpan& o) const {
    for (const auto& r : o.rows_)
        if (!contains(r)) return false;
    return true;
}

int ZSpan::log_card() const {
    int s = 0;
    for (const auto& pr : piv_) s += z_.m - pr.second;
    return s;
}

ZSpan ZSpan::plus(const ZSpan& o) const {
    std::vector<Vec> rows = rows_;
    rows.insert(rows.end(), o.rows_.begin(), o.rows_.end());
    return from_rows(z_, n_, std::move(rows));
}

ZSpan ZSpan::meet(const ZSpan& o) const {
    std::vector<Vec> rows;
    for (const auto& r : rows_) {
        Vec x(2 * n_, 0);
        std::copy(r.begin(), r.end(), x.begin());
        std::copy(r.begin(), r.end(), x.begin() + n_);
        rows.push_back(std::move(x));
    }
    for (const auto& r : o.rows_) {
        Vec x(2 * n_, 0);
        std::copy(r.begin(), r.end(), x.begin());
        rows.push_back(std::move(x));
    }
    std::vector<std::pair<int, int>> pv;
    auto H = howell_rows(z_, 2 * n_, std::move(rows), &pv);
    std::vector<Vec> out;
    for (size_t j = 0; j < H.size(); ++j)
        if (pv[j].first >= n_) out.emplace_back(H[j].begin() + n_, H[j].end());
    return from_rows(z_, n_, std::move(out));
}

namespace {

std::vector<Vec> augmented(const Mat& A) {
    std::vector<Vec> rows;
    for (int i = 0; i < A.rows; ++i) {
        Vec x(A.cols + A.rows, 0);
        for (int j = 0; j < A.cols; ++j) x[j] = A.at(i, j);
        x[A.cols + i] = 1;
        rows.push_back(std::move(x));
    }
    return rows;
}

ZSpan tail_part(const Zmod& z, int head, int tail, std::vector<Vec> rows) {
    std::vector<std::pair<int, int>> pv;
    auto H = howell_rows(z, head + tail, std::move(rows), &pv);
    std::vector<Vec> out;
    for (size_t j = 0; j < H.size(); ++j)
        if (pv[j].first >= head) out.emplace_back(H[j].begin() + head, H[j].end());
    return ZSpan::from_rows(z, tail, std::move(out));
}

}  // namespace

ZSpan left_kernel(const Zmod& z, const Mat& A) { return tail_part(z, A.cols, A.rows, augmented(A)); }

ZSpan preimage(const Zmod& z, const Mat& A, const ZSpan& W) {
    auto rows = augmented(A);
    for (const auto& w : W.rows()) {
        Vec x(A.cols + A.rows, 0);
        std::copy(w.begin(), w.end(), x.begin());
        rows.push_back(std::move(x));
    }
    return tail_part(z, A.cols, A.rows, std::move(rows));
}

ZSpan image(const Zmod& z, const Mat& A) { return ZSpan::from_mat(z, A); }

bool solve_left(const Zmod& z, const Mat& A, const Vec& b, Vec& x) {
    const int n = A.cols + A.rows;
    ZSpan H = ZSpan::from_rows(z, n, augmented(A));
    Vec t(n, 0);
    std::copy(b.begin(), b.end(), t.begin());
    t = H.reduce(std::move(t));
    for (int j = 0; j < A.cols; ++j)
        if (t[j]) return false;
    x.assign(A.rows, 0);
    for (int i = 0; i < A.rows; ++i) x[i] = z.neg(t[A.cols + i]);
    return true;
}

Vec vec_mul(const Zmod& z, const Vec& x, const Mat& A) {
    Vec y(A.cols, 0);
    for (int i = 0; i < A.rows; ++i) {
        if (!x[i]) continue;
        for (int j = 0; j < A.cols; ++j) {
            i64 a = A.at(i, j);
            if (a) y[j] = z.add(y[j], z.mul(x[i], a));
        }
    }
    return y;
}

std::string vec_str(const Vec& v) {
    std::ostringstream os;
    os << '[';
    for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << ']';
    return os.str();
}

}  // namespace starklab
