#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace starklab {

using i64 = std::int64_t;
using Vec = std::vector<i64>;

// Z/p^m with residues kept in [0, p^m).
struct Zmod {
    int p = 2;
    int m = 1;
    i64 q = 2;

    Zmod() = default;
    Zmod(int p, int m);

    i64 red(i64 x) const {
        x %= q;
        return x < 0 ? x + q : x;
    }
    i64 add(i64 a, i64 b) const {
        i64 s = a + b;
        return s >= q ? s - q : s;
    }
    i64 sub(i64 a, i64 b) const {
        i64 s = a - b;
        return s < 0 ? s + q : s;
    }
    i64 neg(i64 a) const { return a == 0 ? 0 : q - a; }
    i64 mul(i64 a, i64 b) const { return static_cast<i64>(static_cast<__int128>(a) * b % q); }

    int val(i64 a) const;   // m for zero
    i64 inv(i64 a) const;   // throws unless a is a unit
    i64 ppow(int k) const;  // p^k, 0 once k >= m
    bool operator==(const Zmod& o) const { return p == o.p && m == o.m; }
};

i64 ipow(i64 b, int e);
bool is_zero(const Vec& v);
int vp(i64 x, int p);  // valuation of a nonzero integer

// Dense row-major matrix over Z/p^m.
struct Mat {
    int rows = 0;
    int cols = 0;
    Vec a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0) {}

    i64& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    i64 at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
    Vec row(int i) const { return Vec(a.begin() + static_cast<long>(i) * cols, a.begin() + static_cast<long>(i + 1) * cols); }
    void push_row(const Vec& v);
};

// Additive submodule of (Z/p^m)^n held in Howell normal form.
class ZSpan {
public:
    ZSpan() = default;
    ZSpan(const Zmod& z, int n) : z_(z), n_(n) {}

    static ZSpan from_rows(const Zmod& z, int n, std::vector<Vec> rows);
    static ZSpan from_mat(const Zmod& z, const Mat& m);
    static ZSpan whole(const Zmod& z, int n);

    const Zmod& zmod() const { return z_; }
    int dim() const { return n_; }
    const std::vector<Vec>& rows() const { return rows_; }
    const std::vector<std::pair<int, int>>& pivots() const { return piv_; }  // (column, valuation)

    Vec reduce(Vec v) const;  // unique coset representative
    bool contains(const Vec& v) const;
    bool contains(const ZSpan& o) const;
    int log_card() const;     // log_p of the span's order
    bool is_zero() const { return rows_.empty(); }

    ZSpan plus(const ZSpan& o) const;
    ZSpan meet(const ZSpan& o) const;

    bool operator==(const ZSpan& o) const { return n_ == o.n_ && rows_ == o.rows_; }
    bool operator!=(const ZSpan& o) const { return !(*this == o); }

private:
    Zmod z_;
    int n_ = 0;
    std::vector<Vec> rows_;
    std::vector<std::pair<int, int>> piv_;
};

std::vector<Vec> howell_rows(const Zmod& z, int n, std::vector<Vec> rows, std::vector<std::pair<int, int>>* piv = nullptr);

// {x : x A = 0} for a rows x cols matrix A.
ZSpan left_kernel(const Zmod& z, const Mat& A);
// {x : x A in W}.
ZSpan preimage(const Zmod& z, const Mat& A, const ZSpan& W);
// image {x A}.
ZSpan image(const Zmod& z, const Mat& A);
// some x with x A = b, if any.
bool solve_left(const Zmod& z, const Mat& A, const Vec& b, Vec& x);

Vec vec_mul(const Zmod& z, const Vec& x, const Mat& A);
std::string vec_str(const Vec& v);

}  // namespace starklab
