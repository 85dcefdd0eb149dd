#include "starklab/ring_core.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace starklab {

namespace {

bool is_prime(int p) {
    if (p < 2) return false;
    for (int d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

// polynomials over F_p, low degree first
std::vector<int> poly_mod(std::vector<int> a, const std::vector<int>& b, int p) {
    const int db = static_cast<int>(b.size()) - 1;
    int inv_lead = 1;
    while ((inv_lead * b[db]) % p != 1) ++inv_lead;
    for (int i = static_cast<int>(a.size()) - 1; i >= db; --i) {
        int c = (a[i] * inv_lead) % p;
        if (!c) continue;
        for (int j = 0; j <= db; ++j) a[i - db + j] = ((a[i - db + j] - c * b[j]) % p + p) % p;
    }
    a.resize(std::min<size_t>(a.size(), db));
    return a;
}

bool irreducible(const std::vector<int>& h, int p) {
    const int f = static_cast<int>(h.size()) - 1;
    for (int d = 1; d <= f / 2; ++d) {
        i64 cnt = ipow(p, d);
        for (i64 code = 0; code < cnt; ++code) {
            std::vector<int> g(d + 1, 0);
            i64 c = code;
            for (int i = 0; i < d; ++i) {
                g[i] = static_cast<int>(c % p);
                c /= p;
            }
            g[d] = 1;
            auto r = poly_mod(h, g, p);
            bool zero = true;
            for (int x : r)
                if (x) zero = false;
            if (zero) return false;
        }
    }
    return true;
}

std::vector<int> first_irreducible(int p, int f) {
    i64 cnt = ipow(p, f);
    for (i64 code = 0; code < cnt; ++code) {
        std::vector<int> h(f + 1, 0);
        i64 c = code;
        for (int i = 0; i < f; ++i) {
            h[i] = static_cast<int>(c % p);
            c /= p;
        }
        h[f] = 1;
        if (irreducible(h, p)) return h;
    }
    throw std::logic_error("no irreducible polynomial found");
}

bool prime_power_of(int d, int p) {
    if (d < 2) return false;
    while (d % p == 0) d /= p;
    return d == 1;
}

}  // namespace

RingHandle Ring::build(int p, int m, int f, std::vector<int> group, std::vector<int> aux) {
    if (!is_prime(p)) throw std::invalid_argument("p must be prime, got " + std::to_string(p));
    if (p == 2) throw std::invalid_argument("p must be odd");
    if (m < 1) throw std::invalid_argument("precision m must be >= 1");
    if (f < 1 || f > 8) throw std::invalid_argument("residue degree f must be in [1, 8]");
    for (int d : group)
        if (!prime_power_of(d, p)) throw std::invalid_argument("invariant factor " + std::to_string(d) + " is not a power of p");
    for (size_t i = 1; i < group.size(); ++i)
        if (group[i] % group[i - 1]) throw std::invalid_argument("invariant factors must satisfy d_i | d_(i+1)");
    for (int d : aux)
        if (d < 2 || std::gcd(d, p) != 1) throw std::invalid_argument("aux factor must be > 1 and prime to p");
    auto r = std::shared_ptr<Ring>(new Ring());
    r->spec_ = RingSpec{p, m, f, group, aux};
    r->z_ = Zmod(p, m);
    r->radix_ = group;
    r->radix_.insert(r->radix_.end(), aux.begin(), aux.end());
    i64 ng = 1, gs = 1;
    for (int d : group) gs *= d;
    for (int d : r->radix_) ng *= d;
    if (ng * f > 4096) throw std::invalid_argument("ring too large for desk-scale arithmetic");
    r->ng_ = static_cast<int>(ng);
    r->gsize_ = static_cast<int>(gs);
    r->n_ = static_cast<int>(ng) * f;
    r->h_ = f == 1 ? std::vector<int>{0, 1} : first_irreducible(p, f);

    const Zmod& z = r->z_;
    r->xpow_.assign(std::max(1, 2 * f - 1), Vec(f, 0));
    for (int k = 0; k < 2 * f - 1; ++k) {
        if (k < f) {
            r->xpow_[k][k] = 1;
            continue;
        }
        // x^k = x * x^{k-1}
        const Vec& prev = r->xpow_[k - 1];
        Vec cur(f, 0);
        for (int i = 0; i + 1 < f; ++i) cur[i + 1] = prev[i];
        i64 top = prev[f - 1];
        for (int i = 0; i < f; ++i) cur[i] = z.sub(cur[i], z.mul(top, r->h_[i]));
        r->xpow_[k] = cur;
    }
    if (f == 1) r->xpow_[0] = Vec{1};
    r->trx_.assign(f, 0);
    for (int k = 0; k < f; ++k)
        for (int i = 0; i < f; ++i) r->trx_[k] = z.add(r->trx_[k], r->xpow_[k + i][i]);

    r->gmul_.assign(static_cast<size_t>(ng) * ng, 0);
    r->ginv_.assign(ng, 0);
    for (int a = 0; a < ng; ++a) {
        auto ea = r->exps(a);
        for (int b = 0; b < ng; ++b) {
            auto eb = r->exps(b);
            std::vector<int> e(ea.size());
            for (size_t i = 0; i < e.size(); ++i) e[i] = (ea[i] + eb[i]) % r->radix_[i];
            r->gmul_[static_cast<size_t>(a) * ng + b] = r->index(e);
        }
        std::vector<int> e(ea.size());
        for (size_t i = 0; i < e.size(); ++i) e[i] = (r->radix_[i] - ea[i]) % r->radix_[i];
        r->ginv_[a] = r->index(e);
    }
    return r;
}

std::string Ring::describe() const {
    std::ostringstream os;
    os << "GR(" << spec_.p << "^" << spec_.m << "," << spec_.f << ")[";
    for (size_t i = 0; i < spec_.group.size(); ++i) os << (i ? "x" : "") << "C" << spec_.group[i];
    if (spec_.group.empty()) os << "1";
    for (int d : spec_.aux) os << "xC" << d;
    os << "]";
    return os.str();
}

std::vector<int> Ring::exps(int g) const {
    std::vector<int> e(radix_.size());
    for (int i = static_cast<int>(radix_.size()) - 1; i >= 0; --i) {
        e[i] = g % radix_[i];
        g /= radix_[i];
    }
    return e;
}

int Ring::index(const std::vector<int>& e) const {
    if (e.size() != radix_.size()) throw std::invalid_argument("group exponent length mismatch");
    int g = 0;
    for (size_t i = 0; i < radix_.size(); ++i) g = g * radix_[i] + ((e[i] % radix_[i]) + radix_[i]) % radix_[i];
    return g;
}

int Ring::gpow(int a, i64 k) const {
    auto e = exps(a);
    for (size_t i = 0; i < e.size(); ++i) e[i] = static_cast<int>((e[i] * (k % radix_[i]) % radix_[i] + radix_[i]) % radix_[i]);
    return index(e);
}

int Ring::gorder_of(int a) const {
    int o = 1;
    for (int x = a; x != 0; x = gmul(x, a)) ++o;
    return o;
}

Vec Ring::one() const { return basis(0); }

Vec Ring::scalar(i64 c) const {
    Vec v(n_, 0);
    v[0] = z_.red(c);
    return v;
}

Vec Ring::basis(int t) const {
    Vec v(n_, 0);
    v.at(t) = 1;
    return v;
}

Vec Ring::group_elem(int g) const { return basis(g); }

Vec Ring::gen(int i) const {
    std::vector<int> e(radix_.size(), 0);
    e.at(i) = 1;
    return group_elem(index(e));
}

Vec Ring::add(const Vec& a, const Vec& b) const {
    Vec c(n_);
    for (int i = 0; i < n_; ++i) c[i] = z_.add(a[i], b[i]);
    return c;
}

Vec Ring::sub(const Vec& a, const Vec& b) const {
    Vec c(n_);
    for (int i = 0; i < n_; ++i) c[i] = z_.sub(a[i], b[i]);
    return c;
}

Vec Ring::neg(const Vec& a) const {
    Vec c(n_);
    for (int i = 0; i < n_; ++i) c[i] = z_.neg(a[i]);
    return c;
}

Vec Ring::smul(i64 s, const Vec& a) const {
    s = z_.red(s);
    Vec c(n_);
    for (int i = 0; i < n_; ++i) c[i] = z_.mul(s, a[i]);
    return c;
}

Vec Ring::red(Vec a) const {
    if (static_cast<int>(a.size()) != n_) throw std::invalid_argument("element length mismatch for " + describe());
    for (auto& x : a) x = z_.red(x);
    return a;
}

bool Ring::is_zero(const Vec& a) const {
    for (i64 x : a)
        if (x) return false;
    return true;
}

Vec Ring::mul(const Vec& a, const Vec& b) const {
    const int f = spec_.f;
    const i64 q = z_.q;
    const bool small = q < (i64(1) << 31);
    if (f == 1) {
        Vec c(ng_, 0);
        for (int g = 0; g < ng_; ++g) {
            if (!a[g]) continue;
            const int* row = &gmul_[static_cast<size_t>(g) * ng_];
            for (int h = 0; h < ng_; ++h) {
                if (!b[h]) continue;
                i64& t = c[row[h]];
                t = small ? (t + a[g] * b[h]) % q : z_.add(t, z_.mul(a[g], b[h]));
            }
        }
        return c;
    }
    const int S = 2 * f - 1;
    Vec D(static_cast<size_t>(S) * ng_, 0);
    for (int i = 0; i < f; ++i)
        for (int g = 0; g < ng_; ++g) {
            i64 x = a[i * ng_ + g];
            if (!x) continue;
            const int* row = &gmul_[static_cast<size_t>(g) * ng_];
            for (int j = 0; j < f; ++j)
                for (int h = 0; h < ng_; ++h) {
                    i64 y = b[j * ng_ + h];
                    if (!y) continue;
                    i64& t = D[static_cast<size_t>(i + j) * ng_ + row[h]];
                    t = small ? (t + x * y) % q : z_.add(t, z_.mul(x, y));
                }
        }
    Vec c(n_, 0);
    for (int s = 0; s < S; ++s)
        for (int k = 0; k < f; ++k) {
            i64 w = xpow_[s][k];
            if (!w) continue;
            for (int g = 0; g < ng_; ++g) {
                i64 d = D[static_cast<size_t>(s) * ng_ + g];
                if (d) c[k * ng_ + g] = z_.add(c[k * ng_ + g], z_.mul(w, d));
            }
        }
    return c;
}

Vec Ring::pow(const Vec& a, i64 e) const {
    Vec r = one(), b = a;
    while (e > 0) {
        if (e & 1) r = mul(r, b);
        b = mul(b, b);
        e >>= 1;
    }
    return r;
}

Vec Ring::involution(const Vec& a) const {
    Vec c(n_, 0);
    for (int k = 0; k < spec_.f; ++k)
        for (int g = 0; g < ng_; ++g) c[k * ng_ + ginv_[g]] = a[k * ng_ + g];
    return c;
}

i64 Ring::trace(const Vec& a) const {
    i64 t = 0;
    for (int k = 0; k < spec_.f; ++k) t = z_.add(t, z_.mul(a[k * ng_], trx_[k]));
    return t;
}

Vec Ring::augmentation(const Vec& a) const {
    Vec c(spec_.f, 0);
    for (int k = 0; k < spec_.f; ++k)
        for (int g = 0; g < ng_; ++g) c[k] = z_.add(c[k], a[k * ng_ + g]);
    return c;
}

Mat Ring::mul_matrix(const Vec& a) const {
    Mat M(n_, n_);
    for (int t = 0; t < n_; ++t) {
        Vec r = mul(basis(t), a);
        std::copy(r.begin(), r.end(), M.a.begin() + static_cast<long>(t) * n_);
    }
    return M;
}

bool Ring::is_unit(const Vec& a) const {
    if (local()) {
        for (i64 c : augmentation(a))
            if (c % spec_.p) return true;
        return false;
    }
    Zmod z1(spec_.p, 1);
    Mat M = mul_matrix(a);
    for (auto& x : M.a) x %= spec_.p;
    return ZSpan::from_mat(z1, M).rows().size() == static_cast<size_t>(n_);
}

Vec Ring::inverse(const Vec& a) const {
    Vec x;
    if (!solve_left(z_, mul_matrix(a), one(), x)) throw std::domain_error("element is not a unit");
    return x;
}

Vec Ring::gr_mul(const Vec& a, const Vec& b) const {
    const int f = spec_.f;
    Vec c(f, 0);
    for (int i = 0; i < f; ++i) {
        if (!a[i]) continue;
        for (int j = 0; j < f; ++j) {
            if (!b[j]) continue;
            i64 t = z_.mul(a[i], b[j]);
            for (int k = 0; k < f; ++k)
                if (xpow_[i + j][k]) c[k] = z_.add(c[k], z_.mul(t, xpow_[i + j][k]));
        }
    }
    return c;
}

Vec Ring::gr_pow(const Vec& a, i64 e) const {
    Vec r(spec_.f, 0), b = a;
    r[0] = 1;
    while (e > 0) {
        if (e & 1) r = gr_mul(r, b);
        b = gr_mul(b, b);
        e >>= 1;
    }
    return r;
}

Vec Ring::gr_embed(const Vec& c) const {
    Vec v(n_, 0);
    for (int k = 0; k < spec_.f; ++k) v[k * ng_] = z_.red(c[k]);
    return v;
}

Vec Ring::gr_coeff(const Vec& a, int g) const {
    Vec c(spec_.f);
    for (int k = 0; k < spec_.f; ++k) c[k] = a[k * ng_ + g];
    return c;
}

RingHandle Ring::at_precision(int m2) const { return build(spec_.p, m2, spec_.f, spec_.group, spec_.aux); }
RingHandle Ring::base() const { return build(spec_.p, spec_.m, spec_.f, {}, {}); }
RingHandle Ring::residue_field() const { return build(spec_.p, 1, spec_.f, {}, {}); }

bool same_ring(const Ring& a, const Ring& b) { return a.spec() == b.spec(); }
bool same_ring(const RingHandle& a, const RingHandle& b) { return a == b || same_ring(*a, *b); }

ZSpan r_span(const Ring& R, int b, const std::vector<Vec>& gens) {
    const int n = R.n();
    std::vector<Vec> rows;
    rows.reserve(gens.size() * n);
    for (const auto& v : gens) {
        if (static_cast<int>(v.size()) != b * n) throw std::invalid_argument("r_span: vector length mismatch");
        bool zero = true;
        for (i64 x : v)
            if (x) zero = false;
        if (zero) continue;
        for (int t = 0; t < n; ++t) {
            Vec e = R.basis(t), row(static_cast<size_t>(b) * n);
            for (int i = 0; i < b; ++i) {
                Vec blk(v.begin() + static_cast<long>(i) * n, v.begin() + static_cast<long>(i + 1) * n);
                Vec pr = R.mul(e, blk);
                std::copy(pr.begin(), pr.end(), row.begin() + static_cast<long>(i) * n);
            }
            rows.push_back(std::move(row));
        }
    }
    return ZSpan::from_rows(R.z(), b * n, std::move(rows));
}

Mat additive_matrix(const Ring& R, const std::vector<std::vector<Vec>>& A, int c) {
    const int n = R.n();
    const int b = static_cast<int>(A.size());
    Mat M(b * n, c * n);
    for (int i = 0; i < b; ++i) {
        if (static_cast<int>(A[i].size()) != c) throw std::invalid_argument("additive_matrix: ragged input");
        for (int t = 0; t < n; ++t) {
            Vec e = R.basis(t);
            for (int j = 0; j < c; ++j) {
                if (R.is_zero(A[i][j])) continue;
                Vec pr = R.mul(e, A[i][j]);
                for (int s = 0; s < n; ++s) M.at(i * n + t, j * n + s) = pr[s];
            }
        }
    }
    return M;
}

Ideal::Ideal(RingHandle R, const std::vector<Vec>& gens) : R_(std::move(R)) {
    std::vector<Vec> g;
    for (const auto& x : gens) g.push_back(R_->red(x));
    span_ = r_span(*R_, 1, g);
}

Ideal Ideal::from_span(RingHandle R, ZSpan span) {
    if (span.dim() != R->n()) throw std::invalid_argument("ideal span has wrong dimension");
    for (const auto& r : span.rows())
        for (int t = 0; t < R->n(); ++t)
            if (!span.contains(R->mul(R->basis(t), r))) throw std::invalid_argument("span is not closed under ring multiplication");
    Ideal I;
    I.R_ = std::move(R);
    I.span_ = std::move(span);
    return I;
}

bool Ideal::is_whole() const { return contains(R_->one()); }

namespace {
void same_or_throw(const RingHandle& a, const RingHandle& b) {
    if (!same_ring(a, b)) throw std::invalid_argument("ideals live in different rings");
}
}  // namespace

bool Ideal::operator==(const Ideal& o) const {
    same_or_throw(R_, o.R_);
    return span_ == o.span_;
}

Ideal Ideal::operator+(const Ideal& o) const {
    same_or_throw(R_, o.R_);
    Ideal I;
    I.R_ = R_;
    I.span_ = span_.plus(o.span_);
    return I;
}

Ideal Ideal::operator*(const Ideal& o) const {
    same_or_throw(R_, o.R_);
    std::vector<Vec> rows;
    for (const auto& a : span_.rows())
        for (const auto& b : o.span_.rows()) rows.push_back(R_->mul(a, b));
    Ideal I;
    I.R_ = R_;
    I.span_ = ZSpan::from_rows(R_->z(), R_->n(), std::move(rows));
    return I;
}

std::vector<int> subgroup_elements(const Ring& R, const std::vector<std::vector<int>>& gens) {
    std::set<int> S{0};
    std::vector<int> frontier{0};
    std::vector<int> g;
    for (const auto& e : gens) g.push_back(R.index(e));
    while (!frontier.empty()) {
        std::vector<int> next;
        for (int x : frontier)
            for (int y : g) {
                int w = R.gmul(x, y);
                if (S.insert(w).second) next.push_back(w);
            }
        frontier.swap(next);
    }
    return {S.begin(), S.end()};
}

Vec norm_element(const Ring& R, const std::vector<std::vector<int>>& gens) {
    Vec v = R.zero();
    for (int g : subgroup_elements(R, gens)) v[g] = 1;
    return v;
}

Vec teichmuller_generator(const Ring& R) {
    const int p = R.p(), f = R.f();
    auto F = Ring::build(p, 1, f, {});
    const i64 q = ipow(p, f);
    std::vector<i64> primes;
    for (i64 x = q - 1, d = 2; x > 1; ++d)
        if (x % d == 0) {
            primes.push_back(d);
            while (x % d == 0) x /= d;
        }
    for (i64 code = 1; code < q; ++code) {
        Vec a(f);
        i64 c = code;
        for (int i = 0; i < f; ++i) {
            a[i] = c % p;
            c /= p;
        }
        bool gen = true;
        for (i64 r : primes) {
            Vec t = F->gr_pow(a, (q - 1) / r);
            Vec one(f, 0);
            one[0] = 1;
            if (t == one) {
                gen = false;
                break;
            }
        }
        if (gen) return R.gr_pow(a, ipow(q, R.m() - 1));
    }
    throw std::logic_error("no generator of the residue field");
}

Vec chi_idempotent(const Ring& R, const std::vector<int>& chi) {
    const auto& aux = R.spec().aux;
    if (aux.empty()) throw std::invalid_argument("ring has no prime-to-p factor to project onto");
    if (chi.size() != aux.size()) throw std::invalid_argument("character has wrong number of exponents");
    const i64 q = ipow(R.p(), R.f());
    for (int e : aux)
        if ((q - 1) % e) throw std::invalid_argument("character values need a larger residue degree f");
    Vec w = teichmuller_generator(R);
    const int ng = R.factors(), off = static_cast<int>(R.spec().group.size());
    i64 dsize = 1;
    for (int e : aux) dsize *= e;
    Vec out = R.zero();
    const i64 dinv = R.z().inv(dsize % R.z().q);
    std::vector<int> ex(ng, 0);
    for (i64 d = 0; d < dsize; ++d) {
        i64 r = d, k = 0;
        for (int i = static_cast<int>(aux.size()) - 1; i >= 0; --i) {
            int di = static_cast<int>(r % aux[i]);
            r /= aux[i];
            ex[off + i] = di;
            k += static_cast<i64>(chi[i]) * di * ((q - 1) / aux[i]);
        }
        Vec val = R.gr_pow(w, k % (q - 1));
        int g = R.ginv(R.index(ex));
        Vec term = R.zero();
        for (int t = 0; t < R.f(); ++t) term[t * R.order() + g] = R.z().mul(val[t], dinv);
        out = R.add(out, term);
    }
    return out;
}

int group_exponent(const std::vector<int>& group) {
    int e = 1;
    for (int d : group) e = std::lcm(e, d);
    return e;
}

int char_order(const std::vector<int>& group, const std::vector<int>& chi) {
    int o = 1;
    for (size_t i = 0; i < group.size(); ++i) {
        int a = ((chi[i] % group[i]) + group[i]) % group[i];
        o = std::lcm(o, group[i] / std::gcd(a, group[i]));
    }
    return o;
}

std::vector<std::vector<int>> orbit_members(const std::vector<int>& group, const std::vector<int>& chi) {
    const int E = group_exponent(group);
    std::set<std::vector<int>> S;
    for (int u = 1; u <= E; ++u) {
        if (std::gcd(u, E) != 1) continue;
        std::vector<int> a(group.size());
        for (size_t i = 0; i < group.size(); ++i) a[i] = static_cast<int>((static_cast<i64>(chi[i]) * u % group[i] + group[i]) % group[i]);
        S.insert(a);
    }
    return {S.begin(), S.end()};
}

std::vector<int> orbit_rep(const std::vector<int>& group, const std::vector<int>& chi) {
    if (chi.size() != group.size()) throw std::invalid_argument("character length mismatch");
    return orbit_members(group, chi).front();
}

std::vector<std::vector<int>> all_orbit_reps(const std::vector<int>& group) {
    std::set<std::vector<int>> reps;
    i64 total = 1;
    for (int d : group) total *= d;
    std::vector<int> a(group.size());
    for (i64 c = 0; c < total; ++c) {
        i64 r = c;
        for (int i = static_cast<int>(group.size()) - 1; i >= 0; --i) {
            a[i] = static_cast<int>(r % group[i]);
            r /= group[i];
        }
        reps.insert(orbit_rep(group, a));
    }
    return {reps.begin(), reps.end()};
}

i64 char_pairing(const std::vector<int>& group, const std::vector<int>& chi, const std::vector<int>& g, i64 expo) {
    i64 s = 0;
    for (size_t i = 0; i < group.size(); ++i) s += static_cast<i64>(chi[i]) * g[i] * (expo / group[i]);
    return ((s % expo) + expo) % expo;
}

std::string elem_str(const Ring& R, const Vec& a) {
    std::ostringstream os;
    bool first = true;
    for (int t = 0; t < R.n(); ++t) {
        if (!a[t]) continue;
        int k = t / R.order(), g = t % R.order();
        if (!first) os << " + ";
        first = false;
        os << a[t];
        if (k) os << "*x^" << k;
        if (g) {
            auto e = R.exps(g);
            os << "*g" << vec_str(Vec(e.begin(), e.end()));
        }
    }
    if (first) os << "0";
    return os.str();
}

}  // namespace starklab

namespace starklab {

Vec RingMap::apply(const Vec& x) const {
    Vec y = vec_mul(src->z(), x, A);
    for (auto& v : y) v = dst->z().red(v);
    return y;
}

bool RingMap::surjective() const {
    Mat B = A;
    for (auto& v : B.a) v = dst->z().red(v);
    return ZSpan::from_mat(dst->z(), B).log_card() == dst->log_card();
}

RingMap group_quotient_map(const RingHandle& src, const RingHandle& dst, const std::vector<std::vector<int>>& images) {
    if (src->p() != dst->p() || src->f() != dst->f()) throw std::invalid_argument("ring map must keep p and f");
    if (dst->m() > src->m()) throw std::invalid_argument("ring map cannot raise precision");
    if (!src->spec().aux.empty() || !dst->spec().aux.empty()) throw std::invalid_argument("ring map on aux factors unsupported");
    const auto& G = src->spec().group;
    if (images.size() != G.size()) throw std::invalid_argument("need one image per generator of G");
    std::vector<int> img;
    for (size_t i = 0; i < G.size(); ++i) {
        int h = dst->index(images[i]);
        if (dst->gpow(h, G[i]) != 0) throw std::invalid_argument("generator image order does not divide its factor");
        img.push_back(h);
    }
    RingMap f{src, dst, Mat(src->n(), dst->n())};
    for (int g = 0; g < src->order(); ++g) {
        auto e = src->exps(g);
        int h = 0;
        for (size_t i = 0; i < e.size(); ++i) h = dst->gmul(h, dst->gpow(img[i], e[i]));
        for (int k = 0; k < src->f(); ++k) f.A.at(k * src->order() + g, k * dst->order() + h) = 1;
    }
    return f;
}

RingMap precision_map(const RingHandle& src, int m2) {
    auto dst = src->at_precision(m2);
    std::vector<std::vector<int>> im;
    for (size_t i = 0; i < src->spec().group.size(); ++i) {
        std::vector<int> e(src->spec().group.size(), 0);
        e[i] = 1;
        im.push_back(e);
    }
    return group_quotient_map(src, dst, im);
}

Ideal map_ideal(const RingMap& f, const Ideal& I) {
    std::vector<Vec> g;
    for (const auto& r : I.generators()) g.push_back(f.apply(r));
    return Ideal(f.dst, g);
}

}  // namespace starklab
