#include "wavinv/jets.hpp"

#include "wavinv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace wavinv {

namespace {

constexpr int kSlotBits = 7;
constexpr int kMaxSlots = 8;
constexpr detail::Key kSlotMask = (1u << kSlotBits) - 1;

} // namespace

// ---------------------------------------------------------------------------
// MultiIndex
// ---------------------------------------------------------------------------

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
    for (int e : entries_)
        if (e < 0) throw std::invalid_argument("MultiIndex: negative exponent");
}

MultiIndex::MultiIndex(std::initializer_list<int> entries) : MultiIndex(std::vector<int>(entries)) {}

MultiIndex MultiIndex::unit(int dim, int var, int power) {
    std::vector<int> e(dim, 0);
    e.at(var) = power;
    return MultiIndex(std::move(e));
}

int MultiIndex::order() const {
    int s = 0;
    for (int e : entries_) s += e;
    return s;
}

double MultiIndex::factorial() const {
    double f = 1.0;
    for (int e : entries_)
        for (int k = 2; k <= e; ++k) f *= k;
    return f;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
    if (dim() != other.dim()) throw std::invalid_argument("MultiIndex: dimension mismatch");
    std::vector<int> e(entries_);
    for (int i = 0; i < dim(); ++i) e[i] += other.entries_[i];
    return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::doubled() const {
    std::vector<int> e(entries_);
    for (int& v : e) v *= 2;
    return MultiIndex(std::move(e));
}

// ---------------------------------------------------------------------------
// Packed monomial keys
// ---------------------------------------------------------------------------

namespace detail {

Key pack_key(const MultiIndex& m) {
    Key slots = 0;
    int used = 0;
    for (int i = 0; i < m.dim(); ++i) {
        for (int k = 0; k < m[i]; ++k) {
            if (used >= kMaxSlots) throw std::invalid_argument("monomial degree exceeds packing capacity");
            slots |= static_cast<Key>(i + 1) << (kSlotBits * used);
            ++used;
        }
    }
    return (static_cast<Key>(used) << 56) | slots;
}

MultiIndex unpack_key(Key k, int dim) {
    std::vector<int> e(dim, 0);
    int deg = key_degree(k);
    for (int s = 0; s < deg; ++s) {
        int var = static_cast<int>((k >> (kSlotBits * s)) & kSlotMask);
        e.at(var - 1) += 1;
    }
    return MultiIndex(std::move(e));
}

Key key_mul(Key a, Key b) {
    int da = key_degree(a), db = key_degree(b);
    Key out = 0;
    int ia = 0, ib = 0, used = 0;
    while (ia < da || ib < db) {
        Key va = ia < da ? (a >> (kSlotBits * ia)) & kSlotMask : ~Key(0);
        Key vb = ib < db ? (b >> (kSlotBits * ib)) & kSlotMask : ~Key(0);
        Key v;
        if (va <= vb) {
            v = va;
            ++ia;
        } else {
            v = vb;
            ++ib;
        }
        out |= v << (kSlotBits * used);
        ++used;
    }
    return (static_cast<Key>(used) << 56) | out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Jet
// ---------------------------------------------------------------------------

Jet::Jet(int dim, int trunc) : dim_(dim), trunc_(trunc) {
    if (dim < 1 || dim > kMaxVars) throw std::invalid_argument("Jet: dimension out of range");
    if (trunc < 0 || trunc > kMaxTrunc) throw std::invalid_argument("Jet: truncation out of range");
}

Jet Jet::constant(int dim, int trunc, double value) {
    Jet j(dim, trunc);
    if (value != 0.0) j.terms_.push_back({0, value});
    return j;
}

Jet Jet::variable(int dim, int trunc, int var, double scale) {
    Jet j(dim, trunc);
    if (trunc < 1) throw std::invalid_argument("Jet::variable: trunc < 1");
    if (scale != 0.0) j.terms_.push_back({detail::pack_key(MultiIndex::unit(dim, var)), scale});
    return j;
}

double Jet::coeff(const MultiIndex& gamma) const {
    if (gamma.dim() != dim_) throw std::invalid_argument("Jet::coeff: dimension mismatch");
    detail::Key k = detail::pack_key(gamma);
    auto it = std::lower_bound(terms_.begin(), terms_.end(), k,
                               [](const Term& t, detail::Key key) { return t.key < key; });
    return (it != terms_.end() && it->key == k) ? it->value : 0.0;
}

double Jet::constant_term() const {
    return (!terms_.empty() && terms_.front().key == 0) ? terms_.front().value : 0.0;
}

void Jet::set_coeff(const MultiIndex& gamma, double value) {
    if (gamma.dim() != dim_) throw std::invalid_argument("Jet::set_coeff: dimension mismatch");
    if (gamma.order() > trunc_) throw std::invalid_argument("Jet::set_coeff: order exceeds truncation");
    detail::Key k = detail::pack_key(gamma);
    auto it = std::lower_bound(terms_.begin(), terms_.end(), k,
                               [](const Term& t, detail::Key key) { return t.key < key; });
    if (it != terms_.end() && it->key == k) {
        if (value == 0.0)
            terms_.erase(it);
        else
            it->value = value;
    } else if (value != 0.0) {
        terms_.insert(it, {k, value});
    }
}

void Jet::for_each(const std::function<void(const MultiIndex&, double)>& fn) const {
    for (const Term& t : terms_) fn(detail::unpack_key(t.key, dim_), t.value);
}

Jet Jet::truncated(int new_trunc) const {
    if (new_trunc >= trunc_) {
        Jet out(*this);
        out.trunc_ = std::min(new_trunc, kMaxTrunc);
        return out;
    }
    Jet out(dim_, new_trunc);
    for (const Term& t : terms_)
        if (detail::key_degree(t.key) <= new_trunc) out.terms_.push_back(t);
    return out;
}

Jet Jet::remapped(int new_dim, std::span<const int> var_map) const {
    if (static_cast<int>(var_map.size()) != dim_)
        throw std::invalid_argument("Jet::remapped: var_map size mismatch");
    Jet out(new_dim, trunc_);
    out.terms_.reserve(terms_.size());
    for (const Term& t : terms_) {
        int deg = detail::key_degree(t.key);
        detail::Key slots = 0;
        for (int s = 0; s < deg; ++s) {
            int var = static_cast<int>((t.key >> (kSlotBits * s)) & kSlotMask) - 1;
            int nv = var_map[var];
            if (nv < 0 || nv >= new_dim) throw std::invalid_argument("Jet::remapped: target var out of range");
            slots |= static_cast<detail::Key>(nv + 1) << (kSlotBits * s);
        }
        // slots may no longer be sorted; re-sort them
        std::vector<int> ids(deg);
        for (int s = 0; s < deg; ++s) ids[s] = static_cast<int>((slots >> (kSlotBits * s)) & kSlotMask);
        std::sort(ids.begin(), ids.end());
        detail::Key k = 0;
        for (int s = 0; s < deg; ++s) k |= static_cast<detail::Key>(ids[s]) << (kSlotBits * s);
        out.terms_.push_back({(static_cast<detail::Key>(deg) << 56) | k, t.value});
    }
    out.normalize();
    return out;
}

double Jet::eval(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_) throw std::invalid_argument("Jet::eval: dimension mismatch");
    double sum = 0.0;
    for (const Term& t : terms_) {
        double m = t.value;
        int deg = detail::key_degree(t.key);
        for (int s = 0; s < deg; ++s) {
            int var = static_cast<int>((t.key >> (kSlotBits * s)) & kSlotMask) - 1;
            m *= x[var];
        }
        sum += m;
    }
    return sum;
}

std::vector<double> Jet::eval_gradient(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_) throw std::invalid_argument("Jet::eval_gradient: dimension mismatch");
    std::vector<double> grad(dim_, 0.0);
    int exps[kMaxSlots];
    int vars[kMaxSlots];
    for (const Term& t : terms_) {
        int deg = detail::key_degree(t.key);
        if (deg == 0) continue;
        int nvars = 0;
        for (int s = 0; s < deg; ++s) {
            int var = static_cast<int>((t.key >> (kSlotBits * s)) & kSlotMask) - 1;
            if (nvars > 0 && vars[nvars - 1] == var)
                ++exps[nvars - 1];
            else {
                vars[nvars] = var;
                exps[nvars] = 1;
                ++nvars;
            }
        }
        for (int k = 0; k < nvars; ++k) {
            double m = t.value * exps[k];
            for (int l = 0; l < nvars; ++l) {
                int e = exps[l] - (l == k ? 1 : 0);
                for (int rep = 0; rep < e; ++rep) m *= x[vars[l]];
            }
            grad[vars[k]] += m;
        }
    }
    return grad;
}

Jet Jet::operator-() const { return jet_scale(*this, -1.0); }

void Jet::normalize() {
    std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.key < b.key; });
    std::size_t w = 0;
    for (std::size_t r = 0; r < terms_.size();) {
        detail::Key k = terms_[r].key;
        double v = 0.0;
        while (r < terms_.size() && terms_[r].key == k) v += terms_[r++].value;
        if (v != 0.0) terms_[w++] = {k, v};
    }
    terms_.resize(w);
}

// ---------------------------------------------------------------------------
// Arithmetic
// ---------------------------------------------------------------------------

namespace {

void check_same_dim(const Jet& a, const Jet& b, const char* op) {
    if (a.dim() != b.dim()) throw std::invalid_argument(std::string(op) + ": dimension mismatch");
}

} // namespace

Jet jet_add(const Jet& a, const Jet& b) {
    check_same_dim(a, b, "jet_add");
    Jet out(a.dim(), std::min(a.trunc(), b.trunc()));
    out.terms_.reserve(a.size() + b.size());
    for (const auto& t : a.terms())
        if (detail::key_degree(t.key) <= out.trunc()) out.terms_.push_back(t);
    for (const auto& t : b.terms())
        if (detail::key_degree(t.key) <= out.trunc()) out.terms_.push_back(t);
    out.normalize();
    return out;
}

Jet jet_sub(const Jet& a, const Jet& b) { return jet_add(a, -b); }

Jet jet_scale(const Jet& a, double s) {
    Jet out(a.dim(), a.trunc());
    if (s == 0.0) return out;
    out.terms_ = a.terms();
    for (auto& t : out.terms_) t.value *= s;
    return out;
}

Jet jet_mul(const Jet& a, const Jet& b) {
    check_same_dim(a, b, "jet_mul");
    int trunc = std::min(a.trunc(), b.trunc());
    Jet out(a.dim(), trunc);
    if (a.terms().empty() || b.terms().empty()) return out;

    std::unordered_map<detail::Key, double> acc;
    acc.reserve(a.size() * 2 + b.size());
    // terms are sorted by (degree, slots); only the prefix of `a` below the
    // complementary degree can contribute
    for (const auto& tb : b.terms()) {
        int db = detail::key_degree(tb.key);
        if (db > trunc) break;
        int amax = trunc - db;
        for (const auto& ta : a.terms()) {
            if (detail::key_degree(ta.key) > amax) break;
            acc[detail::key_mul(ta.key, tb.key)] += ta.value * tb.value;
        }
    }
    out.terms_.reserve(acc.size());
    for (const auto& [k, v] : acc)
        if (v != 0.0) out.terms_.push_back({k, v});
    std::sort(out.terms_.begin(), out.terms_.end(),
              [](const Jet::Term& x, const Jet::Term& y) { return x.key < y.key; });
    return out;
}

Jet jet_compose_univariate(std::span<const double> series, const Jet& h) {
    if (series.empty()) throw std::invalid_argument("jet_compose_univariate: empty series");
    // u = h - h(0) has no constant term, so u^s starts at degree s; Horner
    // from the top term keeps every truncated contribution.
    Jet u = h;
    if (!u.terms_.empty() && u.terms_.front().key == 0) u.terms_.erase(u.terms_.begin());
    int nterms = std::min<int>(static_cast<int>(series.size()), h.trunc() + 1);
    Jet acc = Jet::constant(h.dim(), h.trunc(), series[nterms - 1]);
    for (int s = nterms - 2; s >= 0; --s) {
        acc = jet_mul(acc, u);
        double c = series[s];
        if (c != 0.0) acc = jet_add(acc, Jet::constant(h.dim(), h.trunc(), c));
    }
    return acc;
}

double jet_derivative_coefficient(const Jet& a, const MultiIndex& gamma) {
    if (gamma.order() > a.trunc())
        throw std::invalid_argument("jet_derivative_coefficient: order exceeds truncation");
    return gamma.factorial() * a.coeff(gamma);
}

Jet jet_partial(const Jet& a, int var) {
    if (var < 0 || var >= a.dim()) throw std::invalid_argument("jet_partial: variable out of range");
    Jet out(a.dim(), std::max(0, a.trunc() - 1));
    a.for_each([&](const MultiIndex& gamma, double c) {
        int e = gamma[var];
        if (e == 0) return;
        std::vector<int> entries = gamma.entries();
        entries[var] -= 1;
        out.set_coeff(MultiIndex(std::move(entries)), c * e);
    });
    return out;
}

std::vector<MultiIndex> multi_indices_of_order(int dim, int order) {
    std::vector<MultiIndex> out;
    std::vector<int> current(dim, 0);
    std::function<void(int, int)> rec = [&](int pos, int remaining) {
        if (pos == dim - 1) {
            current[pos] = remaining;
            out.emplace_back(current);
            return;
        }
        for (int e = remaining; e >= 0; --e) {
            current[pos] = e;
            rec(pos + 1, remaining - e);
        }
    };
    if (dim == 0) return out;
    rec(0, order);
    return out;
}

// ---------------------------------------------------------------------------
// Series helpers
// ---------------------------------------------------------------------------

std::vector<double> power_series(double exponent, double c, int nterms) {
    if (c <= 0.0)
        throw std::domain_error("power_series: non-positive base point (degenerate link)");
    std::vector<double> out(nterms);
    // binom(exponent, s) * c^(exponent - s)
    double binom = 1.0;
    for (int s = 0; s < nterms; ++s) {
        if (s > 0) binom *= (exponent - (s - 1)) / s;
        out[s] = binom * std::pow(c, exponent - s);
    }
    return out;
}

std::vector<double> sqrt_series(double c, int nterms) { return power_series(0.5, c, nterms); }

} // namespace wavinv
