#pragma once

// Sparse truncated multivariate Taylor series ("jets") over double
// coefficients, with the multi-index bookkeeping used throughout the
// library.  A jet stores the coefficients c_gamma = D^|gamma| g(0)/gamma!
// of a germ g at 0, for all |gamma| <= trunc, keyed by multi-index.
//
// Values are immutable in spirit: every operation returns a new jet, so
// instances can be shared freely across threads.

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace wavinv {

// Total degree cap of the packed monomial encoding (8 slots of 7 bits:
// variable ids 1..127, degree in the top byte).
inline constexpr int kMaxTrunc = 8;
inline constexpr int kMaxVars = 120;

// Multi-index gamma = (gamma_1, ..., gamma_d) of non-negative exponents.
class MultiIndex {
  public:
    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> entries);
    MultiIndex(std::initializer_list<int> entries);

    static MultiIndex zero(int dim) { return MultiIndex(std::vector<int>(dim, 0)); }
    static MultiIndex unit(int dim, int var, int power = 1);

    int dim() const { return static_cast<int>(entries_.size()); }
    int order() const;
    // gamma! = prod_i gamma_i!
    double factorial() const;
    int operator[](int i) const { return entries_[i]; }
    const std::vector<int>& entries() const { return entries_; }

    MultiIndex operator+(const MultiIndex& other) const;
    // Index doubling gamma -> 2*gamma (even-representation substitution).
    MultiIndex doubled() const;

    bool operator==(const MultiIndex& other) const { return entries_ == other.entries_; }
    // Lexicographic on the exponent tuple; used for canonical serialization.
    bool lex_less(const MultiIndex& other) const { return entries_ < other.entries_; }

  private:
    std::vector<int> entries_;
};

namespace detail {

using Key = std::uint64_t;

Key pack_key(const MultiIndex& m);
MultiIndex unpack_key(Key k, int dim);
inline int key_degree(Key k) { return static_cast<int>(k >> 56); }
// Merge the sorted variable-id slots of two packed monomials.
Key key_mul(Key a, Key b);

} // namespace detail

class Jet {
  public:
    struct Term {
        detail::Key key;
        double value;
    };

    Jet() = default;
    Jet(int dim, int trunc);

    static Jet constant(int dim, int trunc, double value);
    static Jet variable(int dim, int trunc, int var, double scale = 1.0);

    int dim() const { return dim_; }
    int trunc() const { return trunc_; }
    const std::vector<Term>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }

    double coeff(const MultiIndex& gamma) const;
    double constant_term() const;
    void set_coeff(const MultiIndex& gamma, double value);

    // Coefficient-wise iteration in the canonical (graded, then packed
    // slot-lex) order; fn(gamma, coefficient).
    void for_each(const std::function<void(const MultiIndex&, double)>& fn) const;

    Jet truncated(int new_trunc) const;
    // Reinterpret variables into a jet of dimension new_dim: old variable i
    // becomes new variable var_map[i].
    Jet remapped(int new_dim, std::span<const int> var_map) const;

    double eval(std::span<const double> x) const;
    // Exact gradient of the stored polynomial at x.
    std::vector<double> eval_gradient(std::span<const double> x) const;

    Jet operator-() const;

  private:
    friend Jet jet_add(const Jet&, const Jet&);
    friend Jet jet_sub(const Jet&, const Jet&);
    friend Jet jet_mul(const Jet&, const Jet&);
    friend Jet jet_scale(const Jet&, double);
    friend Jet jet_compose_univariate(std::span<const double>, const Jet&);

    void normalize(); // sort by key, fuse duplicates, drop exact zeros
    int dim_ = 0;
    int trunc_ = 0;
    std::vector<Term> terms_; // sorted by key
};

Jet jet_add(const Jet& a, const Jet& b);
Jet jet_sub(const Jet& a, const Jet& b);
Jet jet_mul(const Jet& a, const Jet& b);
Jet jet_scale(const Jet& a, double s);

// g composed with h, where `series` lists the Taylor coefficients
// g(c), g'(c), g''(c)/2!, ... of g at c = h(0).  Truncation of the result
// is h.trunc().
Jet jet_compose_univariate(std::span<const double> series, const Jet& h);

// Mixed partial derivative D^{|gamma|}_gamma g(0) = gamma! * c_gamma.
double jet_derivative_coefficient(const Jet& a, const MultiIndex& gamma);

// Partial derivative d/dx_var as a jet (truncation drops by one).
Jet jet_partial(const Jet& a, int var);

// All multi-indices in `dim` variables of exact total order `order`,
// in canonical (graded reverse-enumeration) order.
std::vector<MultiIndex> multi_indices_of_order(int dim, int order);

// Taylor coefficients at c of sqrt(t) (nterms of them): used to expand
// link lengths sqrt(L^2 + ...).  Requires c > 0.
std::vector<double> sqrt_series(double c, int nterms);
// Taylor coefficients at c > 0 of t^exponent.
std::vector<double> power_series(double exponent, double c, int nterms);

inline Jet operator+(const Jet& a, const Jet& b) { return jet_add(a, b); }
inline Jet operator-(const Jet& a, const Jet& b) { return jet_sub(a, b); }
inline Jet operator*(const Jet& a, const Jet& b) { return jet_mul(a, b); }
inline Jet operator*(const Jet& a, double s) { return jet_scale(a, s); }
inline Jet operator*(double s, const Jet& a) { return jet_scale(a, s); }

} // namespace wavinv
