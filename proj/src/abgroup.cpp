#include "chow/abgroup.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace chow {

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw std::invalid_argument("IntMatrix: ragged initializer");
        for (long v : r) data_.emplace_back(v);
    }
}

IntMatrix IntMatrix::identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::from_rows(std::span<const std::vector<Integer>> rows, std::size_t cols) {
    IntMatrix m(0, cols);
    for (const auto& r : rows) m.append_row(r);
    return m;
}

std::vector<Integer> IntMatrix::row(std::size_t i) const {
    return {data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
            data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_)};
}

void IntMatrix::append_row(std::span<const Integer> r) {
    if (r.size() != cols_) throw std::invalid_argument("IntMatrix::append_row: length mismatch");
    data_.insert(data_.end(), r.begin(), r.end());
    ++rows_;
}

IntMatrix IntMatrix::transpose() const {
    IntMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("IntMatrix: dimension mismatch");
    IntMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            if (a(i, k) == 0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
        }
    return c;
}

std::vector<Integer> operator*(std::span<const Integer> x, const IntMatrix& m) {
    if (x.size() != m.rows()) throw std::invalid_argument("vector-matrix dimension mismatch");
    std::vector<Integer> y(m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        if (x[i] == 0) continue;
        for (std::size_t j = 0; j < m.cols(); ++j) y[j] += x[i] * m(i, j);
    }
    return y;
}

namespace {

class SmithReducer {
public:
    explicit SmithReducer(const IntMatrix& a)
        : d_(a), u_(IntMatrix::identity(a.rows())), v_(IntMatrix::identity(a.cols())),
          vi_(IntMatrix::identity(a.cols())) {}

    SmithForm run() {
        const std::size_t m = d_.rows(), n = d_.cols();
        for (std::size_t t = 0; t < std::min(m, n); ++t) {
            if (!reduce_block(t)) break;
            if (d_(t, t) < 0) negate_row(t);
        }
        return {std::move(d_), std::move(u_), std::move(v_), std::move(vi_)};
    }

private:
    // Returns false when the trailing block starting at t is zero.
    bool reduce_block(std::size_t t) {
        const std::size_t m = d_.rows(), n = d_.cols();
        for (;;) {
            std::size_t pi = m, pj = n;
            Integer best;
            for (std::size_t i = t; i < m; ++i)
                for (std::size_t j = t; j < n; ++j) {
                    const Integer& x = d_(i, j);
                    if (x == 0) continue;
                    if (pi == m || mpz_cmpabs(x.get_mpz_t(), best.get_mpz_t()) < 0) {
                        best = abs(x);
                        pi = i;
                        pj = j;
                    }
                }
            if (pi == m) return false;
            swap_rows(t, pi);
            swap_cols(t, pj);

            bool clean = true;
            Integer q;
            for (std::size_t i = t + 1; i < m; ++i) {
                if (d_(i, t) == 0) continue;
                mpz_fdiv_q(q.get_mpz_t(), d_(i, t).get_mpz_t(), d_(t, t).get_mpz_t());
                add_row(i, t, -q);
                if (d_(i, t) != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < n; ++j) {
                if (d_(t, j) == 0) continue;
                mpz_fdiv_q(q.get_mpz_t(), d_(t, j).get_mpz_t(), d_(t, t).get_mpz_t());
                add_col(j, t, -q);
                if (d_(t, j) != 0) clean = false;
            }
            if (!clean) continue;

            bool divisible = true;
            for (std::size_t i = t + 1; i < m && divisible; ++i)
                for (std::size_t j = t + 1; j < n; ++j)
                    if (!mpz_divisible_p(d_(i, j).get_mpz_t(), d_(t, t).get_mpz_t())) {
                        add_row(t, i, 1);
                        divisible = false;
                        break;
                    }
            if (divisible) return true;
        }
    }

    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t j = 0; j < d_.cols(); ++j) std::swap(d_(a, j), d_(b, j));
        for (std::size_t j = 0; j < u_.cols(); ++j) std::swap(u_(a, j), u_(b, j));
    }

    void swap_cols(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t i = 0; i < d_.rows(); ++i) std::swap(d_(i, a), d_(i, b));
        for (std::size_t i = 0; i < v_.rows(); ++i) std::swap(v_(i, a), v_(i, b));
        for (std::size_t j = 0; j < vi_.cols(); ++j) std::swap(vi_(a, j), vi_(b, j));
    }

    // row dst += q * row src
    void add_row(std::size_t dst, std::size_t src, const Integer& q) {
        for (std::size_t j = 0; j < d_.cols(); ++j) d_(dst, j) += q * d_(src, j);
        for (std::size_t j = 0; j < u_.cols(); ++j) u_(dst, j) += q * u_(src, j);
    }

    // col dst += q * col src; the inverse transform subtracts q * row dst from row src
    void add_col(std::size_t dst, std::size_t src, const Integer& q) {
        for (std::size_t i = 0; i < d_.rows(); ++i) d_(i, dst) += q * d_(i, src);
        for (std::size_t i = 0; i < v_.rows(); ++i) v_(i, dst) += q * v_(i, src);
        for (std::size_t j = 0; j < vi_.cols(); ++j) vi_(src, j) -= q * vi_(dst, j);
    }

    void negate_row(std::size_t r) {
        for (std::size_t j = 0; j < d_.cols(); ++j) d_(r, j) = -d_(r, j);
        for (std::size_t j = 0; j < u_.cols(); ++j) u_(r, j) = -u_(r, j);
    }

    IntMatrix d_, u_, v_, vi_;
};

std::string describe_combination(std::span<const Integer> row, const std::vector<std::string>& labels) {
    std::ostringstream os;
    bool first = true;
    for (std::size_t j = 0; j < row.size(); ++j) {
        const Integer& c = row[j];
        if (c == 0) continue;
        const std::string name = j < labels.size() ? labels[j] : "e" + std::to_string(j);
        if (c < 0) os << "-";
        else if (!first) os << "+";
        if (abs(c) != 1) os << abs(c) << "*";
        os << name;
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

} // namespace

SmithForm smith_normal_form(const IntMatrix& a) {
    return SmithReducer(a).run();
}

AbelianGroup AbelianGroup::trivial(std::size_t user_rank) {
    AbelianGroup g;
    g.basis_change_ = IntMatrix(user_rank, 0);
    g.generators_ = IntMatrix(0, user_rank);
    return g;
}

AbelianGroup AbelianGroup::from_invariants(std::vector<Integer> invariants,
                                           std::vector<std::string> labels) {
    IntMatrix rel(0, invariants.size());
    for (std::size_t i = 0; i < invariants.size(); ++i) {
        std::vector<Integer> r(invariants.size());
        r[i] = invariants[i];
        rel.append_row(r);
    }
    AbelianGroup g = quotient(invariants.size(), rel, std::move(labels));
    if (g.invariants_ != invariants)
        throw std::invalid_argument("from_invariants: invariants not in canonical form");
    return g;
}

bool AbelianGroup::is_finite() const {
    return std::none_of(invariants_.begin(), invariants_.end(), [](const Integer& d) { return d == 0; });
}

Integer AbelianGroup::order() const {
    Integer n = 1;
    for (const auto& d : invariants_) n *= d;
    return n;
}

GroupElement AbelianGroup::zero() const {
    return GroupElement{std::vector<Integer>(invariants_.size())};
}

GroupElement AbelianGroup::reduce(std::vector<Integer> coords) const {
    if (coords.size() != invariants_.size())
        throw std::invalid_argument("AbelianGroup::reduce: coordinate length mismatch");
    for (std::size_t i = 0; i < coords.size(); ++i)
        if (invariants_[i] != 0)
            mpz_fdiv_r(coords[i].get_mpz_t(), coords[i].get_mpz_t(), invariants_[i].get_mpz_t());
    return GroupElement{std::move(coords)};
}

GroupElement AbelianGroup::add(const GroupElement& a, const GroupElement& b) const {
    std::vector<Integer> c(a.coords);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += b.coords.at(i);
    return reduce(std::move(c));
}

GroupElement AbelianGroup::negate(const GroupElement& a) const {
    std::vector<Integer> c(a.coords);
    for (auto& x : c) x = -x;
    return reduce(std::move(c));
}

GroupElement AbelianGroup::scale(const GroupElement& a, const Integer& k) const {
    std::vector<Integer> c(a.coords);
    for (auto& x : c) x *= k;
    return reduce(std::move(c));
}

GroupElement AbelianGroup::generator(std::size_t i) const {
    GroupElement e = zero();
    e.coords.at(i) = 1;
    return e;
}

bool AbelianGroup::contains(const GroupElement& a) const {
    if (a.coords.size() != invariants_.size()) return false;
    for (std::size_t i = 0; i < a.coords.size(); ++i)
        if (invariants_[i] != 0 && (a.coords[i] < 0 || a.coords[i] >= invariants_[i])) return false;
    return true;
}

std::vector<Integer> AbelianGroup::lift(const GroupElement& a) const {
    return std::span<const Integer>(a.coords) * generators_;
}

std::string invariants_to_string(std::span<const Integer> invariants) {
    if (invariants.empty()) return "trivial";
    std::ostringstream os;
    for (std::size_t i = 0; i < invariants.size(); ++i) {
        if (i) os << " x ";
        if (invariants[i] == 0) os << "Z";
        else os << "Z/" << invariants[i];
    }
    return os.str();
}

std::string AbelianGroup::to_string() const {
    return invariants_to_string(invariants_);
}

AbelianGroup quotient(std::size_t n_generators, const IntMatrix& relations,
                      std::vector<std::string> labels) {
    IntMatrix rel = relations;
    if (rel.rows() == 0 && rel.cols() != n_generators) rel = IntMatrix(0, n_generators);
    if (rel.cols() != n_generators)
        throw std::invalid_argument("quotient: relation matrix has wrong number of columns");

    const SmithForm snf = smith_normal_form(rel);
    const std::size_t diag = std::min(rel.rows(), n_generators);

    std::vector<std::size_t> keep;
    std::vector<Integer> invariants;
    for (std::size_t i = 0; i < n_generators; ++i) {
        Integer d = i < diag ? snf.diagonal(i, i) : Integer(0);
        if (d == 1) continue;
        keep.push_back(i);
        invariants.push_back(d);
    }

    AbelianGroup g;
    g.invariants_ = std::move(invariants);
    g.basis_change_ = IntMatrix(n_generators, keep.size());
    g.generators_ = IntMatrix(keep.size(), n_generators);
    for (std::size_t k = 0; k < keep.size(); ++k) {
        for (std::size_t i = 0; i < n_generators; ++i) {
            g.basis_change_(i, k) = snf.right(i, keep[k]);
            g.generators_(k, i) = snf.right_inverse(keep[k], i);
        }
        g.labels_.push_back(describe_combination(g.generators_.row(k), labels));
    }
    return g;
}

AbelianGroup subgroup_quotient(const AbelianGroup& g, std::span<const GroupElement> subgen) {
    const std::size_t n = g.rank();
    IntMatrix rel(0, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (g.invariants()[i] == 0) continue;
        std::vector<Integer> r(n);
        r[i] = g.invariants()[i];
        rel.append_row(r);
    }
    for (const auto& s : subgen) {
        if (s.coords.size() != n) throw std::invalid_argument("subgroup_quotient: element not in group");
        rel.append_row(s.coords);
    }
    return quotient(n, rel, g.labels());
}

GroupElement member(const AbelianGroup& g, std::span<const Integer> x) {
    if (x.size() != g.user_rank())
        throw std::invalid_argument("member: expected " + std::to_string(g.user_rank()) +
                                    " coordinates, got " + std::to_string(x.size()));
    return g.reduce(x * g.basis_change());
}

std::optional<Integer> element_order(const AbelianGroup& g, const GroupElement& e) {
    Integer n = 1;
    for (std::size_t i = 0; i < e.coords.size(); ++i) {
        const Integer& d = g.invariants().at(i);
        if (d == 0) {
            if (e.coords[i] != 0) return std::nullopt;
            continue;
        }
        Integer c = e.coords[i], gg;
        mpz_fdiv_r(c.get_mpz_t(), c.get_mpz_t(), d.get_mpz_t());
        mpz_gcd(gg.get_mpz_t(), c.get_mpz_t(), d.get_mpz_t());
        Integer part = d / gg;
        mpz_lcm(n.get_mpz_t(), n.get_mpz_t(), part.get_mpz_t());
    }
    return n;
}

std::optional<std::vector<Integer>> solve_in_span(const AbelianGroup& g,
                                                  std::span<const GroupElement> gens,
                                                  const GroupElement& target) {
    const std::size_t k = g.rank();
    IntMatrix m(0, k);
    for (const auto& h : gens) m.append_row(h.coords);
    for (std::size_t i = 0; i < k; ++i) {
        if (g.invariants()[i] == 0) continue;
        std::vector<Integer> r(k);
        r[i] = g.invariants()[i];
        m.append_row(r);
    }
    if (k == 0) return std::vector<Integer>(gens.size());

    // x*M = t  <=>  (x U^-1) D = t V
    const SmithForm snf = smith_normal_form(m);
    const std::vector<Integer> w = std::span<const Integer>(target.coords) * snf.right;
    std::vector<Integer> z(m.rows());
    for (std::size_t i = 0; i < k; ++i) {
        const Integer d = i < m.rows() ? snf.diagonal(i, i) : Integer(0);
        if (d == 0) {
            if (w[i] != 0) return std::nullopt;
            continue;
        }
        if (!mpz_divisible_p(w[i].get_mpz_t(), d.get_mpz_t())) return std::nullopt;
        z[i] = w[i] / d;
    }
    std::vector<Integer> x = std::span<const Integer>(z) * snf.left;
    x.resize(gens.size());
    return x;
}

Bezout bezout_gcd(std::span<const Integer> values) {
    if (values.empty()) throw std::invalid_argument("bezout_gcd: empty input");
    Bezout out;
    out.gcd = 0;
    for (const Integer& v : values) {
        // (s, t) with s*gcd + t*v == new gcd
        Integer s, t, g;
        if (out.gcd != 0 && mpz_divisible_p(v.get_mpz_t(), out.gcd.get_mpz_t())) {
            s = 1;
            t = 0;
            g = out.gcd;
        } else {
            Integer r0 = out.gcd, r1 = v, s0 = 1, s1 = 0, t0 = 0, t1 = 1;
            while (r1 != 0) {
                Integer q;
                mpz_fdiv_q(q.get_mpz_t(), r0.get_mpz_t(), r1.get_mpz_t());
                Integer r2 = r0 - q * r1, s2 = s0 - q * s1, t2 = t0 - q * t1;
                r0 = std::move(r1), r1 = std::move(r2);
                s0 = std::move(s1), s1 = std::move(s2);
                t0 = std::move(t1), t1 = std::move(t2);
            }
            g = r0, s = s0, t = t0;
            if (g < 0) g = -g, s = -s, t = -t;
        }
        for (auto& c : out.coefficients) c *= s;
        out.coefficients.push_back(t);
        out.gcd = g;
    }
    if (out.gcd == 0) throw std::invalid_argument("bezout_gcd: all values are zero");
    return out;
}

} // namespace chow
