#include "chow/quadfield.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "chow/arith.hpp"
#include "chow/errors.hpp"

namespace chow {

namespace {

// Reduced ideals are keyed by (a, B).
using FormKey = std::pair<Integer, Integer>;

Integer fdiv(const Integer& a, const Integer& b) {
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

Integer fmod(const Integer& a, const Integer& m) {
    Integer r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

Integer gcd(const Integer& a, const Integer& b) {
    Integer g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

Integer lcm(const Integer& a, const Integer& b) {
    Integer l;
    mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return l;
}

bool squarefree(const Integer& n) {
    for (const auto& [p, e] : factor_integer(n))
        if (e > 1) return false;
    return true;
}

Integer sqrt_mod_prime(const Integer& n, const Integer& p) {
    Integer a = fmod(n, p);
    if (a == 0) return 0;
    Integer r;
    if (fmod(p, 4) == 3) {
        Integer e = (p + 1) / 4;
        mpz_powm(r.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
        return r;
    }
    // Tonelli-Shanks
    Integer q = p - 1;
    unsigned long s = 0;
    while (mpz_even_p(q.get_mpz_t())) {
        q /= 2;
        ++s;
    }
    Integer z = 2;
    while (mpz_legendre(z.get_mpz_t(), p.get_mpz_t()) != -1) ++z;
    Integer c, t, e;
    mpz_powm(c.get_mpz_t(), z.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    mpz_powm(t.get_mpz_t(), a.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    e = (q + 1) / 2;
    mpz_powm(r.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
    unsigned long m = s;
    while (t != 1) {
        unsigned long i = 0;
        Integer tt = t;
        while (tt != 1) {
            tt = fmod(tt * tt, p);
            ++i;
        }
        Integer b = c;
        for (unsigned long k = 0; k + i + 1 < m; ++k) b = fmod(b * b, p);
        m = i;
        c = fmod(b * b, p);
        t = fmod(t * c, p);
        r = fmod(r * b, p);
    }
    return r;
}

Integer norm_basis(const QuadField& f, const Integer& u, const Integer& v) {
    return u * u + u * v * f.discriminant() + v * v * f.omega_norm();
}

// Infinite valuation as a large sentinel.
constexpr int inf_val = 1 << 30;

int val_or_inf(const Integer& n, std::int64_t p) { return n == 0 ? inf_val : valuation(n, p); }

Integer ipow(std::int64_t p, int k) {
    Integer r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(k));
    return r;
}

// ---- reduction of primitive ideals ---------------------------------------

struct Form {
    Integer a, B;
};

Integer form_c(const QuadField& f, const Form& g) { return (g.B * g.B - f.discriminant()) / (4 * g.a); }

Integer ideal_to_b(const QuadField& f, const Form& g) { return fmod((g.B - f.discriminant()) / 2, g.a); }

// Imaginary: Gauss reduction; (w1, w2) is a Z-basis of the ideal.
struct Tracked {
    Form form;
    QElement w1, w2;
};

void imag_reduce(const QuadField& f, Form& g, QElement* w1, QElement* w2, std::size_t limit) {
    auto normalize = [&] {
        if (-g.a < g.B && g.B <= g.a) return;
        Integer t = fdiv(g.a - g.B, 2 * g.a);
        g.B += 2 * g.a * t;
        if (w1) *w2 = *w2 + QElement::from_integer(f, t) * *w1;
    };
    normalize();
    std::size_t steps = 0;
    for (;;) {
        Integer c = form_c(f, g);
        if (!(g.a > c || (g.a == c && g.B < 0))) break;
        if (++steps > limit) throw bound_exceeded("reduction step limit exceeded");
        g.a = c;
        g.B = -g.B;
        if (w1) {
            QElement t = *w1;
            *w1 = *w2;
            *w2 = -t;
        }
        normalize();
    }
}

bool real_is_reduced(const QuadField& f, const Form& g) {
    const Integer& s = f.isqrt();
    return g.B > 0 && g.B <= s && s - g.B + 1 <= 2 * g.a && 2 * g.a <= s + g.B;
}

QElement beta_of(const QuadField& f, const Form& g) {
    // (B + sqrt(D))/2
    return QElement::from_parts(f, g.B, 1, 1);
}

// One rho step: J' = (conj(beta)/a) J. Returns the multiplier when asked.
void real_rho(const QuadField& f, Form& g, QElement* mult) {
    if (mult) *mult = beta_of(f, g).conjugate() / QElement::from_integer(f, g.a);
    Integer c = abs(form_c(f, g));
    const Integer& s = f.isqrt();
    Integer m = 2 * c;
    Integer B = fmod(-g.B, m);
    if (c <= s) {
        // B in [s - 2c + 1, s]
        Integer lo = s - m + 1;
        B = lo + fmod(B - lo, m);
    } else if (B > c) {
        B -= m;
    }
    g.a = c;
    g.B = B;
}

// Reduces in place; gamma accumulates with P = gamma * J.
void real_reduce(const QuadField& f, Form& g, QElement* gamma, std::size_t limit) {
    std::size_t steps = 0;
    while (!real_is_reduced(f, g)) {
        if (++steps > limit) throw bound_exceeded("reduction step limit exceeded");
        QElement mu;
        real_rho(f, g, gamma ? &mu : nullptr);
        if (gamma) *gamma = *gamma / mu;
    }
}

Form form_of(const QuadField& f, const QIdeal& i) { return {i.a(), i.form_b(f)}; }

FormKey reduced_key(const QuadField& f, const QIdeal& primitive, std::size_t limit) {
    Form g = form_of(f, primitive);
    if (f.is_real())
        real_reduce(f, g, nullptr, limit);
    else
        imag_reduce(f, g, nullptr, nullptr, limit);
    return {g.a, g.B};
}

Integer principal_b0(const QuadField& f) {
    const Integer& s = f.isqrt();
    return (fmod(s - f.discriminant(), 2) == 0) ? s : s - 1;
}

} // namespace

namespace detail {

struct PrincipalCycle {
    std::map<FormKey, QElement> generators;
    QElement unit;
};

struct ClassTable {
    ClassGroup cg;
    std::map<FormKey, std::size_t> index;
    std::vector<GroupElement> elements;
};

struct FieldCache {
    std::mutex mutex;
    std::unique_ptr<PrincipalCycle> cycle;
    std::unique_ptr<ClassTable> table;
    std::optional<QElement> unit;
};

} // namespace detail

// ---- fields --------------------------------------------------------------

bool is_fundamental_discriminant(const Integer& d) {
    if (d == 0 || d == 1) return false;
    Integer r = fmod(d, 4);
    if (r == 1) return squarefree(d);
    if (r == 0) {
        Integer m = d / 4;
        Integer mr = fmod(m, 4);
        return (mr == 2 || mr == 3) && squarefree(m);
    }
    return false;
}

QuadField::QuadField(const Integer& d) : disc_(d) {
    if (!is_fundamental_discriminant(d))
        throw invalid_input("not a fundamental discriminant: " + d.get_str());
    omega_norm_ = (d * d - d) / 4;
    Integer ad = abs(d);
    mpz_sqrt(isqrt_.get_mpz_t(), ad.get_mpz_t());
    cache_ = std::make_shared<detail::FieldCache>();
}

int QuadField::torsion_units() const {
    if (disc_ == -4) return 4;
    if (disc_ == -3) return 6;
    return 2;
}

QuadField make_field(const Integer& d) { return QuadField(d); }

// ---- elements ------------------------------------------------------------

QElement QElement::from_rs(const Integer& disc, const Rational& r, const Rational& s) {
    Rational u2 = 2 * r, v2 = 2 * s;
    u2.canonicalize();
    v2.canonicalize();
    QElement e;
    e.disc_ = disc;
    e.den_ = lcm(u2.get_den(), v2.get_den());
    e.x_ = u2.get_num() * (e.den_ / u2.get_den());
    e.y_ = v2.get_num() * (e.den_ / v2.get_den());
    if (fmod(e.x_ - e.y_ * disc, 2) != 0) {
        e.den_ *= 2;
        e.x_ *= 2;
        e.y_ *= 2;
    }
    return e;
}

Rational QElement::r() const {
    Rational q(x_, 2 * den_);
    q.canonicalize();
    return q;
}

Rational QElement::s() const {
    Rational q(y_, 2 * den_);
    q.canonicalize();
    return q;
}

QElement QElement::from_parts(const QuadField& f, Integer x, Integer y, Integer den) {
    if (den == 0) throw invalid_input("zero denominator");
    Rational r(x, 2 * den), s(y, 2 * den);
    r.canonicalize();
    s.canonicalize();
    return from_rs(f.discriminant(), r, s);
}

QElement QElement::from_integer(const QuadField& f, const Integer& n) { return from_rs(f.discriminant(), n, 0); }

QElement QElement::from_rational(const QuadField& f, const Rational& q) { return from_rs(f.discriminant(), q, 0); }

QElement QElement::from_basis(const QuadField& f, const Integer& u, const Integer& v) {
    return from_parts(f, 2 * u + v * f.discriminant(), v, 1);
}

QElement QElement::omega(const QuadField& f) { return from_basis(f, 0, 1); }

Integer QElement::basis_u() const { return (x_ - y_ * disc_) / 2; }

Rational QElement::norm() const {
    Rational a = r(), b = s();
    Rational n = a * a - b * b * Rational(disc_);
    n.canonicalize();
    return n;
}

Rational QElement::trace() const { return 2 * r(); }

QElement QElement::conjugate() const { return from_rs(disc_, r(), -s()); }

QElement QElement::inverse() const {
    if (is_zero()) throw invalid_input("inverse of zero");
    Rational n = norm();
    Rational a = r() / n, b = -s() / n;
    a.canonicalize();
    b.canonicalize();
    return from_rs(disc_, a, b);
}

QElement operator+(const QElement& a, const QElement& b) {
    return QElement::from_rs(a.disc_, a.r() + b.r(), a.s() + b.s());
}

QElement operator-(const QElement& a, const QElement& b) {
    return QElement::from_rs(a.disc_, a.r() - b.r(), a.s() - b.s());
}

QElement operator-(const QElement& a) { return QElement::from_rs(a.disc_, -a.r(), -a.s()); }

QElement operator*(const QElement& a, const QElement& b) {
    Rational ar = a.r(), as = a.s(), br = b.r(), bs = b.s();
    Rational r = ar * br + as * bs * Rational(a.disc_);
    Rational s = ar * bs + as * br;
    r.canonicalize();
    s.canonicalize();
    return QElement::from_rs(a.disc_, r, s);
}

QElement operator/(const QElement& a, const QElement& b) { return a * b.inverse(); }

std::string QElement::to_string() const {
    if (is_zero()) return "0";
    Integer z = 2 * den_;
    Integer g = gcd(gcd(x_, y_), z);
    Integer X = x_ / g, Y = y_ / g, Z = z / g;
    std::string root = "sqrt(" + disc_.get_str() + ")";
    std::ostringstream os;
    int terms = 0;
    if (X != 0) {
        os << X.get_str();
        ++terms;
    }
    if (Y != 0) {
        if (Y < 0)
            os << "-";
        else if (terms)
            os << "+";
        Integer ay = abs(Y);
        if (ay != 1) os << ay.get_str() << "*";
        os << root;
        ++terms;
    }
    std::string body = os.str();
    if (Z == 1) return body;
    if (terms == 2) return "(" + body + ")/" + Z.get_str();
    return body + "/" + Z.get_str();
}

// ---- ideals --------------------------------------------------------------

QIdeal QIdeal::unit() { return QIdeal{}; }

QIdeal QIdeal::make(const QuadField& f, const Integer& a, const Integer& b, Rational scale) {
    if (a <= 0) throw invalid_input("ideal: a must be positive");
    scale.canonicalize();
    if (scale <= 0) throw invalid_input("ideal: scale must be positive");
    Integer bb = fmod(b, a);
    if (fmod(norm_basis(f, bb, 1), a) != 0) throw invalid_input("ideal: a does not divide N(b+w)");
    QIdeal i;
    i.a_ = a;
    i.b_ = bb;
    i.scale_ = scale;
    return i;
}

QIdeal ideal_from_lattice(const QuadField& f, std::span<const std::pair<Integer, Integer>> gens,
                          const Rational& scale) {
    std::vector<Integer> vs;
    for (const auto& g : gens) vs.push_back(g.second);
    bool any = std::any_of(vs.begin(), vs.end(), [](const Integer& v) { return v != 0; });
    if (!any) throw std::logic_error("ideal_from_lattice: lattice not of full rank");
    Bezout bz = bezout_gcd(vs);
    Integer z = abs(bz.gcd);
    Integer ustar = 0;
    for (std::size_t k = 0; k < gens.size(); ++k) ustar += bz.coefficients[k] * gens[k].first;
    if (bz.gcd < 0) ustar = -ustar;
    Integer x = 0;
    for (const auto& [u, v] : gens) x = gcd(x, u - (v / z) * ustar);
    if (x == 0) throw std::logic_error("ideal_from_lattice: lattice not of full rank");
    if (fmod(x, z) != 0 || fmod(ustar, z) != 0) throw std::logic_error("ideal_from_lattice: not an ideal");
    Integer a = x / z;
    Integer b = fmod(ustar / z, a);
    if (fmod(norm_basis(f, b, 1), a) != 0) throw std::logic_error("ideal_from_lattice: not an ideal");
    QIdeal i;
    i.a_ = a;
    i.b_ = b;
    i.scale_ = scale * Rational(z);
    i.scale_.canonicalize();
    return i;
}

QIdeal QIdeal::principal(const QuadField& f, const QElement& alpha) {
    if (alpha.is_zero()) throw invalid_input("principal ideal of zero");
    Integer u = alpha.basis_u(), v = alpha.basis_v();
    std::pair<Integer, Integer> gens[2] = {{u, v}, {-v * f.omega_norm(), u + v * f.discriminant()}};
    Rational sc(1, alpha.den());
    sc.canonicalize();
    return ideal_from_lattice(f, gens, sc);
}

Integer QIdeal::form_b(const QuadField& f) const { return 2 * b_ + f.discriminant(); }

QIdeal QIdeal::primitive_part() const {
    QIdeal i = *this;
    i.scale_ = 1;
    return i;
}

Rational QIdeal::norm() const {
    Rational n = scale_ * scale_ * Rational(a_);
    n.canonicalize();
    return n;
}

bool QIdeal::is_integral() const { return scale_.get_den() == 1; }

bool QIdeal::contains(const QuadField& f, const QElement& alpha) const {
    if (alpha.is_zero()) return true;
    QElement t = alpha * QElement::from_rational(f, 1 / scale_);
    if (!t.is_integral()) return false;
    return fmod(t.basis_u() - t.basis_v() * b_, a_) == 0;
}

std::string QIdeal::to_string() const {
    std::string s = "<" + a_.get_str() + ", " + (b_ == 0 ? std::string() : b_.get_str() + "+") + "w>";
    if (scale_ == 1) return s;
    return scale_.get_str() + "*" + s;
}

QIdeal ideal_mul(const QuadField& f, const QIdeal& i, const QIdeal& j) {
    const Integer &a1 = i.a(), &b1 = i.b(), &a2 = j.a(), &b2 = j.b();
    std::pair<Integer, Integer> gens[4] = {
        {a1 * a2, 0}, {a1 * b2, a1}, {a2 * b1, a2}, {b1 * b2 - f.omega_norm(), b1 + b2 + f.discriminant()}};
    return ideal_from_lattice(f, gens, i.scale() * j.scale());
}

QIdeal ideal_conjugate(const QuadField& f, const QIdeal& i) {
    return QIdeal::make(f, i.a(), -i.b() - f.discriminant(), i.scale());
}

QIdeal ideal_inverse(const QuadField& f, const QIdeal& i) {
    QIdeal c = ideal_conjugate(f, i);
    Rational sc = 1 / (i.scale() * Rational(i.a()));
    return QIdeal::make(f, c.a(), c.b(), sc);
}

QIdeal ideal_pow(const QuadField& f, const QIdeal& i, std::int64_t k) {
    QIdeal base = k < 0 ? ideal_inverse(f, i) : i;
    std::uint64_t n = k < 0 ? static_cast<std::uint64_t>(-(k + 1)) + 1 : static_cast<std::uint64_t>(k);
    QIdeal r = QIdeal::unit();
    while (n) {
        if (n & 1) r = ideal_mul(f, r, base);
        n >>= 1;
        if (n) base = ideal_mul(f, base, base);
    }
    return r;
}

Rational ideal_norm(const QIdeal& i) { return i.norm(); }

// ---- places --------------------------------------------------------------

const char* to_string(SplitKind k) {
    switch (k) {
    case SplitKind::split: return "split";
    case SplitKind::inert: return "inert";
    case SplitKind::ramified: return "ramified";
    }
    return "?";
}

std::string PrimePlace::name() const {
    std::string s = std::to_string(p);
    if (kind == SplitKind::split) s += "." + std::to_string(branch);
    return s;
}

std::vector<PrimePlace> splitting(const QuadField& f, std::int64_t p) {
    if (!is_prime(p)) throw invalid_input("not a prime: " + std::to_string(p));
    const Integer& D = f.discriminant();
    Integer P(static_cast<long>(p));
    int k = kronecker_prime(D, p);
    std::vector<PrimePlace> out;
    if (k == -1) {
        out.push_back({p, SplitKind::inert, 0, 2, 1, Integer(0)});
        return out;
    }
    std::vector<Integer> roots;
    if (p == 2) {
        for (int b = 0; b < 2; ++b)
            if (fmod(norm_basis(f, b, 1), 2) == 0) roots.emplace_back(b);
    } else {
        Integer s = sqrt_mod_prime(D, P);
        Integer inv2 = (P + 1) / 2;
        roots.push_back(fmod((-D + s) * inv2, P));
        roots.push_back(fmod((-D - s) * inv2, P));
        std::sort(roots.begin(), roots.end());
        roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    }
    if (k == 0) {
        out.push_back({p, SplitKind::ramified, 0, 1, 2, roots.at(0)});
    } else {
        if (roots.size() != 2) throw std::logic_error("splitting: expected two roots");
        out.push_back({p, SplitKind::split, 0, 1, 1, roots[0]});
        out.push_back({p, SplitKind::split, 1, 1, 1, roots[1]});
    }
    return out;
}

PrimePlace place_of(const QuadField& f, PlaceId id) {
    auto places = splitting(f, id.prime);
    if (id.branch < 0 || static_cast<std::size_t>(id.branch) >= places.size())
        throw invalid_input("no place " + std::to_string(id.prime) + "." + std::to_string(id.branch));
    return places[static_cast<std::size_t>(id.branch)];
}

QIdeal prime_to_ideal(const QuadField& f, const PrimePlace& place) {
    Integer P(static_cast<long>(place.p));
    if (place.kind == SplitKind::inert) return QIdeal::make(f, 1, 0, Rational(P));
    return QIdeal::make(f, P, place.b);
}

std::int64_t ord_at(const QuadField& f, const PrimePlace& place, const QElement& alpha) {
    if (alpha.is_zero()) throw invalid_input("ord of zero");
    const std::int64_t p = place.p;
    Integer u = alpha.basis_u(), v = alpha.basis_v();
    int m = std::min(val_or_inf(u, p), val_or_inf(v, p));
    std::int64_t num = 0;
    switch (place.kind) {
    case SplitKind::inert: num = m; break;
    case SplitKind::ramified: num = valuation(norm_basis(f, u, v), p); break;
    case SplitKind::split: {
        Integer pm = ipow(p, m);
        Integer u1 = u / pm, v1 = v / pm;
        num = m;
        if (fmod(u1 - v1 * place.b, Integer(static_cast<long>(p))) == 0) num += valuation(norm_basis(f, u1, v1), p);
        break;
    }
    }
    std::int64_t d = valuation(alpha.den(), p);
    return num - d * place.ramification;
}

// ---- principal cycle and units -------------------------------------------

namespace {

const detail::PrincipalCycle& principal_cycle(const QuadField& f, std::size_t limit) {
    auto& cache = f.cache();
    std::lock_guard lock(cache.mutex);
    if (cache.cycle) return *cache.cycle;
    auto cyc = std::make_unique<detail::PrincipalCycle>();
    Form start{1, principal_b0(f)};
    Form g = start;
    QElement theta = QElement::from_integer(f, 1);
    std::size_t steps = 0;
    do {
        if (++steps > limit) throw bound_exceeded("principal cycle step limit exceeded");
        cyc->generators.emplace(FormKey{g.a, g.B}, theta);
        QElement mu;
        real_rho(f, g, &mu);
        theta = theta * mu;
    } while (!(g.a == start.a && g.B == start.B));
    cyc->unit = theta;
    cache.cycle = std::move(cyc);
    return *cache.cycle;
}

} // namespace

QElement reduced_cycle_unit(const QuadField& f, std::size_t step_limit) {
    if (!f.is_real()) throw invalid_input("reduced_cycle_unit: imaginary field");
    return principal_cycle(f, step_limit).unit;
}

QElement fundamental_unit(const QuadField& f, std::size_t step_limit) {
    if (!f.is_real()) throw invalid_input("fundamental_unit: imaginary field");
    auto& cache = f.cache();
    {
        std::lock_guard lock(cache.mutex);
        if (cache.unit) return *cache.unit;
    }
    const Integer& D = f.discriminant();
    const Integer& s = f.isqrt();
    Integer P0 = fmod(D, 2) == 1 ? 1 : 0;
    // xi = (P + sqrt(D))/Q with Q | D - P^2
    Integer P = P0, Q = 2;
    Integer p_prev = 1, p_cur, q_prev = 0, q_cur;
    Integer a = fdiv(P + s, Q);
    p_cur = a;
    q_cur = 1;
    std::size_t steps = 0;
    for (;;) {
        if (++steps > step_limit) throw bound_exceeded("continued fraction step limit exceeded");
        Integer P1 = a * Q - P;
        Integer Q1 = (D - P1 * P1) / Q;
        if (Q1 == 2) break;
        P = P1;
        Q = Q1;
        a = fdiv(P + s, Q);
        Integer pn = a * p_cur + p_prev, qn = a * q_cur + q_prev;
        p_prev = p_cur;
        q_prev = q_cur;
        p_cur = pn;
        q_cur = qn;
    }
    // eps = p - q*xi0 conjugate form: (2p - q*P0 + q*sqrt(D))/2
    QElement eps = QElement::from_parts(f, 2 * p_cur - q_cur * P0, q_cur, 1);
    if (eps.norm() != 1 && eps.norm() != -1) throw std::logic_error("fundamental_unit: not a unit");
    std::lock_guard lock(cache.mutex);
    cache.unit = eps;
    return eps;
}

// ---- class groups --------------------------------------------------------

namespace {

std::vector<FormKey> reduced_representatives(const QuadField& f) {
    std::vector<FormKey> out;
    const Integer& D = f.discriminant();
    if (!f.is_real()) {
        // |B| <= a <= c, so a <= sqrt(|D|/3)
        Integer ad = abs(D);
        for (Integer a = 1; 3 * a * a <= ad; ++a) {
            for (Integer B = -a + 1; B <= a; ++B) {
                Integer n = B * B - D;
                if (fmod(n, 4 * a) != 0) continue;
                Integer c = n / (4 * a);
                if (c < a) continue;
                if (c == a && B < 0) continue;
                out.emplace_back(a, B);
            }
        }
        return out;
    }
    const Integer& s = f.isqrt();
    for (Integer B = 1; B <= s; ++B) {
        if (fmod(B - D, 2) != 0) continue;
        Integer n = (D - B * B) / 4;
        for (Integer a = 1; a * a <= n; ++a) {
            if (fmod(n, a) != 0) continue;
            Integer pair[2] = {a, n / a};
            for (int k = 0; k < (a * a == n ? 1 : 2); ++k) {
                const Integer& aa = pair[k];
                if (s - B + 1 <= 2 * aa && 2 * aa <= s + B) out.emplace_back(aa, B);
            }
        }
    }
    return out;
}

detail::ClassTable& class_table(const QuadField& f, long bound) {
    auto& cache = f.cache();
    {
        std::lock_guard lock(cache.mutex);
        if (cache.table) return *cache.table;
    }
    if (abs(f.discriminant()) > bound)
        throw bound_exceeded("class group enumeration bound exceeded: |D| = " + Integer(abs(f.discriminant())).get_str() +
                             " > " + std::to_string(bound));
    const std::size_t limit = default_step_limit;
    auto tab = std::make_unique<detail::ClassTable>();

    // Classes and their reduced representatives.
    std::vector<Form> reps;
    auto keys = reduced_representatives(f);
    if (!f.is_real()) {
        for (const auto& k : keys) {
            tab->index.emplace(k, reps.size());
            reps.push_back({k.first, k.second});
        }
    } else {
        for (const auto& k : keys) {
            if (tab->index.count(k)) continue;
            std::size_t idx = reps.size();
            reps.push_back({k.first, k.second});
            Form g{k.first, k.second};
            std::size_t steps = 0;
            do {
                if (++steps > limit) throw bound_exceeded("cycle step limit exceeded");
                tab->index.emplace(FormKey{g.a, g.B}, idx);
                real_rho(f, g, nullptr);
            } while (!(g.a == k.first && g.B == k.second));
        }
    }
    const std::size_t h = reps.size();
    auto rep_ideal = [&](std::size_t i) { return QIdeal::make(f, reps[i].a, ideal_to_b(f, reps[i])); };
    auto class_of = [&](const QIdeal& prim) { return tab->index.at(reduced_key(f, prim, limit)); };
    auto mult = [&](std::size_t i, std::size_t j) {
        return class_of(ideal_mul(f, rep_ideal(i), rep_ideal(j)).primitive_part());
    };

    // Grow the subgroup generated by degree-1 primes until it is everything.
    std::vector<std::vector<Integer>> coords(h);
    std::vector<bool> in_h(h, false);
    std::vector<std::size_t> members;
    std::size_t id = class_of(QIdeal::unit());
    in_h[id] = true;
    members.push_back(id);
    std::vector<std::vector<Integer>> relations;
    std::vector<PrimePlace> gens;
    std::vector<std::size_t> gen_class;

    const std::int64_t prime_cap = std::max<std::int64_t>(1000, 4 * Integer(abs(f.discriminant())).get_si() + 100);
    for (std::int64_t p = 2; members.size() < h; p = next_prime(p)) {
        if (p > prime_cap) throw std::logic_error("class group: primes failed to generate");
        for (const auto& pl : splitting(f, p)) {
            if (members.size() == h) break;
            if (pl.degree != 1) continue;
            std::size_t c = class_of(prime_to_ideal(f, pl).primitive_part());
            if (in_h[c]) continue;
            std::size_t x = c;
            Integer m = 1;
            while (!in_h[x]) {
                x = mult(x, c);
                ++m;
            }
            const std::size_t k = gens.size();
            std::vector<Integer> rel(k + 1, 0);
            rel[k] = m;
            for (std::size_t t = 0; t < k; ++t) rel[t] = -(t < coords[x].size() ? coords[x][t] : Integer(0));
            relations.push_back(rel);
            gens.push_back(pl);
            gen_class.push_back(c);
            for (auto idx : members) coords[idx].resize(k + 1, 0);
            std::vector<std::size_t> layer = members;
            for (Integer j = 1; j < m; ++j) {
                std::vector<std::size_t> next;
                for (auto idx : layer) {
                    std::size_t e = mult(idx, c);
                    coords[e] = coords[idx];
                    coords[e][k] = j;
                    in_h[e] = true;
                    next.push_back(e);
                }
                for (auto e : next) members.push_back(e);
                layer = std::move(next);
            }
        }
    }

    const std::size_t n = gens.size();
    IntMatrix rel(relations.size(), n);
    for (std::size_t i = 0; i < relations.size(); ++i)
        for (std::size_t j = 0; j < relations[i].size(); ++j) rel(i, j) = relations[i][j];
    std::vector<std::string> labels;
    for (const auto& g : gens) labels.push_back("[" + g.name() + "]");
    tab->cg.group = quotient(n, rel, labels);
    tab->cg.generator_places = gens;
    tab->cg.class_number = h;

    // Map each class representative key to its group element.
    tab->elements.resize(h);
    for (std::size_t i = 0; i < h; ++i) {
        auto c = coords[i];
        c.resize(n, 0);
        tab->elements[i] = member(tab->cg.group, c);
    }

    for (std::size_t t = 0; t < tab->cg.group.rank(); ++t) {
        auto lift = tab->cg.group.lift(tab->cg.group.generator(t));
        QIdeal acc = QIdeal::unit();
        for (std::size_t k = 0; k < n; ++k)
            if (lift[k] != 0) acc = ideal_mul(f, acc, ideal_pow(f, prime_to_ideal(f, gens[k]), lift[k].get_si()));
        FormKey key = reduced_key(f, acc.primitive_part(), limit);
        tab->cg.invariant_representatives.push_back(QIdeal::make(f, key.first, ideal_to_b(f, {key.first, key.second})));
    }

    std::lock_guard lock(cache.mutex);
    if (!cache.table) cache.table = std::move(tab);
    return *cache.table;
}

} // namespace

const ClassGroup& class_group(const QuadField& f, long bound) { return class_table(f, bound).cg; }

GroupElement ideal_class(const QuadField& f, const QIdeal& i) {
    auto& tab = class_table(f, default_class_group_bound);
    return tab.elements.at(tab.index.at(reduced_key(f, i.primitive_part(), default_step_limit)));
}

std::optional<QElement> is_principal(const QuadField& f, const QIdeal& i, std::size_t step_limit) {
    QElement q = QElement::from_rational(f, i.scale());
    Form g = form_of(f, i);
    if (!f.is_real()) {
        QElement w1 = QElement::from_integer(f, i.a());
        QElement w2 = QElement::from_basis(f, i.b(), 1);
        imag_reduce(f, g, &w1, &w2, step_limit);
        if (g.a != 1) return std::nullopt;
        QElement alpha = q * w1;
        if (alpha.x() < 0 || (alpha.x() == 0 && alpha.y() < 0)) alpha = -alpha;
        return alpha;
    }
    QElement gamma = QElement::from_integer(f, 1);
    real_reduce(f, g, &gamma, step_limit);
    const auto& cyc = principal_cycle(f, step_limit);
    auto it = cyc.generators.find({g.a, g.B});
    if (it == cyc.generators.end()) return std::nullopt;
    return q * gamma * it->second;
}

} // namespace chow
