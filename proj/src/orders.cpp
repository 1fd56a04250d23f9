#include "chow/orders.hpp"

#include <algorithm>
#include <sstream>

#include "chow/arith.hpp"
#include "chow/declared.hpp"
#include "chow/errors.hpp"

namespace chow {

namespace {

// Order-level ids of invertible declared places are shifted past the ids of
// the selected records.
constexpr int declared_invertible_offset = 1 << 20;

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

// "p" or "p.b"
std::optional<PlaceId> parse_numeric_label(std::string_view s, bool& has_branch) {
    auto dot = s.find('.');
    std::string ps(s.substr(0, dot));
    has_branch = dot != std::string_view::npos;
    std::string bs = has_branch ? std::string(s.substr(dot + 1)) : "0";
    auto digits = [](const std::string& x) {
        return !x.empty() && x.size() < 18 && std::all_of(x.begin(), x.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    if (!digits(ps) || !digits(bs)) return std::nullopt;
    return PlaceId{std::stoll(ps), std::stoi(bs)};
}

Integer pow_int(std::int64_t p, int k) {
    Integer r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(k));
    return r;
}

} // namespace

// ---- divisors ------------------------------------------------------------

Integer Divisor::coefficient(PlaceId id) const {
    auto it = terms_.find(id);
    return it == terms_.end() ? Integer(0) : it->second;
}

void Divisor::add(PlaceId id, const Integer& c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(id, c);
    if (inserted) return;
    it->second += c;
    if (it->second == 0) terms_.erase(it);
}

Divisor& Divisor::operator+=(const Divisor& o) {
    if (o.level_ != level_) throw invalid_input("adding divisors of different levels");
    for (const auto& [id, c] : o.terms_) add(id, c);
    return *this;
}

Divisor operator-(const Divisor& a) {
    Divisor r(a.level_);
    for (const auto& [id, c] : a.terms_) r.terms_.emplace(id, -c);
    return r;
}

Divisor operator*(const Integer& k, const Divisor& a) {
    Divisor r(a.level_);
    if (k == 0) return r;
    for (const auto& [id, c] : a.terms_) r.terms_.emplace(id, k * c);
    return r;
}

// ---- orders --------------------------------------------------------------

const QuadField& Order::field() const {
    if (!field_) throw invalid_input("declared backend has no quadratic field");
    return *field_;
}

const Integer& Order::conductor() const {
    if (backend_ != Backend::quadratic) throw invalid_input("declared backend has no integer conductor");
    return conductor_;
}

const DeclaredField& Order::declared() const {
    if (!declared_) throw invalid_input("quadratic backend has no declared data");
    return *declared_;
}

void Order::finish_primes() {
    for (auto& pr : primes_) {
        std::vector<Integer> d;
        for (const auto& pl : pr.places) d.emplace_back(pl.degree);
        Bezout b = bezout_gcd(d);
        pr.g = b.gcd;
        pr.lambdas = b.coefficients;
    }
}

Order order_from_conductor(const QuadField& f, const Integer& conductor) {
    if (conductor < 1) throw invalid_input("conductor must be a positive integer");
    Order o;
    o.backend_ = Backend::quadratic;
    o.field_ = f;
    o.conductor_ = conductor;
    for (const auto& [p, k] : factor_integer(conductor)) {
        NonInvertiblePrime pr;
        pr.label = std::to_string(p);
        pr.id = {p, 0};
        pr.p = p;
        pr.residue_size = static_cast<long>(p);
        for (const auto& pl : splitting(f, p)) pr.places.push_back({pl.name(), pl.id(), pl.degree, pl.ramification});
        o.primes_.push_back(std::move(pr));
    }
    o.finish_primes();
    return o;
}

Order make_declared_order(std::shared_ptr<const DeclaredField> data, std::vector<std::size_t> selection) {
    Order o;
    o.backend_ = Backend::declared;
    o.declared_ = std::move(data);
    o.selection_ = std::move(selection);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < o.declared_->class_invariants.size(); ++i) labels.push_back("c" + std::to_string(i));
    o.declared_class_group_ =
        std::make_shared<const AbelianGroup>(AbelianGroup::from_invariants(o.declared_->class_invariants, labels));
    std::map<std::int64_t, int> count, seen;
    for (auto k : o.selection_) {
        if (k >= o.declared_->conductor_primes.size()) throw invalid_input("order selection out of range");
        ++count[o.declared_->conductor_primes[k].p];
    }
    for (auto k : o.selection_) {
        const auto& rec = o.declared_->conductor_primes[k];
        NonInvertiblePrime pr;
        int idx = seen[rec.p]++;
        pr.label = std::to_string(rec.p) + (count[rec.p] > 1 ? "." + std::to_string(idx) : "");
        pr.id = {rec.p, idx};
        pr.p = rec.p;
        pr.residue_size = rec.residue_size_below;
        for (const auto& pl : rec.places)
            pr.places.push_back({pl.label, o.declared_->find(pl.label)->id, pl.degree, pl.ramification});
        o.primes_.push_back(std::move(pr));
    }
    o.finish_primes();
    return o;
}

Order Order::with_place_order(const std::vector<std::vector<std::size_t>>& perm) const {
    Order o = *this;
    if (perm.size() != primes_.size()) throw invalid_input("with_place_order: wrong number of primes");
    for (std::size_t i = 0; i < primes_.size(); ++i) {
        if (perm[i].size() != primes_[i].places.size()) throw invalid_input("with_place_order: wrong permutation");
        for (std::size_t j = 0; j < perm[i].size(); ++j) o.primes_[i].places[j] = primes_[i].places.at(perm[i][j]);
    }
    o.finish_primes();
    return o;
}

const AbelianGroup& Order::class_group() const {
    if (backend_ == Backend::quadratic) return chow::class_group(*field_).group;
    return *declared_class_group_;
}

GroupElement Order::place_class(PlaceId id) const {
    if (backend_ == Backend::quadratic) return ideal_class(*field_, prime_to_ideal(*field_, place_of(*field_, id)));
    const DeclaredLabel* l = declared_->find(id);
    if (!l) throw invalid_input("unknown declared place");
    if (!l->class_image) throw data_error("declared data incomplete: class_image of " + l->label + " is not given");
    return class_group().reduce(*l->class_image);
}

PlaceId Order::normalization_place(PlaceId order_id) const {
    for (const auto& pr : primes_)
        if (pr.id == order_id) throw invalid_input("prime " + pr.label + " is not invertible");
    if (backend_ == Backend::quadratic) {
        place_of(*field_, order_id);
        if (prime_below(order_id)) throw invalid_input("place lies over a non-invertible prime");
        return order_id;
    }
    PlaceId id{order_id.prime, order_id.branch - declared_invertible_offset};
    if (order_id.branch < declared_invertible_offset || !declared_->find(id))
        throw invalid_input("unknown order place");
    return id;
}

std::optional<std::size_t> Order::prime_below(PlaceId id) const {
    for (std::size_t i = 0; i < primes_.size(); ++i)
        for (const auto& pl : primes_[i].places)
            if (pl.id == id) return i;
    return std::nullopt;
}

std::string Order::label(PlaceId id, Level level) const {
    if (level == Level::order) {
        if (backend_ == Backend::declared && id.branch >= declared_invertible_offset) {
            const DeclaredLabel* l = declared_->find(PlaceId{id.prime, id.branch - declared_invertible_offset});
            if (!l) throw invalid_input("unknown declared place");
            return l->label;
        }
        for (const auto& pr : primes_)
            if (pr.id == id) return pr.label;
        if (backend_ == Backend::declared) throw invalid_input("unknown order place");
    }
    if (backend_ == Backend::quadratic) return place_of(*field_, id).name();
    const DeclaredLabel* l = declared_->find(id);
    if (!l) throw invalid_input("unknown declared place");
    return l->label;
}

PlaceId Order::resolve(std::string_view text, Level level) const {
    const std::string s = trim(text);
    if (level == Level::order) {
        for (const auto& pr : primes_)
            if (pr.label == s || (pr.label.find('.') == std::string::npos && s == pr.label + ".0")) return pr.id;
    }
    if (backend_ == Backend::quadratic) {
        bool has_branch = false;
        auto id = parse_numeric_label(s, has_branch);
        if (!id) throw invalid_input("bad place label '" + s + "'");
        if (level == Level::order && mpz_divisible_ui_p(conductor_.get_mpz_t(), static_cast<unsigned long>(id->prime)))
            throw invalid_input("bad place label '" + s + "': the prime over " + std::to_string(id->prime) +
                                " is '" + std::to_string(id->prime) + "'");
        auto places = splitting(*field_, id->prime);
        if (!has_branch && places.size() > 1)
            throw invalid_input("place label '" + s + "' is ambiguous: " + std::to_string(id->prime) + " splits");
        if (id->branch < 0 || static_cast<std::size_t>(id->branch) >= places.size())
            throw invalid_input("no place '" + s + "'");
        return *id;
    }
    const DeclaredLabel* l = declared_->find(s);
    if (!l) throw invalid_input("unknown place label '" + s + "'");
    if (level == Level::normalization) return l->id;
    if (prime_below(l->id))
        throw invalid_input("place " + s + " lies over a non-invertible prime; use its prime's label");
    return PlaceId{l->id.prime, l->id.branch + declared_invertible_offset};
}

std::string Order::describe() const {
    if (backend_ == Backend::quadratic) {
        std::string k = "Q(sqrt(" + field_->discriminant().get_str() + "))";
        if (conductor_ == 1) return "maximal order of " + k;
        return "Z + " + conductor_.get_str() + "*O_K in " + k;
    }
    std::string s = "declared order {";
    for (std::size_t i = 0; i < selection_.size(); ++i) s += (i ? "," : "") + std::to_string(selection_[i]);
    return s + "}";
}

AbelianGroup local_chow(const Order& o, std::size_t i) {
    const auto& ps = o.noninvertible_primes();
    if (i >= ps.size()) throw invalid_input("local_chow: no non-invertible prime with index " + std::to_string(i));
    if (ps[i].g == 1) return AbelianGroup::trivial();
    return AbelianGroup::from_invariants({ps[i].g});
}

// ---- divisors of elements ------------------------------------------------

Divisor div_normalization(const QuadField& f, const QElement& alpha) {
    if (alpha.is_zero()) throw invalid_input("divisor of zero");
    Integer u = alpha.basis_u(), v = alpha.basis_v();
    Integer n = u * u + u * v * f.discriminant() + v * v * f.omega_norm();
    std::vector<std::int64_t> primes;
    for (const auto& [p, e] : factor_integer(n)) primes.push_back(p);
    for (const auto& [p, e] : factor_integer(alpha.den())) primes.push_back(p);
    std::sort(primes.begin(), primes.end());
    primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
    Divisor d(Level::normalization);
    for (auto p : primes)
        for (const auto& pl : splitting(f, p)) d.add(pl.id(), ord_at(f, pl, alpha));
    return d;
}

Divisor pushforward(const Order& o, const Divisor& d) {
    if (d.level() != Level::normalization) throw invalid_input("pushforward expects a divisor over the normalization");
    Divisor out(Level::order);
    for (const auto& [id, c] : d.terms()) {
        if (auto i = o.prime_below(id)) {
            const auto& pr = o.noninvertible_primes()[*i];
            for (const auto& pl : pr.places)
                if (pl.id == id) out.add(pr.id, c * pl.degree);
            continue;
        }
        if (o.backend() == Backend::quadratic) {
            place_of(o.field(), id);
            out.add(id, c);
        } else {
            if (!o.declared().find(id)) throw invalid_input("unknown declared place");
            out.add({id.prime, id.branch + declared_invertible_offset}, c);
        }
    }
    return out;
}

Divisor div_over_order(const Order& o, const QElement& alpha) {
    if (o.backend() != Backend::quadratic) throw invalid_input("declared backend has no element arithmetic");
    return pushforward(o, div_normalization(o.field(), alpha));
}

std::vector<Divisor> kernel_generators(const Order& o) {
    std::vector<Divisor> out;
    for (const auto& pr : o.noninvertible_primes()) {
        Divisor q(Level::normalization);
        for (std::size_t k = 0; k < pr.places.size(); ++k) q.add(pr.places[k].id, pr.lambdas[k]);
        for (const auto& pl : pr.places) {
            Divisor gen = Integer(pl.degree / pr.g) * q;
            gen.add(pl.id, -1);
            out.push_back(std::move(gen));
        }
    }
    return out;
}

std::string format_divisor(const Order& o, const Divisor& d) {
    std::string s;
    for (const auto& [id, c] : d.terms()) {
        if (!s.empty()) s += ",";
        s += o.label(id, d.level()) + ":" + c.get_str();
    }
    return s;
}

Divisor parse_divisor(const Order& o, std::string_view text, Level level) {
    Divisor d(level);
    std::string all = trim(text);
    if (all.empty()) return d;
    std::stringstream ss(all);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        auto colon = item.rfind(':');
        if (colon == std::string::npos) throw invalid_input("divisor term '" + item + "' lacks ':coefficient'");
        std::string coef = trim(item.substr(colon + 1));
        Integer c;
        if (coef.empty() || c.set_str(coef[0] == '+' ? coef.substr(1) : coef, 10) != 0)
            throw invalid_input("bad coefficient in divisor term '" + item + "'");
        d.add(o.resolve(item.substr(0, colon), level), c);
    }
    return d;
}

// ---- conductor ideals ----------------------------------------------------

namespace {

struct LocalExponent {
    std::string name;
    std::int64_t k = 0;
    std::int64_t e = 1;
    bool prime_field = false;
};

ConductorVerdict furtwangler(const std::map<std::int64_t, std::vector<LocalExponent>>& by_prime) {
    for (const auto& [p, places] : by_prime) {
        if (std::none_of(places.begin(), places.end(), [](const LocalExponent& x) { return x.k > 0; })) continue;
        for (std::size_t i = 0; i < places.size(); ++i) {
            const auto& pi = places[i];
            if (!pi.prime_field || (pi.k - 1) % pi.e != 0) continue;
            const std::int64_t q = (pi.k - 1) / pi.e;
            bool witnessed = false;
            for (std::size_t j = 0; j < places.size() && !witnessed; ++j)
                if (j != i && places[j].k > q * places[j].e) witnessed = true;
            if (!witnessed) return {false, pi.name};
        }
    }
    return {true, std::nullopt};
}

} // namespace

ConductorVerdict is_conductor_ideal(const QuadField& f, const std::map<PlaceId, std::int64_t>& exponents) {
    std::map<std::int64_t, std::vector<LocalExponent>> by_prime;
    for (const auto& [id, k] : exponents) {
        if (k < 0) throw invalid_input("conductor exponents must be non-negative");
        place_of(f, id);
        if (by_prime.count(id.prime)) continue;
        auto& v = by_prime[id.prime];
        for (const auto& pl : splitting(f, id.prime)) {
            auto it = exponents.find(pl.id());
            v.push_back({pl.name(), it == exponents.end() ? 0 : it->second, pl.ramification, pl.degree == 1});
        }
    }
    return furtwangler(by_prime);
}

ConductorVerdict is_conductor_ideal(const DeclaredField& f, const std::map<std::string, std::int64_t>& exponents) {
    std::map<std::int64_t, std::vector<LocalExponent>> by_prime;
    for (const auto& [label, k] : exponents) {
        if (k < 0) throw invalid_input("conductor exponents must be non-negative");
        const DeclaredLabel* l = f.find(label);
        if (!l) throw invalid_input("unknown place label '" + label + "'");
        if (by_prime.count(l->p)) continue;
        auto& v = by_prime[l->p];
        for (const auto& other : f.labels) {
            if (other.p != l->p) continue;
            auto it = exponents.find(other.label);
            v.push_back({other.label, it == exponents.end() ? 0 : it->second, other.ramification,
                         other.absolute_residue == Integer(static_cast<long>(l->p))});
        }
    }
    return furtwangler(by_prime);
}

Order order_from_ideal(const QuadField& f, const std::map<PlaceId, std::int64_t>& exponents) {
    auto verdict = is_conductor_ideal(f, exponents);
    if (!verdict.holds) throw invalid_input("not a conductor ideal (violator: " + *verdict.violator + ")");
    Integer conductor = 1;
    std::map<std::int64_t, bool> done;
    for (const auto& [id, k] : exponents) {
        if (done[id.prime]) continue;
        done[id.prime] = true;
        auto places = splitting(f, id.prime);
        auto exp_of = [&](const PrimePlace& pl) {
            auto it = exponents.find(pl.id());
            return it == exponents.end() ? std::int64_t{0} : it->second;
        };
        std::int64_t v = exp_of(places[0]) / places[0].ramification;
        bool ok = exp_of(places[0]) % places[0].ramification == 0;
        for (const auto& pl : places) ok = ok && exp_of(pl) == v * pl.ramification;
        if (!ok) throw invalid_input("unsupported non-monogenic-conductor order");
        conductor *= pow_int(id.prime, static_cast<int>(v));
    }
    return order_from_conductor(f, conductor);
}

// ---- maximality conditions -----------------------------------------------

Integer units_mod_conductor(const Order& o) {
    const QuadField& f = o.field();
    Integer total = 1;
    for (const auto& [p, k] : factor_integer(o.conductor())) {
        auto places = splitting(f, p);
        Integer P(static_cast<long>(p));
        switch (places[0].kind) {
        case SplitKind::split: {
            Integer x = pow_int(p, k - 1) * (P - 1);
            total *= x * x;
            break;
        }
        case SplitKind::inert: total *= pow_int(p, 2 * (k - 1)) * (P * P - 1); break;
        case SplitKind::ramified: total *= pow_int(p, 2 * k - 1) * (P - 1); break;
        }
    }
    return total;
}

FixReport prop_fix_report(const Order& o) {
    FixReport r;
    r.maximal = o.is_maximal();
    for (const auto& pr : o.noninvertible_primes()) {
        if (pr.places.size() < 2) r.all_r_geq_2 = false;
        for (const auto& pl : pr.places) {
            Integer absolute;
            mpz_pow_ui(absolute.get_mpz_t(), pr.residue_size.get_mpz_t(), static_cast<unsigned long>(pl.degree));
            if (absolute != 2) r.all_residue_f2 = false;
        }
    }
    if (o.backend() == Backend::quadratic) {
        bool sq = true;
        for (const auto& [p, k] : factor_integer(o.conductor()))
            if (k > 1 || splitting(o.field(), p)[0].kind == SplitKind::ramified) sq = false;
        r.conductor_squarefree = sq;
        r.units_mod_conductor_trivial = units_mod_conductor(o) == 1;
    } else if (r.maximal) {
        r.conductor_squarefree = true;
    }
    if (r.conductor_squarefree) {
        r.all_hold = *r.conductor_squarefree && r.all_residue_f2 && r.all_r_geq_2;
    } else if (!r.all_residue_f2 || !r.all_r_geq_2) {
        r.all_hold = false;
    }
    return r;
}

// ---- kernel witnesses ----------------------------------------------------

bool in_order(const Order& o, const QElement& alpha) {
    if (!alpha.is_integral()) return false;
    return mpz_divisible_p(alpha.basis_v().get_mpz_t(), o.conductor().get_mpz_t()) != 0;
}

std::optional<QElement> divisor_kernel_witness(const Order& o, const Integer& bound) {
    if (o.backend() != Backend::quadratic) throw invalid_input("kernel witness search needs the quadratic backend");
    if (o.is_maximal()) throw invalid_input("the maximal order has no kernel witness");
    const QuadField& f = o.field();

    auto accept = [&](const QElement& a) {
        if (!div_over_order(o, a).is_zero()) return false;
        bool unit_of_normalization = div_normalization(f, a).is_zero();
        return !unit_of_normalization || !in_order(o, a);
    };

    // Units of the maximal order that O misses.
    if (!f.is_real()) {
        std::vector<QElement> units;
        if (f.discriminant() == -4) units.push_back(QElement::from_parts(f, 0, 1));
        if (f.discriminant() == -3) units.push_back(QElement::from_parts(f, 1, 1));
        for (const auto& u : units)
            if (accept(u)) return u;
    } else {
        QElement eps = fundamental_unit(f);
        if (accept(eps)) return eps;
    }

    // beta/conj(beta) for principal ideals supported on the conductor.
    struct Gen {
        PrimePlace place;
        Integer norm;
    };
    std::vector<Gen> gens;
    for (const auto& pr : o.noninvertible_primes())
        for (const auto& pl : splitting(f, pr.p)) gens.push_back({pl, pow_int(pl.p, pl.degree)});

    std::vector<std::pair<Integer, std::vector<int>>> candidates;
    std::vector<int> exps(gens.size(), 0);
    auto rec = [&](auto&& self, std::size_t k, const Integer& norm) -> void {
        if (k == gens.size()) {
            if (norm > 1) candidates.emplace_back(norm, exps);
            return;
        }
        Integer n = norm;
        for (int e = 0; n <= bound; ++e) {
            exps[k] = e;
            self(self, k + 1, n);
            n *= gens[k].norm;
        }
        exps[k] = 0;
    };
    rec(rec, 0, Integer(1));
    std::sort(candidates.begin(), candidates.end());

    for (const auto& [norm, ex] : candidates) {
        QIdeal a = QIdeal::unit();
        for (std::size_t k = 0; k < gens.size(); ++k)
            if (ex[k]) a = ideal_mul(f, a, ideal_pow(f, prime_to_ideal(f, gens[k].place), ex[k]));
        auto beta = is_principal(f, a);
        if (!beta) continue;
        QElement w = *beta / beta->conjugate();
        if (accept(w)) return w;
    }
    return std::nullopt;
}

} // namespace chow
