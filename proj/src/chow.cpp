#include "chow/chow.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "chow/arith.hpp"
#include "chow/declared.hpp"
#include "chow/errors.hpp"

namespace chow {

namespace {

GroupElement divisor_class(const Order& o, const Divisor& d) {
    const AbelianGroup& cl = o.class_group();
    GroupElement acc = cl.zero();
    for (const auto& [id, c] : d.terms()) acc = cl.add(acc, cl.scale(o.place_class(id), c));
    return acc;
}

Integer euler_phi(const Integer& n) {
    Integer r = 1;
    for (const auto& [p, k] : factor_integer(n)) {
        Integer pk;
        mpz_ui_pow_ui(pk.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(k - 1));
        r *= pk * (p - 1);
    }
    return r;
}

Integer exact_div(const Integer& a, const Integer& b, const char* what) {
    if (b == 0 || !mpz_divisible_p(a.get_mpz_t(), b.get_mpz_t()))
        throw std::logic_error(std::string("non-integral quotient in ") + what);
    return a / b;
}

int log_p(Integer q, std::int64_t p) {
    int k = 0;
    while (q > 1) {
        if (!mpz_divisible_ui_p(q.get_mpz_t(), static_cast<unsigned long>(p))) return -1;
        q /= static_cast<unsigned long>(p);
        ++k;
    }
    return q == 1 ? k : -1;
}

// Degree of the residue field of size a over the one of size b.
int degree_between(const Integer& a, const Integer& b, std::int64_t p) {
    int ka = log_p(a, p), kb = log_p(b, p);
    if (ka < 1 || kb < 1 || ka % kb != 0) return -1;
    return ka / kb;
}

} // namespace

// ---- presentation --------------------------------------------------------

std::vector<Integer> ChowPresentation::coordinates(const Divisor& d) const {
    if (d.level() != Level::order) throw invalid_input("expected a divisor over the order");
    const auto& ps = order.noninvertible_primes();
    const std::size_t r = ps.size();
    std::vector<Integer> x(r + class_group.rank(), 0);
    for (const auto& [id, c] : d.terms()) {
        auto it = std::find_if(ps.begin(), ps.end(), [&](const NonInvertiblePrime& p) { return p.id == id; });
        if (it != ps.end()) {
            x[static_cast<std::size_t>(it - ps.begin())] += c;
            continue;
        }
        GroupElement cls = order.place_class(order.normalization_place(id));
        for (std::size_t t = 0; t < cls.coords.size(); ++t) x[r + t] += c * cls.coords[t];
    }
    return x;
}

GroupElement ChowPresentation::project(const Divisor& d) const {
    return member(result, coordinates(d));
}

GroupElement ChowPresentation::project_normalization(const Divisor& d) const {
    return project(pushforward(order, d));
}

ChowPresentation chow_group(const Order& o) {
    ChowPresentation c{o, o.class_group(), {}, {}, {}, {}, {}};
    const auto& ps = o.noninvertible_primes();
    const std::size_t r = ps.size();
    const std::size_t m = c.class_group.rank();

    for (const auto& pr : ps) c.generator_labels.push_back(pr.label);
    for (std::size_t t = 0; t < m; ++t) c.generator_labels.push_back("c" + std::to_string(t));

    for (const auto& k : kernel_generators(o)) c.n_generators.push_back(divisor_class(o, k));
    for (const auto& pr : ps) {
        Divisor q(Level::normalization);
        for (std::size_t j = 0; j < pr.places.size(); ++j) q.add(pr.places[j].id, pr.lambdas[j]);
        c.q_classes.push_back(divisor_class(o, q));
    }

    c.r_relations = IntMatrix(r, r + m);
    for (std::size_t i = 0; i < r; ++i) {
        c.r_relations(i, i) = ps[i].g;
        for (std::size_t t = 0; t < m; ++t) c.r_relations(i, r + t) = -c.q_classes[i].coords[t];
    }

    IntMatrix rel = c.r_relations;
    for (std::size_t t = 0; t < m; ++t) {
        std::vector<Integer> row(r + m, 0);
        row[r + t] = c.class_group.invariants()[t];
        rel.append_row(row);
    }
    for (const auto& n : c.n_generators) {
        std::vector<Integer> row(r, 0);
        row.insert(row.end(), n.coords.begin(), n.coords.end());
        rel.append_row(row);
    }
    c.result = quotient(r + m, rel, c.generator_labels);
    return c;
}

// ---- exact sequence ------------------------------------------------------

ExactSequenceData exact_sequence_data(const ChowPresentation& c) {
    ExactSequenceData e;
    e.image_part = subgroup_quotient(c.class_group, c.n_generators);
    std::vector<Integer> diag(e.image_part.invariants());
    for (std::size_t i = 0; i < c.order.noninvertible_primes().size(); ++i) {
        e.local_parts.push_back(local_chow(c.order, i));
        diag.push_back(c.order.noninvertible_primes()[i].g);
    }
    IntMatrix rel(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) rel(i, i) = diag[i];
    e.direct_sum_invariants = quotient(diag.size(), rel).invariants();
    e.non_split = e.direct_sum_invariants != c.result.invariants();

    Integer locals = 1;
    for (const auto& l : e.local_parts) locals *= l.order();
    if (c.result.order() != e.image_part.order() * locals)
        throw std::logic_error("exact sequence cardinality mismatch");
    return e;
}

ExactSequenceData exact_sequence_data(const Order& o) { return exact_sequence_data(chow_group(o)); }

// ---- principal divisors --------------------------------------------------

QIdeal divisor_ideal(const QuadField& f, const Divisor& d) {
    if (d.level() != Level::normalization) throw invalid_input("expected a divisor over the normalization");
    QIdeal a = QIdeal::unit();
    for (const auto& [id, c] : d.terms())
        a = ideal_mul(f, a, ideal_pow(f, prime_to_ideal(f, place_of(f, id)), c.get_si()));
    return a;
}

PrincipalResult principal_divisor_test(const Order& o, const Divisor& d, std::size_t step_limit) {
    if (d.level() != Level::order) throw invalid_input("expected a divisor over the order");
    const auto& ps = o.noninvertible_primes();

    // (1) membership in the image of f_*; (2) lift.
    Divisor a(Level::normalization);
    for (const auto& [id, c] : d.terms()) {
        auto it = std::find_if(ps.begin(), ps.end(), [&](const NonInvertiblePrime& p) { return p.id == id; });
        if (it == ps.end()) {
            a.add(o.normalization_place(id), c);
            continue;
        }
        if (!mpz_divisible_p(c.get_mpz_t(), it->g.get_mpz_t())) return {PrincipalKind::not_principal, {}, 1};
        Integer k = c / it->g;
        for (std::size_t j = 0; j < it->places.size(); ++j) a.add(it->places[j].id, k * it->lambdas[j]);
    }

    // (3)-(5)
    const AbelianGroup& cl = o.class_group();
    std::vector<Divisor> kernel = kernel_generators(o);
    std::vector<GroupElement> kernel_classes;
    for (const auto& k : kernel) kernel_classes.push_back(divisor_class(o, k));
    auto t = solve_in_span(cl, kernel_classes, cl.negate(divisor_class(o, a)));
    if (!t) return {PrincipalKind::not_principal, {}, 5};
    if (o.backend() == Backend::declared) return {PrincipalKind::principal_without_generator, {}, 0};

    // (6)
    Divisor b = a;
    for (std::size_t k = 0; k < kernel.size(); ++k) {
        Integer tk = (*t)[k];
        if (auto ord = element_order(cl, kernel_classes[k])) {
            mpz_fdiv_r(tk.get_mpz_t(), tk.get_mpz_t(), ord->get_mpz_t());
        }
        b += tk * kernel[k];
    }
    const QuadField& f = o.field();
    auto alpha = is_principal(f, divisor_ideal(f, b), step_limit);
    if (!alpha) throw std::logic_error("principal_divisor_test: lifted ideal is not principal");

    // (7)
    if (div_over_order(o, *alpha) != d) throw std::logic_error("principal_divisor_test: divisor mismatch");
    return {PrincipalKind::generator, alpha, 0};
}

// ---- Picard group --------------------------------------------------------

Integer unit_index(const Order& o) {
    const QuadField& f = o.field();
    const Integer& m = o.conductor();
    if (m == 1) return 1;
    if (!f.is_real()) return f.torsion_units() / 2;

    QElement eps = fundamental_unit(f);
    const Integer n0 = f.omega_norm(), d0 = f.discriminant();
    auto mod = [&](Integer x) {
        mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
        return x;
    };
    const Integer eu = mod(eps.basis_u()), ev = mod(eps.basis_v());
    Integer u = eu, v = ev;
    const Integer limit = units_mod_conductor(o);
    for (Integer n = 1; n <= limit; ++n) {
        if (v == 0) return n;
        Integer nu = mod(u * eu - v * ev * n0);
        Integer nv = mod(u * ev + eu * v + v * ev * d0);
        u = nu;
        v = nv;
    }
    throw std::logic_error("unit_index: no power of the fundamental unit lies in the order");
}

PicReport pic_cardinality(const Order& o) {
    if (o.backend() != Backend::quadratic) throw invalid_input("Picard cardinality needs the quadratic backend");
    PicReport r;
    r.cl_cardinality = o.class_group().order();
    r.unit_index = unit_index(o);
    r.units_mod_conductor = units_mod_conductor(o);
    r.units_mod_conductor_below = euler_phi(o.conductor());
    r.relative_unit_quotient = exact_div(r.units_mod_conductor, r.units_mod_conductor_below, "(O~/F)*/(O/F)*");
    r.pic_cardinality = exact_div(r.cl_cardinality * r.relative_unit_quotient, r.unit_index, "Pic");
    return r;
}

PicChowReport pic_chow_report(const ChowPresentation& c) {
    PicChowReport r;
    const Order& o = c.order;
    for (const auto& pr : o.noninvertible_primes()) {
        if (pr.g == 1) continue;
        r.surjective = false;
        r.reasons.push_back("local Chow group at " + pr.label + " is Z/" + pr.g.get_str());
    }
    bool n_trivial = std::all_of(c.n_generators.begin(), c.n_generators.end(),
                                 [&](const GroupElement& e) { return e == c.class_group.zero(); });
    if (!n_trivial) r.reasons.push_back("kernel classes generate a nontrivial subgroup of Cl");
    if (o.backend() == Backend::quadratic) {
        PicReport p = pic_cardinality(o);
        bool iso = p.pic_cardinality == p.cl_cardinality;
        if (!iso)
            r.reasons.push_back("Pic has order " + p.pic_cardinality.get_str() + ", Cl has order " +
                                p.cl_cardinality.get_str());
        r.injective = iso && n_trivial;
    } else if (!n_trivial) {
        r.injective = false;
    } else {
        r.reasons.push_back("injectivity unknown: no unit data for declared orders");
    }
    return r;
}

PicChowReport pic_chow_report(const Order& o) { return pic_chow_report(chow_group(o)); }

// ---- trivial Chow search -------------------------------------------------

// Chow(Z + fÕ) is trivial iff g = 1 at every prime dividing f and the kernel
// classes span Cl. Inert primes have g = 2, ramified primes add nothing to
// the kernel, and the kernel only depends on the primes dividing f, so the
// smallest such f is a squarefree product of split primes.
TrivialChowSearch find_trivial_chow_conductor(const QuadField& f, std::int64_t budget) {
    TrivialChowSearch s;
    s.budget = budget;
    const AbelianGroup& cl = class_group(f).group;

    std::vector<std::int64_t> primes;
    std::vector<std::vector<GroupElement>> classes;
    for (std::int64_t p = 2; p <= budget; p = next_prime(p)) {
        if (kronecker_prime(f.discriminant(), p) != 1) continue;
        Order o = order_from_conductor(f, Integer(static_cast<long>(p)));
        primes.push_back(p);
        classes.emplace_back();
        for (const auto& k : kernel_generators(o)) classes.back().push_back(divisor_class(o, k));
    }
    auto covers = [&](const std::vector<std::size_t>& idx) {
        std::vector<GroupElement> h;
        for (std::size_t i : idx) h.insert(h.end(), classes[i].begin(), classes[i].end());
        return subgroup_quotient(cl, h).is_trivial();
    };
    std::vector<std::size_t> all(primes.size());
    std::iota(all.begin(), all.end(), 0);
    if (!covers(all)) return s;

    // Subsets of the split primes in increasing order of their product.
    struct Candidate {
        Integer product;
        std::vector<std::size_t> idx;
    };
    auto later = [](const Candidate& a, const Candidate& b) { return a.product > b.product; };
    std::priority_queue<Candidate, std::vector<Candidate>, decltype(later)> queue(later);
    queue.push({1, {}});
    std::vector<std::size_t> found;
    while (!queue.empty()) {
        Candidate c = queue.top();
        queue.pop();
        if (covers(c.idx)) {
            found = c.idx;
            break;
        }
        std::size_t next = c.idx.empty() ? 0 : c.idx.back() + 1;
        if (next >= primes.size()) continue;
        Candidate extend = c;
        extend.product *= primes[next];
        extend.idx.push_back(next);
        queue.push(extend);
        if (!c.idx.empty()) {
            Candidate shift = c;
            shift.product = shift.product / primes[c.idx.back()] * primes[next];
            shift.idx.back() = next;
            queue.push(shift);
        }
    }
    Integer conductor = 1;
    for (std::size_t i : found) {
        s.primes.push_back(primes[i]);
        conductor *= primes[i];
    }
    if (!chow_group(order_from_conductor(f, conductor)).result.is_trivial())
        throw std::logic_error("find_trivial_chow_conductor: verification failed");
    s.conductor = conductor;
    return s;
}

// ---- induced maps --------------------------------------------------------

ChowMap chow_map(const Order& source, const Order& target) {
    if (source.backend() != target.backend()) throw invalid_input("chow_map: orders use different backends");
    if (source.backend() == Backend::quadratic) {
        if (!(source.field() == target.field())) throw invalid_input("chow_map: orders lie in different fields");
        if (!mpz_divisible_p(target.conductor().get_mpz_t(), source.conductor().get_mpz_t()))
            throw invalid_input("chow_map: target order is not contained in the source order");
    } else if (&source.declared() != &target.declared()) {
        throw invalid_input("chow_map: orders come from different declared files");
    }

    ChowPresentation src = chow_group(source);
    ChowPresentation tgt = chow_group(target);
    const auto& sp = source.noninvertible_primes();
    const auto& tp = target.noninvertible_primes();
    const std::size_t m = src.class_group.rank();

    ChowMap out;
    out.source = src.result;
    out.target = tgt.result;
    for (std::size_t k = 0; k < sp.size() + m; ++k) {
        std::vector<Integer> x(tp.size() + m, 0);
        if (k >= sp.size()) {
            x[tp.size() + (k - sp.size())] = 1;
        } else {
            const auto& pr = sp[k];
            auto below = [&](const NonInvertiblePrime& t) {
                return t.p == pr.p && std::all_of(pr.places.begin(), pr.places.end(), [&](const PlaceAbove& a) {
                           return std::any_of(t.places.begin(), t.places.end(),
                                              [&](const PlaceAbove& b) { return a.id == b.id; });
                       });
            };
            auto it = std::find_if(tp.begin(), tp.end(), below);
            if (it == tp.end())
                throw invalid_input("chow_map: prime " + pr.label + " of the source lies over no non-invertible prime");
            int deg = degree_between(pr.residue_size, it->residue_size, pr.p);
            if (deg < 0) throw invalid_input("chow_map: residue fields of " + pr.label + " are incompatible");
            x[static_cast<std::size_t>(it - tp.begin())] = deg;
        }
        out.generator_images.push_back(member(tgt.result, x));
    }
    out.cokernel = subgroup_quotient(tgt.result, out.generator_images);
    if (!out.source.is_finite() || !out.target.is_finite()) throw invalid_input("chow_map: infinite Chow group");
    out.image_order = exact_div(out.target.order(), out.cokernel.order(), "image order");
    out.kernel_order = exact_div(out.source.order(), out.image_order, "kernel order");
    out.injective = out.kernel_order == 1;
    out.surjective = out.cokernel.is_trivial();
    return out;
}

} // namespace chow
