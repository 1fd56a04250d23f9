#include "chow/cli.hpp"

#include <algorithm>
#include <memory>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "chow/arith.hpp"
#include "chow/chow.hpp"
#include "chow/declared.hpp"
#include "chow/errors.hpp"

namespace chow {

namespace {

using json = nlohmann::ordered_json;

struct Options {
    std::optional<std::string> disc;
    std::optional<std::string> data;
    std::string conductor = "1";
    std::string order = "main";
    std::string divisor;
    bool divisor_given = false;
    std::string ideal;
    std::int64_t prime_budget = 100;
    std::size_t bound = default_step_limit;
    bool machine = false;
};

Integer parse_integer(const std::string& s, const char* what) {
    Integer z;
    std::string t = !s.empty() && s[0] == '+' ? s.substr(1) : s;
    if (t.empty() || z.set_str(t, 10) != 0) throw invalid_input(std::string("bad ") + what + " '" + s + "'");
    return z;
}

json number(const Integer& z) {
    if (z.fits_slong_p()) return z.get_si();
    return z.get_str();
}

json invariants(const AbelianGroup& g) {
    json a = json::array();
    for (const auto& d : g.invariants()) a.push_back(number(d));
    return a;
}

json tri(const std::optional<bool>& b) {
    if (!b) return nullptr;
    return *b;
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }
std::string yes_no(const std::optional<bool>& b) { return b ? yes_no(*b) : "unknown"; }

std::string join(const std::vector<std::string>& v, const std::string& sep) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
    return s;
}

struct Context {
    std::optional<QuadField> field;
    std::shared_ptr<const DeclaredField> data;

    Order order(const Options& o) const {
        if (field) return order_from_conductor(*field, parse_integer(o.conductor, "conductor"));
        return make_declared_order(data, parse_selection(o.order, *data));
    }
    Order maximal() const {
        if (field) return order_from_conductor(*field, 1);
        return make_declared_order(data, {});
    }
};

Context field_source(const Options& o) {
    if (o.disc.has_value() == o.data.has_value()) throw invalid_input("give exactly one of --disc and --data");
    Context c;
    if (o.disc) {
        c.field.emplace(parse_integer(*o.disc, "discriminant"));
    } else {
        c.data = std::make_shared<const DeclaredField>(load_declared(*o.data));
    }
    return c;
}

void emit(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

// ---- chow ----------------------------------------------------------------

int cmd_chow(const Options& opt, std::ostream& out) {
    Context ctx = field_source(opt);
    Order o = ctx.order(opt);
    ChowPresentation c = chow_group(o);
    ExactSequenceData e = exact_sequence_data(c);
    const auto& ps = o.noninvertible_primes();

    std::string verdict = c.result.to_string();
    if (e.non_split) {
        std::vector<std::string> locals;
        for (const auto& l : e.local_parts)
            if (!l.is_trivial()) locals.push_back(l.to_string());
        verdict += " (non-split over " + e.image_part.to_string() + " by " + join(locals, " x ") + ")";
    }

    if (opt.machine) {
        json j;
        j["command"] = "chow";
        j["order"] = o.describe();
        j["class_group"] = invariants(c.class_group);
        j["noninvertible_primes"] = json::array();
        for (std::size_t i = 0; i < ps.size(); ++i)
            j["noninvertible_primes"].push_back(
                {{"label", ps[i].label}, {"g", number(ps[i].g)}, {"local_chow", invariants(e.local_parts[i])}});
        j["image"] = invariants(e.image_part);
        j["direct_sum"] = json::array();
        for (const auto& d : e.direct_sum_invariants) j["direct_sum"].push_back(number(d));
        j["chow"] = invariants(c.result);
        j["non_split"] = e.non_split;
        emit(out, j);
        return exit_ok;
    }
    out << "Order: " << o.describe() << "\n";
    out << "Class group: " << c.class_group.to_string() << "\n";
    if (ps.empty()) {
        out << "Local Chow groups: none\n";
    } else {
        std::vector<std::string> locals;
        for (std::size_t i = 0; i < ps.size(); ++i) locals.push_back(ps[i].label + " -> " + e.local_parts[i].to_string());
        out << "Local Chow groups: " << join(locals, ", ") << "\n";
    }
    out << "Image of Chow(O~): " << e.image_part.to_string() << "\n";
    out << "Chow: " << verdict << "\n";
    return exit_ok;
}

// ---- principal -----------------------------------------------------------

int cmd_principal(const Options& opt, std::ostream& out) {
    if (!opt.divisor_given) throw invalid_input("principal needs --divisor");
    Context ctx = field_source(opt);
    Order o = ctx.order(opt);
    Divisor d = parse_divisor(o, opt.divisor, Level::order);
    PrincipalResult r = principal_divisor_test(o, d, opt.bound);

    std::string kind, text;
    switch (r.kind) {
    case PrincipalKind::generator:
        kind = "generator";
        text = "principal, generated by " + r.alpha->to_string();
        break;
    case PrincipalKind::principal_without_generator:
        kind = "principal_without_generator";
        text = "principal (no generator: declared backend)";
        break;
    case PrincipalKind::not_principal:
        kind = "not_principal";
        text = "not principal (step " + std::to_string(r.failed_step) + ")";
        break;
    }
    if (opt.machine) {
        json j;
        j["command"] = "principal";
        j["order"] = o.describe();
        j["divisor"] = d.is_zero() ? std::string("0") : format_divisor(o, d);
        j["result"] = kind;
        j["generator"] = r.alpha ? json(r.alpha->to_string()) : json(nullptr);
        j["failed_step"] = r.failed_step ? json(r.failed_step) : json(nullptr);
        emit(out, j);
    } else {
        out << "Order: " << o.describe() << "\n";
        out << "Divisor: " << (d.is_zero() ? "0" : format_divisor(o, d)) << "\n";
        out << "Result: " << text << "\n";
    }
    return r.kind == PrincipalKind::not_principal ? exit_negative : exit_ok;
}

// ---- order-info ----------------------------------------------------------

std::optional<ConductorVerdict> conductor_verdict(const Order& o) {
    if (o.backend() != Backend::quadratic) return std::nullopt;
    std::map<PlaceId, std::int64_t> ex;
    for (const auto& pr : o.noninvertible_primes()) {
        int k = valuation(o.conductor(), pr.p);
        for (const auto& pl : pr.places) ex[pl.id] = static_cast<std::int64_t>(k) * pl.ramification;
    }
    return is_conductor_ideal(o.field(), ex);
}

int cmd_order_info(const Options& opt, std::ostream& out) {
    Context ctx = field_source(opt);
    Order o = ctx.order(opt);
    const auto& ps = o.noninvertible_primes();
    FixReport fx = prop_fix_report(o);
    auto cv = conductor_verdict(o);
    std::optional<PicReport> pic;
    if (o.backend() == Backend::quadratic) pic = pic_cardinality(o);
    ChowPresentation c = chow_group(o);
    PicChowReport pc = pic_chow_report(c);

    auto kind_of = [&](const NonInvertiblePrime& pr) -> std::optional<std::string> {
        if (o.backend() != Backend::quadratic) return std::nullopt;
        return std::string(to_string(splitting(o.field(), pr.p)[0].kind));
    };

    if (opt.machine) {
        json j;
        j["command"] = "order-info";
        j["order"] = o.describe();
        j["maximal"] = o.is_maximal();
        j["class_group"] = invariants(c.class_group);
        j["primes"] = json::array();
        for (std::size_t i = 0; i < ps.size(); ++i) {
            const auto& pr = ps[i];
            json places = json::array();
            for (const auto& pl : pr.places)
                places.push_back({{"label", pl.label}, {"degree", pl.degree}, {"ramification", pl.ramification}});
            auto k = kind_of(pr);
            j["primes"].push_back({{"label", pr.label},
                                   {"p", pr.p},
                                   {"kind", k ? json(*k) : json(nullptr)},
                                   {"residue_size", number(pr.residue_size)},
                                   {"places", places},
                                   {"g", number(pr.g)},
                                   {"local_chow", invariants(local_chow(o, i))}});
        }
        j["conductor_ideal"] = cv ? json({{"holds", cv->holds}, {"violator", cv->violator ? json(*cv->violator) : json(nullptr)}})
                                  : json(nullptr);
        j["fix"] = {{"conductor_squarefree", tri(fx.conductor_squarefree)},
                    {"residue_fields_f2", fx.all_residue_f2},
                    {"r_geq_2", fx.all_r_geq_2},
                    {"all_hold", tri(fx.all_hold)},
                    {"units_mod_conductor_trivial", tri(fx.units_mod_conductor_trivial)}};
        if (pic) {
            j["pic"] = {{"cl_cardinality", number(pic->cl_cardinality)},
                        {"units_mod_conductor", number(pic->units_mod_conductor)},
                        {"units_mod_conductor_below", number(pic->units_mod_conductor_below)},
                        {"unit_index", number(pic->unit_index)},
                        {"pic_cardinality", number(pic->pic_cardinality)}};
        } else {
            j["pic"] = nullptr;
        }
        j["pic_to_chow"] = {{"surjective", pc.surjective}, {"injective", tri(pc.injective)}, {"reasons", pc.reasons}};
        j["chow"] = invariants(c.result);
        emit(out, j);
        return exit_ok;
    }

    out << "Order: " << o.describe() << "\n";
    out << "Class group: " << c.class_group.to_string() << "\n";
    if (ps.empty()) {
        out << "Non-invertible primes: none (maximal order)\n";
    } else {
        out << "Non-invertible primes: " << ps.size() << "\n";
        for (std::size_t i = 0; i < ps.size(); ++i) {
            const auto& pr = ps[i];
            std::vector<std::string> names, ds, es;
            for (const auto& pl : pr.places) {
                names.push_back(pl.label);
                ds.push_back(std::to_string(pl.degree));
                es.push_back(std::to_string(pl.ramification));
            }
            out << "  " << pr.label << ": ";
            if (auto k = kind_of(pr)) out << *k << ", ";
            out << "residue field of size " << pr.residue_size.get_str() << ", places " << join(names, ",")
                << ", d=(" << join(ds, ",") << "), e=(" << join(es, ",") << "), g=" << pr.g.get_str()
                << "; local Chow " << local_chow(o, i).to_string() << "\n";
        }
    }
    if (cv)
        out << "Conductor ideal: " << yes_no(cv->holds) << (cv->violator ? " (violator: " + *cv->violator + ")" : "")
            << "\n";
    else
        out << "Conductor ideal: unknown (exponents not in declared data)\n";
    std::string fix_verdict = !fx.all_hold ? "unknown" : *fx.all_hold ? "all hold" : "fails";
    out << "Fix: squarefree conductor " << yes_no(fx.conductor_squarefree) << ", residue fields F_2 "
        << yes_no(fx.all_residue_f2) << ", r_i >= 2 " << yes_no(fx.all_r_geq_2) << "; " << fix_verdict << "\n";
    if (fx.units_mod_conductor_trivial)
        out << "Units mod conductor trivial: " << yes_no(*fx.units_mod_conductor_trivial) << "\n";
    if (pic)
        out << "Pic: " << pic->pic_cardinality.get_str() << " (Cl " << pic->cl_cardinality.get_str()
            << ", units mod conductor " << pic->units_mod_conductor.get_str() << "/"
            << pic->units_mod_conductor_below.get_str() << ", unit index " << pic->unit_index.get_str() << ")\n";
    else
        out << "Pic: unknown (declared backend)\n";
    out << "Pic -> Chow: surjective " << yes_no(pc.surjective) << ", injective " << yes_no(pc.injective) << "\n";
    for (const auto& r : pc.reasons) out << "  " << r << "\n";
    out << "Chow: " << c.result.to_string() << "\n";
    return exit_ok;
}

// ---- find-trivial --------------------------------------------------------

int cmd_find_trivial(const Options& opt, std::ostream& out) {
    Context ctx = field_source(opt);
    if (!ctx.field) throw invalid_input("find-trivial needs --disc");
    if (opt.prime_budget < 1) throw invalid_input("--prime-budget must be positive");
    const QuadField& f = *ctx.field;
    TrivialChowSearch s = find_trivial_chow_conductor(f, opt.prime_budget);
    const std::string field_name = "Q(sqrt(" + f.discriminant().get_str() + "))";
    const AbelianGroup& cl = class_group(f).group;

    if (opt.machine) {
        json j;
        j["command"] = "find-trivial";
        j["field"] = field_name;
        j["class_group"] = invariants(cl);
        j["budget"] = s.budget;
        j["primes"] = s.primes;
        if (s.conductor) {
            j["conductor"] = number(*s.conductor);
            j["chow"] = invariants(chow_group(order_from_conductor(f, *s.conductor)).result);
        } else {
            j["conductor"] = nullptr;
            j["chow"] = nullptr;
        }
        emit(out, j);
        return s.conductor ? exit_ok : exit_negative;
    }
    out << "Field: " << field_name << ", class group " << cl.to_string() << "\n";
    if (!s.conductor) {
        out << "No conductor found with primes <= " << s.budget << "\n";
        return exit_negative;
    }
    std::vector<std::string> ps;
    for (auto p : s.primes) ps.push_back(std::to_string(p));
    out << "Primes: " << (ps.empty() ? "none" : join(ps, ", ")) << "\n";
    out << "Conductor: " << s.conductor->get_str() << "\n";
    Order o = order_from_conductor(f, *s.conductor);
    out << "Chow(" << o.describe() << "): " << chow_group(o).result.to_string() << "\n";
    return exit_ok;
}

// ---- conductor-test ------------------------------------------------------

int cmd_conductor_test(const Options& opt, std::ostream& out) {
    Context ctx = field_source(opt);
    Order m = ctx.maximal();
    Divisor d = parse_divisor(m, opt.ideal, Level::normalization);
    for (const auto& [id, k] : d.terms())
        if (k < 0 || !k.fits_slong_p()) throw invalid_input("ideal exponents must be non-negative");
    ConductorVerdict v;
    if (ctx.field) {
        std::map<PlaceId, std::int64_t> ex;
        for (const auto& [id, k] : d.terms()) ex[id] = k.get_si();
        v = is_conductor_ideal(*ctx.field, ex);
    } else {
        std::map<std::string, std::int64_t> ex;
        for (const auto& [id, k] : d.terms()) ex[m.label(id, Level::normalization)] = k.get_si();
        v = is_conductor_ideal(*ctx.data, ex);
    }
    if (opt.machine) {
        json j;
        j["command"] = "conductor-test";
        j["ideal"] = format_divisor(m, d);
        j["conductor_ideal"] = v.holds;
        j["violator"] = v.violator ? json(*v.violator) : json(nullptr);
        emit(out, j);
    } else {
        out << "Ideal: " << (d.is_zero() ? "O~" : format_divisor(m, d)) << "\n";
        out << "Conductor ideal: " << yes_no(v.holds) << (v.violator ? " (violator: " + *v.violator + ")" : "") << "\n";
    }
    return v.holds ? exit_ok : exit_negative;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Chow groups of one-dimensional orders", "chowtool"};
    app.require_subcommand(1);
    Options opt;

    auto add_field = [&](CLI::App* s) {
        s->add_option("--disc", opt.disc, "fundamental discriminant");
        s->add_option("--data", opt.data, "declared field data (JSON)");
    };
    auto add_order = [&](CLI::App* s) {
        s->add_option("--conductor", opt.conductor, "conductor f of Z + f*O_K (default 1)");
        s->add_option("--order", opt.order, "record selection: none, all/main or indices (default main)");
    };
    auto add_json = [&](CLI::App* s) { s->add_flag("--json", opt.machine, "machine-readable output"); };

    CLI::App* chow_cmd = app.add_subcommand("chow", "Chow group and exact sequence data");
    add_field(chow_cmd);
    add_order(chow_cmd);
    add_json(chow_cmd);

    CLI::App* principal_cmd = app.add_subcommand("principal", "decide whether a divisor is principal");
    add_field(principal_cmd);
    add_order(principal_cmd);
    principal_cmd->add_option("--divisor", opt.divisor, "divisor literal place:coef,...");
    principal_cmd->add_option("--bound", opt.bound, "step ceiling for the generator search");
    add_json(principal_cmd);

    CLI::App* info_cmd = app.add_subcommand("order-info", "local data, maximality conditions, Picard group");
    add_field(info_cmd);
    add_order(info_cmd);
    add_json(info_cmd);

    CLI::App* find_cmd = app.add_subcommand("find-trivial", "search a conductor with trivial Chow group");
    add_field(find_cmd);
    find_cmd->add_option("--prime-budget", opt.prime_budget, "largest prime tried (default 100)");
    add_json(find_cmd);

    CLI::App* cond_cmd = app.add_subcommand("conductor-test", "Furtwangler test for an ideal of O~");
    add_field(cond_cmd);
    cond_cmd->add_option("--ideal", opt.ideal, "exponent literal place:k,...")->required();
    add_json(cond_cmd);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return exit_ok;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
    opt.divisor_given = principal_cmd->count("--divisor") > 0;

    try {
        if (*chow_cmd) return cmd_chow(opt, out);
        if (*principal_cmd) return cmd_principal(opt, out);
        if (*info_cmd) return cmd_order_info(opt, out);
        if (*find_cmd) return cmd_find_trivial(opt, out);
        return cmd_conductor_test(opt, out);
    } catch (const invalid_input& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const data_error& e) {
        err << "data error: " << e.what() << "\n";
        return exit_data;
    } catch (const bound_exceeded& e) {
        err << "bound exceeded: " << e.what() << "\n";
        return exit_bound;
    }
}

} // namespace chow
