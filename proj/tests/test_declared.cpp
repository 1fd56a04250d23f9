#include <fstream>
#include <functional>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "chow/declared.hpp"
#include "chow/errors.hpp"
#include "chow/orders.hpp"
#include "doctest.h"

using namespace chow;
using json = nlohmann::ordered_json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const std::vector<std::string> golden_files = {"biquadratic_-3_13.json", "quintic_7.json", "sextic_7_template.json"};

std::string data_path(const std::string& name) { return std::string(CHOW_DATA_DIR) + "/" + name; }

bool same_field(const DeclaredField& a, const DeclaredField& b) {
    if (a.description != b.description || a.class_invariants != b.class_invariants) return false;
    if (a.conductor_primes.size() != b.conductor_primes.size()) return false;
    for (std::size_t i = 0; i < a.conductor_primes.size(); ++i) {
        const auto& x = a.conductor_primes[i];
        const auto& y = b.conductor_primes[i];
        if (x.p != y.p || x.residue_size_below != y.residue_size_below || x.places.size() != y.places.size())
            return false;
        for (std::size_t j = 0; j < x.places.size(); ++j) {
            const auto& u = x.places[j];
            const auto& v = y.places[j];
            if (u.label != v.label || u.degree != v.degree || u.ramification != v.ramification ||
                u.class_image != v.class_image)
                return false;
        }
    }
    return true;
}

std::string expect_data_error(const std::string& text) {
    try {
        parse_declared(text);
    } catch (const data_error& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("golden files parse") {
    DeclaredField b = load_declared(data_path("biquadratic_-3_13.json"));
    CHECK(b.class_invariants == std::vector<Integer>{2});
    REQUIRE(b.conductor_primes.size() == 1);
    CHECK(b.conductor_primes[0].p == 2);
    CHECK(b.conductor_primes[0].residue_size_below == 2);
    REQUIRE(b.conductor_primes[0].places.size() == 2);
    CHECK(b.conductor_primes[0].places[0].degree == 2);
    CHECK(b.conductor_primes[0].places[1].degree == 2);
    CHECK(b.complete());

    DeclaredField q = load_declared(data_path("quintic_7.json"));
    CHECK(q.class_invariants.empty());
    CHECK(q.conductor_primes.size() == 3);
    CHECK(q.labels.size() == 2);
    CHECK(q.find("P1")->absolute_residue == 49);
    CHECK(q.find("P2")->absolute_residue == 343);

    DeclaredField s = load_declared(data_path("sextic_7_template.json"));
    CHECK(s.class_invariants == std::vector<Integer>{2, 6});
    CHECK_FALSE(s.complete());
    CHECK(s.labels.size() == 6);
}

TEST_CASE("serialize round trip") {
    for (const auto& name : golden_files) {
        const std::string text = read_file(data_path(name));
        DeclaredField f = parse_declared(text);
        const std::string out = serialize_declared(f);
        CHECK(out == text);
        CHECK(same_field(parse_declared(out), f));
    }
}

TEST_CASE("single-field mutations are rejected") {
    using Mutation = std::function<void(json&)>;
    std::vector<std::pair<std::string, Mutation>> mutations = {
        {"drop description", [](json& d) { d.erase("description"); }},
        {"drop class_invariants", [](json& d) { d.erase("class_invariants"); }},
        {"drop conductor_primes", [](json& d) { d.erase("conductor_primes"); }},
        {"extra top key", [](json& d) { d["extra"] = 1; }},
        {"description not string", [](json& d) { d["description"] = 5; }},
        {"invariants not array", [](json& d) { d["class_invariants"] = "2"; }},
        {"invariant 1", [](json& d) { d["class_invariants"].push_back(1); }},
        {"invariant 0", [](json& d) { d["class_invariants"].push_back(0); }},
        {"invariant chain", [](json& d) { d["class_invariants"] = json::array({4, 2}); }},
        {"primes not array", [](json& d) { d["conductor_primes"] = json::object(); }},
        {"p composite", [](json& d) { d["conductor_primes"][0]["p"] = 4; }},
        {"p negative", [](json& d) { d["conductor_primes"][0]["p"] = -7; }},
        {"p string", [](json& d) { d["conductor_primes"][0]["p"] = "7"; }},
        {"residue not power", [](json& d) {
             auto& r = d["conductor_primes"][0];
             r["residue_size_below"] = r["p"].get<int>() * 3 + 1;
         }},
        {"residue zero", [](json& d) { d["conductor_primes"][0]["residue_size_below"] = 0; }},
        {"drop residue", [](json& d) { d["conductor_primes"][0].erase("residue_size_below"); }},
        {"extra record key", [](json& d) { d["conductor_primes"][0]["e"] = 1; }},
        {"places empty", [](json& d) { d["conductor_primes"][0]["places"] = json::array(); }},
        {"label empty", [](json& d) { d["conductor_primes"][0]["places"][0]["label"] = ""; }},
        {"label with space", [](json& d) { d["conductor_primes"][0]["places"][0]["label"] = "P 1"; }},
        {"label with colon", [](json& d) { d["conductor_primes"][0]["places"][0]["label"] = "P:1"; }},
        {"label number", [](json& d) { d["conductor_primes"][0]["places"][0]["label"] = 3; }},
        {"duplicate label", [](json& d) {
             auto& pl = d["conductor_primes"][0]["places"];
             pl.push_back(pl[0]);
         }},
        {"degree zero", [](json& d) { d["conductor_primes"][0]["places"][0]["degree"] = 0; }},
        {"degree negative", [](json& d) { d["conductor_primes"][0]["places"][0]["degree"] = -2; }},
        {"degree fractional", [](json& d) { d["conductor_primes"][0]["places"][0]["degree"] = 1.5; }},
        {"ramification zero", [](json& d) { d["conductor_primes"][0]["places"][0]["ramification"] = 0; }},
        {"drop ramification", [](json& d) { d["conductor_primes"][0]["places"][0].erase("ramification"); }},
        {"drop class_image", [](json& d) { d["conductor_primes"][0]["places"][0].erase("class_image"); }},
        {"class_image too long", [](json& d) {
             auto& pl = d["conductor_primes"][0]["places"][0];
             json v = json::array();
             for (std::size_t k = 0; k <= d["class_invariants"].size(); ++k) v.push_back(0);
             pl["class_image"] = v;
         }},
        {"class_image string", [](json& d) { d["conductor_primes"][0]["places"][0]["class_image"] = "0"; }},
    };
    for (const auto& name : golden_files) {
        const json base = json::parse(read_file(data_path(name)));
        for (const auto& [what, mutate] : mutations) {
            json d = base;
            mutate(d);
            INFO(name << ": " << what);
            std::string msg = expect_data_error(d.dump());
            CHECK_FALSE(msg.empty());
            CHECK(msg.find("/") != std::string::npos);
        }
    }

    // Class-image entries outside [0, d_k).
    for (const auto& name : {"biquadratic_-3_13.json"}) {
        json d = json::parse(read_file(data_path(name)));
        d["conductor_primes"][0]["places"][0]["class_image"] = json::array({2});
        CHECK(expect_data_error(d.dump()).find("/conductor_primes/0/places/0/class_image/0") != std::string::npos);
        d["conductor_primes"][0]["places"][0]["class_image"] = json::array({-1});
        CHECK_FALSE(expect_data_error(d.dump()).empty());
    }
}

TEST_CASE("diagnostics") {
    std::string msg = expect_data_error("{\n  \"description\": \"x\",\n  \"class_invariants\": [2,\n}");
    CHECK(msg.find("line 4") != std::string::npos);

    json d = json::parse(read_file(data_path("biquadratic_-3_13.json")));
    d["class_invariants"] = json::array({4, 2});
    CHECK(expect_data_error(d.dump()).find("/class_invariants/1") != std::string::npos);

    d = json::parse(read_file(data_path("biquadratic_-3_13.json")));
    d["class_invariants"] = json::array({2, 4});
    msg = expect_data_error(d.dump());
    CHECK(msg.find("/conductor_primes/0/places/0/class_image") != std::string::npos);
    CHECK(msg.find("length 1, expected 2") != std::string::npos);

    // The same label must describe the same place everywhere.
    json q = json::parse(read_file(data_path("quintic_7.json")));
    q["conductor_primes"][2]["places"][0]["degree"] = 3;
    CHECK(expect_data_error(q.dump()).find("/conductor_primes/2/places/0/degree") != std::string::npos);
    q = json::parse(read_file(data_path("quintic_7.json")));
    q["conductor_primes"][2]["places"][1]["ramification"] = 2;
    CHECK(expect_data_error(q.dump()).find("different ramification") != std::string::npos);

    CHECK_THROWS_AS(load_declared(data_path("no_such_file.json")), data_error);
}

TEST_CASE("order selections") {
    DeclaredField q = load_declared(data_path("quintic_7.json"));
    CHECK(parse_selection("none", q).empty());
    CHECK(parse_selection("1,0", q) == std::vector<std::size_t>{0, 1});
    CHECK(parse_selection("2", q) == std::vector<std::size_t>{2});
    CHECK_THROWS_AS(parse_selection("all", q), invalid_input);
    CHECK_THROWS_AS(parse_selection("0,2", q), invalid_input);
    CHECK_THROWS_AS(parse_selection("3", q), invalid_input);
    CHECK_THROWS_AS(parse_selection("0,0", q), invalid_input);
    CHECK_THROWS_AS(parse_selection("", q), invalid_input);
    CHECK_THROWS_AS(parse_selection("x", q), invalid_input);
    DeclaredField b = load_declared(data_path("biquadratic_-3_13.json"));
    CHECK(parse_selection("main", b) == std::vector<std::size_t>{0});
}

TEST_CASE("declared orders") {
    auto b = std::make_shared<const DeclaredField>(load_declared(data_path("biquadratic_-3_13.json")));
    Order o = make_declared_order(b, {0});
    REQUIRE(o.noninvertible_primes().size() == 1);
    const auto& pr = o.noninvertible_primes()[0];
    CHECK(pr.label == "2");
    CHECK(pr.g == 2);
    CHECK(pr.places[0].degree == 2);
    CHECK(pr.places[1].degree == 2);
    CHECK(o.class_group().invariants() == std::vector<Integer>{2});
    CHECK(o.describe() == "declared order {0}");

    Divisor d = parse_divisor(o, "2:3", Level::order);
    CHECK(format_divisor(o, d) == "2:3");
    Divisor n = parse_divisor(o, "P:1,Q:-1", Level::normalization);
    CHECK(pushforward(o, n).is_zero());
    CHECK(format_divisor(o, n) == "P:1,Q:-1");
    CHECK_THROWS_AS(parse_divisor(o, "P:1", Level::order), invalid_input);
    CHECK_THROWS_AS(parse_divisor(o, "R:1", Level::normalization), invalid_input);

    // Invertible places keep their labels at the order level.
    Order m = make_declared_order(b, {});
    CHECK(m.is_maximal());
    Divisor dm = parse_divisor(m, "P:2", Level::order);
    CHECK(format_divisor(m, dm) == "P:2");
    CHECK(m.place_class(m.normalization_place(dm.terms().begin()->first)) == m.class_group().generator(0));

    auto q = std::make_shared<const DeclaredField>(load_declared(data_path("quintic_7.json")));
    Order both = make_declared_order(q, {0, 1});
    REQUIRE(both.noninvertible_primes().size() == 2);
    CHECK(both.noninvertible_primes()[0].label == "7.0");
    CHECK(both.noninvertible_primes()[1].label == "7.1");
    CHECK(both.noninvertible_primes()[0].g == 2);
    CHECK(both.noninvertible_primes()[1].g == 3);
    Order z7 = make_declared_order(q, {2});
    CHECK(z7.noninvertible_primes()[0].g == 1);
    CHECK(z7.noninvertible_primes()[0].label == "7");

    auto s = std::make_shared<const DeclaredField>(load_declared(data_path("sextic_7_template.json")));
    Order t = make_declared_order(s, {0});
    CHECK_THROWS_AS(t.place_class(t.noninvertible_primes()[0].places[0].id), data_error);
}

TEST_CASE("conductor test on declared data") {
    DeclaredField q = load_declared(data_path("quintic_7.json"));
    // Residue fields of P1, P2 are not F_7: every exponent pattern qualifies.
    CHECK(is_conductor_ideal(q, {{"P1", 1}}).holds);
    CHECK(is_conductor_ideal(q, {{"P2", 1}}).holds);
    CHECK(is_conductor_ideal(q, {{"P1", 1}, {"P2", 1}}).holds);
    CHECK_THROWS_AS(is_conductor_ideal(q, {{"P3", 1}}), invalid_input);

    DeclaredField s = load_declared(data_path("sextic_7_template.json"));
    auto v = is_conductor_ideal(s, {{"P1", 1}});
    CHECK_FALSE(v.holds);
    CHECK(*v.violator == "P1");
    std::map<std::string, std::int64_t> all;
    for (int i = 1; i <= 6; ++i) all["P" + std::to_string(i)] = 1;
    CHECK(is_conductor_ideal(s, all).holds);
}
