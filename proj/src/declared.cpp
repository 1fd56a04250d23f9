#include "chow/declared.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "chow/arith.hpp"
#include "chow/errors.hpp"

namespace chow {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& pointer, const std::string& what) {
    throw data_error((pointer.empty() ? std::string("/") : pointer) + ": " + what);
}

void check_keys(const json& obj, const std::string& ptr, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) fail(ptr, "expected an object");
    for (const char* k : keys)
        if (!obj.contains(k)) fail(ptr, std::string("missing key '") + k + "'");
    for (const auto& [k, v] : obj.items())
        if (std::find_if(keys.begin(), keys.end(), [&](const char* s) { return k == s; }) == keys.end())
            fail(ptr + "/" + k, "unknown key");
}

std::int64_t get_int(const json& v, const std::string& ptr) {
    if (!v.is_number_integer()) fail(ptr, "expected an integer");
    return v.get<std::int64_t>();
}

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

bool is_power_of(Integer n, std::int64_t p) {
    if (n < 1) return false;
    while (n > 1) {
        if (!mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(p))) return false;
        n /= static_cast<unsigned long>(p);
    }
    return true;
}

} // namespace

bool DeclaredField::complete() const {
    return std::all_of(labels.begin(), labels.end(), [](const DeclaredLabel& l) { return l.class_image.has_value(); });
}

const DeclaredLabel* DeclaredField::find(std::string_view label) const {
    for (const auto& l : labels)
        if (l.label == label) return &l;
    return nullptr;
}

const DeclaredLabel* DeclaredField::find(PlaceId id) const {
    for (const auto& l : labels)
        if (l.id == id) return &l;
    return nullptr;
}

DeclaredField parse_declared(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        auto [line, col] = line_col(text, e.byte);
        throw data_error("syntax error at line " + std::to_string(line) + ", column " + std::to_string(col) +
                         ": " + e.what());
    }
    check_keys(doc, "", {"description", "class_invariants", "conductor_primes"});

    DeclaredField f;
    if (!doc["description"].is_string()) fail("/description", "expected a string");
    f.description = doc["description"].get<std::string>();

    const json& inv = doc["class_invariants"];
    if (!inv.is_array()) fail("/class_invariants", "expected an array");
    for (std::size_t i = 0; i < inv.size(); ++i) {
        const std::string ptr = "/class_invariants/" + std::to_string(i);
        std::int64_t d = get_int(inv[i], ptr);
        if (d < 2) fail(ptr, "invariant factors must be at least 2");
        if (!f.class_invariants.empty() && d % f.class_invariants.back().get_si() != 0)
            fail(ptr, "divisibility chain violated");
        f.class_invariants.emplace_back(static_cast<long>(d));
    }

    const json& primes = doc["conductor_primes"];
    if (!primes.is_array()) fail("/conductor_primes", "expected an array");
    for (std::size_t i = 0; i < primes.size(); ++i) {
        const std::string ptr = "/conductor_primes/" + std::to_string(i);
        const json& rec = primes[i];
        check_keys(rec, ptr, {"p", "residue_size_below", "places"});
        DeclaredPrime dp;
        dp.p = get_int(rec["p"], ptr + "/p");
        if (!is_prime(dp.p)) fail(ptr + "/p", "not a prime");
        std::int64_t rs = get_int(rec["residue_size_below"], ptr + "/residue_size_below");
        dp.residue_size_below = static_cast<long>(rs);
        if (!is_power_of(dp.residue_size_below, dp.p)) fail(ptr + "/residue_size_below", "not a power of p");
        const json& places = rec["places"];
        if (!places.is_array() || places.empty()) fail(ptr + "/places", "expected a non-empty array");
        std::set<std::string> seen;
        for (std::size_t j = 0; j < places.size(); ++j) {
            const std::string pp = ptr + "/places/" + std::to_string(j);
            const json& pl = places[j];
            check_keys(pl, pp, {"label", "degree", "ramification", "class_image"});
            DeclaredPlace d;
            if (!pl["label"].is_string() || pl["label"].get<std::string>().empty())
                fail(pp + "/label", "expected a non-empty string");
            d.label = pl["label"].get<std::string>();
            if (d.label.find_first_of(",: \t") != std::string::npos)
                fail(pp + "/label", "labels may not contain ',', ':' or whitespace");
            if (!seen.insert(d.label).second) fail(pp + "/label", "duplicate label within record");
            std::int64_t deg = get_int(pl["degree"], pp + "/degree");
            std::int64_t ram = get_int(pl["ramification"], pp + "/ramification");
            if (deg < 1 || deg > 1000) fail(pp + "/degree", "degree must be a positive integer");
            if (ram < 1 || ram > 1000) fail(pp + "/ramification", "ramification must be a positive integer");
            d.degree = static_cast<int>(deg);
            d.ramification = static_cast<int>(ram);
            const json& img = pl["class_image"];
            if (!img.is_null()) {
                if (!img.is_array()) fail(pp + "/class_image", "expected an array or null");
                if (img.size() != f.class_invariants.size())
                    fail(pp + "/class_image", "class_image length " + std::to_string(img.size()) + ", expected " +
                                                  std::to_string(f.class_invariants.size()));
                std::vector<Integer> v;
                for (std::size_t k = 0; k < img.size(); ++k) {
                    std::int64_t x = get_int(img[k], pp + "/class_image/" + std::to_string(k));
                    if (x < 0 || x >= f.class_invariants[k].get_si())
                        fail(pp + "/class_image/" + std::to_string(k), "class_image entry not reduced");
                    v.emplace_back(static_cast<long>(x));
                }
                d.class_image = std::move(v);
            }
            dp.places.push_back(std::move(d));
        }
        f.conductor_primes.push_back(std::move(dp));
    }

    // Places shared between records must describe the same ideal of Õ.
    std::map<std::int64_t, int> per_prime;
    for (std::size_t i = 0; i < f.conductor_primes.size(); ++i) {
        const auto& dp = f.conductor_primes[i];
        for (std::size_t j = 0; j < dp.places.size(); ++j) {
            const auto& pl = dp.places[j];
            const std::string pp = "/conductor_primes/" + std::to_string(i) + "/places/" + std::to_string(j);
            Integer absolute;
            mpz_pow_ui(absolute.get_mpz_t(), dp.residue_size_below.get_mpz_t(), static_cast<unsigned long>(pl.degree));
            auto it = std::find_if(f.labels.begin(), f.labels.end(),
                                   [&](const DeclaredLabel& l) { return l.label == pl.label; });
            if (it == f.labels.end()) {
                DeclaredLabel l{pl.label, dp.p, {dp.p, per_prime[dp.p]++}, absolute, pl.ramification, pl.class_image};
                f.labels.push_back(std::move(l));
                continue;
            }
            if (it->p != dp.p) fail(pp + "/label", "label reused over a different prime");
            if (it->absolute_residue != absolute)
                fail(pp + "/degree", "label reused with a different residue field size");
            if (it->ramification != pl.ramification)
                fail(pp + "/ramification", "label reused with a different ramification");
            if (it->class_image != pl.class_image) fail(pp + "/class_image", "label reused with a different class_image");
        }
    }
    return f;
}

DeclaredField load_declared(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_declared(ss.str());
    } catch (const data_error& e) {
        throw data_error(path + ": " + e.what());
    }
}

std::string serialize_declared(const DeclaredField& f) {
    json doc;
    doc["description"] = f.description;
    doc["class_invariants"] = json::array();
    for (const auto& d : f.class_invariants) doc["class_invariants"].push_back(d.get_si());
    doc["conductor_primes"] = json::array();
    for (const auto& dp : f.conductor_primes) {
        json rec;
        rec["p"] = dp.p;
        rec["residue_size_below"] = dp.residue_size_below.get_si();
        rec["places"] = json::array();
        for (const auto& pl : dp.places) {
            json j;
            j["label"] = pl.label;
            j["degree"] = pl.degree;
            j["ramification"] = pl.ramification;
            if (pl.class_image) {
                j["class_image"] = json::array();
                for (const auto& x : *pl.class_image) j["class_image"].push_back(x.get_si());
            } else {
                j["class_image"] = nullptr;
            }
            rec["places"].push_back(std::move(j));
        }
        doc["conductor_primes"].push_back(std::move(rec));
    }
    return doc.dump(2) + "\n";
}

std::vector<std::size_t> parse_selection(std::string_view text, const DeclaredField& f) {
    std::vector<std::size_t> out;
    if (text == "none") return out;
    if (text == "all" || text == "main") {
        for (std::size_t i = 0; i < f.conductor_primes.size(); ++i) out.push_back(i);
    } else {
        std::stringstream ss{std::string(text)};
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty() || !std::all_of(item.begin(), item.end(), [](char c) { return c >= '0' && c <= '9'; }))
                throw invalid_input("bad order selection '" + std::string(text) + "'");
            std::size_t k = std::stoul(item);
            if (k >= f.conductor_primes.size())
                throw invalid_input("order selection: no record " + item + " (file has " +
                                    std::to_string(f.conductor_primes.size()) + ")");
            if (std::find(out.begin(), out.end(), k) != out.end())
                throw invalid_input("order selection: record " + item + " selected twice");
            out.push_back(k);
        }
        if (out.empty()) throw invalid_input("empty order selection");
        std::sort(out.begin(), out.end());
    }
    std::set<std::string> used;
    for (auto k : out)
        for (const auto& pl : f.conductor_primes[k].places)
            if (!used.insert(pl.label).second)
                throw invalid_input("order selection: place " + pl.label + " lies under two selected primes");
    return out;
}

} // namespace chow
