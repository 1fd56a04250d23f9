#pragma once

// Golden-file cases and the text/machine agreement check for the command
// line, shared by the unit tests and the acceptance binary.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "chow/cli.hpp"

namespace clicheck {

using nlohmann::json;

struct Run {
    int code;
    std::string out;
    std::string err;
};

inline Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = chow::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Case {
    std::string name;
    std::vector<std::string> args;
    int exit_code;
    std::string expected;
};

/// Cases from golden/cases.json with @DATA@ expanded.
inline std::vector<Case> golden_cases(const std::string& golden_dir, const std::string& data_dir) {
    std::vector<Case> out;
    for (const auto& c : json::parse(slurp(golden_dir + "/cases.json"))) {
        Case k;
        k.name = c.at("name");
        for (const auto& a : c.at("args")) {
            std::string s = a.get<std::string>();
            auto at = s.find("@DATA@");
            if (at != std::string::npos) s.replace(at, 6, data_dir);
            k.args.push_back(s);
        }
        k.exit_code = c.at("exit");
        k.expected = slurp(golden_dir + "/" + k.name + ".txt");
        out.push_back(k);
    }
    return out;
}

inline std::string group_text(const json& inv) {
    if (inv.empty()) return "trivial";
    std::string s;
    for (std::size_t i = 0; i < inv.size(); ++i) {
        if (i) s += " x ";
        s += "Z/" + inv[i].dump();
    }
    return s;
}

inline bool has_line(const std::string& text, const std::string& line) {
    std::istringstream in(text);
    std::string l;
    while (std::getline(in, l))
        if (l == line) return true;
    return false;
}

inline bool has_prefix_line(const std::string& text, const std::string& prefix) {
    std::istringstream in(text);
    std::string l;
    while (std::getline(in, l))
        if (l.rfind(prefix, 0) == 0) return true;
    return false;
}

inline bool contains(const std::string& text, const std::string& part) { return text.find(part) != std::string::npos; }

inline std::string yes_no(bool b) { return b ? "yes" : "no"; }

/// Every value in the machine output that the text output also shows,
/// compared. Returns the mismatches.
inline std::vector<std::string> disagreements(const std::string& text, const json& j) {
    std::vector<std::string> bad;
    auto expect = [&](bool ok, const std::string& what) {
        if (!ok) bad.push_back(what);
    };
    const std::string cmd = j.at("command");
    if (cmd == "chow") {
        std::string chow_line = "Chow: " + group_text(j["chow"]);
        if (j["non_split"].get<bool>())
            expect(has_prefix_line(text, chow_line + " (non-split over " + group_text(j["image"]) + " by "), chow_line);
        else
            expect(has_line(text, chow_line), chow_line);
        expect(has_line(text, "Class group: " + group_text(j["class_group"])), "class group");
        expect(has_line(text, "Image of Chow(O~): " + group_text(j["image"])), "image");
        long local_total = 1;
        for (const auto& p : j["noninvertible_primes"]) {
            local_total *= p["g"].get<long>();
            expect(contains(text, p["label"].get<std::string>() + " -> " + group_text(p["local_chow"])),
                   "local Chow at " + p["label"].get<std::string>());
        }
        long image = 1, chow = 1;
        for (const auto& d : j["image"]) image *= d.get<long>();
        for (const auto& d : j["chow"]) chow *= d.get<long>();
        expect(chow == image * local_total, "|Chow| = |image| * prod g");
    } else if (cmd == "principal") {
        const std::string r = j["result"];
        if (r == "generator")
            expect(has_line(text, "Result: principal, generated by " + j["generator"].get<std::string>()), "generator");
        else if (r == "not_principal")
            expect(has_line(text, "Result: not principal (step " + j["failed_step"].dump() + ")"), "failed step");
        else
            expect(has_line(text, "Result: principal (no generator: declared backend)"), "declared verdict");
        expect(has_line(text, "Divisor: " + j["divisor"].get<std::string>()), "divisor");
    } else if (cmd == "order-info") {
        expect(has_line(text, "Chow: " + group_text(j["chow"])), "chow");
        expect(has_line(text, "Class group: " + group_text(j["class_group"])), "class group");
        for (const auto& p : j["primes"]) {
            expect(contains(text, "residue field of size " + p["residue_size"].dump()), "residue size");
            expect(contains(text, "g=" + p["g"].dump() + "; local Chow " + group_text(p["local_chow"])), "g");
        }
        if (j["pic"].is_object()) {
            const auto& pic = j["pic"];
            expect(has_line(text, "Pic: " + pic["pic_cardinality"].dump() + " (Cl " + pic["cl_cardinality"].dump() +
                                      ", units mod conductor " + pic["units_mod_conductor"].dump() + "/" +
                                      pic["units_mod_conductor_below"].dump() + ", unit index " +
                                      pic["unit_index"].dump() + ")"),
                   "pic");
        }
        const auto& pc = j["pic_to_chow"];
        std::string inj = pc["injective"].is_null() ? "unknown" : yes_no(pc["injective"].get<bool>());
        expect(has_line(text, "Pic -> Chow: surjective " + yes_no(pc["surjective"].get<bool>()) + ", injective " + inj),
               "pic to chow");
        for (const auto& reason : pc["reasons"])
            expect(has_line(text, "  " + reason.get<std::string>()), "reason " + reason.get<std::string>());
    } else if (cmd == "find-trivial") {
        if (j["conductor"].is_null()) {
            expect(has_line(text, "No conductor found with primes <= " + j["budget"].dump()), "budget");
        } else {
            expect(has_line(text, "Conductor: " + j["conductor"].dump()), "conductor");
            expect(has_prefix_line(text, "Chow("), "verification line");
            expect(j["chow"].empty(), "trivial chow");
        }
        expect(contains(text, "class group " + group_text(j["class_group"])), "class group");
    } else if (cmd == "conductor-test") {
        if (j["conductor_ideal"].get<bool>())
            expect(has_line(text, "Conductor ideal: yes"), "verdict");
        else
            expect(has_line(text, "Conductor ideal: no (violator: " + j["violator"].get<std::string>() + ")"), "violator");
    } else {
        bad.push_back("unknown command " + cmd);
    }
    return bad;
}

/// Runs a case in both modes and compares them.
inline std::vector<std::string> differential(const Case& c) {
    Run text = run(c.args);
    auto args = c.args;
    args.push_back("--json");
    Run machine = run(args);
    if (machine.code != text.code) return {"exit codes differ"};
    json j = json::parse(machine.out);
    if (!j.is_object()) return {"machine output is not an object"};
    return disagreements(text.out, j);
}

} // namespace clicheck
