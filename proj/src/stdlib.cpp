#include "dtac/stdlib.hpp"

#include <map>

#include "dtac/stdlib_text.hpp"

namespace dtac {

namespace {

const std::map<std::string, std::string, std::less<>>& references() {
    static const std::map<std::string, std::string, std::less<>> table = {
        {"assert-I", "Fig. 3"},          {"post-I", "Fig. 3"},
        {"pre-I", "Fig. 3"},             {"assert-E", "Fig. 3"},
        {"pre-E", "Fig. 3"},             {"post-E", "Fig. 3"},
        {"post-to-assert", "Fig. 3"},    {"assert-to-pre", "Fig. 3"},
        {"assert-to-post", "Fig. 3"},    {"assert-rewr", "Fig. 3"},
        {"assert-up1", "Fig. 3"},        {"assert-up2", "Fig. 3"},
        {"assert-up3", "Fig. 3"},        {"assert-up", "Fig. 3"},
        {"post-to-post", "Fig. 3"},      {"pre-to-assert", "Fig. 3"},
        {"null-to-assert", "Fig. 3"},    {"pred-var-I", "Fig. 3"},
        {"ex-E", "Fig. 3"},              {"case-I", "Fig. 3"},
        {"call-I", "Fig. 3"},            {"IH-I", "Fig. 3"},
        {"assert-down", "§4, four-thruster strategy"},
        {"assert-conj-I", "§4, four-thruster strategy"},
        {"assert-up-ctxt", "§4, four-thruster strategy"},
        {"assert-strengthen", "§4, four-thruster strategy"},
        {"assert-comb1", "§4, four-thruster strategy"},
    };
    return table;
}

} // namespace

const char* stdlib_source() { return kStdlibText; }

Library load_library(std::string_view text) {
    Library lib;
    for (auto& d : parse_tactic_defs(text)) lib.add(std::move(d));
    lib.check();
    return lib;
}

Library load_stdlib() { return load_library(kStdlibText); }

std::vector<ManifestEntry> manifest(const Library& lib) {
    std::vector<ManifestEntry> out;
    for (const auto& d : lib.defs()) {
        auto it = references().find(d.name);
        out.push_back(ManifestEntry{d.name, d.formals.size(), d.doc,
                                    it == references().end() ? std::string("user-defined") : it->second});
    }
    return out;
}

} // namespace dtac
