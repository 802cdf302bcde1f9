/**
 * @file io.hpp
 * @brief JSON reading of symbols and conversions for JSON output.
 *
 * Needs nlohmann/json as <json.hpp>, supplied by the toeplitz_spectra_vendor target.
 */
#pragma once

#include "toeplitz_spectra/core.hpp"
#include "toeplitz_spectra/errors.hpp"
#include "toeplitz_spectra/exact.hpp"
#include "toeplitz_spectra/symbol.hpp"

#include <json.hpp>

#include <fstream>
#include <string>

namespace toeplitz_spectra::io {

using nlohmann::json;

/// A coefficient is a number or a pair [re, im].
inline cplx coefficient_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw DegenerateError("coefficient must be a number or [re, im]");
}

inline CVec coefficients_from_json(const json& j, const char* name) {
    if (!j.is_array() || j.empty()) throw DegenerateError(std::string(name) + " must be a nonempty array");
    CVec out;
    for (const auto& c : j) out.push_back(coefficient_from_json(c));
    return out;
}

/**
 * {"A": [...], "B1": [...], "B2": [...]} with ascending coefficients, or
 * {"numerator": [...], "denominator": [...]} split at the unit circle.
 */
inline RationalSymbol symbol_from_json(const json& j, const SymbolOptions& opt = {}) {
    if (!j.is_object()) throw DegenerateError("symbol must be a JSON object");
    if (j.contains("numerator") || j.contains("denominator")) {
        if (!j.contains("numerator") || !j.contains("denominator"))
            throw DegenerateError("numerator and denominator must be given together");
        return split_symbol(coefficients_from_json(j.at("numerator"), "numerator"),
                            coefficients_from_json(j.at("denominator"), "denominator"), opt);
    }
    for (const char* key : {"A", "B1", "B2"})
        if (!j.contains(key)) throw DegenerateError(std::string("symbol is missing \"") + key + "\"");
    return parse_symbol(coefficients_from_json(j.at("A"), "A"), coefficients_from_json(j.at("B1"), "B1"),
                        coefficients_from_json(j.at("B2"), "B2"), opt);
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DegenerateError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw DegenerateError("invalid JSON in " + path + ": " + e.what());
    }
}

inline RationalSymbol load_symbol(const std::string& path, const SymbolOptions& opt = {}) {
    return symbol_from_json(read_json_file(path), opt);
}

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const CVec& v) {
    json out = json::array();
    for (const auto& z : v) out.push_back(to_json(z));
    return out;
}

/// [re, im], or null for the point at infinity.
inline json to_json(const ExtendedComplex& z) { return z.is_finite() ? to_json(z.value) : json(nullptr); }

/// {"value": double, "exact": "n/d"}.
inline json to_json(const exact::Rational& r) {
    return json{{"value", exact::to_double(r)}, {"exact", exact::to_string(r)}};
}

inline json symbol_info(const RationalSymbol& s) {
    json masses = json::array();
    for (const auto& row : s.masses.rows)
        masses.push_back(json{{"k", row.k}, {"m1", to_json(row.m1)}, {"m2", to_json(row.m2)}, {"m", to_json(row.m)}});
    auto poles = [](const std::vector<Pole>& ps) {
        json out = json::array();
        for (const auto& p : ps) out.push_back(json{{"location", to_json(p.location)}, {"multiplicity", p.multiplicity}});
        return out;
    };
    return json{{"p", s.p},
                {"q", s.q},
                {"A", to_json(s.A)},
                {"B1", to_json(s.B1)},
                {"B2", to_json(s.B2)},
                {"lambda1", to_json(s.special.lambda1)},
                {"lambda2", to_json(s.special.lambda2)},
                {"k1", s.special.k1},
                {"k2", s.special.k2},
                {"k_range", json::array({s.k_min(), s.k_max()})},
                {"inner_poles", poles(s.inner_poles)},
                {"outer_poles", poles(s.outer_poles)},
                {"masses", masses}};
}

}  // namespace toeplitz_spectra::io
