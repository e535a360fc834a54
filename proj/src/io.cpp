#include "wavinv/io.hpp"

#include "wavinv/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace wavinv::io {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void dump_rec(const ordered_json& j, std::ostringstream& out, int indent, int depth) {
    std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
    std::string pad_in(static_cast<std::size_t>(indent) * (depth + 1), ' ');
    switch (j.type()) {
        case nlohmann::detail::value_t::object: {
            if (j.empty()) {
                out << "{}";
                return;
            }
            out << "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out << ",\n";
                first = false;
                out << pad_in << '"' << it.key() << "\": ";
                dump_rec(it.value(), out, indent, depth + 1);
            }
            out << '\n' << pad << '}';
            return;
        }
        case nlohmann::detail::value_t::array: {
            if (j.empty()) {
                out << "[]";
                return;
            }
            out << "[\n";
            bool first = true;
            for (const auto& el : j) {
                if (!first) out << ",\n";
                first = false;
                out << pad_in;
                dump_rec(el, out, indent, depth + 1);
            }
            out << '\n' << pad << ']';
            return;
        }
        case nlohmann::detail::value_t::number_float:
            out << format_double(j.get<double>());
            return;
        default:
            out << j.dump();
            return;
    }
}

} // namespace

std::string dump(const ordered_json& j, int indent) {
    std::ostringstream out;
    dump_rec(j, out, indent, 0);
    out << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// Jets
// ---------------------------------------------------------------------------

ordered_json jet_to_json(const Jet& jet) {
    ordered_json out;
    out["trunc"] = jet.trunc();
    std::vector<std::pair<std::vector<int>, double>> coeffs;
    jet.for_each([&](const MultiIndex& gamma, double v) { coeffs.emplace_back(gamma.entries(), v); });
    std::sort(coeffs.begin(), coeffs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; }); // lexicographic
    ordered_json arr = ordered_json::array();
    for (const auto& [idx, val] : coeffs) {
        ordered_json term;
        term["idx"] = idx;
        term["val"] = val;
        arr.push_back(std::move(term));
    }
    out["coeffs"] = std::move(arr);
    return out;
}

Jet jet_from_json(const ordered_json& j, int expect_dim) {
    if (!j.contains("trunc") || !j.contains("coeffs")) throw SpecError("jet: missing trunc/coeffs");
    int trunc = j.at("trunc").get<int>();
    int dim = expect_dim;
    if (dim < 0) {
        for (const auto& term : j.at("coeffs")) {
            dim = static_cast<int>(term.at("idx").size());
            break;
        }
        if (dim < 0) throw SpecError("jet: cannot infer dimension from empty coeffs");
    }
    try {
        Jet out(dim, trunc);
        for (const auto& term : j.at("coeffs")) {
            std::vector<int> idx = term.at("idx").get<std::vector<int>>();
            if (static_cast<int>(idx.size()) != dim) throw SpecError("jet: inconsistent idx dimension");
            out.set_coeff(MultiIndex(idx), term.at("val").get<double>());
        }
        return out;
    } catch (const std::invalid_argument& e) {
        throw SpecError(std::string("jet: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// DomainSpec
// ---------------------------------------------------------------------------

ordered_json domain_to_json(const DomainSpec& spec) {
    ordered_json out;
    out["n"] = spec.n;
    out["L"] = spec.L;
    out["symmetric"] = spec.symmetric;
    if (spec.symmetric || spec.F.dim() == spec.d()) out["F"] = jet_to_json(spec.F);
    if (spec.f_plus) out["f_plus"] = jet_to_json(*spec.f_plus);
    if (spec.f_minus) out["f_minus"] = jet_to_json(*spec.f_minus);
    return out;
}

DomainSpec domain_from_json(const ordered_json& j) {
    DomainSpec spec;
    try {
        spec.n = j.at("n").get<int>();
        spec.L = j.at("L").get<double>();
        spec.symmetric = j.at("symmetric").get<bool>();
        if (spec.n < 2 || spec.n - 1 > 8) throw SpecError("domain: n out of range");
        if (spec.L <= 0) throw SpecError("domain: L must be positive");
        if (j.contains("F")) spec.F = jet_from_json(j.at("F"), spec.d());
        else if (spec.symmetric) throw SpecError("domain: missing F in symmetric mode");
        if (j.contains("f_plus")) spec.f_plus = jet_from_json(j.at("f_plus"), spec.d());
        if (j.contains("f_minus")) spec.f_minus = jet_from_json(j.at("f_minus"), spec.d());
        if (!spec.symmetric && (!spec.f_plus || !spec.f_minus))
            throw SpecError("domain: general mode requires f_plus and f_minus");
    } catch (const nlohmann::json::exception& e) {
        throw SpecError(std::string("domain: malformed JSON (") + e.what() + ")");
    }
    return spec;
}

// ---------------------------------------------------------------------------
// WaveInvariantTable
// ---------------------------------------------------------------------------

ordered_json table_to_json(const WaveInvariantTable& table) {
    ordered_json out;
    out["n"] = table.n;
    out["L"] = table.L;
    out["symmetric"] = table.symmetric;
    out["j_max"] = table.j_max;
    ordered_json entries = ordered_json::array();
    for (const auto& [key, val] : table.entries) {
        ordered_json e;
        e["r"] = key.first;
        e["j"] = key.second;
        e["re"] = val.real();
        e["im"] = val.imag();
        entries.push_back(std::move(e));
    }
    out["entries"] = std::move(entries);
    ordered_json prefs = ordered_json::array();
    for (const auto& [r, p] : table.prefactors) {
        ordered_json e;
        e["r"] = r;
        e["critical_value"] = p.critical_value;
        e["signature"] = p.signature;
        e["sqrt_abs_det"] = p.sqrt_abs_det;
        e["c0_re"] = p.c0.real();
        e["c0_im"] = p.c0.imag();
        e["k_power"] = p.k_power;
        prefs.push_back(std::move(e));
    }
    out["prefactors"] = std::move(prefs);
    ordered_json conv;
    conv["tag"] = table.convention;
    conv["tool_version"] = kToolVersion;
    out["convention"] = std::move(conv);
    return out;
}

WaveInvariantTable table_from_json(const ordered_json& j) {
    WaveInvariantTable table;
    try {
        table.n = j.at("n").get<int>();
        table.L = j.at("L").get<double>();
        table.symmetric = j.value("symmetric", true);
        table.j_max = j.value("j_max", 0);
        for (const auto& e : j.at("entries"))
            table.entries[{e.at("r").get<int>(), e.at("j").get<int>()}] =
                cplx(e.at("re").get<double>(), e.at("im").get<double>());
        if (j.contains("prefactors"))
            for (const auto& e : j.at("prefactors")) {
                WaveRowPrefactor p;
                p.critical_value = e.at("critical_value").get<double>();
                p.signature = e.at("signature").get<int>();
                p.sqrt_abs_det = e.at("sqrt_abs_det").get<double>();
                p.c0 = cplx(e.at("c0_re").get<double>(), e.at("c0_im").get<double>());
                p.k_power = e.value("k_power", 0);
                table.prefactors[e.at("r").get<int>()] = p;
            }
        if (j.contains("convention") && j.at("convention").contains("tag"))
            table.convention = j.at("convention").at("tag").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw SpecError(std::string("table: malformed JSON (") + e.what() + ")");
    }
    return table;
}

ordered_json recovered_to_json(const RecoveredJet& jet, double L, int n) {
    ordered_json out;
    out["n"] = n;
    out["L"] = L;
    out["d"] = jet.d;
    out["order"] = jet.order;
    out["F"] = jet_to_json(jet.F);
    out["alpha"] = jet.alpha;
    out["branch"] = jet.branch;
    out["condition_numbers"] = jet.condition_numbers;
    out["residuals"] = jet.residuals;
    out["floquet_residual"] = jet.floquet_residual;
    out["ill_conditioned"] = jet.ill_conditioned;
    out["experimental_mixed"] = jet.experimental_mixed;
    ordered_json conv;
    conv["tool_version"] = kToolVersion;
    out["convention"] = std::move(conv);
    return out;
}

ordered_json load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open file: " + path);
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SpecError("cannot parse JSON file " + path + ": " + e.what());
    }
    return j;
}

void save_file(const std::string& path, const ordered_json& j) {
    std::ofstream out(path);
    if (!out) throw SpecError("cannot write file: " + path);
    out << dump(j);
}

std::string table_to_csv(const WaveInvariantTable& table) {
    std::ostringstream out;
    out << "r,j,re,im\n";
    for (const auto& [key, val] : table.entries)
        out << key.first << ',' << key.second << ',' << format_double(val.real()) << ','
            << format_double(val.imag()) << '\n';
    return out.str();
}

} // namespace wavinv::io
