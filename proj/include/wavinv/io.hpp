#pragma once

// JSON persistence for domain specs, wave-invariant tables, and recovered
// jets.  Canonical: multi-indices serialized lexicographically sorted,
// doubles printed with 17 significant digits, key order fixed, so equal
// inputs produce byte-identical files.

#include "wavinv/domain.hpp"
#include "wavinv/inversion.hpp"
#include "wavinv/wave_invariants.hpp"

#include <json.hpp>

#include <string>

namespace wavinv::io {

using ordered_json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "wavinv 0.1.0";

// %.17g doubles, no locale surprises.
std::string dump(const ordered_json& j, int indent = 2);

ordered_json jet_to_json(const Jet& jet);
Jet jet_from_json(const ordered_json& j, int expect_dim = -1);

ordered_json domain_to_json(const DomainSpec& spec);
DomainSpec domain_from_json(const ordered_json& j);

ordered_json table_to_json(const WaveInvariantTable& table);
WaveInvariantTable table_from_json(const ordered_json& j);

ordered_json recovered_to_json(const RecoveredJet& jet, double L, int n);

ordered_json load_file(const std::string& path);
void save_file(const std::string& path, const ordered_json& j);

std::string table_to_csv(const WaveInvariantTable& table);

} // namespace wavinv::io
