#pragma once

// Binary cache for dictionaries, arc bases and measurement operators.
// Layout is described in docs/cache_format.md.

#include <cstdint>
#include <string>

#include "cpe/dictionary.hpp"
#include "cpe/sensing.hpp"

namespace cpe {

enum class CacheRecord : std::uint32_t { dictionary = 1, arc_bases = 2, op = 3 };

/// Atom values are stored as complex64, so a reload matches the build to ~1e-7.
void save_dictionary(const std::string& path, const ParametricDictionary& dict);
ParametricDictionary load_dictionary(const std::string& path, const SignalModel& model);

void save_arc_bases(const std::string& path, const ArcBasisSet& arcs);
ArcBasisSet load_arc_bases(const std::string& path, const ParametricDictionary& dict);

/// Only the seed and dimensions are stored; the matrix is regenerated on load.
void save_operator(const std::string& path, const MeasurementOperator& op);
MeasurementOperator load_operator(const std::string& path);

}  // namespace cpe
