#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "qhist/scenario.hpp"
#include "qhist/scenario_io.hpp"

namespace qhist {

/// Result document for query `index` of a loaded scenario. Undefined
/// probabilities and incompatible/inconsistent verdicts are part of the
/// result, never thrown.
Json evaluate_query(const LoadedScenario& s, std::size_t index, Tolerances tol = {});

/// Generalized-context construction over the selected contexts (all when empty).
Json gc_build_report(const LoadedScenario& s, const std::vector<std::size_t>& contexts,
                     Tolerances tol = {});

/// Decoherence matrix and consistency verdict for the selected contexts.
Json ch_check_report(const LoadedScenario& s, const std::vector<std::size_t>& contexts,
                     Tolerances tol = {});

/// Contrary pairs across the selected contexts' lattices.
Json scan_report(const LoadedScenario& s, const std::vector<std::size_t>& contexts,
                 std::size_t budget, Tolerances tol = {});

/// The three-box fixture: every query evaluated.
Json three_box_demo(Tolerances tol = {});

Json state_dependence_demo(std::uint64_t seed, Tolerances tol = {});

}  // namespace qhist
