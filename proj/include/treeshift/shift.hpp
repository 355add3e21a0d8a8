#pragma once

#include "treeshift/vector.hpp"
#include "treeshift/weights.hpp"

#include <utility>
#include <vector>

namespace treeshift {

/// B_λ^n f, computed by ancestor hops: B^n e_u = λ(Par^n(u)→u) e_{Par^n(u)}.
FinSuppVec apply(const WeightFamily& w, const TreeSpec& spec, const FinSuppVec& f, std::int64_t n);

/// Same quantity from the definition (B^n f)(v) = Σ_{u∈Χ^n(v)} λ(v→u) f(u),
/// evaluated at the given vertices by enumeration.
FinSuppVec apply_by_definition(const WeightFamily& w, const TreeSpec& spec, const FinSuppVec& f, std::int64_t n,
							   const std::vector<VertexAddr>& at, std::int64_t budget = 1 << 20);

/// (n, ‖B^n f − g‖) for n = 0..n_max.
std::vector<std::pair<std::int64_t, double>> orbit_norms(const WeightFamily& w, const TreeSpec& spec,
														 const FinSuppVec& f, const FinSuppVec& g,
														 const SpaceTag& s, std::int64_t n_max);

} // namespace treeshift
