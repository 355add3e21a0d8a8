#pragma once

#include "treeshift/space.hpp"
#include "treeshift/weights.hpp"

#include <optional>
#include <string>
#include <vector>

namespace treeshift {

/// A criterion quantity at one (vertex, n). `exact` means a closed form was
/// used; `truncated` means an enumeration hit its budget and the value is a
/// lower bound.
struct Measured
{
	double value = 0;
	bool exact = false;
	bool truncated = false;
};

/// Σ_{k=1}^{M} (c+k)^{-s} for c >= 0, M >= 1, s > 0.
double shifted_power_sum(double c, double M, double s);

/// sup_{u∈Χ^n(v)} |λ(v→u)|.
Measured crit_sup(const WeightFamily& w, const TreeSpec& spec, const VertexAddr& v, std::int64_t n,
				  std::int64_t budget = 1 << 16);
/// Σ_{u∈Χ^n(v)} |λ(v→u)|^q.
Measured crit_sum(const WeightFamily& w, const TreeSpec& spec, const VertexAddr& v, std::int64_t n, double q,
				  std::int64_t budget = 1 << 16);
/// Same two quantities by enumeration only.
Measured crit_sup_budgeted(const WeightFamily& w, const TreeSpec& spec, const VertexAddr& v, std::int64_t n,
						   std::int64_t budget);
Measured crit_sum_budgeted(const WeightFamily& w, const TreeSpec& spec, const VertexAddr& v, std::int64_t n,
						   double q, std::int64_t budget);

/// λ(Par^n(v)→v) on an unrooted tree.
cx crit_left(const WeightFamily& w, const TreeSpec& spec, const VertexAddr& v, std::int64_t n);

enum class RatioMode { sup, sum };

struct RatioMeasured
{
	double ratio = 0;     ///< sup (or sum) over Χ^n(Par^n v) of |λ(Par^n v→u)| / |λ(Par^n v→v)|
	double companion = 0; ///< 1 / |λ(Par^n v→v)|
	double value = 0;     ///< max of the two
	bool exact = false;
	bool truncated = false;
};

RatioMeasured crit_ratio(const WeightFamily& w, const TreeSpec& spec, const VertexAddr& v, std::int64_t n,
						 RatioMode mode, std::int64_t budget = 1 << 16);

enum class Theorem {
	rooted_hc_l1,
	rooted_hc_lp,
	rooted_hc_c0,
	rooted_algebra_iv,
	unrooted_v,
	unrooted_c0,
	symmetric,
	free_left_end,
};

const char* to_string(Theorem t);
Theorem parse_theorem(std::string_view text);
bool theorem_is_rooted(Theorem t);

enum class VerdictKind { exact_divergence, diverges_up_to_horizon, stalled_below };
const char* to_string(VerdictKind k);

struct CriterionCell
{
	VertexAddr vertex;
	std::int64_t n = 0;
	double value = 0;
	bool exact = false;
	bool truncated = false;
};

struct CriterionReport
{
	Theorem theorem{};
	SpaceTag space;
	std::string quantity;
	std::string note;
	std::vector<VertexAddr> probes;
	bool probes_truncated = false;
	std::int64_t horizon = 0;
	double threshold = 0;
	std::vector<CriterionCell> table;
	std::vector<double> min_per_n; ///< index n-1 for n = 1..horizon
	VerdictKind verdict = VerdictKind::stalled_below;
	std::vector<std::int64_t> witness; ///< n_k along which the minimum strictly increases
	double bound = 0;                  ///< StalledBelow bound
	std::string certificate;           ///< ExactDivergence tag
};

struct CriterionOptions
{
	std::int64_t horizon = 40;
	double threshold = 1e3;
	std::int64_t budget = 1 << 16;
};

/// Vertices of generations |n| <= 3 (n >= 0 on rooted trees), at most `cap`.
std::vector<VertexAddr> default_probes(const TreeSpec& spec, std::int64_t cap = 64, bool* truncated = nullptr);

/// The per-vertex quantity whose divergence along a common subsequence the
/// theorem asks for.
Measured theorem_quantity(Theorem t, const SpaceTag& space, const WeightFamily& w, const TreeSpec& spec,
						  const VertexAddr& v, std::int64_t n, std::int64_t budget);

/// Closed-form proof that the quantity tends to +inf at v, if one exists.
std::optional<std::string> divergence_certificate(Theorem t, const SpaceTag& space, const WeightFamily& w,
												  const TreeSpec& spec, const VertexAddr& v);

CriterionReport assemble_verdict(Theorem t, const SpaceTag& space, const WeightFamily& w, const TreeSpec& spec,
								 const std::vector<VertexAddr>& probes, const CriterionOptions& opt = {});

} // namespace treeshift
