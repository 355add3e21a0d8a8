#pragma once

#include "treeshift/shift.hpp"

#include <optional>
#include <vector>

namespace treeshift {

using Multi = std::vector<int>; ///< multi-index in N_0^d

struct ExponentSolution
{
	std::vector<Multi> P;
	std::vector<double> s;
	Multi beta;
	std::vector<double> values; ///< L_α(s), aligned with P
	double margin = 0;          ///< min_{α≠β} L_α(s) − 1
};

/// Positive s and β ∈ P with L_β(s) = 1 < L_α(s) for every other α ∈ P.
ExponentSolution solve_exponents(const std::vector<Multi>& P);

double linear_form(const Multi& alpha, const std::vector<double>& s);

struct KeyLemma
{
	std::vector<double> x;
	double value = 0;
};

/// Minimizer of sup_j x_j|μ_j| over the probability simplex.
KeyLemma keylemma_optimal(const std::vector<cx>& mu);

/// Right inverse R_a with B^n R_a = e_a, spread over Χ^n(a) by the key lemma.
struct RightInverse
{
	FinSuppVec R;
	double keylemma_value = 0; ///< (Σ_u |λ(a→u)|)^{-1} over the enumerated set
	double min_weight = 0;     ///< min_u |λ(a→u)| over the enumerated set
	bool truncated = false;
};

RightInverse right_inverse(const WeightFamily& w, const TreeSpec& spec, const VertexAddr& a, std::int64_t n,
						   std::int64_t budget = 1 << 14);

struct Bump
{
	VertexAddr base;
	VertexAddr target;
	double weight = 0; ///< |λ(base→target)|
};

struct Correction
{
	std::vector<VertexAddr> group;
	VertexAddr target; ///< sibling target (ℓ^p) or group representative (c₀)
	cx coefficient;    ///< quantity whose m-th root, times e^{iπ/m}, enters h
};

struct CancellationCheck
{
	VertexAddr vertex;
	VertexAddr top;
	double coefficient = 0; ///< |(B^n h^m − g − residual)(Par^n vertex)|
	double magnitude = 0;   ///< |f^m(vertex) λ(Par^n vertex→vertex)|
};

struct WitnessReport
{
	std::string mode;
	SpaceTag space;
	std::int64_t n = 0;
	int m = 0;
	std::optional<ExponentSolution> exponents;
	std::vector<FinSuppVec> h;
	std::vector<double> approach_norms;
	double hit_error = 0;
	double identity_error = 0;
	double residual_norm = 0;
	std::vector<std::pair<Multi, double>> collapse_norms;
	std::vector<VertexAddr> f1, f2;
	std::vector<Bump> bumps;
	std::vector<Correction> corrections;
	std::vector<CancellationCheck> cancellations;
	std::vector<double> keylemma_values;
	bool truncated = false;
};

struct WitnessOptions
{
	std::int64_t budget = 1 << 14; ///< enumeration budget per descendant set
	double tau = 1;                ///< F₁ if |λ(Par^n a→a)| <= tau
	std::int64_t search = 128;     ///< how far above n to look for an admissible iterate
};

WitnessReport build_rooted(const SpaceTag& space, const WeightFamily& w, const TreeSpec& spec,
						   const std::vector<FinSuppVec>& f, const FinSuppVec& g, const std::vector<Multi>& P,
						   std::int64_t n, const WitnessOptions& opt = {});

WitnessReport build_unrooted_power(const SpaceTag& space, const WeightFamily& w, const TreeSpec& spec,
								   const FinSuppVec& f, const FinSuppVec& g, int m, std::int64_t n,
								   const WitnessOptions& opt = {});

WitnessReport build_unrooted_algebra(const SpaceTag& space, const WeightFamily& w, const TreeSpec& spec,
									 const std::vector<FinSuppVec>& f, const FinSuppVec& g,
									 const std::vector<Multi>& P, std::int64_t n, const WitnessOptions& opt = {});

/// Smallest iterate allowed by the support conditions alone.
std::int64_t minimal_rooted_n(const FinSuppVec& support);
std::int64_t minimal_unrooted_n(const TreeSpec& spec, const FinSuppVec& support);

} // namespace treeshift
