#pragma once

#include <string>
#include <string_view>

namespace treeshift {

/// One of ℓ¹, ℓ^p (1 < p < ∞) or c₀.
struct SpaceTag
{
	enum class Kind { l1, lp, c0 };

	Kind kind = Kind::l1;
	double p = 1;

	static SpaceTag l1() { return {Kind::l1, 1}; }
	static SpaceTag lp(double p);
	static SpaceTag c0() { return {Kind::c0, 0}; }

	/// Accepts "l1", "c0", "l2", "l<p>" or "lp:<p>".
	static SpaceTag parse(std::string_view text);

	/// Conjugate exponent; only meaningful for ℓ^p.
	double conjugate() const { return p / (p - 1); }

	std::string name() const;

	friend bool operator==(const SpaceTag&, const SpaceTag&) = default;
};

} // namespace treeshift
