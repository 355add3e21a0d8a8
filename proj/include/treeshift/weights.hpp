#pragma once

#include "treeshift/space.hpp"
#include "treeshift/tree.hpp"

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>

namespace treeshift {

using cx = std::complex<double>;

enum class WeightTag {
	rolewicz,
	dyadic_counterexample,
	menthe,
	fertile_no_algebra,
	bilateral_rolewicz,
	symmetric,
	table,
};

const char* to_string(WeightTag tag);
WeightTag parse_weight_tag(std::string_view text);

/// Scalar sequence indexed by i >= 1.
struct SequenceRule
{
	enum class Kind { constant, geometric, power };
	Kind kind = Kind::constant;
	cx scale = 1;
	double rate = 1; ///< geometric: scale * rate^i, power: scale * i^rate

	static SequenceRule constant(cx c) { return {Kind::constant, c, 1}; }
	static SequenceRule geometric(cx c, double r) { return {Kind::geometric, c, r}; }
	static SequenceRule power(cx c, double gamma) { return {Kind::power, c, gamma}; }

	cx at(std::int64_t i) const;
	/// sup over j >= 1 of |x_{j+1} / x_j|.
	double sup_ratio() const;

	friend bool operator==(const SequenceRule&, const SequenceRule&) = default;
};

const char* to_string(SequenceRule::Kind kind);

/// Weight as a function of the generation: overrides, then `below` under
/// `split` and `above` from `split` on.
struct LevelWeights
{
	std::map<std::int64_t, cx> overrides;
	cx below = 1;
	cx above = 1;
	std::int64_t split = 0;

	cx at(std::int64_t gen) const;

	friend bool operator==(const LevelWeights&, const LevelWeights&) = default;
};

struct RolewiczParams
{
	cx lambda;
	friend bool operator==(const RolewiczParams&, const RolewiczParams&) = default;
};

struct DyadicParams
{
	double p;
	std::int64_t m0;
	double alpha;
	friend bool operator==(const DyadicParams&, const DyadicParams&) = default;
};

struct MentheParams
{
	SequenceRule alpha; ///< geometric with 0 < |rate| < 1
	SequenceRule beta;
	friend bool operator==(const MentheParams&, const MentheParams&) = default;
};

struct FertileParams
{
	double p;
	friend bool operator==(const FertileParams&, const FertileParams&) = default;
};

struct BilateralParams
{
	cx lambda;
	std::int64_t lo; ///< first generation of the middle block
	std::int64_t hi; ///< last generation of the middle block
	std::map<std::int64_t, cx> middle;
	friend bool operator==(const BilateralParams&, const BilateralParams&) = default;
};

struct SymmetricParams
{
	LevelWeights levels;
	friend bool operator==(const SymmetricParams&, const SymmetricParams&) = default;
};

struct TableParams
{
	std::map<VertexAddr, cx> entries;
	cx fallback = 1;
	friend bool operator==(const TableParams&, const TableParams&) = default;
};

using WeightParams = std::variant<RolewiczParams, DyadicParams, MentheParams, FertileParams,
								  BilateralParams, SymmetricParams, TableParams>;

/// Nonzero complex weight per vertex. The weight of a rooted tree's root is
/// never used by the shift and is reported as 1 by the builtin families.
class WeightFamily
{
public:
	WeightFamily(WeightTag tag, WeightParams params);

	WeightTag tag() const { return tag_; }
	const WeightParams& params() const { return params_; }
	template <class T>
	const T& as() const { return std::get<T>(params_); }

	cx value(const TreeSpec& spec, const VertexAddr& v) const;

	/// Weight shared by every vertex of a generation, for the families
	/// that are constant on generations.
	std::optional<LevelWeights> level_weights() const;
	bool symmetric() const { return level_weights().has_value(); }

	/// Exact Σ_{u∈Χ(v)} |λ_u|^q when Χ(v) is infinite (may be +inf).
	std::optional<double> tail_oracle(const TreeSpec& spec, const VertexAddr& v, double q) const;

	/// Throws unless the family can live on this tree.
	void check_tree(const TreeSpec& spec) const;

	friend bool operator==(const WeightFamily&, const WeightFamily&) = default;

private:
	WeightTag tag_;
	WeightParams params_;
};

WeightFamily make_rolewicz(cx lambda);
WeightFamily make_dyadic_counterexample(double p, std::optional<std::int64_t> m0 = std::nullopt,
										std::optional<double> alpha = std::nullopt);
WeightFamily make_menthe(SequenceRule alpha, SequenceRule beta);
WeightFamily make_fertile_no_algebra(const TreeSpec& spec, double p);
WeightFamily make_bilateral_rolewicz(const TreeSpec& spec, cx lambda, std::int64_t lo, std::int64_t hi,
									 std::map<std::int64_t, cx> middle);
WeightFamily make_symmetric(LevelWeights levels);
WeightFamily make_table(std::map<VertexAddr, cx> entries, cx fallback);

/// Position of a {1,2}-path in the lexicographic order of {1,2}^n (1-based).
std::uint64_t theta(const std::vector<std::int64_t>& path);

/// λ(v→u). Throws not_an_ancestor if v is not an ancestor of u.
cx path_product(const WeightFamily& w, const TreeSpec& spec, const VertexAddr& v, const VertexAddr& u);
/// λ(Par^n(u)→u), with Par^n(u) required to exist.
cx path_product_up(const WeightFamily& w, const TreeSpec& spec, const VertexAddr& u, std::int64_t n);

struct NormReport
{
	double value = 0;
	bool exact = false;
	bool unbounded = false;
	std::int64_t examined = 0;
	std::string method;
};

NormReport operator_norm(const WeightFamily& w, const TreeSpec& spec, const SpaceTag& space,
						 std::int64_t budget = 10000);

/// Same quantity computed by visiting vertices, never using closed forms
/// other than tail oracles. Exact only when the tree is exhausted.
NormReport operator_norm_budgeted(const WeightFamily& w, const TreeSpec& spec, const SpaceTag& space,
								  std::int64_t budget);

} // namespace treeshift
