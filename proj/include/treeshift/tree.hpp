#pragma once

#include "treeshift/address.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace treeshift {

/// Number of children of a vertex: a positive integer or countably infinite.
class ChildCount
{
public:
	constexpr ChildCount() = default;
	constexpr ChildCount(std::int64_t n) : n_(n) {}

	static constexpr ChildCount infinite() { return ChildCount(kInfinite); }

	constexpr bool is_infinite() const { return n_ == kInfinite; }
	constexpr std::int64_t value() const { return n_; }
	constexpr bool admits(std::int64_t index) const { return index >= 1 && (is_infinite() || index <= n_); }

	friend constexpr bool operator==(ChildCount, ChildCount) = default;

private:
	static constexpr std::int64_t kInfinite = -1;
	std::int64_t n_ = 1;
};

std::string to_string(ChildCount c);

enum class TreeKind { rooted, unrooted };

enum class TreeShape {
	n_adic,    ///< every vertex has N children
	menthe,    ///< root with countably many children, each starting a ray
	staircase, ///< r_k has 2^k children: 2^k - 1 rays and r_{k+1} last
	levels,    ///< arity depends only on the generation
	table,     ///< explicit address table with a fallback arity
};

const char* to_string(TreeKind kind);
const char* to_string(TreeShape shape);

/// Arity as a function of the generation: explicit overrides, otherwise
/// `below` for generations under `split` and `above` from `split` on.
struct LevelArity
{
	std::map<std::int64_t, ChildCount> overrides;
	ChildCount below = 1;
	ChildCount above = 1;
	std::int64_t split = 0;

	ChildCount at(std::int64_t gen) const;

	friend bool operator==(const LevelArity&, const LevelArity&) = default;
};

/// Immutable description of a leafless directed tree.
///
/// For unrooted trees the anchor has ascent 0 and `Par^k(anchor)` is the
/// address (k, []). Its child toward the anchor has index `spine_index(k)`.
class TreeSpec
{
public:
	static TreeSpec n_adic(std::int64_t n);
	static TreeSpec menthe();
	static TreeSpec staircase();
	static TreeSpec levels(TreeKind kind, LevelArity arity,
						   std::map<std::int64_t, std::int64_t> spine_index = {});
	/// Unrooted tree whose generations below 0 are singletons and whose
	/// other vertices have `n` children.
	static TreeSpec free_left_end(std::int64_t n);
	/// Rooted or unrooted tree from explicit tables. For unrooted trees,
	/// `spine_arity[k]` is the arity of (k, []) for k >= 1.
	static TreeSpec table(TreeKind kind, std::map<VertexAddr, ChildCount> arity,
						  ChildCount fallback,
						  std::map<std::int64_t, ChildCount> spine_arity = {},
						  ChildCount spine_fallback = 1,
						  std::map<std::int64_t, std::int64_t> spine_index = {});

	TreeKind kind() const { return kind_; }
	TreeShape shape() const { return shape_; }
	bool rooted() const { return kind_ == TreeKind::rooted; }
	std::int64_t adic() const { return adic_; }
	const LevelArity& level_arity() const { return levels_; }
	const std::map<VertexAddr, ChildCount>& arity_table() const { return table_; }
	ChildCount table_fallback() const { return fallback_; }
	const std::map<std::int64_t, ChildCount>& spine_arity_table() const { return spine_arity_; }
	ChildCount spine_fallback() const { return spine_fallback_; }
	const std::map<std::int64_t, std::int64_t>& spine_index_table() const { return spine_index_; }

	/// True for shapes whose arity depends only on the generation.
	bool level_regular() const;

	/// Arity of (k, []), k >= 1.
	ChildCount spine_arity(std::int64_t k) const;
	/// Index of the child of (k, []) that is (k - 1, []).
	std::int64_t spine_index(std::int64_t k) const;

	/// Throws Error(malformed_address) if `v` is not canonical for this tree
	/// or uses a child index beyond an arity.
	void check(const VertexAddr& v) const;
	bool is_canonical(const VertexAddr& v) const;
	VertexAddr canonical(VertexAddr v) const;

	ChildCount arity(const VertexAddr& v) const;
	/// The i-th child (1-based) of v, canonical.
	VertexAddr child(const VertexAddr& v, std::int64_t i) const;
	std::optional<VertexAddr> parent(const VertexAddr& v, std::int64_t k = 1) const;
	/// n such that Par^n(v) = anc, if any.
	std::optional<std::int64_t> ancestor_distance(const VertexAddr& anc, const VertexAddr& v) const;

	/// Staircase only: the spine index k if v = r_k.
	std::optional<std::int64_t> staircase_level(const VertexAddr& v) const;

	/// True if below some generation every generation is a singleton.
	bool has_free_left_end() const;
	/// Largest k such that (k, []) has more than one child, 0 if none.
	/// Generations <= -k are then singletons. nullopt without a free left end.
	std::optional<std::int64_t> last_branching_ascent() const;

	friend bool operator==(const TreeSpec&, const TreeSpec&) = default;

private:
	TreeSpec() = default;
	void validate() const;

	TreeKind kind_ = TreeKind::rooted;
	TreeShape shape_ = TreeShape::n_adic;
	std::int64_t adic_ = 2;
	LevelArity levels_;
	std::map<VertexAddr, ChildCount> table_;
	ChildCount fallback_ = 1;
	std::map<std::int64_t, ChildCount> spine_arity_;
	ChildCount spine_fallback_ = 1;
	std::map<std::int64_t, std::int64_t> spine_index_;
};

/// Result of a budgeted enumeration.
struct Enumeration
{
	std::vector<VertexAddr> vertices;
	bool truncated = false;
};

/// Visits Χ^n(v) depth-first with ascending child indices. The visitor may
/// return false to stop early. At most `budget` vertices are visited;
/// returns true if the set was exhausted, false if truncated or stopped.
bool walk_descendants(const TreeSpec& spec, const VertexAddr& v, std::int64_t n,
					  std::int64_t budget,
					  const std::function<bool(const VertexAddr&)>& visit);

/// Like walk_descendants but also reports every intermediate vertex. The
/// visitor receives the vertex and its depth below v (0..n).
bool walk_subtree(const TreeSpec& spec, const VertexAddr& v, std::int64_t n, std::int64_t budget,
				  const std::function<bool(const VertexAddr&, std::int64_t)>& visit);

Enumeration children_n(const TreeSpec& spec, const VertexAddr& v, std::int64_t n,
					   std::int64_t budget);

Enumeration generation(const TreeSpec& spec, std::int64_t n, std::int64_t budget);

/// |Χ^n(v)| in closed form where available (+inf if infinite); nullopt for
/// table trees.
std::optional<double> count_descendants(const TreeSpec& spec, const VertexAddr& v, std::int64_t n);

struct FertilityVerdict
{
	enum class Kind { fertile, proven_none, inconclusive };
	Kind kind = Kind::inconclusive;
	VertexAddr vertex;
	std::string certificate;
	std::int64_t horizon = 0;
	/// Inconclusive: min |Χ^horizon(w)| over the examined strict descendants.
	double min_count = 0;
	std::int64_t examined = 0;
};

const char* to_string(FertilityVerdict::Kind kind);

FertilityVerdict find_fertile(const TreeSpec& spec, std::int64_t horizon,
							  std::int64_t budget = 1 << 16);

} // namespace treeshift
