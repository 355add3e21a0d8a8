#include "treeshift/tree.hpp"

#include "treeshift/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace treeshift {

std::string to_string(ChildCount c)
{
	return c.is_infinite() ? "infinite" : std::to_string(c.value());
}

const char* to_string(TreeKind kind)
{
	return kind == TreeKind::rooted ? "rooted" : "unrooted";
}

const char* to_string(TreeShape shape)
{
	switch (shape) {
	case TreeShape::n_adic: return "n-adic";
	case TreeShape::menthe: return "menthe";
	case TreeShape::staircase: return "staircase";
	case TreeShape::levels: return "levels";
	case TreeShape::table: return "table";
	}
	return "?";
}

const char* to_string(FertilityVerdict::Kind kind)
{
	switch (kind) {
	case FertilityVerdict::Kind::fertile: return "Fertile";
	case FertilityVerdict::Kind::proven_none: return "ProvenNone";
	case FertilityVerdict::Kind::inconclusive: return "Inconclusive";
	}
	return "?";
}

ChildCount LevelArity::at(std::int64_t gen) const
{
	if (auto it = overrides.find(gen); it != overrides.end())
		return it->second;
	return gen < split ? below : above;
}

namespace {

void check_count(ChildCount c, const char* what)
{
	if (!c.is_infinite() && c.value() < 1)
		fail(ErrorKind::invalid_argument, std::string(what) + ": trees are leafless, arity must be >= 1");
}

} // namespace

TreeSpec TreeSpec::n_adic(std::int64_t n)
{
	if (n < 1)
		fail(ErrorKind::invalid_argument, "n-adic tree needs n >= 1");
	TreeSpec t;
	t.shape_ = TreeShape::n_adic;
	t.adic_ = n;
	return t;
}

TreeSpec TreeSpec::menthe()
{
	TreeSpec t;
	t.shape_ = TreeShape::menthe;
	return t;
}

TreeSpec TreeSpec::staircase()
{
	TreeSpec t;
	t.shape_ = TreeShape::staircase;
	return t;
}

TreeSpec TreeSpec::levels(TreeKind kind, LevelArity arity,
						  std::map<std::int64_t, std::int64_t> spine_index)
{
	TreeSpec t;
	t.kind_ = kind;
	t.shape_ = TreeShape::levels;
	t.levels_ = std::move(arity);
	t.spine_index_ = std::move(spine_index);
	t.validate();
	return t;
}

TreeSpec TreeSpec::free_left_end(std::int64_t n)
{
	if (n < 1)
		fail(ErrorKind::invalid_argument, "free-left-end tree needs n >= 1");
	LevelArity a;
	a.below = 1;
	a.above = n;
	a.split = 0;
	return levels(TreeKind::unrooted, a);
}

TreeSpec TreeSpec::table(TreeKind kind, std::map<VertexAddr, ChildCount> arity,
						 ChildCount fallback, std::map<std::int64_t, ChildCount> spine_arity,
						 ChildCount spine_fallback, std::map<std::int64_t, std::int64_t> spine_index)
{
	TreeSpec t;
	t.kind_ = kind;
	t.shape_ = TreeShape::table;
	t.fallback_ = fallback;
	t.spine_arity_ = std::move(spine_arity);
	t.spine_fallback_ = spine_fallback;
	t.spine_index_ = std::move(spine_index);
	for (auto& [addr, count] : arity) {
		if (kind == TreeKind::rooted && addr.ascent != 0)
			fail(ErrorKind::malformed_address, "rooted table entry with ascent: " + format_address(addr));
		t.table_.emplace(t.canonical(addr), count);
	}
	t.validate();
	return t;
}

void TreeSpec::validate() const
{
	check_count(fallback_, "table fallback");
	check_count(spine_fallback_, "spine fallback");
	check_count(levels_.below, "levels below");
	check_count(levels_.above, "levels above");
	for (auto& [g, c] : levels_.overrides)
		check_count(c, "levels override");
	for (auto& [a, c] : table_)
		check_count(c, "table entry");
	for (auto& [k, c] : spine_arity_) {
		check_count(c, "spine arity");
		if (k < 1)
			fail(ErrorKind::invalid_argument, "spine levels start at 1");
	}
	if (kind_ == TreeKind::rooted)
		return;
	if (shape_ != TreeShape::levels && shape_ != TreeShape::table)
		fail(ErrorKind::invalid_argument, "unrooted trees must be given by levels or tables");
	for (auto& [k, s] : spine_index_) {
		if (k < 1 || s < 1 || !spine_arity(k).admits(s))
			fail(ErrorKind::invalid_argument,
				 "spine index at level " + std::to_string(k) + " exceeds the arity");
	}
}

bool TreeSpec::level_regular() const
{
	return shape_ == TreeShape::n_adic || shape_ == TreeShape::levels;
}

ChildCount TreeSpec::spine_arity(std::int64_t k) const
{
	if (rooted())
		fail(ErrorKind::unsupported, "rooted trees have no spine");
	if (shape_ == TreeShape::levels)
		return levels_.at(-k);
	auto it = spine_arity_.find(k);
	return it != spine_arity_.end() ? it->second : spine_fallback_;
}

std::int64_t TreeSpec::spine_index(std::int64_t k) const
{
	auto it = spine_index_.find(k);
	return it != spine_index_.end() ? it->second : 1;
}

VertexAddr TreeSpec::canonical(VertexAddr v) const
{
	if (rooted()) {
		if (v.ascent != 0)
			fail(ErrorKind::malformed_address, "rooted addresses have no ascent: " + format_address(v));
		return v;
	}
	if (v.ascent < 0)
		fail(ErrorKind::malformed_address, "negative ascent: " + format_address(v));
	std::size_t drop = 0;
	while (v.ascent > 0 && drop < v.path.size() && v.path[drop] == spine_index(v.ascent)) {
		--v.ascent;
		++drop;
	}
	v.path.erase(v.path.begin(), v.path.begin() + static_cast<std::ptrdiff_t>(drop));
	return v;
}

bool TreeSpec::is_canonical(const VertexAddr& v) const
{
	if (rooted())
		return v.ascent == 0;
	return v.ascent >= 0 && (v.ascent == 0 || v.path.empty() || v.path.front() != spine_index(v.ascent));
}

void TreeSpec::check(const VertexAddr& v) const
{
	if (!is_canonical(v))
		fail(ErrorKind::malformed_address, "address is not canonical: " + format_address(v));
	VertexAddr cur{v.ascent, {}};
	cur.path.reserve(v.path.size());
	for (auto i : v.path) {
		if (!arity(cur).admits(i))
			fail(ErrorKind::malformed_address,
				 "child index " + std::to_string(i) + " exceeds the arity of " + format_address(cur));
		cur.path.push_back(i);
	}
}

std::optional<std::int64_t> TreeSpec::staircase_level(const VertexAddr& v) const
{
	if (shape_ != TreeShape::staircase || v.path.size() > 62)
		return std::nullopt;
	for (std::size_t j = 0; j < v.path.size(); ++j)
		if (v.path[j] != (std::int64_t{1} << j))
			return std::nullopt;
	return static_cast<std::int64_t>(v.path.size());
}

ChildCount TreeSpec::arity(const VertexAddr& v) const
{
	switch (shape_) {
	case TreeShape::n_adic:
		return adic_;
	case TreeShape::menthe:
		return v.path.empty() ? ChildCount::infinite() : ChildCount(1);
	case TreeShape::staircase:
		if (auto k = staircase_level(v)) {
			if (*k > 61)
				fail(ErrorKind::unsupported, "staircase level too deep for 64-bit child indices");
			return std::int64_t{1} << *k;
		}
		return 1;
	case TreeShape::levels:
		return levels_.at(v.generation());
	case TreeShape::table:
		if (!rooted() && v.ascent > 0 && v.path.empty())
			return spine_arity(v.ascent);
		if (auto it = table_.find(v); it != table_.end())
			return it->second;
		return fallback_;
	}
	return 1;
}

VertexAddr TreeSpec::child(const VertexAddr& v, std::int64_t i) const
{
	if (!rooted() && v.ascent > 0 && v.path.empty() && i == spine_index(v.ascent))
		return VertexAddr{v.ascent - 1, {}};
	VertexAddr c = v;
	c.path.push_back(i);
	return c;
}

std::optional<VertexAddr> TreeSpec::parent(const VertexAddr& v, std::int64_t k) const
{
	if (k < 0)
		fail(ErrorKind::invalid_argument, "parent step must be nonnegative");
	if (!is_canonical(v))
		fail(ErrorKind::malformed_address, "address is not canonical: " + format_address(v));
	auto len = static_cast<std::int64_t>(v.path.size());
	if (k <= len) {
		VertexAddr p{v.ascent, {v.path.begin(), v.path.end() - k}};
		return p;
	}
	if (rooted())
		return std::nullopt;
	return VertexAddr{v.ascent + (k - len), {}};
}

std::optional<std::int64_t> TreeSpec::ancestor_distance(const VertexAddr& anc, const VertexAddr& v) const
{
	auto d = v.generation() - anc.generation();
	if (d < 0)
		return std::nullopt;
	auto p = parent(v, d);
	if (p && *p == anc)
		return d;
	return std::nullopt;
}

std::optional<std::int64_t> TreeSpec::last_branching_ascent() const
{
	if (rooted())
		return std::nullopt;
	auto branching = [](ChildCount c) { return c.is_infinite() || c.value() > 1; };
	std::int64_t top = 0;
	if (shape_ == TreeShape::levels) {
		if (branching(levels_.below))
			return std::nullopt;
		top = std::max<std::int64_t>(top, -levels_.split);
		if (!levels_.overrides.empty())
			top = std::max(top, -levels_.overrides.begin()->first);
	}
	else {
		if (branching(spine_fallback_))
			return std::nullopt;
		if (!spine_arity_.empty())
			top = std::max(top, spine_arity_.rbegin()->first);
	}
	for (std::int64_t k = top; k >= 1; --k)
		if (branching(spine_arity(k)))
			return k;
	return 0;
}

bool TreeSpec::has_free_left_end() const
{
	return last_branching_ascent().has_value();
}

bool walk_subtree(const TreeSpec& spec, const VertexAddr& v, std::int64_t n, std::int64_t budget,
				  const std::function<bool(const VertexAddr&, std::int64_t)>& visit)
{
	if (budget <= 0)
		fail(ErrorKind::invalid_argument, "enumeration budget must be positive");
	if (n < 0)
		fail(ErrorKind::invalid_argument, "descendant depth must be nonnegative");
	if (!visit(v, 0))
		return false;
	if (n == 0)
		return true;

	struct Frame
	{
		VertexAddr vertex;
		std::int64_t depth;
		std::int64_t next;
		ChildCount arity;
	};
	std::vector<Frame> stack;
	stack.push_back({v, 0, 1, spec.arity(v)});
	std::int64_t leaves = 0;
	while (!stack.empty()) {
		auto& top = stack.back();
		if (!top.arity.admits(top.next)) {
			stack.pop_back();
			continue;
		}
		VertexAddr c = spec.child(top.vertex, top.next++);
		auto depth = top.depth + 1;
		if (depth == n) {
			if (leaves == budget)
				return false;
			++leaves;
			if (!visit(c, depth))
				return false;
		}
		else {
			if (!visit(c, depth))
				return false;
			auto a = spec.arity(c);
			stack.push_back({std::move(c), depth, 1, a});
		}
	}
	return true;
}

bool walk_descendants(const TreeSpec& spec, const VertexAddr& v, std::int64_t n, std::int64_t budget,
					  const std::function<bool(const VertexAddr&)>& visit)
{
	return walk_subtree(spec, v, n, budget, [&](const VertexAddr& u, std::int64_t depth) {
		return depth != n || visit(u);
	});
}

Enumeration children_n(const TreeSpec& spec, const VertexAddr& v, std::int64_t n, std::int64_t budget)
{
	spec.check(v);
	Enumeration out;
	out.truncated = !walk_descendants(spec, v, n, budget, [&](const VertexAddr& u) {
		out.vertices.push_back(u);
		return true;
	});
	return out;
}

Enumeration generation(const TreeSpec& spec, std::int64_t n, std::int64_t budget)
{
	if (budget <= 0)
		fail(ErrorKind::invalid_argument, "enumeration budget must be positive");
	if (spec.rooted()) {
		if (n < 0)
			fail(ErrorKind::invalid_argument, "rooted trees have no negative generations");
		return children_n(spec, VertexAddr::anchor(), n, budget);
	}

	Enumeration out;
	auto collect = [&](const VertexAddr& u) {
		out.vertices.push_back(u);
		return true;
	};
	auto remaining = [&] { return budget - static_cast<std::int64_t>(out.vertices.size()); };

	std::int64_t k0 = std::max<std::int64_t>(0, -n);
	if (!walk_descendants(spec, VertexAddr{k0, {}}, n + k0, budget, collect)) {
		out.truncated = true;
		return out;
	}
	auto last = spec.last_branching_ascent();
	for (std::int64_t k = k0 + 1; !last || k <= *last; ++k) {
		auto arity = spec.spine_arity(k);
		auto s = spec.spine_index(k);
		for (std::int64_t i = 1; arity.admits(i); ++i) {
			if (i == s)
				continue;
			if (remaining() <= 0) {
				out.truncated = true;
				return out;
			}
			VertexAddr side{k, {i}};
			if (!walk_descendants(spec, side, n + k - 1, remaining(), collect)) {
				out.truncated = true;
				return out;
			}
		}
	}
	return out;
}

std::optional<double> count_descendants(const TreeSpec& spec, const VertexAddr& v, std::int64_t n)
{
	if (n < 0)
		fail(ErrorKind::invalid_argument, "descendant depth must be nonnegative");
	const double inf = std::numeric_limits<double>::infinity();
	switch (spec.shape()) {
	case TreeShape::n_adic:
		return std::pow(static_cast<double>(spec.adic()), static_cast<double>(n));
	case TreeShape::menthe:
		return v.path.empty() && n > 0 ? inf : 1.0;
	case TreeShape::staircase:
		if (auto k = spec.staircase_level(v)) {
			// r_k contributes 2^k - 1 rays and passes one branch on to r_{k+1}
			return std::ldexp(std::ldexp(1.0, static_cast<int>(n)) - 1.0, static_cast<int>(*k))
				- static_cast<double>(n) + 1.0;
		}
		return 1.0;
	case TreeShape::levels: {
		double count = 1;
		for (std::int64_t i = 0; i < n; ++i) {
			auto a = spec.level_arity().at(v.generation() + i);
			if (a.is_infinite())
				return inf;
			count *= static_cast<double>(a.value());
		}
		return count;
	}
	case TreeShape::table:
		return std::nullopt;
	}
	return std::nullopt;
}

FertilityVerdict find_fertile(const TreeSpec& spec, std::int64_t horizon, std::int64_t budget)
{
	if (!spec.rooted())
		fail(ErrorKind::unsupported, "fertility is only decided for rooted trees");
	if (horizon <= 0)
		fail(ErrorKind::invalid_argument, "horizon must be positive");

	FertilityVerdict out;
	out.horizon = horizon;
	auto fertile = [&](std::string why) {
		out.kind = FertilityVerdict::Kind::fertile;
		out.certificate = std::move(why);
		return out;
	};
	auto none = [&](std::string why) {
		out.kind = FertilityVerdict::Kind::proven_none;
		out.certificate = std::move(why);
		return out;
	};

	switch (spec.shape()) {
	case TreeShape::n_adic:
		if (spec.adic() >= 2)
			return fertile("|X^n(w)| = " + std::to_string(spec.adic()) + "^n for every vertex w");
		return none("the tree is a single ray: |X^n(w)| = 1 for every vertex w");
	case TreeShape::menthe:
		return none("every vertex other than the root lies on a ray with |X^n(w)| = 1");
	case TreeShape::staircase:
		return none("every r_k has a child starting a stationary ray, and rays have |X^n(w)| = 1");
	case TreeShape::levels: {
		auto above = spec.level_arity().above;
		if (above.is_infinite() || above.value() >= 2)
			return fertile("every generation past " + std::to_string(spec.level_arity().split)
						   + " has arity " + to_string(above) + ", so |X^n(w)| grows without bound");
		return none("arity is 1 past a finite generation, so every vertex has a descendant with |X^n(w)| = 1");
	}
	case TreeShape::table:
		break;
	}

	// Horizon verdict: breadth-first over strict descendants of the root.
	constexpr std::int64_t kMaxExamined = 64;
	out.kind = FertilityVerdict::Kind::inconclusive;
	out.vertex = VertexAddr::anchor();
	out.min_count = std::numeric_limits<double>::infinity();
	std::deque<std::pair<VertexAddr, std::int64_t>> queue{{VertexAddr::anchor(), 0}};
	while (!queue.empty() && out.examined < kMaxExamined) {
		auto [w, depth] = queue.front();
		queue.pop_front();
		if (depth > 0) {
			std::int64_t count = 0;
			walk_descendants(spec, w, horizon, budget, [&](const VertexAddr&) {
				++count;
				return true;
			});
			out.min_count = std::min(out.min_count, static_cast<double>(count));
			++out.examined;
		}
		if (depth < horizon) {
			auto a = spec.arity(w);
			for (std::int64_t i = 1; a.admits(i) && static_cast<std::int64_t>(queue.size()) < kMaxExamined; ++i)
				queue.emplace_back(spec.child(w, i), depth + 1);
		}
	}
	out.certificate = "min |X^" + std::to_string(horizon) + "(w)| over " + std::to_string(out.examined)
		+ " examined strict descendants";
	return out;
}

} // namespace treeshift
