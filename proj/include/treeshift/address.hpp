#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace treeshift {

/// Address of a vertex: climb `ascent` parents from the anchor (the root of a
/// rooted tree), then descend along `path`, whose entries are 1-based child
/// indices.
///
/// Text form: "@" for the anchor, "@^k" for its k-th ancestor, and ".i"
/// for each descent step, e.g. "@.1.2" or "@^2.3.1".
struct VertexAddr
{
	std::int64_t ascent = 0;
	std::vector<std::int64_t> path;

	static VertexAddr anchor() { return {}; }

	/// Signed level relative to the anchor (depth for rooted trees).
	std::int64_t generation() const
	{
		return static_cast<std::int64_t>(path.size()) - ascent;
	}

	friend bool operator==(const VertexAddr&, const VertexAddr&) = default;
	friend std::strong_ordering operator<=>(const VertexAddr& a, const VertexAddr& b)
	{
		if (auto c = a.ascent <=> b.ascent; c != 0)
			return c;
		return std::lexicographical_compare_three_way(a.path.begin(), a.path.end(),
													  b.path.begin(), b.path.end());
	}
};

std::string format_address(const VertexAddr& v);

/// Throws Error(malformed_address) on syntax errors.
VertexAddr parse_address(std::string_view text);

} // namespace treeshift
