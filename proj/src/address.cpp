#include "treeshift/address.hpp"

#include "treeshift/error.hpp"

#include <charconv>

namespace treeshift {

const char* to_string(ErrorKind kind)
{
	switch (kind) {
	case ErrorKind::invalid_argument: return "invalid-argument";
	case ErrorKind::malformed_address: return "malformed-address";
	case ErrorKind::not_an_ancestor: return "not-an-ancestor";
	case ErrorKind::unsupported: return "unsupported";
	case ErrorKind::unsupported_construction: return "unsupported-construction";
	case ErrorKind::degenerate_exponents: return "degenerate-P";
	case ErrorKind::needs_larger_n: return "needs-larger-n";
	}
	return "error";
}

std::string format_address(const VertexAddr& v)
{
	std::string out = "@";
	if (v.ascent != 0)
		out += "^" + std::to_string(v.ascent);
	for (auto i : v.path)
		out += "." + std::to_string(i);
	return out;
}

namespace {

std::int64_t parse_int(std::string_view text, std::string_view whole)
{
	std::int64_t value = 0;
	auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
	if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
		fail(ErrorKind::malformed_address, "bad integer in address '" + std::string(whole) + "'");
	return value;
}

} // namespace

VertexAddr parse_address(std::string_view text)
{
	const auto whole = text;
	if (text.empty() || text.front() != '@')
		fail(ErrorKind::malformed_address, "address must start with '@': '" + std::string(whole) + "'");
	text.remove_prefix(1);

	VertexAddr v;
	if (!text.empty() && text.front() == '^') {
		text.remove_prefix(1);
		auto dot = text.find('.');
		v.ascent = parse_int(text.substr(0, dot), whole);
		if (v.ascent < 0)
			fail(ErrorKind::malformed_address, "negative ascent in '" + std::string(whole) + "'");
		text = dot == std::string_view::npos ? std::string_view{} : text.substr(dot);
	}
	while (!text.empty()) {
		if (text.front() != '.')
			fail(ErrorKind::malformed_address, "expected '.' in '" + std::string(whole) + "'");
		text.remove_prefix(1);
		auto dot = text.find('.');
		auto index = parse_int(text.substr(0, dot), whole);
		if (index < 1)
			fail(ErrorKind::malformed_address, "child indices are 1-based: '" + std::string(whole) + "'");
		v.path.push_back(index);
		text = dot == std::string_view::npos ? std::string_view{} : text.substr(dot);
	}
	return v;
}

} // namespace treeshift
