#include "treeshift/space.hpp"

#include "treeshift/error.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace treeshift {

SpaceTag SpaceTag::lp(double p)
{
	if (!(p > 1) || !std::isfinite(p))
		fail(ErrorKind::invalid_argument, "l^p needs 1 < p < infinity");
	return {Kind::lp, p};
}

SpaceTag SpaceTag::parse(std::string_view text)
{
	if (text == "l1")
		return l1();
	if (text == "c0")
		return c0();
	std::string_view rest;
	if (text.substr(0, 3) == "lp:")
		rest = text.substr(3);
	else if (text.size() > 1 && text.front() == 'l')
		rest = text.substr(1);
	else
		fail(ErrorKind::invalid_argument, "unknown space '" + std::string(text) + "'");
	std::string s(rest);
	char* end = nullptr;
	double p = std::strtod(s.c_str(), &end);
	if (s.empty() || end != s.c_str() + s.size())
		fail(ErrorKind::invalid_argument, "unknown space '" + std::string(text) + "'");
	if (p == 1)
		return l1();
	return lp(p);
}

std::string SpaceTag::name() const
{
	switch (kind) {
	case Kind::l1: return "l1";
	case Kind::c0: return "c0";
	case Kind::lp: {
		std::ostringstream os;
		os << 'l' << p;
		return os.str();
	}
	}
	return "?";
}

} // namespace treeshift
