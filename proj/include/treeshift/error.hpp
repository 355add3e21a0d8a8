#pragma once

#include <stdexcept>
#include <string>

namespace treeshift {

enum class ErrorKind {
	invalid_argument,
	malformed_address,
	not_an_ancestor,
	unsupported,
	unsupported_construction,
	degenerate_exponents,
	needs_larger_n,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error
{
public:
	Error(ErrorKind kind, const std::string& what)
		: std::runtime_error(std::string(to_string(kind)) + ": " + what)
		, kind_(kind)
	{
	}

	ErrorKind kind() const { return kind_; }

private:
	ErrorKind kind_;
};

/// Raised by the witness builders when the iterate is too small for the
/// support of the input vectors. Carries the smallest iterate that works.
class NeedsLargerN : public Error
{
public:
	NeedsLargerN(int minimal_n, const std::string& what)
		: Error(ErrorKind::needs_larger_n,
				what + " (minimal admissible n = " + std::to_string(minimal_n) + ")")
		, minimal_n_(minimal_n)
		, detail_(what)
	{
	}

	int minimal_n() const { return minimal_n_; }
	const std::string& detail() const { return detail_; }

private:
	int minimal_n_;
	std::string detail_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what)
{
	throw Error(kind, what);
}

} // namespace treeshift
