#include "treeshift/vector.hpp"

#include "treeshift/error.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace treeshift {

namespace {

constexpr double kPurge = 1e-300;

bool negligible(cx z)
{
	return std::abs(z) < kPurge;
}

} // namespace

FinSuppVec::FinSuppVec(Map entries) : entries_(std::move(entries))
{
	std::erase_if(entries_, [](const auto& kv) { return negligible(kv.second); });
}

FinSuppVec FinSuppVec::basis(const VertexAddr& v, cx c)
{
	FinSuppVec f;
	f.set(v, c);
	return f;
}

cx FinSuppVec::at(const VertexAddr& v) const
{
	auto it = entries_.find(v);
	return it == entries_.end() ? cx(0) : it->second;
}

void FinSuppVec::set(const VertexAddr& v, cx c)
{
	if (negligible(c))
		entries_.erase(v);
	else
		entries_[v] = c;
}

void FinSuppVec::add(const VertexAddr& v, cx c)
{
	set(v, at(v) + c);
}

FinSuppVec& FinSuppVec::operator+=(const FinSuppVec& o)
{
	for (auto& [v, c] : o.entries_)
		add(v, c);
	return *this;
}

FinSuppVec& FinSuppVec::operator-=(const FinSuppVec& o)
{
	for (auto& [v, c] : o.entries_)
		add(v, -c);
	return *this;
}

FinSuppVec& FinSuppVec::operator*=(cx c)
{
	for (auto& [v, z] : entries_)
		z *= c;
	std::erase_if(entries_, [](const auto& kv) { return negligible(kv.second); });
	return *this;
}

double sup_norm(const FinSuppVec& f)
{
	double m = 0;
	for (auto& [v, z] : f.entries())
		m = std::max(m, std::abs(z));
	return m;
}

double norm(const FinSuppVec& f, const SpaceTag& s)
{
	if (s.kind == SpaceTag::Kind::c0)
		return sup_norm(f);
	double p = s.kind == SpaceTag::Kind::l1 ? 1.0 : s.p;
	// Scale by the largest modulus so that large exponents do not overflow.
	double top = sup_norm(f);
	if (top == 0)
		return 0;
	double acc = 0;
	for (auto& [v, z] : f.entries())
		acc += std::pow(std::abs(z) / top, p);
	return top * std::pow(acc, 1 / p);
}

FinSuppVec cw_product(const FinSuppVec& f, const FinSuppVec& g)
{
	const auto& small = f.size() <= g.size() ? f : g;
	const auto& large = f.size() <= g.size() ? g : f;
	FinSuppVec out;
	for (auto& [v, z] : small.entries())
		if (auto w = large.at(v); w != cx(0))
			out.set(v, z * w);
	return out;
}

cx principal_power(cx z, double s)
{
	if (z == cx(0))
		return 0;
	if (s == 1)
		return z;
	return std::polar(std::pow(std::abs(z), s), s * std::arg(z));
}

FinSuppVec power(const FinSuppVec& f, double s)
{
	if (!(s > 0))
		fail(ErrorKind::invalid_argument, "power exponent must be positive");
	FinSuppVec out;
	for (auto& [v, z] : f.entries())
		out.set(v, principal_power(z, s));
	return out;
}

FinSuppVec int_power(const FinSuppVec& f, int m)
{
	if (m < 0)
		fail(ErrorKind::invalid_argument, "integer power must be nonnegative");
	FinSuppVec out;
	for (auto& [v, z] : f.entries()) {
		cx acc = 1;
		for (int i = 0; i < m; ++i)
			acc *= z;
		out.set(v, acc);
	}
	return out;
}

FinSuppVec monomial(const std::vector<FinSuppVec>& f, const std::vector<int>& beta)
{
	if (f.size() != beta.size() || f.empty())
		fail(ErrorKind::invalid_argument, "monomial needs one exponent per vector");
	std::optional<FinSuppVec> out;
	for (std::size_t j = 0; j < f.size(); ++j) {
		if (beta[j] == 0)
			continue;
		auto term = int_power(f[j], beta[j]);
		out = out ? cw_product(*out, term) : term;
	}
	if (!out)
		fail(ErrorKind::invalid_argument, "monomial exponent must not be all zero");
	return *out;
}

} // namespace treeshift
