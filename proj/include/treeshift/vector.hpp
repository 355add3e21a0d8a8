#pragma once

#include "treeshift/address.hpp"
#include "treeshift/space.hpp"

#include <complex>
#include <map>

namespace treeshift {

using cx = std::complex<double>;

/// Finitely supported complex function on vertices. Zero entries are never
/// stored.
class FinSuppVec
{
public:
	using Map = std::map<VertexAddr, cx>;

	FinSuppVec() = default;
	explicit FinSuppVec(Map entries);

	static FinSuppVec basis(const VertexAddr& v, cx c = 1);

	const Map& entries() const { return entries_; }
	bool empty() const { return entries_.empty(); }
	std::size_t size() const { return entries_.size(); }
	cx at(const VertexAddr& v) const;

	void set(const VertexAddr& v, cx c);
	void add(const VertexAddr& v, cx c);

	FinSuppVec& operator+=(const FinSuppVec& o);
	FinSuppVec& operator-=(const FinSuppVec& o);
	FinSuppVec& operator*=(cx c);

	friend FinSuppVec operator+(FinSuppVec a, const FinSuppVec& b) { return a += b; }
	friend FinSuppVec operator-(FinSuppVec a, const FinSuppVec& b) { return a -= b; }
	friend FinSuppVec operator*(cx c, FinSuppVec a) { return a *= c; }
	friend bool operator==(const FinSuppVec&, const FinSuppVec&) = default;

private:
	Map entries_;
};

double norm(const FinSuppVec& f, const SpaceTag& s);
double sup_norm(const FinSuppVec& f);

FinSuppVec cw_product(const FinSuppVec& f, const FinSuppVec& g);

/// Principal-branch power z ↦ exp(s Log z), entrywise.
FinSuppVec power(const FinSuppVec& f, double s);
cx principal_power(cx z, double s);

/// f^m by repeated coordinatewise multiplication (m >= 0; f^0 is the
/// indicator of supp f).
FinSuppVec int_power(const FinSuppVec& f, int m);

/// f_1^{β_1} ··· f_d^{β_d}.
FinSuppVec monomial(const std::vector<FinSuppVec>& f, const std::vector<int>& beta);

} // namespace treeshift
